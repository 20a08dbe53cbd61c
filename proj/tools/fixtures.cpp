// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "groundseq/filter.hpp"
#include "groundseq/psr.hpp"
#include "groundseq/wire.hpp"

namespace groundseq::fixtures {

namespace {

std::string printf_string(const char* fmt, int v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Fisher-Yates on our own engine; std::shuffle differs between standard libraries.
template <typename T>
void shuffle(std::vector<T>& v, rng::Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  }
}

const std::vector<std::string>& caption_pool() {
  static const std::vector<std::string> pool = {
      "A girl in pink shirt and golden hair is playing with her golden retriever on the bed",
      "A brown dog is sitting on the sofa next to a small cat",
      "A man rides a bicycle along the river while a bird flies overhead",
      "An old woman reads a book on a wooden bench in the park",
      "A cat watches the street through the window with great patience",
      "Two horses graze in a green field near a red barn",
      "A boy throws a ball to a fluffy puppy on the beach",
      "A child holds a yellow umbrella beside a blue car",
      "The chef places a pizza on the table next to a bottle",
      "A woman plays the guitar under a tree by the lake",
  };
  return pool;
}

BoundingBox random_box(rng::Rng& rng, int margin, double confidence) {
  BoundingBox b;
  b.x1 = rng.uniform_int(margin, 999 - margin - 300);
  b.y1 = rng.uniform_int(margin, 999 - margin - 300);
  b.x2 = b.x1 + rng.uniform_int(80, 300);
  b.y2 = b.y1 + rng.uniform_int(80, 300);
  b.confidence = confidence;
  return b;
}

}  // namespace

Corpus calibrated_corpus(std::uint64_t seed, int n) {
  Corpus c;
  c.stub = gateway::StubConfig::with_defaults(seed);
  c.stub.ocr.fallback = 0.0;
  c.stub.motion.fallback = 0.1;
  c.stub.aesthetic.fallback = 6.2;
  const gateway::StubGateway chunker(c.stub);
  const filter::FilterConfig defaults;

  rng::Rng rng(seed);
  const int per_stage = n / 10;
  std::vector<std::string> plan;
  for (const char* stage : {"subtitle", "scene_change", "aesthetic"}) {
    plan.insert(plan.end(), static_cast<std::size_t>(per_stage), stage);
  }
  plan.resize(static_cast<std::size_t>(n), "keep");
  shuffle(plan, rng);

  for (int i = 0; i < n; ++i) {
    VideoRecord v;
    v.video_id = printf_string("vid%03d", i);
    v.fps = i % 3 == 0 ? Fps{30000, 1001} : Fps{25, 1};
    v.source_tag = "synthetic";
    const int frames = 30 + rng.uniform_int(0, 40);
    for (int k = 1; k <= frames; ++k) {
      v.frames.push_back({k, v.video_id + printf_string("/frame_%04d.jpg", k), 640, 360});
    }
    const std::string& stage = plan[static_cast<std::size_t>(i)];
    c.intended_verdict[v.video_id] = stage;
    if (stage == "subtitle") {
      for (const auto& f : v.frames) c.stub.ocr.values[f.uri] = 0.05;
    } else if (stage == "scene_change") {
      const auto idx = filter::sample_frame_indices(frames, defaults.frames_sampled_per_video);
      for (std::size_t k = 1; k < idx.size(); ++k) {
        c.stub.motion.values[v.frames[static_cast<std::size_t>(idx[k - 1] - 1)].uri + "|" +
                             v.frames[static_cast<std::size_t>(idx[k] - 1)].uri] = 0.95;
      }
    } else if (stage == "aesthetic") {
      for (const auto& f : v.frames) c.stub.aesthetic.values[f.uri] = 3.0;
    }

    const auto& pool = caption_pool();
    const std::string& caption = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
    c.stub.canned_captions[v.frames.front().uri] = caption;
    for (const auto& chunk : chunker.noun_chunks(caption)) {
      const std::string key = v.frames.front().uri + "|" + chunk.text;
      const double roll = rng.uniform();
      if (roll < 0.08) continue;  // no detection
      std::vector<BoundingBox> boxes;
      if (roll < 0.16) {
        boxes.push_back(random_box(rng, 150, 0.2));
      } else {
        const double conf = 0.5 + 0.45 * rng.uniform();
        boxes.push_back(random_box(rng, 150, conf));
        if (rng.uniform() < 0.3) boxes.push_back(random_box(rng, 150, conf * 0.5));
      }
      c.stub.detections[key] = boxes;
      gateway::TrackScenario s;
      s.dx = rng.uniform_int(-3, 3);
      s.dy = rng.uniform_int(-3, 3);
      const double fate = rng.uniform();
      if (fate < 0.05) {
        s.fail = true;
      } else if (fate < 0.2) {
        s.lost_from = rng.uniform_int(10, 60);
      }
      c.stub.tracks[v.video_id + "|" + chunk.text] = s;
    }
    c.videos.push_back(std::move(v));
  }
  return c;
}

std::vector<eval::BenchCase> bench_cases(int subjects, int prompts_per_subject) {
  static const std::vector<std::string> kSubjects = {
      "backpack", "bear_plushie", "berry_bowl", "can", "candle", "cat", "cat2", "clock",
      "colorful_sneaker", "dog", "dog2", "dog3", "dog5", "dog6", "dog7", "dog8",
      "duck_toy", "fancy_boot", "grey_sloth_plushie", "monster_toy", "pink_sunglasses",
      "poop_emoji", "rc_car", "red_cartoon", "robot_toy", "shiny_sneaker", "teapot",
      "vase", "wolf_plushie", "backpack_dog"};
  static const std::vector<std::string> kTemplates = {
      "a {} in the jungle", "a {} in the snow", "a {} on the beach",
      "a {} on a cobblestone street", "a {} on top of pink fabric", "a {} on top of a wooden floor",
      "a {} with a city in the background", "a {} with a mountain in the background",
      "a {} with a blue house in the background", "a {} on top of a purple rug in a forest",
      "a {} with a wheat field in the background", "a {} with a tree and autumn leaves in the background",
      "a {} with the Eiffel Tower in the background", "a {} floating on top of water",
      "a {} floating in an ocean of milk", "a {} on top of green grass with sunflowers around it",
      "a {} on top of a mirror", "a {} on top of the sidewalk in a crowded street",
      "a {} on top of a dirt road", "a {} on top of a white rug", "a red {}", "a purple {}",
      "a shiny {}", "a wet {}", "a cube shaped {}"};
  if (subjects < 1 || subjects > static_cast<int>(kSubjects.size()) || prompts_per_subject < 1 ||
      prompts_per_subject > static_cast<int>(kTemplates.size())) {
    throw ValidationError("bench_cases: subject or prompt count out of range");
  }
  std::vector<eval::BenchCase> out;
  for (int s = 0; s < subjects; ++s) {
    const std::string& subject = kSubjects[static_cast<std::size_t>(s)];
    std::vector<std::string> refs;
    for (int k = 0; k < 4 + s % 3; ++k) refs.push_back("dreambench/" + subject + printf_string("/%02d.jpg", k));
    std::string noun = subject;
    std::replace(noun.begin(), noun.end(), '_', ' ');
    for (int p = 0; p < prompts_per_subject; ++p) {
      std::string prompt = kTemplates[static_cast<std::size_t>(p)];
      prompt.replace(prompt.find("{}"), 2, noun);
      out.push_back({subject + printf_string("_p%02d", p), subject, refs, prompt});
    }
  }
  return out;
}

namespace {

const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {
      "dog", "cat", "girl", "retriever", "bed", "sofa", "the", "a", "is", "on", "with",
      "golden", "pink", "café", "naïve", "日本の", "猫", "🐕", "x[1]", "50%", "don't",
      "\"quoted\"", "tab-free", "über", "ñandú", "{brace}", "a&b", "end."};
  return words;
}

std::string random_uri(rng::Rng& rng, const std::string& video_id, int id, int ref) {
  switch (rng.uniform_int(0, 3)) {
    case 0: return gateway::segment_uri(video_id, id, ref);
    case 1: return "s3://bucket/" + video_id + "/seg " + std::to_string(id) + ".png";
    case 2: return "masks/" + std::to_string(id) + "/ñ-" + std::to_string(ref) + ".png?v=1&k=2";
    default: return "file:///data/" + video_id + "_" + std::to_string(id) + "#frag";
  }
}

FramePairSample frame_pair_with(rng::Rng& rng, int n_words, int n_instances,
                                const std::vector<std::string>& words) {
  FramePairSample s;
  s.video_id = printf_string("rv%05d", rng.uniform_int(0, 99999));
  std::vector<std::size_t> starts, ends;
  for (int w = 0; w < n_words; ++w) {
    if (w) s.caption += ' ';
    starts.push_back(s.caption.size());
    s.caption += words[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(words.size()) - 1))];
    ends.push_back(s.caption.size());
  }
  std::vector<int> picks;
  for (int w = 0; w < n_words; ++w) picks.push_back(w);
  shuffle(picks, rng);
  picks.resize(static_cast<std::size_t>(std::min(n_instances, n_words)));
  std::sort(picks.begin(), picks.end());
  const int t_refs[] = {1, 2, 8, 25, 50};
  s.t_ref = t_refs[rng.uniform_int(0, 4)];
  const int target = rng.uniform_int(1, 100);
  s.target_frame = {target, s.video_id + printf_string("/frame_%04d.jpg", target), 1280, 720};
  s.reference_frame_index = target + s.t_ref;
  int id = 0;
  for (int w : picks) {
    GroundedInstance g;
    const auto k = static_cast<std::size_t>(w);
    g.chunk = {s.caption.substr(starts[k], ends[k] - starts[k]), starts[k], ends[k], ++id};
    g.box = random_box(rng, 0, std::round(rng.uniform() * 1000.0) / 1000.0);
    g.segment_uri = random_uri(rng, s.video_id, id, s.reference_frame_index);
    s.instances.push_back(std::move(g));
  }
  return s;
}

}  // namespace

FramePairSample random_frame_pair(rng::Rng& rng) {
  return frame_pair_with(rng, rng.uniform_int(1, 24), rng.uniform_int(0, 6), word_pool());
}

store::Manifest synthetic_stats_manifest(std::size_t frame_pairs, std::size_t psr_samples,
                                         std::uint64_t seed) {
  static const std::vector<std::string> plain = {"dog", "cat", "girl", "bed", "sofa", "the", "a",
                                                 "is", "on", "with", "golden", "park", "ball"};
  rng::Rng rng(seed);
  store::Manifest m;
  for (std::size_t i = 0; i < frame_pairs; ++i) {
    const double u = rng.uniform();
    const int instances = u < 0.25 ? 4 : (u < 0.85 ? 5 : 6);
    const int tokens = rng.uniform() < 0.4 ? 26 : 25;
    m.records.emplace_back(frame_pair_with(rng, tokens, instances, plain));
  }
  const auto sentence = [&](int n) {
    std::string s;
    for (int w = 0; w < n; ++w) {
      if (w) s += ' ';
      s += plain[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(plain.size()) - 1))];
    }
    return s;
  };
  for (std::size_t i = 0; i < psr_samples; ++i) {
    const int brief = rng.uniform() < 0.2 ? 11 : 10;
    const int dense = rng.uniform() < 0.6 ? 80 : 79;
    const auto rec = psr::RecaptionRecord::make(printf_string("images/%06d.jpg", static_cast<int>(i)),
                                                sentence(brief), sentence(dense));
    m.records.emplace_back(psr::build_psr_sample(rec));
  }
  return m;
}

std::vector<std::string> sweep_prompts() {
  return {"a dog", "a puppy on the grass", "a brown dog", "a dog in the sun", "a small puppy"};
}

std::vector<WireExchange> wire_exchanges() {
  using gateway::Service;
  gateway::StubConfig c = gateway::StubConfig::with_defaults(3);
  c.canned_captions["clip/0001.jpg"] = "a brown dog sits on the red sofa";
  c.ocr.values["clip/0001.jpg"] = 0.004;
  c.motion.values["clip/0001.jpg|clip/0002.jpg"] = 0.12;
  c.aesthetic.values["clip/0001.jpg"] = 5.75;
  c.detections["clip/0001.jpg|a brown dog"] = {{120, 200, 480, 910, 0.87}, {600, 210, 700, 400, 0.31}};
  c.tracks["clip|a brown dog"] = gateway::TrackScenario{4, 2, -1, false};
  const gateway::StubGateway gw(c);

  VideoRecord v{"clip", {}, {30000, 1001}, "clips/clip.mp4"};
  for (int i = 1; i <= 5; ++i) v.frames.push_back({i, printf_string("clip/%04d.jpg", i), 640, 360});
  const FrameRef& f1 = v.frames[0];
  const BoundingBox box{120, 200, 480, 910, 0.87};
  const gateway::TrackInit init{1, box, box.center(), NounChunk{"a brown dog", 0, 11, 1}};
  const auto& lm = gw.config().lm;
  const std::vector<int> prefix = {lm.id_of("a"), lm.id_of("brown")};

  ImageBuffer grey(4, 4);
  std::fill(grey.data.begin(), grey.data.end(), std::uint8_t{128});
  const auto resolve = [&](const std::string& uri) {
    ImageBuffer b(4, 4);
    if (uri == "out/b.png") b = grey;
    b.uri = uri;
    return b;
  };

  const std::vector<std::pair<Service, json>> requests = {
      {Service::kCaption, wire::caption_request(f1)},
      {Service::kNounChunks, wire::noun_chunks_request("a brown dog sits on the red sofa")},
      {Service::kDetect, wire::detect_request(f1, "a brown dog")},
      {Service::kTrack, wire::track_request(v, init)},
      {Service::kOcr, wire::ocr_request(f1)},
      {Service::kMotion, wire::motion_request(f1, v.frames[1])},
      {Service::kAesthetic, wire::aesthetic_request(f1)},
      {Service::kEmbed, wire::embed_request("a photo of a dog", gateway::EmbedSpace::kClipText)},
      {Service::kPerceptual, wire::perceptual_request("out/a.png", "out/b.png")},
      {Service::kLm, wire::lm_request(prefix, "a dog")},
  };
  std::vector<WireExchange> out;
  for (const auto& [s, req] : requests) out.push_back({s, req, wire::dispatch(gw, s, req, resolve)});
  return out;
}

}  // namespace groundseq::fixtures
