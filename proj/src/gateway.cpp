// SPDX-License-Identifier: Apache-2.0
#include "groundseq/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include <httplib.h>

#include "groundseq/rng.hpp"
#include "groundseq/wire.hpp"

namespace groundseq::gateway {

std::string_view service_name(Service s) {
  switch (s) {
    case Service::kCaption: return "caption";
    case Service::kNounChunks: return "noun_chunks";
    case Service::kDetect: return "detect";
    case Service::kTrack: return "track";
    case Service::kOcr: return "ocr";
    case Service::kMotion: return "motion";
    case Service::kAesthetic: return "aesthetic";
    case Service::kEmbed: return "embed";
    case Service::kPerceptual: return "perceptual";
    case Service::kLm: return "lm";
  }
  return "unknown";
}

std::optional<Service> parse_service(std::string_view name) {
  for (Service s : kAllServices) {
    if (service_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view embed_space_name(EmbedSpace s) {
  switch (s) {
    case EmbedSpace::kDino: return "dino";
    case EmbedSpace::kClipImage: return "clip_image";
    case EmbedSpace::kClipText: return "clip_text";
  }
  return "unknown";
}

std::optional<EmbedSpace> parse_embed_space(std::string_view name) {
  for (EmbedSpace s : {EmbedSpace::kDino, EmbedSpace::kClipImage, EmbedSpace::kClipText}) {
    if (embed_space_name(s) == name) return s;
  }
  return std::nullopt;
}

ValidationReport validate(const ServiceEndpoint& e) {
  ValidationReport r;
  if (e.base_url.empty()) r.add("base_url", "base_url non-empty");
  if (e.timeout_ms <= 0) r.add("timeout_ms", "timeout_ms > 0");
  if (e.retry_limit < 0) r.add("retry_limit", "retry_limit >= 0");
  return r;
}

std::string segment_uri(std::string_view video_id, int chunk_id, int frame_index) {
  return std::string(video_id) + "/" + std::to_string(chunk_id) + "/" +
         std::to_string(frame_index) + ".png";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool word_byte(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c == '-' || c >= 0x80;
}

struct Word {
  std::size_t start;
  std::size_t end;
  std::string lower;
};

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) ++i;
    words.push_back({start, i, lower(text.substr(start, i - start))});
  }
  return words;
}

std::string head_word(std::string_view chunk_text) {
  auto words = split_words(chunk_text);
  return words.empty() ? std::string() : words.back().lower;
}

[[noreturn]] void bad_response(Service s, const std::string& detail) {
  throw ServiceError("invalid " + std::string(service_name(s)) + " response: " + detail);
}

void check(Service s, const ValidationReport& r) {
  if (!r.ok()) bad_response(s, r.to_string());
}

}  // namespace

// ---------------------------------------------------------------------------
// StopList

StopList::StopList() {
  for (auto w : default_abstract_nouns()) words_.emplace(w);
}

bool StopList::contains(std::string_view word) const { return words_.count(lower(word)) > 0; }

bool StopList::excludes(std::string_view chunk_text) const {
  const std::string head = head_word(chunk_text);
  return !head.empty() && words_.count(head) > 0;
}

// ---------------------------------------------------------------------------
// ModelGateway: validated public surface

std::string ModelGateway::caption(const FrameRef& frame) const {
  std::string out = do_caption(frame);
  if (whitespace_token_count(out) == 0) bad_response(Service::kCaption, "empty caption");
  return out;
}

std::vector<NounChunk> ModelGateway::noun_chunks(std::string_view caption) const {
  if (whitespace_token_count(caption) == 0) throw ValidationError("noun_chunks: empty caption");
  std::vector<NounChunk> raw = do_noun_chunks(caption);
  check(Service::kNounChunks, validate(std::span<const NounChunk>(raw), caption));
  std::stable_sort(raw.begin(), raw.end(),
                   [](const NounChunk& a, const NounChunk& b) { return a.start < b.start; });
  std::vector<NounChunk> out;
  for (auto& c : raw) {
    if (stop_list_.excludes(c.text)) continue;
    c.chunk_id = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<BoundingBox> ModelGateway::detect(const FrameRef& frame, std::string_view phrase) const {
  if (whitespace_token_count(phrase) == 0) throw ValidationError("detect: empty phrase");
  std::vector<BoundingBox> boxes = do_detect(frame, phrase);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    ValidationReport r;
    r.merge(validate(boxes[i]), "boxes[" + std::to_string(i) + "]");
    check(Service::kDetect, r);
  }
  std::stable_sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.confidence > b.confidence;
  });
  return boxes;
}

InstanceTrack ModelGateway::track(const VideoRecord& video, const TrackInit& init) const {
  require_valid(validate(video), "track: video");
  require_valid(validate(init.box), "track: init box");
  if (video.frame(init.frame_index) == nullptr) {
    throw ValidationError("track: init frame " + std::to_string(init.frame_index) +
                          " not in video " + video.video_id);
  }
  InstanceTrack t = do_track(video, init);
  ValidationReport r = validate(t, video);
  if (!(t.chunk == init.chunk)) r.add("chunk", "track chunk equals init chunk");
  for (int f = init.frame_index; f <= video.frame_count(); ++f) {
    auto it = t.per_frame.find(f);
    if (it == t.per_frame.end()) {
      if (!t.lost_frames.count(f)) r.add("per_frame", "frame " + std::to_string(f) + " neither tracked nor lost");
    } else if (it->second.segment_uri != segment_uri(video.video_id, init.chunk.chunk_id, f)) {
      r.add("per_frame", "segment uri scheme at frame " + std::to_string(f));
    }
  }
  check(Service::kTrack, r);
  return t;
}

double ModelGateway::ocr_text_ratio(const FrameRef& frame) const {
  const double v = do_ocr_text_ratio(frame);
  if (!(v >= 0.0 && v <= 1.0)) bad_response(Service::kOcr, "text ratio outside [0, 1]");
  return v;
}

double ModelGateway::motion_score(const FrameRef& a, const FrameRef& b) const {
  const double v = do_motion_score(a, b);
  if (!(v >= 0.0) || std::isnan(v)) bad_response(Service::kMotion, "negative motion score");
  return v;
}

double ModelGateway::aesthetic_score(const FrameRef& frame) const {
  const double v = do_aesthetic_score(frame);
  if (!(v >= 0.0 && v <= 10.0)) bad_response(Service::kAesthetic, "score outside [0, 10]");
  return v;
}

std::vector<double> ModelGateway::embed(std::string_view payload, EmbedSpace space) const {
  std::vector<double> v = do_embed(payload, space);
  if (v.empty()) bad_response(Service::kEmbed, "empty vector");
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (!(std::abs(std::sqrt(norm2) - 1.0) <= 1e-6)) bad_response(Service::kEmbed, "vector not unit norm");
  return v;
}

double ModelGateway::perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const {
  require_valid(validate(a), "perceptual_distance: first image");
  require_valid(validate(b), "perceptual_distance: second image");
  if (!a.same_shape(b)) throw ValidationError("perceptual_distance: dimension mismatch");
  const double v = do_perceptual_distance(a, b);
  if (!(v >= 0.0) || std::isinf(v)) bad_response(Service::kPerceptual, "distance not finite and >= 0");
  return v;
}

LmDistribution ModelGateway::lm_next_distribution(std::span<const int> prefix,
                                                  std::string_view conditioning) const {
  LmDistribution d = do_lm_next_distribution(prefix, conditioning);
  ValidationReport r = validate(d.dist);
  if (d.tokens.size() != d.dist.size()) r.add("tokens", "tokens parallel to vocab_ids");
  check(Service::kLm, r);
  return d;
}

// ---------------------------------------------------------------------------
// StubGateway

double ScoreTable::lookup(const std::string& key, std::string_view service) const {
  if (auto it = values.find(key); it != values.end()) return it->second;
  if (fallback) return *fallback;
  throw ServiceError(std::string(service) + ": no stub entry for '" + key + "'");
}

int BigramLm::id_of(std::string_view token) const {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab[i] == token) return static_cast<int>(i);
  }
  return -1;
}

StubConfig StubConfig::with_defaults(std::uint64_t seed) {
  StubConfig c;
  c.seed = seed;
  c.noun_lexicon = {
      "girl",   "boy",      "man",     "woman",   "child",      "baby",     "person",  "dog",
      "puppy",  "cat",      "kitten",  "retriever", "corgi",    "horse",    "bird",    "cow",
      "sheep",  "duck",     "fish",    "bear",    "bed",        "sofa",     "couch",   "chair",
      "table",  "car",      "truck",   "bus",     "bicycle",    "bike",     "boat",    "train",
      "plane",  "tree",     "flower",  "house",   "building",   "street",   "road",    "ball",
      "cup",    "bottle",   "phone",   "laptop",  "book",       "guitar",   "kite",    "umbrella",
      "bag",    "hat",      "window",  "door",    "lamp",       "plate",    "apple",   "banana",
      "cake",   "pizza",    "river",   "lake",    "beach",      "mountain", "field",   "park",
      "bench",  "toy",      "bowl",    "vase",    "clock",      "backpack", "skateboard", "cottage",
      "garden", "cityscape", "teapot", "sneaker", "robot",     "candle",   "sunglasses", "boot"};
  c.modifier_lexicon = {"red",    "blue",    "green",   "yellow",  "white",  "black",
                        "brown",  "pink",    "golden",  "gray",    "grey",   "orange",
                        "purple", "small",   "large",   "big",     "little", "young",
                        "old",    "tall",    "short",   "wooden",  "metal",  "fluffy",
                        "shiny",  "striped", "spotted", "dark",    "bright", "modern",
                        "siamese", "cute",   "teddy",   "cottage"};

  BigramLm& lm = c.lm;
  lm.rows["<s>"] = {{"a", 0.6}, {"the", 0.4}};
  lm.rows["a"] = {{"brown", 0.5}, {"fluffy", 0.3}, {"small", 0.2}};
  lm.rows["the"] = {{"brown", 0.4}, {"fluffy", 0.6}};
  lm.rows["brown"] = {{"dog", 1.0}};
  lm.rows["fluffy"] = {{"dog", 0.7}, {"puppy", 0.3}};
  lm.rows["small"] = {{"dog", 0.5}, {"puppy", 0.5}};
  lm.rows["dog"] = {{"running", 0.5}, {"sitting", 0.3}, {"</s>", 0.2}};
  lm.rows["puppy"] = {{"sitting", 0.6}, {"running", 0.4}};
  lm.rows["running"] = {{"on", 0.7}, {"</s>", 0.3}};
  lm.rows["sitting"] = {{"on", 0.6}, {"under", 0.4}};
  lm.rows["on"] = {{"green", 0.5}, {"wet", 0.5}};
  lm.rows["green"] = {{"grass", 1.0}};
  lm.rows["wet"] = {{"grass", 0.5}, {"sand", 0.5}};
  lm.rows["grass"] = {{"under", 0.5}, {"</s>", 0.5}};
  lm.rows["sand"] = {{"</s>", 1.0}};
  lm.rows["under"] = {{"bright", 0.6}, {"warm", 0.4}};
  lm.rows["bright"] = {{"sunlight", 1.0}};
  lm.rows["warm"] = {{"sunlight", 1.0}};
  return c;
}

StubGateway::StubGateway(StubConfig config) : config_(std::move(config)) {
  BigramLm& lm = config_.lm;
  if (lm.vocab.empty() || lm.vocab.front() != "</s>") lm.vocab.insert(lm.vocab.begin(), "</s>");
  for (const auto& [prev, row] : lm.rows) {
    double sum = 0.0;
    std::set<std::string> seen;
    for (const auto& [tok, p] : row) {
      if (p < 0.0) throw ValidationError("stub lm: negative probability in row '" + prev + "'");
      if (!seen.insert(tok).second) throw ValidationError("stub lm: duplicate token '" + tok + "'");
      if (lm.id_of(tok) < 0) lm.vocab.push_back(tok);
      sum += p;
    }
    if (row.empty() || std::abs(sum - 1.0) > CategoricalDistribution::kSumTolerance) {
      throw ValidationError("stub lm: row '" + prev + "' does not sum to 1");
    }
  }
  if (config_.embedding_dim < 1) throw ValidationError("stub: embedding_dim must be positive");
}

std::string StubGateway::do_caption(const FrameRef& frame) const {
  auto it = config_.canned_captions.find(frame.uri);
  if (it == config_.canned_captions.end()) {
    throw ServiceError("caption: no stub caption for frame '" + frame.uri + "'");
  }
  return it->second;
}

std::vector<NounChunk> StubGateway::do_noun_chunks(std::string_view caption) const {
  static const std::set<std::string, std::less<>> kDeterminers = {
      "a", "an", "the", "this", "that", "these", "those", "some", "one", "two", "three"};
  const auto is_noun = [&](const std::string& w) {
    if (config_.noun_lexicon.count(w) || stop_list().contains(w)) return true;
    if (w.size() > 1 && w.back() == 's') return config_.noun_lexicon.count(w.substr(0, w.size() - 1)) > 0;
    return false;
  };
  const auto is_modifier = [&](const std::string& w) { return config_.modifier_lexicon.count(w) > 0; };

  const std::vector<Word> words = split_words(caption);
  const auto adjacent = [&](std::size_t k) {
    for (std::size_t b = words[k - 1].end; b < words[k].start; ++b) {
      if (caption[b] != ' ') return false;
    }
    return true;
  };

  std::vector<NounChunk> chunks;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t j = i;
    if (kDeterminers.count(words[j].lower) && j + 1 < words.size() && adjacent(j + 1)) ++j;
    while (j < words.size() && is_modifier(words[j].lower) && !is_noun(words[j].lower) &&
           (j == i || adjacent(j))) {
      ++j;
    }
    std::size_t k = j;
    while (k < words.size() && is_noun(words[k].lower) && (k == i || adjacent(k))) ++k;
    if (k > j) {
      NounChunk c;
      c.start = words[i].start;
      c.end = words[k - 1].end;
      c.text = std::string(caption.substr(c.start, c.end - c.start));
      c.chunk_id = static_cast<int>(chunks.size()) + 1;
      chunks.push_back(std::move(c));
      i = k;
    } else {
      ++i;
    }
  }
  return chunks;
}

std::vector<BoundingBox> StubGateway::do_detect(const FrameRef& frame, std::string_view phrase) const {
  auto it = config_.detections.find(frame.uri + "|" + std::string(phrase));
  if (it == config_.detections.end()) return {};
  return it->second;
}

InstanceTrack StubGateway::do_track(const VideoRecord& video, const TrackInit& init) const {
  TrackScenario scenario;
  if (auto it = config_.tracks.find(video.video_id + "|" + init.chunk.text); it != config_.tracks.end()) {
    scenario = it->second;
  }
  if (scenario.fail) {
    throw ServiceError("track: tracker failure for '" + init.chunk.text + "' in " + video.video_id);
  }
  InstanceTrack t;
  t.chunk = init.chunk;
  bool lost = false;
  for (int f = init.frame_index; f <= video.frame_count(); ++f) {
    const int step = f - init.frame_index;
    BoundingBox b = init.box;
    b.x1 += scenario.dx * step;
    b.x2 += scenario.dx * step;
    b.y1 += scenario.dy * step;
    b.y2 += scenario.dy * step;
    if (scenario.lost_from && f >= *scenario.lost_from) lost = true;
    if (!validate(b).ok()) lost = true;
    if (lost) {
      t.lost_frames.insert(f);
    } else {
      t.per_frame[f] = TrackedBox{b, segment_uri(video.video_id, init.chunk.chunk_id, f)};
    }
  }
  return t;
}

double StubGateway::do_ocr_text_ratio(const FrameRef& frame) const {
  return config_.ocr.lookup(frame.uri, "ocr");
}

double StubGateway::do_motion_score(const FrameRef& a, const FrameRef& b) const {
  return config_.motion.lookup(a.uri + "|" + b.uri, "motion");
}

double StubGateway::do_aesthetic_score(const FrameRef& frame) const {
  return config_.aesthetic.lookup(frame.uri, "aesthetic");
}

std::vector<double> StubGateway::do_embed(std::string_view payload, EmbedSpace space) const {
  const std::string key = std::string(embed_space_name(space)) + "|" + std::string(payload);
  std::vector<double> v;
  if (auto it = config_.embeddings.find(key); it != config_.embeddings.end()) {
    v = it->second;
  } else {
    // Seeded Gaussian direction via Box-Muller over keyed counters.
    const int dim = config_.embedding_dim;
    v.resize(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; i += 2) {
      const std::uint64_t base = rng::keyed(config_.seed, embed_space_name(space), payload,
                                            static_cast<std::uint64_t>(i));
      const double u1 = 1.0 - rng::to_unit(rng::mix64(base));
      const double u2 = rng::to_unit(rng::mix64(base ^ 0xA5A5A5A5A5A5A5A5ull));
      const double r = std::sqrt(-2.0 * std::log(u1));
      v[static_cast<std::size_t>(i)] = r * std::cos(2.0 * std::numbers::pi * u2);
      if (i + 1 < dim) v[static_cast<std::size_t>(i + 1)] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
  }
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (!(norm2 > 0.0)) throw ServiceError("embed: zero vector for '" + key + "'");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

double mean_absolute_difference(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b) || a.data.size() != b.data.size()) {
    throw ValidationError("mean_absolute_difference: dimension mismatch");
  }
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    total += static_cast<std::uint64_t>(std::abs(static_cast<int>(a.data[i]) - static_cast<int>(b.data[i])));
  }
  return static_cast<double>(total) / (static_cast<double>(a.data.size()) * 255.0);
}

double StubGateway::do_perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const {
  return mean_absolute_difference(a, b);
}

LmDistribution StubGateway::do_lm_next_distribution(std::span<const int> prefix,
                                                    std::string_view conditioning) const {
  const BigramLm& lm = config_.lm;
  const std::vector<std::pair<std::string, double>>* row = nullptr;
  if (prefix.empty()) {
    if (auto it = lm.rows.find("<s>:" + std::string(conditioning)); it != lm.rows.end()) {
      row = &it->second;
    } else if (auto it2 = lm.rows.find("<s>"); it2 != lm.rows.end()) {
      row = &it2->second;
    }
  } else {
    const int last = prefix.back();
    if (last < 0 || last >= static_cast<int>(lm.vocab.size())) {
      throw ServiceError("lm: token id " + std::to_string(last) + " outside vocabulary");
    }
    if (last != 0) {
      if (auto it = lm.rows.find(lm.vocab[static_cast<std::size_t>(last)]); it != lm.rows.end()) {
        row = &it->second;
      }
    }
  }
  LmDistribution d;
  d.eos_id = 0;
  if (row == nullptr) {
    d.dist.probs = {1.0};
    d.dist.vocab_ids = {0};
    d.tokens = {lm.vocab[0]};
    return d;
  }
  for (const auto& [tok, p] : *row) {
    d.dist.probs.push_back(p);
    d.dist.vocab_ids.push_back(lm.id_of(tok));
    d.tokens.push_back(tok);
  }
  return d;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

class HttplibTransport final : public Transport {
 public:
  HttpResponse post(const std::string& url, const std::string& body, int timeout_ms) override {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw TransportError("malformed url: " + url);
    const auto slash = url.find('/', scheme + 3);
    const std::string origin = slash == std::string::npos ? url : url.substr(0, slash);
    const std::string path = slash == std::string::npos ? "/" : url.substr(slash);

    httplib::Client cli(origin);
    const auto sec = static_cast<time_t>(timeout_ms / 1000);
    const auto usec = static_cast<time_t>((timeout_ms % 1000) * 1000);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    auto res = cli.Post(path, body, "application/json");
    if (!res) throw TransportError(url + ": " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<Transport> make_httplib_transport() { return std::make_shared<HttplibTransport>(); }

HttpGateway::HttpGateway(std::vector<ServiceEndpoint> endpoints, std::shared_ptr<Transport> transport,
                         BackoffPolicy backoff)
    : transport_(std::move(transport)), backoff_(std::move(backoff)) {
  for (auto& e : endpoints) {
    require_valid(validate(e), "endpoint " + std::string(service_name(e.name)));
    endpoints_[e.name] = std::move(e);
  }
  if (!backoff_.sleep) {
    backoff_.sleep = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
  }
}

std::vector<ServiceEndpoint> HttpGateway::uniform_endpoints(const std::string& base_url,
                                                            int timeout_ms, int retry_limit) {
  std::vector<ServiceEndpoint> out;
  for (Service s : kAllServices) out.push_back({s, base_url, timeout_ms, retry_limit});
  return out;
}

const ServiceEndpoint& HttpGateway::endpoint(Service s) const {
  auto it = endpoints_.find(s);
  if (it == endpoints_.end()) {
    throw ServiceError("no endpoint configured for service " + std::string(service_name(s)));
  }
  return it->second;
}

std::string HttpGateway::call(Service s, const std::string& request_body) const {
  const ServiceEndpoint& ep = endpoint(s);
  std::string url = ep.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/";
  url += service_name(s);

  double delay = backoff_.initial_ms;
  for (int attempt = 0;; ++attempt) {
    HttpResponse res;
    try {
      res = transport_->post(url, request_body, ep.timeout_ms);
    } catch (const TransportError& e) {
      if (attempt >= ep.retry_limit) {
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                             " attempts)");
      }
      backoff_.sleep(static_cast<int>(delay));
      delay *= backoff_.multiplier;
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      throw ServiceError(std::string(service_name(s)) + " returned HTTP " +
                         std::to_string(res.status) + ": " + res.body.substr(0, 512));
    }
    return std::move(res.body);
  }
}

namespace {

json parse_response(Service s, const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) bad_response(s, "body is not JSON");
  check(s, wire::check_response(s, j));
  return j;
}

template <typename T>
T field_as(Service s, const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    bad_response(s, e.what());
  }
}

}  // namespace

std::string HttpGateway::do_caption(const FrameRef& frame) const {
  const json j = parse_response(Service::kCaption, call(Service::kCaption, wire::caption_request(frame).dump()));
  return field_as<std::string>(Service::kCaption, j, "caption");
}

std::vector<NounChunk> HttpGateway::do_noun_chunks(std::string_view caption) const {
  const json j = parse_response(Service::kNounChunks,
                                call(Service::kNounChunks, wire::noun_chunks_request(caption).dump()));
  return field_as<std::vector<NounChunk>>(Service::kNounChunks, j, "chunks");
}

std::vector<BoundingBox> HttpGateway::do_detect(const FrameRef& frame, std::string_view phrase) const {
  const json j = parse_response(Service::kDetect,
                                call(Service::kDetect, wire::detect_request(frame, phrase).dump()));
  return field_as<std::vector<BoundingBox>>(Service::kDetect, j, "boxes");
}

InstanceTrack HttpGateway::do_track(const VideoRecord& video, const TrackInit& init) const {
  const json j = parse_response(Service::kTrack, call(Service::kTrack, wire::track_request(video, init).dump()));
  return field_as<InstanceTrack>(Service::kTrack, j, "track");
}

double HttpGateway::do_ocr_text_ratio(const FrameRef& frame) const {
  const json j = parse_response(Service::kOcr, call(Service::kOcr, wire::ocr_request(frame).dump()));
  return field_as<double>(Service::kOcr, j, "text_ratio");
}

double HttpGateway::do_motion_score(const FrameRef& a, const FrameRef& b) const {
  const json j = parse_response(Service::kMotion, call(Service::kMotion, wire::motion_request(a, b).dump()));
  return field_as<double>(Service::kMotion, j, "score");
}

double HttpGateway::do_aesthetic_score(const FrameRef& frame) const {
  const json j = parse_response(Service::kAesthetic,
                                call(Service::kAesthetic, wire::aesthetic_request(frame).dump()));
  return field_as<double>(Service::kAesthetic, j, "score");
}

std::vector<double> HttpGateway::do_embed(std::string_view payload, EmbedSpace space) const {
  const json j = parse_response(Service::kEmbed, call(Service::kEmbed, wire::embed_request(payload, space).dump()));
  return field_as<std::vector<double>>(Service::kEmbed, j, "vector");
}

double HttpGateway::do_perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const {
  if (a.uri.empty() || b.uri.empty()) {
    throw ValidationError("perceptual_distance over HTTP needs image uris");
  }
  const json j = parse_response(Service::kPerceptual,
                                call(Service::kPerceptual, wire::perceptual_request(a.uri, b.uri).dump()));
  return field_as<double>(Service::kPerceptual, j, "distance");
}

LmDistribution HttpGateway::do_lm_next_distribution(std::span<const int> prefix,
                                                    std::string_view conditioning) const {
  const json j = parse_response(Service::kLm, call(Service::kLm, wire::lm_request(prefix, conditioning).dump()));
  try {
    return wire::decode_lm(j);
  } catch (const json::exception& e) {
    bad_response(Service::kLm, e.what());
  }
}

}  // namespace groundseq::gateway
