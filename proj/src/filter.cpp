// SPDX-License-Identifier: Apache-2.0
#include "groundseq/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "groundseq/parallel.hpp"

namespace groundseq::filter {

ValidationReport validate(const FilterConfig& c) {
  ValidationReport r;
  if (!(c.subtitle_ratio_max >= 0.0 && c.subtitle_ratio_max <= 1.0)) {
    r.add("subtitle_ratio_max", "subtitle_ratio_max in [0, 1]");
  }
  if (!(c.motion_score_max >= 0.0)) r.add("motion_score_max", "motion_score_max >= 0");
  if (!(c.aesthetic_min >= 0.0 && c.aesthetic_min <= 10.0)) {
    r.add("aesthetic_min", "aesthetic_min in [0, 10]");
  }
  if (c.frames_sampled_per_video < 1) {
    r.add("frames_sampled_per_video", "frames_sampled_per_video >= 1");
  }
  return r;
}

namespace {

// JSON has no infinity; thresholds accept the string "inf".
double threshold(const json& j, const char* name, double fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (it->is_string() && it->get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  return it->get<double>();
}

json threshold_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

}  // namespace

FilterConfig filter_config_from_json(const json& j) {
  FilterConfig c;
  try {
    c.subtitle_ratio_max = threshold(j, "subtitle_ratio_max", c.subtitle_ratio_max);
    c.motion_score_max = threshold(j, "motion_score_max", c.motion_score_max);
    c.aesthetic_min = threshold(j, "aesthetic_min", c.aesthetic_min);
    c.frames_sampled_per_video = j.value("frames_sampled_per_video", c.frames_sampled_per_video);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("filter config: ") + e.what());
  }
  require_valid(validate(c), "filter config");
  return c;
}

json to_json(const FilterConfig& c) {
  return {{"subtitle_ratio_max", threshold_json(c.subtitle_ratio_max)},
          {"motion_score_max", threshold_json(c.motion_score_max)},
          {"aesthetic_min", threshold_json(c.aesthetic_min)},
          {"frames_sampled_per_video", c.frames_sampled_per_video}};
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kKeep: return "keep";
    case Verdict::kSubtitle: return "subtitle";
    case Verdict::kSceneChange: return "scene_change";
    case Verdict::kAesthetic: return "aesthetic";
    case Verdict::kError: return "error";
  }
  return "unknown";
}

std::vector<int> sample_frame_indices(int frame_count, int samples) {
  std::vector<int> out;
  if (frame_count <= 0 || samples <= 0) return out;
  if (samples >= frame_count) {
    for (int i = 1; i <= frame_count; ++i) out.push_back(i);
    return out;
  }
  if (samples == 1) return {1};
  const long long span = frame_count - 1;
  const long long steps = samples - 1;
  for (long long i = 0; i < samples; ++i) {
    // Round-half-up of i * span / steps.
    out.push_back(1 + static_cast<int>((2 * i * span + steps) / (2 * steps)));
  }
  return out;
}

namespace {

template <typename Fn>
auto with_context(const VideoRecord& video, Fn&& fn) {
  try {
    return fn();
  } catch (const gateway::TransportError& e) {
    throw gateway::TransportError("video " + video.video_id + ": " + e.what());
  } catch (const gateway::ServiceError& e) {
    throw gateway::ServiceError("video " + video.video_id + ": " + e.what());
  }
}

std::vector<const FrameRef*> sampled_frames(const VideoRecord& video, const FilterConfig& cfg) {
  require_valid(validate(video), "video");
  std::vector<const FrameRef*> out;
  for (int idx : sample_frame_indices(video.frame_count(), cfg.frames_sampled_per_video)) {
    out.push_back(video.frame(idx));
  }
  return out;
}

}  // namespace

Decision subtitle_filter(const VideoRecord& video, const gateway::ModelGateway& gw,
                         const FilterConfig& cfg) {
  return with_context(video, [&] {
    double worst = 0.0;
    for (const FrameRef* f : sampled_frames(video, cfg)) worst = std::max(worst, gw.ocr_text_ratio(*f));
    return worst > cfg.subtitle_ratio_max ? Decision::kReject : Decision::kKeep;
  });
}

Decision scene_change_filter(const VideoRecord& video, const gateway::ModelGateway& gw,
                             const FilterConfig& cfg) {
  if (video.frame_count() < 2) {
    throw ValidationError("scene_change_filter: video " + video.video_id + " has fewer than 2 frames");
  }
  return with_context(video, [&] {
    FilterConfig at_least_two = cfg;
    at_least_two.frames_sampled_per_video = std::max(2, cfg.frames_sampled_per_video);
    const auto frames = sampled_frames(video, at_least_two);
    double worst = 0.0;
    for (std::size_t i = 1; i < frames.size(); ++i) {
      worst = std::max(worst, gw.motion_score(*frames[i - 1], *frames[i]));
    }
    return worst > cfg.motion_score_max ? Decision::kReject : Decision::kKeep;
  });
}

Decision aesthetic_filter(const VideoRecord& video, const gateway::ModelGateway& gw,
                          const FilterConfig& cfg) {
  return with_context(video, [&] {
    const auto frames = sampled_frames(video, cfg);
    double sum = 0.0;
    for (const FrameRef* f : frames) sum += gw.aesthetic_score(*f);
    const double mean = sum / static_cast<double>(frames.size());
    return mean >= cfg.aesthetic_min ? Decision::kKeep : Decision::kReject;
  });
}

VideoVerdict classify(const VideoRecord& video, const gateway::ModelGateway& gw,
                      const FilterConfig& cfg) {
  VideoVerdict v{video.video_id, Verdict::kKeep, {}};
  try {
    if (subtitle_filter(video, gw, cfg) == Decision::kReject) {
      v.verdict = Verdict::kSubtitle;
    } else if (scene_change_filter(video, gw, cfg) == Decision::kReject) {
      v.verdict = Verdict::kSceneChange;
    } else if (aesthetic_filter(video, gw, cfg) == Decision::kReject) {
      v.verdict = Verdict::kAesthetic;
    }
  } catch (const std::exception& e) {
    v.verdict = Verdict::kError;
    v.error = e.what();
  }
  return v;
}

std::size_t FilterReport::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [stage, count] : rejected_by_stage) n += count;
  return n;
}

json to_json(const FilterReport& r) {
  json verdicts = json::array();
  for (const auto& v : r.per_video_verdicts) {
    json e = {{"video_id", v.video_id}, {"verdict", verdict_name(v.verdict)}};
    if (v.verdict != Verdict::kKeep) {
      e["stage_rejected"] = verdict_name(v.verdict);
    } else {
      e["stage_rejected"] = nullptr;
    }
    if (!v.error.empty()) e["error"] = v.error;
    verdicts.push_back(std::move(e));
  }
  return {{"total", r.total},
          {"retained", r.retained},
          {"errors", r.errors},
          {"rejected_by_stage", r.rejected_by_stage},
          {"per_video_verdicts", std::move(verdicts)}};
}

namespace {

FilterResult merge(std::span<const VideoRecord> corpus, std::vector<VideoVerdict> verdicts) {
  FilterResult out;
  FilterReport& r = out.report;
  r.total = corpus.size();
  r.rejected_by_stage = {{"subtitle", 0}, {"scene_change", 0}, {"aesthetic", 0}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    switch (verdicts[i].verdict) {
      case Verdict::kKeep:
        ++r.retained;
        out.retained.push_back(corpus[i]);
        break;
      case Verdict::kError:
        ++r.errors;
        break;
      default:
        ++r.rejected_by_stage[std::string(verdict_name(verdicts[i].verdict))];
    }
  }
  r.per_video_verdicts = std::move(verdicts);
  return out;
}

void require_corpus(std::span<const VideoRecord> corpus, const FilterConfig& cfg) {
  if (corpus.empty()) throw ValidationError("run_filters: empty corpus");
  require_valid(validate(cfg), "filter config");
}

}  // namespace

FilterResult run_filters(std::span<const VideoRecord> corpus, const gateway::ModelGateway& gw,
                         const FilterConfig& cfg, int workers) {
  require_corpus(corpus, cfg);
  const long n = static_cast<long>(corpus.size());
  std::vector<VideoVerdict> verdicts(corpus.size());
  const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    verdicts[static_cast<std::size_t>(i)] = classify(corpus[static_cast<std::size_t>(i)], gw, cfg);
  }
  (void)threads;
  return merge(corpus, std::move(verdicts));
}

FilterResult run_filters_serial(std::span<const VideoRecord> corpus,
                                const gateway::ModelGateway& gw, const FilterConfig& cfg) {
  require_corpus(corpus, cfg);
  std::vector<VideoVerdict> verdicts;
  verdicts.reserve(corpus.size());
  for (const auto& v : corpus) verdicts.push_back(classify(v, gw, cfg));
  return merge(corpus, std::move(verdicts));
}

}  // namespace groundseq::filter
