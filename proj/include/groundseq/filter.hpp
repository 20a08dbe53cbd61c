// SPDX-License-Identifier: Apache-2.0
//
// Three-stage video filter cascade: subtitles (OCR), abrupt scene changes
// (motion), then aesthetic quality. A video is charged to the first stage that
// rejects it.
#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"
#include "groundseq/gateway.hpp"

namespace groundseq::filter {

struct FilterConfig {
  double subtitle_ratio_max = 0.01;
  double motion_score_max = 0.8;
  double aesthetic_min = 4.5;
  int frames_sampled_per_video = 8;
};
ValidationReport validate(const FilterConfig& c);
FilterConfig filter_config_from_json(const json& j);
json to_json(const FilterConfig& c);

enum class Decision { kKeep, kReject };

enum class Verdict { kKeep, kSubtitle, kSceneChange, kAesthetic, kError };
std::string_view verdict_name(Verdict v);

/// Evenly spaced 1-based frame indices, always including the first and last frame.
std::vector<int> sample_frame_indices(int frame_count, int samples);

/// Rejects iff the largest sampled OCR text ratio exceeds subtitle_ratio_max.
Decision subtitle_filter(const VideoRecord& video, const gateway::ModelGateway& gw,
                         const FilterConfig& cfg);
/// Rejects iff any consecutive sampled pair scores above motion_score_max. Needs >= 2 frames.
Decision scene_change_filter(const VideoRecord& video, const gateway::ModelGateway& gw,
                             const FilterConfig& cfg);
/// Keeps iff the mean sampled aesthetic score is at least aesthetic_min.
Decision aesthetic_filter(const VideoRecord& video, const gateway::ModelGateway& gw,
                          const FilterConfig& cfg);

struct VideoVerdict {
  std::string video_id;
  Verdict verdict = Verdict::kKeep;
  std::string error;
};

/// Runs the cascade on one video. Never throws; failures become Verdict::kError.
VideoVerdict classify(const VideoRecord& video, const gateway::ModelGateway& gw,
                      const FilterConfig& cfg);

struct FilterReport {
  std::size_t total = 0;
  std::size_t retained = 0;
  std::size_t errors = 0;
  /// Keys: "subtitle", "scene_change", "aesthetic".
  std::map<std::string, std::size_t> rejected_by_stage;
  std::vector<VideoVerdict> per_video_verdicts;

  std::size_t rejected_total() const;
  bool conserved() const { return total == retained + rejected_total() + errors; }
};
json to_json(const FilterReport& r);

struct FilterResult {
  std::vector<VideoRecord> retained;
  FilterReport report;
};

/// OpenMP over videos; the report is merged in corpus order.
FilterResult run_filters(std::span<const VideoRecord> corpus, const gateway::ModelGateway& gw,
                         const FilterConfig& cfg, int workers = 0);

/// Serial reference kept for equivalence tests and benchmarks.
FilterResult run_filters_serial(std::span<const VideoRecord> corpus,
                                const gateway::ModelGateway& gw, const FilterConfig& cfg);

}  // namespace groundseq::filter
