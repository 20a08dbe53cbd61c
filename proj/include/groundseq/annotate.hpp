// SPDX-License-Identifier: Apache-2.0
//
// Per-video annotation: caption the first frame and pull grounded noun chunks,
// detect one box per chunk, track each instance from frame 1, then pair the
// first frame with the instances' annotations t_ref frames later.
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"
#include "groundseq/gateway.hpp"

namespace groundseq::annotate {

struct AnnotationConfig {
  int t_ref = 25;
  double detection_confidence_min = 0.35;
  int max_instances_per_frame = 12;
  /// 0 pairs only the first frame. A positive stride also emits pairs whose target
  /// frame is 1 + k * stride.
  int sliding_window_stride = 0;
};
ValidationReport validate(const AnnotationConfig& c);
AnnotationConfig annotation_config_from_json(const json& j);
json to_json(const AnnotationConfig& c);

/// Why an instance was dropped from a sample.
struct DropLog {
  std::string video_id;
  std::string chunk;
  std::string reason;  // "low_confidence", "no_detection", "tracking_failed", "lost_at_reference"
  bool operator==(const DropLog&) const = default;
};

struct Identification {
  std::string caption;
  std::vector<NounChunk> chunks;
};

/// Captions frame 1 and keeps the first max_instances_per_frame grounded chunks.
Identification identify_instances(const VideoRecord& video, const gateway::ModelGateway& gw,
                                  const AnnotationConfig& cfg);

struct Detection {
  NounChunk chunk;
  BoundingBox box;
  bool operator==(const Detection&) const = default;
};

/// Best box per chunk, if its confidence reaches detection_confidence_min.
std::vector<Detection> detect_instances(const FrameRef& frame, std::span<const NounChunk> chunks,
                                        const gateway::ModelGateway& gw,
                                        const AnnotationConfig& cfg,
                                        std::vector<DropLog>* dropped = nullptr,
                                        std::string_view video_id = {});

/// Tracks each detection from frame 1 using its box and box center. A tracker
/// failure drops that instance only.
std::vector<InstanceTrack> track_instances(const VideoRecord& video,
                                           std::span<const Detection> detections,
                                           const gateway::ModelGateway& gw,
                                           std::vector<DropLog>* dropped = nullptr);

enum class SkipReason { kTooShort, kNoChunks, kNoDetections, kNoInstancesAtReference, kError };
std::string_view skip_reason_name(SkipReason r);

struct PairSelection {
  std::optional<FramePairSample> sample;
  std::optional<SkipReason> skip;
};

/// Pairs frame `target_index` with the tracks alive at target_index + t_ref.
PairSelection select_frame_pair(const VideoRecord& video, std::span<const InstanceTrack> tracks,
                                const std::string& caption, const AnnotationConfig& cfg,
                                int target_index = 1, std::vector<DropLog>* dropped = nullptr);

struct VideoAnnotation {
  std::string video_id;
  std::vector<FramePairSample> samples;
  std::optional<SkipReason> skip;
  std::string error;
  std::vector<DropLog> drops;
};

/// All four steps for one video. Never throws; failures become SkipReason::kError.
VideoAnnotation annotate_video(const VideoRecord& video, const gateway::ModelGateway& gw,
                               const AnnotationConfig& cfg);

struct AnnotationReport {
  std::size_t videos = 0;
  std::size_t samples = 0;
  std::map<std::string, std::size_t> skips;
  std::map<std::string, std::size_t> drops;
  std::vector<VideoAnnotation> per_video;  // samples omitted in JSON
};
json to_json(const AnnotationReport& r);

struct AnnotationResult {
  std::vector<FramePairSample> samples;
  AnnotationReport report;
};

/// OpenMP over videos; outputs merged in corpus order.
AnnotationResult annotate_corpus(std::span<const VideoRecord> videos,
                                 const gateway::ModelGateway& gw, const AnnotationConfig& cfg,
                                 int workers = 0);

/// Serial reference.
AnnotationResult annotate_corpus_serial(std::span<const VideoRecord> videos,
                                        const gateway::ModelGateway& gw,
                                        const AnnotationConfig& cfg);

}  // namespace groundseq::annotate
