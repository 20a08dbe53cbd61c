// SPDX-License-Identifier: Apache-2.0
#include "groundseq/annotate.hpp"

#include <algorithm>

#include "groundseq/parallel.hpp"

namespace groundseq::annotate {

ValidationReport validate(const AnnotationConfig& c) {
  ValidationReport r;
  if (c.t_ref < 1) r.add("t_ref", "t_ref >= 1");
  if (!(c.detection_confidence_min >= 0.0 && c.detection_confidence_min <= 1.0)) {
    r.add("detection_confidence_min", "detection_confidence_min in [0, 1]");
  }
  if (c.max_instances_per_frame < 1) r.add("max_instances_per_frame", "max_instances_per_frame >= 1");
  if (c.sliding_window_stride < 0) r.add("sliding_window_stride", "sliding_window_stride >= 0");
  return r;
}

AnnotationConfig annotation_config_from_json(const json& j) {
  AnnotationConfig c;
  try {
    c.t_ref = j.value("t_ref", c.t_ref);
    c.detection_confidence_min = j.value("detection_confidence_min", c.detection_confidence_min);
    c.max_instances_per_frame = j.value("max_instances_per_frame", c.max_instances_per_frame);
    c.sliding_window_stride = j.value("sliding_window_stride", c.sliding_window_stride);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("annotation config: ") + e.what());
  }
  require_valid(validate(c), "annotation config");
  return c;
}

json to_json(const AnnotationConfig& c) {
  return {{"t_ref", c.t_ref},
          {"detection_confidence_min", c.detection_confidence_min},
          {"max_instances_per_frame", c.max_instances_per_frame},
          {"sliding_window_stride", c.sliding_window_stride}};
}

std::string_view skip_reason_name(SkipReason r) {
  switch (r) {
    case SkipReason::kTooShort: return "too_short";
    case SkipReason::kNoChunks: return "no_chunks";
    case SkipReason::kNoDetections: return "no_detections";
    case SkipReason::kNoInstancesAtReference: return "no_instances_at_reference";
    case SkipReason::kError: return "error";
  }
  return "unknown";
}

Identification identify_instances(const VideoRecord& video, const gateway::ModelGateway& gw,
                                  const AnnotationConfig& cfg) {
  require_valid(validate(video), "video");
  Identification out;
  out.caption = gw.caption(*video.frame(1));
  out.chunks = gw.noun_chunks(out.caption);
  if (out.chunks.size() > static_cast<std::size_t>(cfg.max_instances_per_frame)) {
    out.chunks.resize(static_cast<std::size_t>(cfg.max_instances_per_frame));
  }
  return out;
}

std::vector<Detection> detect_instances(const FrameRef& frame, std::span<const NounChunk> chunks,
                                        const gateway::ModelGateway& gw,
                                        const AnnotationConfig& cfg, std::vector<DropLog>* dropped,
                                        std::string_view video_id) {
  if (chunks.empty()) throw ValidationError("detect_instances: no chunks");
  std::vector<Detection> out;
  for (const auto& chunk : chunks) {
    const auto boxes = gw.detect(frame, chunk.text);
    if (boxes.empty()) {
      if (dropped) dropped->push_back({std::string(video_id), chunk.text, "no_detection"});
      continue;
    }
    // Boxes arrive sorted by confidence; ties keep service order.
    const BoundingBox& best = boxes.front();
    if (best.confidence < cfg.detection_confidence_min) {
      if (dropped) dropped->push_back({std::string(video_id), chunk.text, "low_confidence"});
      continue;
    }
    out.push_back({chunk, best});
  }
  return out;
}

std::vector<InstanceTrack> track_instances(const VideoRecord& video,
                                           std::span<const Detection> detections,
                                           const gateway::ModelGateway& gw,
                                           std::vector<DropLog>* dropped) {
  std::vector<InstanceTrack> out;
  for (const auto& d : detections) {
    gateway::TrackInit init{1, d.box, d.box.center(), d.chunk};
    try {
      out.push_back(gw.track(video, init));
    } catch (const gateway::ServiceError&) {
      if (dropped) dropped->push_back({video.video_id, d.chunk.text, "tracking_failed"});
    }
  }
  return out;
}

PairSelection select_frame_pair(const VideoRecord& video, std::span<const InstanceTrack> tracks,
                                const std::string& caption, const AnnotationConfig& cfg,
                                int target_index, std::vector<DropLog>* dropped) {
  PairSelection out;
  const int reference = target_index + cfg.t_ref;
  const FrameRef* target = video.frame(target_index);
  if (target == nullptr || video.frame(reference) == nullptr) {
    out.skip = SkipReason::kTooShort;
    return out;
  }
  FramePairSample s;
  s.video_id = video.video_id;
  s.target_frame = *target;
  s.t_ref = cfg.t_ref;
  s.reference_frame_index = reference;
  s.caption = caption;
  for (const auto& t : tracks) {
    auto it = t.per_frame.find(reference);
    if (it == t.per_frame.end()) {
      if (dropped) dropped->push_back({video.video_id, t.chunk.text, "lost_at_reference"});
      continue;
    }
    s.instances.push_back({t.chunk, it->second.box, it->second.segment_uri});
  }
  if (s.instances.empty()) {
    out.skip = SkipReason::kNoInstancesAtReference;
    return out;
  }
  out.sample = std::move(s);
  return out;
}

VideoAnnotation annotate_video(const VideoRecord& video, const gateway::ModelGateway& gw,
                               const AnnotationConfig& cfg) {
  VideoAnnotation out;
  out.video_id = video.video_id;
  try {
    require_valid(validate(video), "video");
    if (video.frame_count() < 1 + cfg.t_ref) {
      out.skip = SkipReason::kTooShort;
      return out;
    }
    const Identification ident = identify_instances(video, gw, cfg);
    if (ident.chunks.empty()) {
      out.skip = SkipReason::kNoChunks;
      return out;
    }
    const auto detections =
        detect_instances(*video.frame(1), ident.chunks, gw, cfg, &out.drops, video.video_id);
    if (detections.empty()) {
      out.skip = SkipReason::kNoDetections;
      return out;
    }
    const auto tracks = track_instances(video, detections, gw, &out.drops);

    std::vector<int> targets = {1};
    if (cfg.sliding_window_stride > 0) {
      for (int t = 1 + cfg.sliding_window_stride; t + cfg.t_ref <= video.frame_count();
           t += cfg.sliding_window_stride) {
        targets.push_back(t);
      }
    }
    std::optional<SkipReason> last_skip;
    for (int target : targets) {
      auto sel = select_frame_pair(video, tracks, ident.caption, cfg, target,
                                   target == 1 ? &out.drops : nullptr);
      if (sel.sample) {
        out.samples.push_back(std::move(*sel.sample));
      } else {
        last_skip = sel.skip;
      }
    }
    if (out.samples.empty()) out.skip = last_skip;
  } catch (const std::exception& e) {
    out.samples.clear();
    out.skip = SkipReason::kError;
    out.error = e.what();
  }
  return out;
}

json to_json(const AnnotationReport& r) {
  json per_video = json::array();
  for (const auto& v : r.per_video) {
    json e = {{"video_id", v.video_id}, {"samples", v.samples.size()}};
    e["skip"] = v.skip ? json(skip_reason_name(*v.skip)) : json(nullptr);
    if (!v.error.empty()) e["error"] = v.error;
    json drops = json::array();
    for (const auto& d : v.drops) drops.push_back({{"chunk", d.chunk}, {"reason", d.reason}});
    e["drops"] = std::move(drops);
    per_video.push_back(std::move(e));
  }
  return {{"videos", r.videos},
          {"samples", r.samples},
          {"skips", r.skips},
          {"drops", r.drops},
          {"per_video", std::move(per_video)}};
}

namespace {

AnnotationResult merge(std::vector<VideoAnnotation> per_video) {
  AnnotationResult out;
  AnnotationReport& r = out.report;
  r.videos = per_video.size();
  for (const char* k : {"too_short", "no_chunks", "no_detections", "no_instances_at_reference", "error"}) {
    r.skips[k] = 0;
  }
  for (auto& v : per_video) {
    if (v.skip && v.samples.empty()) ++r.skips[std::string(skip_reason_name(*v.skip))];
    for (const auto& d : v.drops) ++r.drops[d.reason];
    for (const auto& s : v.samples) out.samples.push_back(s);
  }
  r.samples = out.samples.size();
  r.per_video = std::move(per_video);
  return out;
}

}  // namespace

AnnotationResult annotate_corpus(std::span<const VideoRecord> videos,
                                 const gateway::ModelGateway& gw, const AnnotationConfig& cfg,
                                 int workers) {
  require_valid(validate(cfg), "annotation config");
  const long n = static_cast<long>(videos.size());
  std::vector<VideoAnnotation> per_video(videos.size());
  const int threads = resolve_workers(workers);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    per_video[static_cast<std::size_t>(i)] = annotate_video(videos[static_cast<std::size_t>(i)], gw, cfg);
  }
  (void)threads;
  return merge(std::move(per_video));
}

AnnotationResult annotate_corpus_serial(std::span<const VideoRecord> videos,
                                        const gateway::ModelGateway& gw,
                                        const AnnotationConfig& cfg) {
  require_valid(validate(cfg), "annotation config");
  std::vector<VideoAnnotation> per_video;
  per_video.reserve(videos.size());
  for (const auto& v : videos) per_video.push_back(annotate_video(v, gw, cfg));
  return merge(std::move(per_video));
}

}  // namespace groundseq::annotate
