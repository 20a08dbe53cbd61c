// SPDX-License-Identifier: Apache-2.0
#include "groundseq/codec.hpp"

namespace groundseq {

void to_json(json& j, const Fps& v) { j = json{{"num", v.num}, {"den", v.den}}; }
void from_json(const json& j, Fps& v) {
  j.at("num").get_to(v.num);
  j.at("den").get_to(v.den);
}

void to_json(json& j, const FrameRef& v) {
  j = json{{"index", v.index}, {"uri", v.uri}, {"width", v.width}, {"height", v.height}};
}
void from_json(const json& j, FrameRef& v) {
  j.at("index").get_to(v.index);
  j.at("uri").get_to(v.uri);
  j.at("width").get_to(v.width);
  j.at("height").get_to(v.height);
}

void to_json(json& j, const VideoRecord& v) {
  j = json{{"video_id", v.video_id},
           {"frames", v.frames},
           {"fps", v.fps},
           {"source_tag", v.source_tag}};
}
void from_json(const json& j, VideoRecord& v) {
  j.at("video_id").get_to(v.video_id);
  j.at("frames").get_to(v.frames);
  j.at("fps").get_to(v.fps);
  v.source_tag = j.value("source_tag", std::string());
}

void to_json(json& j, const NounChunk& v) {
  j = json{{"text", v.text}, {"start", v.start}, {"end", v.end}, {"chunk_id", v.chunk_id}};
}
void from_json(const json& j, NounChunk& v) {
  j.at("text").get_to(v.text);
  j.at("start").get_to(v.start);
  j.at("end").get_to(v.end);
  j.at("chunk_id").get_to(v.chunk_id);
}

void to_json(json& j, const BoundingBox& v) {
  j = json{{"x1", v.x1}, {"y1", v.y1}, {"x2", v.x2}, {"y2", v.y2}, {"confidence", v.confidence}};
}
void from_json(const json& j, BoundingBox& v) {
  j.at("x1").get_to(v.x1);
  j.at("y1").get_to(v.y1);
  j.at("x2").get_to(v.x2);
  j.at("y2").get_to(v.y2);
  v.confidence = j.value("confidence", 1.0);
}

void to_json(json& j, const TrackedBox& v) {
  j = json{{"box", v.box}, {"segment_uri", v.segment_uri}};
}
void from_json(const json& j, TrackedBox& v) {
  j.at("box").get_to(v.box);
  j.at("segment_uri").get_to(v.segment_uri);
}

void to_json(json& j, const InstanceTrack& v) {
  json frames = json::array();
  for (const auto& [index, entry] : v.per_frame) {
    frames.push_back({{"frame", index}, {"box", entry.box}, {"segment_uri", entry.segment_uri}});
  }
  j = json{{"chunk", v.chunk}, {"per_frame", std::move(frames)}, {"lost_frames", v.lost_frames}};
}
void from_json(const json& j, InstanceTrack& v) {
  j.at("chunk").get_to(v.chunk);
  v.per_frame.clear();
  for (const auto& e : j.at("per_frame")) {
    v.per_frame[e.at("frame").get<int>()] =
        TrackedBox{e.at("box").get<BoundingBox>(), e.at("segment_uri").get<std::string>()};
  }
  j.at("lost_frames").get_to(v.lost_frames);
}

void to_json(json& j, const GroundedInstance& v) {
  j = json{{"chunk", v.chunk}, {"box", v.box}, {"segment_uri", v.segment_uri}};
}
void from_json(const json& j, GroundedInstance& v) {
  j.at("chunk").get_to(v.chunk);
  j.at("box").get_to(v.box);
  j.at("segment_uri").get_to(v.segment_uri);
}

void to_json(json& j, const FramePairSample& v) {
  j = json{{"video_id", v.video_id},
           {"target_frame", v.target_frame},
           {"reference_frame_index", v.reference_frame_index},
           {"t_ref", v.t_ref},
           {"instances", v.instances},
           {"caption", v.caption}};
}
void from_json(const json& j, FramePairSample& v) {
  j.at("video_id").get_to(v.video_id);
  j.at("target_frame").get_to(v.target_frame);
  j.at("reference_frame_index").get_to(v.reference_frame_index);
  j.at("t_ref").get_to(v.t_ref);
  j.at("instances").get_to(v.instances);
  j.at("caption").get_to(v.caption);
}

void to_json(json& j, const InterleavedSample& v) {
  j = json{{"serialized_text", v.serialized_text},
           {"target_image_uri", v.target_image_uri},
           {"attachments", v.attachments},
           {"rng_seed", v.rng_seed}};
}
void from_json(const json& j, InterleavedSample& v) {
  j.at("serialized_text").get_to(v.serialized_text);
  j.at("target_image_uri").get_to(v.target_image_uri);
  j.at("attachments").get_to(v.attachments);
  j.at("rng_seed").get_to(v.rng_seed);
}

void to_json(json& j, const PsrSample& v) {
  j = json{{"c_brief", v.c_brief},
           {"c_dense", v.c_dense},
           {"image_uri", v.image_uri},
           {"user_turn", v.user_turn},
           {"assistant_turn", v.assistant_turn}};
}
void from_json(const json& j, PsrSample& v) {
  j.at("c_brief").get_to(v.c_brief);
  j.at("c_dense").get_to(v.c_dense);
  j.at("image_uri").get_to(v.image_uri);
  j.at("user_turn").get_to(v.user_turn);
  j.at("assistant_turn").get_to(v.assistant_turn);
}

void to_json(json& j, const CategoricalDistribution& v) {
  j = json{{"probs", v.probs}, {"vocab_ids", v.vocab_ids}};
}
void from_json(const json& j, CategoricalDistribution& v) {
  j.at("probs").get_to(v.probs);
  j.at("vocab_ids").get_to(v.vocab_ids);
}

std::string canonical_dump(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

}  // namespace groundseq
