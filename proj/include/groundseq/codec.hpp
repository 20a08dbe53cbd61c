// SPDX-License-Identifier: Apache-2.0
//
// JSON encodings of the core types. nlohmann::json keeps object keys sorted,
// so dump() output is canonical.
#pragma once

#include <json.hpp>

#include "groundseq/core.hpp"

namespace groundseq {

using json = nlohmann::json;

void to_json(json& j, const Fps& v);
void from_json(const json& j, Fps& v);
void to_json(json& j, const FrameRef& v);
void from_json(const json& j, FrameRef& v);
void to_json(json& j, const VideoRecord& v);
void from_json(const json& j, VideoRecord& v);
void to_json(json& j, const NounChunk& v);
void from_json(const json& j, NounChunk& v);
void to_json(json& j, const BoundingBox& v);
void from_json(const json& j, BoundingBox& v);
void to_json(json& j, const TrackedBox& v);
void from_json(const json& j, TrackedBox& v);
void to_json(json& j, const InstanceTrack& v);
void from_json(const json& j, InstanceTrack& v);
void to_json(json& j, const GroundedInstance& v);
void from_json(const json& j, GroundedInstance& v);
void to_json(json& j, const FramePairSample& v);
void from_json(const json& j, FramePairSample& v);
void to_json(json& j, const InterleavedSample& v);
void from_json(const json& j, InterleavedSample& v);
void to_json(json& j, const PsrSample& v);
void from_json(const json& j, PsrSample& v);
void to_json(json& j, const CategoricalDistribution& v);
void from_json(const json& j, CategoricalDistribution& v);

/// Compact canonical encoding: sorted keys, no whitespace.
std::string canonical_dump(const json& j);

}  // namespace groundseq
