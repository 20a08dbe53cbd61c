// SPDX-License-Identifier: Apache-2.0
//
// JSON wire protocol between the gateway client and model services.
// Each service is reached with a single POST of a JSON object to
// {base_url}/{service_name}. Images travel by URI only. The JSON Schema files
// under docs/schemas/ describe the same shapes that check_request and
// check_response enforce here.
#pragma once

#include <functional>
#include <span>
#include <string>

#include "groundseq/codec.hpp"
#include "groundseq/gateway.hpp"

namespace groundseq::wire {

json caption_request(const FrameRef& frame);
json noun_chunks_request(std::string_view caption);
json detect_request(const FrameRef& frame, std::string_view phrase);
json track_request(const VideoRecord& video, const gateway::TrackInit& init);
json ocr_request(const FrameRef& frame);
json motion_request(const FrameRef& a, const FrameRef& b);
json aesthetic_request(const FrameRef& frame);
json embed_request(std::string_view payload, gateway::EmbedSpace space);
json perceptual_request(std::string_view uri_a, std::string_view uri_b);
json lm_request(std::span<const int> prefix, std::string_view conditioning);

json caption_response(const std::string& caption);
json noun_chunks_response(const std::vector<NounChunk>& chunks);
json detect_response(const std::vector<BoundingBox>& boxes);
json track_response(const InstanceTrack& track);
json scalar_response(gateway::Service s, double value);
json embed_response(const std::vector<double>& vec);
json lm_response(const gateway::LmDistribution& d);

/// Field name of the scalar in ocr/motion/aesthetic/perceptual responses.
std::string_view scalar_field(gateway::Service s);

gateway::LmDistribution decode_lm(const json& j);
gateway::TrackInit decode_track_init(const json& j);

/// Structural checks mirroring the published JSON schemas.
ValidationReport check_request(gateway::Service s, const json& j);
ValidationReport check_response(gateway::Service s, const json& j);

using ImageResolver = std::function<ImageBuffer(const std::string& uri)>;

/// Server-side handler: decodes a request, calls `gw`, encodes the response.
/// Throws ValidationError for malformed requests.
json dispatch(const gateway::ModelGateway& gw, gateway::Service s, const json& request,
              const ImageResolver& resolve_image);

}  // namespace groundseq::wire
