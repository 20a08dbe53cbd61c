// SPDX-License-Identifier: Apache-2.0
//
// JSON configuration for gateways: {"kind": "stub", ...} builds a StubGateway,
// {"kind": "http", ...} an HttpGateway.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "groundseq/codec.hpp"
#include "groundseq/gateway.hpp"

namespace groundseq::gateway {

/// With "defaults": true (the default) unspecified fields come from StubConfig::with_defaults.
StubConfig stub_config_from_json(const json& j);
json to_json(const StubConfig& c);

/// `base_url_override` (normally GATEWAY_BASE_URL) forces an HttpGateway with uniform
/// endpoints at that URL, keeping timeout_ms and retry_limit from `j` when given.
std::unique_ptr<ModelGateway> make_gateway(const json& j,
                                           const std::optional<std::string>& base_url_override = {});

}  // namespace groundseq::gateway
