// SPDX-License-Identifier: Apache-2.0
#include "groundseq/gateway_config.hpp"

namespace groundseq::gateway {

namespace {

ScoreTable table_from_json(const json& j) {
  ScoreTable t;
  if (j.contains("values")) j.at("values").get_to(t.values);
  if (j.contains("fallback") && !j["fallback"].is_null()) t.fallback = j["fallback"].get<double>();
  return t;
}

json table_to_json(const ScoreTable& t) {
  return {{"values", t.values}, {"fallback", t.fallback ? json(*t.fallback) : json(nullptr)}};
}

}  // namespace

StubConfig stub_config_from_json(const json& j) {
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  StubConfig c = j.value("defaults", true) ? StubConfig::with_defaults(seed) : StubConfig{};
  c.seed = seed;
  try {
    if (j.contains("canned_captions")) j["canned_captions"].get_to(c.canned_captions);
    if (j.contains("noun_lexicon")) j["noun_lexicon"].get_to(c.noun_lexicon);
    if (j.contains("modifier_lexicon")) j["modifier_lexicon"].get_to(c.modifier_lexicon);
    if (j.contains("ocr")) c.ocr = table_from_json(j["ocr"]);
    if (j.contains("motion")) c.motion = table_from_json(j["motion"]);
    if (j.contains("aesthetic")) c.aesthetic = table_from_json(j["aesthetic"]);
    if (j.contains("detections")) j["detections"].get_to(c.detections);
    if (j.contains("tracks")) {
      c.tracks.clear();
      for (const auto& [key, v] : j["tracks"].items()) {
        TrackScenario s;
        if (v.contains("lost_from") && !v["lost_from"].is_null()) s.lost_from = v["lost_from"].get<int>();
        s.dx = v.value("dx", 0);
        s.dy = v.value("dy", 0);
        s.fail = v.value("fail", false);
        c.tracks[key] = s;
      }
    }
    if (j.contains("embeddings")) j["embeddings"].get_to(c.embeddings);
    c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
    if (j.contains("lm")) {
      const json& lm = j["lm"];
      c.lm = BigramLm{};
      if (lm.contains("vocab")) lm["vocab"].get_to(c.lm.vocab);
      lm.at("rows").get_to(c.lm.rows);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("stub config: ") + e.what());
  }
  return c;
}

json to_json(const StubConfig& c) {
  json tracks = json::object();
  for (const auto& [key, s] : c.tracks) {
    tracks[key] = {{"lost_from", s.lost_from ? json(*s.lost_from) : json(nullptr)},
                   {"dx", s.dx},
                   {"dy", s.dy},
                   {"fail", s.fail}};
  }
  return {{"kind", "stub"},
          {"defaults", false},
          {"seed", c.seed},
          {"canned_captions", c.canned_captions},
          {"noun_lexicon", c.noun_lexicon},
          {"modifier_lexicon", c.modifier_lexicon},
          {"ocr", table_to_json(c.ocr)},
          {"motion", table_to_json(c.motion)},
          {"aesthetic", table_to_json(c.aesthetic)},
          {"detections", c.detections},
          {"tracks", std::move(tracks)},
          {"embeddings", c.embeddings},
          {"embedding_dim", c.embedding_dim},
          {"lm", {{"vocab", c.lm.vocab}, {"rows", c.lm.rows}}}};
}

std::unique_ptr<ModelGateway> make_gateway(const json& j, const std::optional<std::string>& base_url_override) {
  const std::string kind = j.value("kind", std::string("stub"));
  const int timeout_ms = j.value("timeout_ms", 30000);
  const int retry_limit = j.value("retry_limit", 3);
  std::unique_ptr<ModelGateway> gw;
  if (base_url_override && !base_url_override->empty()) {
    gw = std::make_unique<HttpGateway>(HttpGateway::uniform_endpoints(*base_url_override, timeout_ms, retry_limit),
                                       make_httplib_transport());
  } else if (kind == "stub") {
    gw = std::make_unique<StubGateway>(stub_config_from_json(j));
  } else if (kind == "http") {
    std::vector<ServiceEndpoint> endpoints;
    if (j.contains("endpoints")) {
      for (const auto& e : j["endpoints"]) {
        ServiceEndpoint ep;
        const auto service = parse_service(e.at("name").get<std::string>());
        if (!service) throw ValidationError("gateway config: unknown service " + e["name"].dump());
        ep.name = *service;
        ep.base_url = e.at("base_url").get<std::string>();
        ep.timeout_ms = e.value("timeout_ms", timeout_ms);
        ep.retry_limit = e.value("retry_limit", retry_limit);
        endpoints.push_back(std::move(ep));
      }
    } else {
      endpoints = HttpGateway::uniform_endpoints(j.at("base_url").get<std::string>(), timeout_ms, retry_limit);
    }
    gw = std::make_unique<HttpGateway>(std::move(endpoints), make_httplib_transport());
  } else {
    throw ValidationError("gateway config: unknown kind '" + kind + "'");
  }
  if (j.contains("stop_list")) {
    gw->set_stop_list(StopList(j["stop_list"].get<std::set<std::string>>()));
  }
  return gw;
}

}  // namespace groundseq::gateway
