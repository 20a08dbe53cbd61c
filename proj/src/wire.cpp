// SPDX-License-Identifier: Apache-2.0
#include "groundseq/wire.hpp"

namespace groundseq::wire {

using gateway::EmbedSpace;
using gateway::Service;

json caption_request(const FrameRef& frame) { return {{"frame", frame}}; }
json noun_chunks_request(std::string_view caption) { return {{"caption", caption}}; }
json detect_request(const FrameRef& frame, std::string_view phrase) {
  return {{"frame", frame}, {"phrase", phrase}};
}
json track_request(const VideoRecord& video, const gateway::TrackInit& init) {
  return {{"video", video},
          {"init",
           {{"frame_index", init.frame_index},
            {"box", init.box},
            {"center", {{"x", init.center.x}, {"y", init.center.y}}},
            {"chunk", init.chunk}}}};
}
json ocr_request(const FrameRef& frame) { return {{"frame", frame}}; }
json motion_request(const FrameRef& a, const FrameRef& b) { return {{"a", a}, {"b", b}}; }
json aesthetic_request(const FrameRef& frame) { return {{"frame", frame}}; }
json embed_request(std::string_view payload, EmbedSpace space) {
  return {{"payload", payload}, {"space", gateway::embed_space_name(space)}};
}
json perceptual_request(std::string_view uri_a, std::string_view uri_b) {
  return {{"a", uri_a}, {"b", uri_b}};
}
json lm_request(std::span<const int> prefix, std::string_view conditioning) {
  return {{"prefix", std::vector<int>(prefix.begin(), prefix.end())},
          {"conditioning", conditioning}};
}

json caption_response(const std::string& caption) { return {{"caption", caption}}; }
json noun_chunks_response(const std::vector<NounChunk>& chunks) { return {{"chunks", chunks}}; }
json detect_response(const std::vector<BoundingBox>& boxes) { return {{"boxes", boxes}}; }
json track_response(const InstanceTrack& track) { return {{"track", track}}; }

std::string_view scalar_field(Service s) {
  switch (s) {
    case Service::kOcr:
      return "text_ratio";
    case Service::kMotion:
    case Service::kAesthetic:
      return "score";
    case Service::kPerceptual:
      return "distance";
    default:
      throw std::invalid_argument("service has no scalar response");
  }
}

json scalar_response(Service s, double value) { return {{std::string(scalar_field(s)), value}}; }
json embed_response(const std::vector<double>& vec) { return {{"vector", vec}}; }
json lm_response(const gateway::LmDistribution& d) {
  return {{"probs", d.dist.probs},
          {"vocab_ids", d.dist.vocab_ids},
          {"tokens", d.tokens},
          {"eos_id", d.eos_id}};
}

gateway::LmDistribution decode_lm(const json& j) {
  gateway::LmDistribution d;
  j.at("probs").get_to(d.dist.probs);
  j.at("vocab_ids").get_to(d.dist.vocab_ids);
  j.at("tokens").get_to(d.tokens);
  j.at("eos_id").get_to(d.eos_id);
  return d;
}

gateway::TrackInit decode_track_init(const json& j) {
  gateway::TrackInit init;
  j.at("frame_index").get_to(init.frame_index);
  j.at("box").get_to(init.box);
  init.center.x = j.at("center").at("x").get<int>();
  init.center.y = j.at("center").at("y").get<int>();
  j.at("chunk").get_to(init.chunk);
  return init;
}

namespace {

// Minimal structural checker: field presence and JSON kinds.
class Checker {
 public:
  explicit Checker(ValidationReport& r) : r_(r) {}

  const json* field(const json& obj, const std::string& path, const char* name) {
    if (!obj.is_object()) {
      r_.add(path, "expected object");
      return nullptr;
    }
    auto it = obj.find(name);
    if (it == obj.end()) {
      r_.add(join(path, name), "required field missing");
      return nullptr;
    }
    return &*it;
  }

  void string(const json& obj, const std::string& path, const char* name) {
    if (auto* v = field(obj, path, name); v && !v->is_string()) r_.add(join(path, name), "expected string");
  }
  void integer(const json& obj, const std::string& path, const char* name) {
    if (auto* v = field(obj, path, name); v && !v->is_number_integer()) r_.add(join(path, name), "expected integer");
  }
  void number(const json& obj, const std::string& path, const char* name) {
    if (auto* v = field(obj, path, name); v && !v->is_number()) r_.add(join(path, name), "expected number");
  }
  template <typename Each>
  void array(const json& obj, const std::string& path, const char* name, Each each) {
    auto* v = field(obj, path, name);
    if (!v) return;
    if (!v->is_array()) {
      r_.add(join(path, name), "expected array");
      return;
    }
    for (std::size_t i = 0; i < v->size(); ++i) {
      each((*v)[i], join(path, name) + "[" + std::to_string(i) + "]");
    }
  }

  void frame(const json& obj, const std::string& path, const char* name) {
    if (auto* v = field(obj, path, name)) frame_value(*v, join(path, name));
  }
  void frame_value(const json& v, const std::string& p) {
    integer(v, p, "index");
    string(v, p, "uri");
    integer(v, p, "width");
    integer(v, p, "height");
  }
  void box_value(const json& v, const std::string& p) {
    integer(v, p, "x1");
    integer(v, p, "y1");
    integer(v, p, "x2");
    integer(v, p, "y2");
    number(v, p, "confidence");
  }
  void chunk_value(const json& v, const std::string& p) {
    string(v, p, "text");
    integer(v, p, "start");
    integer(v, p, "end");
    integer(v, p, "chunk_id");
  }
  void kind(const json& v, const std::string& p, bool ok, const char* expected) {
    if (!ok) r_.add(p, std::string("expected ") + expected);
  }

  static std::string join(const std::string& path, const char* name) {
    return path.empty() ? std::string(name) : path + "." + name;
  }

 private:
  ValidationReport& r_;
};

}  // namespace

ValidationReport check_request(Service s, const json& j) {
  ValidationReport r;
  Checker c(r);
  switch (s) {
    case Service::kCaption:
    case Service::kOcr:
    case Service::kAesthetic:
      c.frame(j, "", "frame");
      break;
    case Service::kNounChunks:
      c.string(j, "", "caption");
      break;
    case Service::kDetect:
      c.frame(j, "", "frame");
      c.string(j, "", "phrase");
      break;
    case Service::kTrack:
      if (auto* v = c.field(j, "", "video")) {
        c.string(*v, "video", "video_id");
        c.array(*v, "video", "frames", [&](const json& f, const std::string& p) { c.frame_value(f, p); });
      }
      if (auto* init = c.field(j, "", "init")) {
        c.integer(*init, "init", "frame_index");
        if (auto* b = c.field(*init, "init", "box")) c.box_value(*b, "init.box");
        if (auto* ctr = c.field(*init, "init", "center")) {
          c.integer(*ctr, "init.center", "x");
          c.integer(*ctr, "init.center", "y");
        }
        if (auto* ch = c.field(*init, "init", "chunk")) c.chunk_value(*ch, "init.chunk");
      }
      break;
    case Service::kMotion:
      c.frame(j, "", "a");
      c.frame(j, "", "b");
      break;
    case Service::kEmbed:
      c.string(j, "", "payload");
      if (auto* v = c.field(j, "", "space")) {
        c.kind(*v, "space", v->is_string() && gateway::parse_embed_space(v->get<std::string>()),
               "one of dino, clip_image, clip_text");
      }
      break;
    case Service::kPerceptual:
      c.string(j, "", "a");
      c.string(j, "", "b");
      break;
    case Service::kLm:
      c.array(j, "", "prefix", [&](const json& v, const std::string& p) {
        c.kind(v, p, v.is_number_integer(), "integer");
      });
      c.string(j, "", "conditioning");
      break;
  }
  return r;
}

ValidationReport check_response(Service s, const json& j) {
  ValidationReport r;
  Checker c(r);
  switch (s) {
    case Service::kCaption:
      c.string(j, "", "caption");
      break;
    case Service::kNounChunks:
      c.array(j, "", "chunks", [&](const json& v, const std::string& p) { c.chunk_value(v, p); });
      break;
    case Service::kDetect:
      c.array(j, "", "boxes", [&](const json& v, const std::string& p) { c.box_value(v, p); });
      break;
    case Service::kTrack:
      if (auto* t = c.field(j, "", "track")) {
        if (auto* ch = c.field(*t, "track", "chunk")) c.chunk_value(*ch, "track.chunk");
        c.array(*t, "track", "per_frame", [&](const json& v, const std::string& p) {
          c.integer(v, p, "frame");
          if (auto* b = c.field(v, p, "box")) c.box_value(*b, p + ".box");
          c.string(v, p, "segment_uri");
        });
        c.array(*t, "track", "lost_frames", [&](const json& v, const std::string& p) {
          c.kind(v, p, v.is_number_integer(), "integer");
        });
      }
      break;
    case Service::kOcr:
    case Service::kMotion:
    case Service::kAesthetic:
    case Service::kPerceptual:
      c.number(j, "", std::string(scalar_field(s)).c_str());
      break;
    case Service::kEmbed:
      c.array(j, "", "vector", [&](const json& v, const std::string& p) {
        c.kind(v, p, v.is_number(), "number");
      });
      break;
    case Service::kLm:
      c.array(j, "", "probs", [&](const json& v, const std::string& p) {
        c.kind(v, p, v.is_number(), "number");
      });
      c.array(j, "", "vocab_ids", [&](const json& v, const std::string& p) {
        c.kind(v, p, v.is_number_integer(), "integer");
      });
      c.array(j, "", "tokens", [&](const json& v, const std::string& p) {
        c.kind(v, p, v.is_string(), "string");
      });
      c.integer(j, "", "eos_id");
      break;
  }
  return r;
}

json dispatch(const gateway::ModelGateway& gw, Service s, const json& request,
              const ImageResolver& resolve_image) {
  require_valid(check_request(s, request), std::string(gateway::service_name(s)) + " request");
  try {
    switch (s) {
      case Service::kCaption:
        return caption_response(gw.caption(request.at("frame").get<FrameRef>()));
      case Service::kNounChunks:
        return noun_chunks_response(gw.noun_chunks(request.at("caption").get<std::string>()));
      case Service::kDetect:
        return detect_response(gw.detect(request.at("frame").get<FrameRef>(),
                                         request.at("phrase").get<std::string>()));
      case Service::kTrack:
        return track_response(gw.track(request.at("video").get<VideoRecord>(),
                                       decode_track_init(request.at("init"))));
      case Service::kOcr:
        return scalar_response(s, gw.ocr_text_ratio(request.at("frame").get<FrameRef>()));
      case Service::kMotion:
        return scalar_response(s, gw.motion_score(request.at("a").get<FrameRef>(),
                                                  request.at("b").get<FrameRef>()));
      case Service::kAesthetic:
        return scalar_response(s, gw.aesthetic_score(request.at("frame").get<FrameRef>()));
      case Service::kEmbed:
        return embed_response(
            gw.embed(request.at("payload").get<std::string>(),
                     *gateway::parse_embed_space(request.at("space").get<std::string>())));
      case Service::kPerceptual: {
        if (!resolve_image) throw gateway::ServiceError("no image resolver configured");
        ImageBuffer a = resolve_image(request.at("a").get<std::string>());
        ImageBuffer b = resolve_image(request.at("b").get<std::string>());
        return scalar_response(s, gw.perceptual_distance(a, b));
      }
      case Service::kLm:
        return lm_response(gw.lm_next_distribution(request.at("prefix").get<std::vector<int>>(),
                                                   request.at("conditioning").get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed request: ") + e.what());
  }
  throw std::logic_error("unhandled service");
}

}  // namespace groundseq::wire
