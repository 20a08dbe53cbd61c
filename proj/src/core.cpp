// SPDX-License-Identifier: Apache-2.0
#include "groundseq/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "groundseq/sequence_format.hpp"

namespace groundseq {

const FrameRef* VideoRecord::frame(int index) const {
  if (index < 1 || index > frame_count()) return nullptr;
  const FrameRef& f = frames[static_cast<std::size_t>(index - 1)];
  return f.index == index ? &f : nullptr;
}

void ValidationReport::merge(const ValidationReport& other, std::string_view prefix) {
  for (const auto& v : other.violations) {
    std::string path(prefix);
    if (!v.path.empty()) {
      if (!path.empty()) path += '.';
      path += v.path;
    }
    violations.push_back({std::move(path), v.message});
  }
}

bool ValidationReport::mentions(std::string_view needle) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
    return v.message.find(needle) != std::string::npos || v.path.find(needle) != std::string::npos;
  });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << (violations[i].path.empty() ? "<root>" : violations[i].path) << ": "
       << violations[i].message;
  }
  return os.str();
}

void require_valid(const ValidationReport& report, std::string_view what) {
  if (!report.ok()) {
    throw ValidationError(std::string(what) + " invalid: " + report.to_string());
  }
}

bool is_utf8_boundary(std::string_view text, std::size_t offset) {
  if (offset > text.size()) return false;
  if (offset == text.size()) return true;
  return (static_cast<unsigned char>(text[offset]) & 0xC0u) != 0x80u;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

namespace {

bool blank(std::string_view s) { return whitespace_token_count(s) == 0; }

}  // namespace

ValidationReport validate(const FrameRef& f) {
  ValidationReport r;
  if (f.index < 1) r.add("index", "index >= 1");
  if (f.width <= 0) r.add("width", "width > 0");
  if (f.height <= 0) r.add("height", "height > 0");
  if (f.uri.empty()) r.add("uri", "uri non-empty");
  return r;
}

ValidationReport validate(const VideoRecord& v) {
  ValidationReport r;
  if (v.video_id.empty()) r.add("video_id", "video_id non-empty");
  if (v.frames.empty()) r.add("frames", "frames non-empty");
  if (v.fps.num <= 0 || v.fps.den <= 0) r.add("fps", "fps > 0");
  for (std::size_t i = 0; i < v.frames.size(); ++i) {
    const std::string path = "frames[" + std::to_string(i) + "]";
    r.merge(validate(v.frames[i]), path);
    if (v.frames[i].index != static_cast<int>(i) + 1) {
      r.add(path + ".index", "frame indices strictly increasing from 1 to T");
    }
  }
  return r;
}

ValidationReport validate(const BoundingBox& b) {
  ValidationReport r;
  const auto in_range = [](int c) { return c >= 0 && c <= BoundingBox::kMaxCoord; };
  if (!in_range(b.x1)) r.add("x1", "coordinate in [0, 999]");
  if (!in_range(b.y1)) r.add("y1", "coordinate in [0, 999]");
  if (!in_range(b.x2)) r.add("x2", "coordinate in [0, 999]");
  if (!in_range(b.y2)) r.add("y2", "coordinate in [0, 999]");
  if (!(b.x1 < b.x2)) r.add("x1", "x1 < x2");
  if (!(b.y1 < b.y2)) r.add("y1", "y1 < y2");
  if (!(b.confidence >= 0.0 && b.confidence <= 1.0)) r.add("confidence", "confidence in [0, 1]");
  return r;
}

ValidationReport validate(const NounChunk& c, std::string_view caption) {
  ValidationReport r;
  if (blank(c.text)) r.add("text", "text non-empty after trimming");
  if (c.chunk_id < 0) r.add("chunk_id", "chunk_id >= 0");
  if (!(c.start < c.end) || c.end > caption.size()) {
    r.add("char_span", "char_span within caption");
    return r;
  }
  if (!is_utf8_boundary(caption, c.start) || !is_utf8_boundary(caption, c.end)) {
    r.add("char_span", "char_span on UTF-8 boundaries");
  }
  if (caption.substr(c.start, c.end - c.start) != c.text) {
    r.add("text", "chunk text appears in caption at char_span");
  }
  return r;
}

ValidationReport validate(std::span<const NounChunk> chunks, std::string_view caption) {
  ValidationReport r;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    r.merge(validate(chunks[i], caption), "chunks[" + std::to_string(i) + "]");
  }
  std::vector<const NounChunk*> sorted;
  for (const auto& c : chunks) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const NounChunk* a, const NounChunk* b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->start < sorted[i - 1]->end) {
      r.add("chunks", "chunk spans non-overlapping");
      break;
    }
  }
  std::set<int> ids;
  for (const auto& c : chunks) {
    if (!ids.insert(c.chunk_id).second) {
      r.add("chunks", "chunk ids unique");
      break;
    }
  }
  return r;
}

ValidationReport validate(const InstanceTrack& t) {
  ValidationReport r;
  if (blank(t.chunk.text)) r.add("chunk.text", "text non-empty after trimming");
  for (const auto& [index, entry] : t.per_frame) {
    const std::string path = "per_frame[" + std::to_string(index) + "]";
    r.merge(validate(entry.box), path + ".box");
    if (entry.segment_uri.empty()) r.add(path + ".segment_uri", "every entry has a segment_uri");
    if (t.lost_frames.count(index)) r.add(path, "frame both tracked and lost");
  }
  return r;
}

ValidationReport validate(const InstanceTrack& t, const VideoRecord& video) {
  ValidationReport r = validate(t);
  for (const auto& [index, entry] : t.per_frame) {
    if (video.frame(index) == nullptr) {
      r.add("per_frame[" + std::to_string(index) + "]", "per_frame keys within video frames");
    }
  }
  return r;
}

ValidationReport validate(const FramePairSample& s) {
  ValidationReport r;
  if (s.video_id.empty()) r.add("video_id", "video_id non-empty");
  r.merge(validate(s.target_frame), "target_frame");
  if (s.t_ref < 1) r.add("t_ref", "t_ref >= 1");
  if (s.reference_frame_index != s.target_frame.index + s.t_ref) {
    r.add("reference_frame_index", "reference_frame_index == target_frame.index + t_ref");
  }
  std::vector<NounChunk> chunks;
  for (std::size_t i = 0; i < s.instances.size(); ++i) {
    const auto& inst = s.instances[i];
    const std::string path = "instances[" + std::to_string(i) + "]";
    r.merge(validate(inst.box), path + ".box");
    if (inst.segment_uri.empty()) r.add(path + ".segment_uri", "segment_uri non-empty");
    chunks.push_back(inst.chunk);
  }
  r.merge(validate(std::span<const NounChunk>(chunks), s.caption), "");
  return r;
}

ValidationReport validate(const InterleavedSample& s) {
  ValidationReport r;
  if (s.target_image_uri.empty()) r.add("target_image_uri", "target_image_uri non-empty");
  try {
    const auto parsed = seqfmt::parse(s.serialized_text);
    std::vector<std::string> uris;
    for (const auto& g : parsed.groups) {
      if (g.segment_uri) uris.push_back(*g.segment_uri);
    }
    if (uris != s.attachments) {
      r.add("attachments", "attachments equal the undropped <img> spans in order");
    }
  } catch (const seqfmt::ParseError& e) {
    r.add("serialized_text", std::string("parses under the sequence grammar: ") + e.what());
  }
  return r;
}

ValidationReport validate(const PsrSample& s) {
  ValidationReport r;
  if (blank(s.c_brief)) r.add("c_brief", "c_brief non-empty");
  if (blank(s.c_dense)) r.add("c_dense", "c_dense non-empty");
  if (s.image_uri.empty()) r.add("image_uri", "image_uri non-empty");
  const std::string user = "Generate an image with prompt rewrite about " + s.c_brief + ".";
  const std::string assistant = "Here is my detailed description: " + s.c_dense +
                                " Here is the generated image: <img>" + s.image_uri + "</img>.";
  if (s.user_turn != user) r.add("user_turn", "user_turn matches template");
  if (s.assistant_turn != assistant) r.add("assistant_turn", "assistant_turn matches template");
  return r;
}

ValidationReport validate(const CategoricalDistribution& d) {
  ValidationReport r;
  if (d.probs.empty()) r.add("probs", "at least one outcome");
  if (d.probs.size() != d.vocab_ids.size()) r.add("vocab_ids", "probs.len == vocab_ids.len");
  double sum = 0.0;
  for (double p : d.probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      r.add("probs", "probabilities non-negative and finite");
      break;
    }
    sum += p;
  }
  if (!(std::abs(sum - 1.0) <= CategoricalDistribution::kSumTolerance)) {
    r.add("probs", "|sum(probs) - 1| <= 1e-9");
  }
  std::set<int> ids(d.vocab_ids.begin(), d.vocab_ids.end());
  if (ids.size() != d.vocab_ids.size()) r.add("vocab_ids", "vocab ids unique");
  return r;
}

ValidationReport validate(const ImageBuffer& img) {
  ValidationReport r;
  if (img.width <= 0 || img.height <= 0) r.add("shape", "width, height > 0");
  if (img.channels != 3) r.add("channels", "channels == 3");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    r.add("data", "data length == width*height*channels");
  }
  return r;
}

}  // namespace groundseq
