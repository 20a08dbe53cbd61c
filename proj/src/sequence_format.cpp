// SPDX-License-Identifier: Apache-2.0
#include "groundseq/sequence_format.hpp"

#include <algorithm>

#include "groundseq/rng.hpp"

namespace groundseq::seqfmt {

std::optional<std::size_t> find_span_token(std::string_view text) {
  for (std::size_t i = text.find('<'); i != std::string_view::npos; i = text.find('<', i + 1)) {
    for (auto tok : kSpanTokens) {
      if (text.substr(i, tok.size()) == tok) return i;
    }
  }
  return std::nullopt;
}

double drop_draw(std::uint64_t seed, std::string_view video_id, int chunk_id, DropField field) {
  return rng::to_unit(rng::keyed(seed, video_id, static_cast<std::uint64_t>(chunk_id),
                                 static_cast<std::uint64_t>(field)));
}

DropDecision decide_drops(const DropConfig& cfg, std::string_view video_id, int chunk_id) {
  if (!(cfg.drop_prob >= 0.0 && cfg.drop_prob <= 1.0)) {
    throw ValidationError("drop_prob must lie in [0, 1]");
  }
  DropDecision d;
  if (cfg.independent) {
    d.box_dropped = drop_draw(cfg.seed, video_id, chunk_id, DropField::kBox) < cfg.drop_prob;
    d.segment_dropped =
        drop_draw(cfg.seed, video_id, chunk_id, DropField::kSegment) < cfg.drop_prob;
  } else {
    const bool both = drop_draw(cfg.seed, video_id, chunk_id, DropField::kJoint) < cfg.drop_prob;
    d.box_dropped = d.segment_dropped = both;
  }
  return d;
}

ParseError::ParseError(std::size_t offset, std::string message)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + message),
      offset_(offset),
      detail_(std::move(message)) {}

std::string format_box(const Box4& b) {
  return "[" + std::to_string(b.x1) + "," + std::to_string(b.y1) + "," + std::to_string(b.x2) +
         "," + std::to_string(b.y2) + "]";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParsedText run() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == '<') {
        if (at(kPhraseOpen)) {
          group();
          continue;
        }
        if (at(kBoxOpen)) fail(pos_, "<b> not immediately following a group");
        if (at(kImgOpen)) fail(pos_, "<img> not immediately following a group");
        if (at(kPhraseClose)) fail(pos_, "unmatched </p>");
        if (at(kBoxClose)) fail(pos_, "unmatched </b>");
        if (at(kImgClose)) fail(pos_, "unmatched </img>");
      }
      out_.skeleton.push_back(text_[pos_++]);
    }
    return std::move(out_);
  }

 private:
  bool at(std::string_view tok) const { return text_.substr(pos_, tok.size()) == tok; }

  [[noreturn]] static void fail(std::size_t offset, std::string message) {
    throw ParseError(offset, std::move(message));
  }

  // Scans payload bytes up to `close`; any other tag start means the open tag is unclosed.
  std::string_view payload(std::size_t open_at, std::string_view close, const char* unclosed) {
    const std::size_t begin = pos_;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '<') {
        if (at(close)) {
          std::string_view body = text_.substr(begin, pos_ - begin);
          pos_ += close.size();
          return body;
        }
        for (auto tok : kSpanTokens) {
          if (at(tok)) fail(open_at, unclosed);
        }
      }
      ++pos_;
    }
    fail(open_at, unclosed);
  }

  int integer() {
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
    const std::size_t len = pos_ - begin;
    if (len == 0) fail(begin, "malformed integer: expected digit");
    if (len > 1 && text_[begin] == '0') fail(begin, "malformed integer: leading zero");
    if (len > 3) fail(begin, "coordinate out of range");
    int v = 0;
    for (std::size_t i = begin; i < pos_; ++i) v = v * 10 + (text_[i] - '0');
    if (v > BoundingBox::kMaxCoord) fail(begin, "coordinate out of range");
    return v;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(pos_, std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  void group() {
    const std::size_t open_at = pos_;
    pos_ += kPhraseOpen.size();
    const std::string_view chunk = payload(open_at, kPhraseClose, "unclosed <p>");
    if (chunk.empty()) fail(open_at, "empty phrase");

    Group g;
    g.chunk = std::string(chunk);
    g.skeleton_start = out_.skeleton.size();
    out_.skeleton.append(chunk);
    g.skeleton_end = out_.skeleton.size();

    if (at(kBoxOpen)) {
      const std::size_t box_at = pos_;
      pos_ += kBoxOpen.size();
      expect('[');
      Box4 b;
      b.x1 = integer();
      expect(',');
      b.y1 = integer();
      expect(',');
      b.x2 = integer();
      expect(',');
      b.y2 = integer();
      expect(']');
      if (!at(kBoxClose)) fail(box_at, "unclosed <b>");
      pos_ += kBoxClose.size();
      g.box = b;
    }
    if (at(kImgOpen)) {
      const std::size_t img_at = pos_;
      pos_ += kImgOpen.size();
      const std::string_view uri = payload(img_at, kImgClose, "unclosed <img>");
      if (uri.empty()) fail(img_at, "empty segment uri");
      g.segment_uri = std::string(uri);
    }
    out_.groups.push_back(std::move(g));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  ParsedText out_;
};

}  // namespace

ParsedText parse(std::string_view text) { return Parser(text).run(); }

std::string render(const ParsedText& parsed) {
  std::string out;
  out.reserve(parsed.skeleton.size() + parsed.groups.size() * 48);
  std::size_t cursor = 0;
  for (const auto& g : parsed.groups) {
    out.append(parsed.skeleton, cursor, g.skeleton_start - cursor);
    out.append(kPhraseOpen).append(g.chunk).append(kPhraseClose);
    if (g.box) out.append(kBoxOpen).append(format_box(*g.box)).append(kBoxClose);
    if (g.segment_uri) out.append(kImgOpen).append(*g.segment_uri).append(kImgClose);
    cursor = g.skeleton_end;
  }
  out.append(parsed.skeleton, cursor, std::string::npos);
  return out;
}

InterleavedSample serialize(const FramePairSample& sample, const DropConfig& drop) {
  require_valid(validate(sample), "frame-pair sample " + sample.video_id);
  if (auto at = find_span_token(sample.caption)) {
    throw ValidationError("caption of " + sample.video_id +
                          " contains a reserved span token at byte " + std::to_string(*at));
  }
  for (const auto& inst : sample.instances) {
    if (inst.segment_uri.find('<') != std::string::npos) {
      throw ValidationError("segment uri contains '<': " + inst.segment_uri);
    }
  }

  std::vector<const GroundedInstance*> ordered;
  for (const auto& inst : sample.instances) ordered.push_back(&inst);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->chunk.start < b->chunk.start;
  });

  InterleavedSample out;
  out.target_image_uri = sample.target_frame.uri;
  out.rng_seed = drop.seed;
  std::string& text = out.serialized_text;
  std::size_t cursor = 0;
  for (const auto* inst : ordered) {
    const auto& c = inst->chunk;
    text.append(sample.caption, cursor, c.start - cursor);
    text.append(kPhraseOpen).append(c.text).append(kPhraseClose);
    const DropDecision d = decide_drops(drop, sample.video_id, c.chunk_id);
    if (!d.box_dropped) {
      const Box4 b{inst->box.x1, inst->box.y1, inst->box.x2, inst->box.y2};
      text.append(kBoxOpen).append(format_box(b)).append(kBoxClose);
    }
    if (!d.segment_dropped) {
      text.append(kImgOpen).append(inst->segment_uri).append(kImgClose);
      out.attachments.push_back(inst->segment_uri);
    }
    cursor = c.end;
  }
  text.append(sample.caption, cursor, std::string::npos);
  return out;
}

}  // namespace groundseq::seqfmt
