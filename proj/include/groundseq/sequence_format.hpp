// SPDX-License-Identifier: Apache-2.0
//
// Interleaved grounded-caption format.
//
//   TEXT  := (plain | group)*
//   group := "<p>" chunk "</p>" ["<b>" "[" int "," int "," int "," int "]" "</b>"]
//            ["<img>" uri "</img>"]
//
// Integers are canonical decimals (no sign, no leading zeros) in [0, 999].
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groundseq/core.hpp"

namespace groundseq::seqfmt {

inline constexpr std::string_view kPhraseOpen = "<p>";
inline constexpr std::string_view kPhraseClose = "</p>";
inline constexpr std::string_view kBoxOpen = "<b>";
inline constexpr std::string_view kBoxClose = "</b>";
inline constexpr std::string_view kImgOpen = "<img>";
inline constexpr std::string_view kImgClose = "</img>";

inline constexpr std::array<std::string_view, 6> kSpanTokens = {
    kPhraseOpen, kPhraseClose, kBoxOpen, kBoxClose, kImgOpen, kImgClose};

/// Returns the offset of the first span-token literal in `text`, if any.
std::optional<std::size_t> find_span_token(std::string_view text);

struct DropConfig {
  double drop_prob = 0.3;
  std::uint64_t seed = 0;
  /// When false a single draw per instance drops box and segment together.
  bool independent = true;
};

enum class DropField { kBox, kSegment, kJoint };

/// Counter-based draw in [0, 1) keyed by (seed, video_id, chunk_id, field).
double drop_draw(std::uint64_t seed, std::string_view video_id, int chunk_id, DropField field);

struct DropDecision {
  bool box_dropped = false;
  bool segment_dropped = false;
};
DropDecision decide_drops(const DropConfig& cfg, std::string_view video_id, int chunk_id);

struct Box4 {
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  bool operator==(const Box4&) const = default;
};

/// One <p> group as it appears in serialized text.
struct Group {
  std::string chunk;
  /// Byte offsets of the chunk text inside ParsedText::skeleton.
  std::size_t skeleton_start = 0;
  std::size_t skeleton_end = 0;
  std::optional<Box4> box;
  std::optional<std::string> segment_uri;
  bool operator==(const Group&) const = default;
};

struct ParsedText {
  /// Caption text with all tags and box/segment payloads removed.
  std::string skeleton;
  std::vector<Group> groups;
  bool operator==(const ParsedText&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string message);
  std::size_t offset() const { return offset_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

/// Single left-to-right pass; throws ParseError with the byte offset of the fault.
ParsedText parse(std::string_view text);

/// Renders a parsed structure back to text. Inverse of parse for canonical input.
std::string render(const ParsedText& parsed);

std::string format_box(const Box4& b);

/// Rewrites the caption with grounded groups. Throws ValidationError for invalid
/// samples or captions/URIs containing span-token literals.
InterleavedSample serialize(const FramePairSample& sample, const DropConfig& drop);

}  // namespace groundseq::seqfmt
