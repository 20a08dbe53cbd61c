// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace groundseq {

/// Raised when an input violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Fps {
  std::int64_t num = 25;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fps&) const = default;
};

/// One decoded frame of a video; `index` is 1-based.
struct FrameRef {
  int index = 1;
  std::string uri;
  int width = 0;
  int height = 0;
  bool operator==(const FrameRef&) const = default;
};

struct VideoRecord {
  std::string video_id;
  std::vector<FrameRef> frames;
  Fps fps;
  std::string source_tag;

  int frame_count() const { return static_cast<int>(frames.size()); }
  /// Frame by 1-based index, or nullptr when absent.
  const FrameRef* frame(int index) const;
  bool operator==(const VideoRecord&) const = default;
};

/// A grounded noun phrase; [start, end) are UTF-8 byte offsets into the caption.
struct NounChunk {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  int chunk_id = 0;
  bool operator==(const NounChunk&) const = default;
};

/// Box corners in thousandths of frame width/height, each in [0, 999].
struct BoundingBox {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;
  double confidence = 1.0;

  static constexpr int kMaxCoord = 999;

  struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
  };
  Point center() const { return {(x1 + x2) / 2, (y1 + y2) / 2}; }
  bool operator==(const BoundingBox&) const = default;
};

struct TrackedBox {
  BoundingBox box;
  std::string segment_uri;
  bool operator==(const TrackedBox&) const = default;
};

struct InstanceTrack {
  NounChunk chunk;
  std::map<int, TrackedBox> per_frame;
  std::set<int> lost_frames;
  bool operator==(const InstanceTrack&) const = default;
};

/// One instance annotation taken at the reference frame.
struct GroundedInstance {
  NounChunk chunk;
  BoundingBox box;
  std::string segment_uri;
  bool operator==(const GroundedInstance&) const = default;
};

struct FramePairSample {
  std::string video_id;
  FrameRef target_frame;
  int reference_frame_index = 0;
  int t_ref = 1;
  std::vector<GroundedInstance> instances;
  std::string caption;
  bool operator==(const FramePairSample&) const = default;
};

struct InterleavedSample {
  std::string serialized_text;
  std::string target_image_uri;
  std::vector<std::string> attachments;
  std::uint64_t rng_seed = 0;
  bool operator==(const InterleavedSample&) const = default;
};

struct PsrSample {
  std::string c_brief;
  std::string c_dense;
  std::string image_uri;
  std::string user_turn;
  std::string assistant_turn;
  bool operator==(const PsrSample&) const = default;
};

/// Next-token distribution; `probs[i]` is the mass of token `vocab_ids[i]`.
struct CategoricalDistribution {
  std::vector<double> probs;
  std::vector<int> vocab_ids;

  static constexpr double kSumTolerance = 1e-9;
  std::size_t size() const { return probs.size(); }
  bool operator==(const CategoricalDistribution&) const = default;
};

/// Row-major 8-bit RGB pixels.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;
  /// Optional locator, used when the buffer has to be referenced over the wire.
  std::string uri;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  std::size_t sample_count() const { return data.size(); }
  bool same_shape(const ImageBuffer& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

struct Violation {
  std::string path;
  std::string message;
};

/// Empty iff the checked value satisfies every invariant of its type.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string path, std::string message) {
    violations.push_back({std::move(path), std::move(message)});
  }
  void merge(const ValidationReport& other, std::string_view prefix);
  bool mentions(std::string_view needle) const;
  std::string to_string() const;
};

ValidationReport validate(const FrameRef& f);
ValidationReport validate(const VideoRecord& v);
ValidationReport validate(const BoundingBox& b);
/// Checks one chunk against the caption it was extracted from.
ValidationReport validate(const NounChunk& c, std::string_view caption);
/// Checks a caption's chunk list, including pairwise non-overlap.
ValidationReport validate(std::span<const NounChunk> chunks, std::string_view caption);
ValidationReport validate(const InstanceTrack& t);
ValidationReport validate(const InstanceTrack& t, const VideoRecord& video);
ValidationReport validate(const FramePairSample& s);
ValidationReport validate(const InterleavedSample& s);
ValidationReport validate(const PsrSample& s);
ValidationReport validate(const CategoricalDistribution& d);
ValidationReport validate(const ImageBuffer& img);

/// Throws ValidationError carrying the report text when `report` is not ok.
void require_valid(const ValidationReport& report, std::string_view what);

/// True when `offset` does not fall inside a multi-byte UTF-8 sequence.
bool is_utf8_boundary(std::string_view text, std::size_t offset);

/// Whitespace-delimited token count.
std::size_t whitespace_token_count(std::string_view text);

}  // namespace groundseq
