// SPDX-License-Identifier: Apache-2.0
//
// Dataset manifests: JSON Lines with a header line, one typed record per line,
// a SHA-256 sidecar, atomic replacement and an advisory writer lock.
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"

namespace groundseq::store {

inline constexpr int kSchemaVersion = 1;

using Record = std::variant<VideoRecord, FramePairSample, InterleavedSample, PsrSample>;

/// "video", "frame_pair", "interleaved" or "psr".
std::string_view record_type(const Record& r);

struct Manifest {
  int schema_version = kSchemaVersion;
  std::vector<Record> records;
  bool operator==(const Manifest&) const = default;
};

/// A malformed manifest. `line` is 1-based; the header is line 1.
class ManifestError : public ValidationError {
 public:
  ManifestError(std::size_t line, const std::string& message)
      : ValidationError("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string encode_record(const Record& r);
Record decode_record(std::string_view line, std::size_t line_no);

/// Canonical text: header line, then one record per line, each newline-terminated.
std::string serialize(const Manifest& m);
Manifest parse_manifest(std::string_view text);

std::string sha256_hex(std::string_view bytes);
std::filesystem::path checksum_path(const std::filesystem::path& p);

/// Writes through a temp file in the target directory, fsyncs, then renames over `p`.
void write_file_atomic(const std::filesystem::path& p, std::string_view contents);
std::string read_file(const std::filesystem::path& p);

/// Exclusive flock on "<path>.lock" for the lifetime of the object.
class FileLock {
 public:
  explicit FileLock(const std::filesystem::path& target);
  ~FileLock();
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

/// Locks, writes the manifest atomically and then its "<path>.sha256" sidecar.
void write_manifest(const std::filesystem::path& p, const Manifest& m);

/// Verifies the sidecar when present (or always, with require_checksum).
Manifest read_manifest(const std::filesystem::path& p, bool require_checksum = false);

struct ManifestStats {
  std::map<std::string, std::size_t> counts;  // every record type, zero included
  std::optional<double> mean_instances;       // per frame-pair sample
  std::optional<double> mean_caption_tokens;  // frame-pair captions
  std::optional<double> mean_brief_tokens;    // psr samples
  std::optional<double> mean_dense_tokens;
};
ManifestStats stats(const Manifest& m);
json to_json(const ManifestStats& s);

}  // namespace groundseq::store
