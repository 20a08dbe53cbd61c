// SPDX-License-Identifier: Apache-2.0
#include "groundseq/manifest.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace groundseq::store {

namespace fs = std::filesystem;

std::string_view record_type(const Record& r) {
  static constexpr std::string_view kNames[] = {"video", "frame_pair", "interleaved", "psr"};
  return kNames[r.index()];
}

std::string encode_record(const Record& r) {
  json j;
  j["type"] = record_type(r);
  std::visit([&](const auto& v) { j["record"] = v; }, r);
  return canonical_dump(j);
}

namespace {

template <typename T>
Record decode_as(const json& body, std::size_t line_no) {
  T v;
  try {
    body.get_to(v);
  } catch (const json::exception& e) {
    throw ManifestError(line_no, std::string("bad record: ") + e.what());
  }
  return v;
}

json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw ManifestError(line_no, std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " +
                                     e.what());
  }
}

}  // namespace

Record decode_record(std::string_view line, std::size_t line_no) {
  const json j = parse_json_line(line, line_no);
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string() || !j.contains("record")) {
    throw ManifestError(line_no, "expected {\"type\": ..., \"record\": ...}");
  }
  const std::string type = j["type"];
  const json& body = j["record"];
  if (type == "video") return decode_as<VideoRecord>(body, line_no);
  if (type == "frame_pair") return decode_as<FramePairSample>(body, line_no);
  if (type == "interleaved") return decode_as<InterleavedSample>(body, line_no);
  if (type == "psr") return decode_as<PsrSample>(body, line_no);
  throw ManifestError(line_no, "unknown record type \"" + type + "\"");
}

std::string serialize(const Manifest& m) {
  std::string out = canonical_dump(json{{"kind", "manifest"}, {"schema_version", m.schema_version}});
  out += '\n';
  for (const auto& r : m.records) {
    out += encode_record(r);
    out += '\n';
  }
  return out;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw ManifestError(line_no + 1, "truncated line (missing newline)");
    }
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!header_seen) {
      const json h = parse_json_line(line, line_no);
      if (!h.is_object() || h.value("kind", std::string()) != "manifest" ||
          !h.contains("schema_version") || !h["schema_version"].is_number_integer()) {
        throw ManifestError(line_no, "missing manifest header");
      }
      m.schema_version = h["schema_version"];
      if (m.schema_version != kSchemaVersion) {
        throw ManifestError(line_no, "schema_version " + std::to_string(m.schema_version) +
                                         " does not match reader version " +
                                         std::to_string(kSchemaVersion));
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) throw ManifestError(line_no, "empty line");
    m.records.push_back(decode_record(line, line_no));
  }
  if (!header_seen) throw ManifestError(1, "missing manifest header");
  return m;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

fs::path checksum_path(const fs::path& p) { return fs::path(p.string() + ".sha256"); }

namespace {

[[noreturn]] void throw_errno(const std::string& what, const fs::path& p) {
  throw std::runtime_error(what + " " + p.string() + ": " + std::strerror(errno));
}

struct Fd {
  int fd;
  ~Fd() {
    if (fd >= 0) ::close(fd);
  }
};

}  // namespace

void write_file_atomic(const fs::path& p, std::string_view contents) {
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::string tmpl = (dir / ("." + p.filename().string() + ".tmp.XXXXXX")).string();
  Fd tmp{::mkstemp(tmpl.data())};
  if (tmp.fd < 0) throw_errno("cannot create temp file for", p);
  const fs::path tmp_path = tmpl;
  try {
    std::size_t done = 0;
    while (done < contents.size()) {
      const ssize_t n = ::write(tmp.fd, contents.data() + done, contents.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_errno("write failed for", tmp_path);
      }
      done += static_cast<std::size_t>(n);
    }
    if (::fchmod(tmp.fd, 0644) != 0) throw_errno("chmod failed for", tmp_path);
    if (::fsync(tmp.fd) != 0) throw_errno("fsync failed for", tmp_path);
    ::close(tmp.fd);
    tmp.fd = -1;
    if (::rename(tmp_path.c_str(), p.c_str()) != 0) throw_errno("rename failed for", p);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp_path, ec);
    throw;
  }
  Fd d{::open(dir.c_str(), O_RDONLY | O_DIRECTORY)};
  if (d.fd >= 0) ::fsync(d.fd);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FileLock::FileLock(const fs::path& target) {
  const std::string lock = target.string() + ".lock";
  fd_ = ::open(lock.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw_errno("cannot open lock", lock);
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) {
      ::close(fd_);
      throw_errno("cannot lock", lock);
    }
  }
}

FileLock::~FileLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void write_manifest(const fs::path& p, const Manifest& m) {
  const std::string text = serialize(m);
  FileLock lock(p);
  write_file_atomic(p, text);
  write_file_atomic(checksum_path(p), sha256_hex(text) + "  " + p.filename().string() + "\n");
}

Manifest read_manifest(const fs::path& p, bool require_checksum) {
  const std::string text = read_file(p);
  const fs::path sidecar = checksum_path(p);
  if (fs::exists(sidecar)) {
    const std::string recorded = read_file(sidecar).substr(0, 64);
    if (recorded != sha256_hex(text)) throw ValidationError("checksum mismatch for " + p.string());
  } else if (require_checksum) {
    throw ValidationError("missing checksum file " + sidecar.string());
  }
  return parse_manifest(text);
}

ManifestStats stats(const Manifest& m) {
  ManifestStats s;
  for (const char* t : {"video", "frame_pair", "interleaved", "psr"}) s.counts[t] = 0;
  std::size_t instances = 0, caption_tokens = 0, pairs = 0;
  std::size_t brief_tokens = 0, dense_tokens = 0, psrs = 0;
  for (const auto& r : m.records) {
    ++s.counts[std::string(record_type(r))];
    if (const auto* fp = std::get_if<FramePairSample>(&r)) {
      ++pairs;
      instances += fp->instances.size();
      caption_tokens += whitespace_token_count(fp->caption);
    } else if (const auto* ps = std::get_if<PsrSample>(&r)) {
      ++psrs;
      brief_tokens += whitespace_token_count(ps->c_brief);
      dense_tokens += whitespace_token_count(ps->c_dense);
    }
  }
  if (pairs) {
    s.mean_instances = static_cast<double>(instances) / static_cast<double>(pairs);
    s.mean_caption_tokens = static_cast<double>(caption_tokens) / static_cast<double>(pairs);
  }
  if (psrs) {
    s.mean_brief_tokens = static_cast<double>(brief_tokens) / static_cast<double>(psrs);
    s.mean_dense_tokens = static_cast<double>(dense_tokens) / static_cast<double>(psrs);
  }
  return s;
}

json to_json(const ManifestStats& s) {
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"counts", s.counts},
          {"mean_instances", opt(s.mean_instances)},
          {"mean_caption_tokens", opt(s.mean_caption_tokens)},
          {"mean_brief_tokens", opt(s.mean_brief_tokens)},
          {"mean_dense_tokens", opt(s.mean_dense_tokens)}};
}

}  // namespace groundseq::store
