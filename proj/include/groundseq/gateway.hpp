// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groundseq/core.hpp"

namespace groundseq::gateway {

enum class Service {
  kCaption,
  kNounChunks,
  kDetect,
  kTrack,
  kOcr,
  kMotion,
  kAesthetic,
  kEmbed,
  kPerceptual,
  kLm,
};

inline constexpr std::array<Service, 10> kAllServices = {
    Service::kCaption, Service::kNounChunks, Service::kDetect, Service::kTrack,
    Service::kOcr,     Service::kMotion,     Service::kAesthetic, Service::kEmbed,
    Service::kPerceptual, Service::kLm};

/// Wire name, e.g. "noun_chunks".
std::string_view service_name(Service s);
std::optional<Service> parse_service(std::string_view name);

class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual bool retryable() const = 0;
};

/// Connection failure or timeout. Retried by the HTTP client.
class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
  bool retryable() const override { return true; }
};

/// The service answered but the answer is an error or fails validation. Never retried.
class ServiceError : public GatewayError {
 public:
  using GatewayError::GatewayError;
  bool retryable() const override { return false; }
};

struct ServiceEndpoint {
  Service name = Service::kCaption;
  std::string base_url;
  int timeout_ms = 30000;
  int retry_limit = 3;
};
ValidationReport validate(const ServiceEndpoint& e);

enum class EmbedSpace { kDino, kClipImage, kClipText };
std::string_view embed_space_name(EmbedSpace s);
std::optional<EmbedSpace> parse_embed_space(std::string_view name);

struct TrackInit {
  int frame_index = 1;
  BoundingBox box;
  BoundingBox::Point center;
  NounChunk chunk;
};

/// Next-token distribution plus the surface strings of its outcomes.
struct LmDistribution {
  CategoricalDistribution dist;
  std::vector<std::string> tokens;
  int eos_id = 0;
};

/// "{video_id}/{chunk_id}/{frame_index}.png"
std::string segment_uri(std::string_view video_id, int chunk_id, int frame_index);

/// Abstract nouns that are hard to ground visually. Matched against a chunk's head word.
class StopList {
 public:
  StopList();  // built-in default list
  explicit StopList(std::set<std::string> words) : words_(std::move(words)) {}
  bool excludes(std::string_view chunk_text) const;
  bool contains(std::string_view word) const;
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
};

std::span<const std::string_view> default_abstract_nouns();

/// Client abstraction over the external model services. Public calls validate every
/// response against core invariants and raise ServiceError on violations.
class ModelGateway {
 public:
  virtual ~ModelGateway() = default;

  std::string caption(const FrameRef& frame) const;
  /// Chunks sorted by span start with stop-listed chunks removed; ids renumbered 1..N.
  std::vector<NounChunk> noun_chunks(std::string_view caption) const;
  /// Boxes sorted by confidence, highest first.
  std::vector<BoundingBox> detect(const FrameRef& frame, std::string_view phrase) const;
  InstanceTrack track(const VideoRecord& video, const TrackInit& init) const;
  double ocr_text_ratio(const FrameRef& frame) const;
  double motion_score(const FrameRef& a, const FrameRef& b) const;
  double aesthetic_score(const FrameRef& frame) const;
  std::vector<double> embed(std::string_view payload, EmbedSpace space) const;
  double perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const;
  LmDistribution lm_next_distribution(std::span<const int> prefix,
                                      std::string_view conditioning) const;

  const StopList& stop_list() const { return stop_list_; }
  void set_stop_list(StopList s) { stop_list_ = std::move(s); }

 protected:
  virtual std::string do_caption(const FrameRef& frame) const = 0;
  virtual std::vector<NounChunk> do_noun_chunks(std::string_view caption) const = 0;
  virtual std::vector<BoundingBox> do_detect(const FrameRef& frame,
                                             std::string_view phrase) const = 0;
  virtual InstanceTrack do_track(const VideoRecord& video, const TrackInit& init) const = 0;
  virtual double do_ocr_text_ratio(const FrameRef& frame) const = 0;
  virtual double do_motion_score(const FrameRef& a, const FrameRef& b) const = 0;
  virtual double do_aesthetic_score(const FrameRef& frame) const = 0;
  virtual std::vector<double> do_embed(std::string_view payload, EmbedSpace space) const = 0;
  virtual double do_perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const = 0;
  virtual LmDistribution do_lm_next_distribution(std::span<const int> prefix,
                                                 std::string_view conditioning) const = 0;

 private:
  StopList stop_list_;
};

// ---------------------------------------------------------------------------
// Deterministic in-process stub

struct ScoreTable {
  std::map<std::string, double> values;
  std::optional<double> fallback;

  double lookup(const std::string& key, std::string_view service) const;
};

/// Scripted tracker behaviour for one (video_id, chunk text) pair.
struct TrackScenario {
  /// First frame at which the tracker loses the instance; it stays lost afterwards.
  std::optional<int> lost_from;
  /// Per-frame translation of the box, in thousandths.
  int dx = 0;
  int dy = 0;
  bool fail = false;
};

struct BigramLm {
  /// Token surface strings; the position is the vocab id. Id 0 is the end-of-sequence token.
  std::vector<std::string> vocab = {"</s>"};
  /// Rows keyed by previous token surface; "<s>" is the start row and "<s>:{conditioning}"
  /// overrides it for a specific conditioning string. A token without a row is terminal.
  std::map<std::string, std::vector<std::pair<std::string, double>>> rows;

  int id_of(std::string_view token) const;
};

struct StubConfig {
  std::uint64_t seed = 0;
  std::map<std::string, std::string> canned_captions;
  std::set<std::string> noun_lexicon;
  std::set<std::string> modifier_lexicon;
  ScoreTable ocr;
  /// Keyed "{uri_a}|{uri_b}".
  ScoreTable motion;
  ScoreTable aesthetic;
  /// Keyed "{frame_uri}|{phrase}".
  std::map<std::string, std::vector<BoundingBox>> detections;
  /// Keyed "{video_id}|{chunk text}".
  std::map<std::string, TrackScenario> tracks;
  /// Keyed "{space}|{payload}"; values are normalized on lookup.
  std::map<std::string, std::vector<double>> embeddings;
  int embedding_dim = 16;
  BigramLm lm;

  /// Default lexicons and a small LM over a dog-themed vocabulary.
  static StubConfig with_defaults(std::uint64_t seed = 0);
};

class StubGateway final : public ModelGateway {
 public:
  explicit StubGateway(StubConfig config);
  const StubConfig& config() const { return config_; }

 protected:
  std::string do_caption(const FrameRef& frame) const override;
  std::vector<NounChunk> do_noun_chunks(std::string_view caption) const override;
  std::vector<BoundingBox> do_detect(const FrameRef& frame, std::string_view phrase) const override;
  InstanceTrack do_track(const VideoRecord& video, const TrackInit& init) const override;
  double do_ocr_text_ratio(const FrameRef& frame) const override;
  double do_motion_score(const FrameRef& a, const FrameRef& b) const override;
  double do_aesthetic_score(const FrameRef& frame) const override;
  std::vector<double> do_embed(std::string_view payload, EmbedSpace space) const override;
  double do_perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const override;
  LmDistribution do_lm_next_distribution(std::span<const int> prefix,
                                         std::string_view conditioning) const override;

 private:
  StubConfig config_;
};

/// Mean absolute sample difference divided by 255.
double mean_absolute_difference(const ImageBuffer& a, const ImageBuffer& b);

// ---------------------------------------------------------------------------
// HTTP client

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Issues one POST. Throws TransportError when no response was received.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            int timeout_ms) = 0;
};

std::shared_ptr<Transport> make_httplib_transport();

struct BackoffPolicy {
  int initial_ms = 100;
  double multiplier = 2.0;
  std::function<void(int)> sleep;  // defaults to std::this_thread::sleep_for
};

class HttpGateway final : public ModelGateway {
 public:
  HttpGateway(std::vector<ServiceEndpoint> endpoints, std::shared_ptr<Transport> transport,
              BackoffPolicy backoff = {});

  /// Same endpoint settings for every service under one base URL.
  static std::vector<ServiceEndpoint> uniform_endpoints(const std::string& base_url,
                                                        int timeout_ms = 30000,
                                                        int retry_limit = 3);

  const ServiceEndpoint& endpoint(Service s) const;

 protected:
  std::string do_caption(const FrameRef& frame) const override;
  std::vector<NounChunk> do_noun_chunks(std::string_view caption) const override;
  std::vector<BoundingBox> do_detect(const FrameRef& frame, std::string_view phrase) const override;
  InstanceTrack do_track(const VideoRecord& video, const TrackInit& init) const override;
  double do_ocr_text_ratio(const FrameRef& frame) const override;
  double do_motion_score(const FrameRef& a, const FrameRef& b) const override;
  double do_aesthetic_score(const FrameRef& frame) const override;
  std::vector<double> do_embed(std::string_view payload, EmbedSpace space) const override;
  double do_perceptual_distance(const ImageBuffer& a, const ImageBuffer& b) const override;
  LmDistribution do_lm_next_distribution(std::span<const int> prefix,
                                         std::string_view conditioning) const override;

 private:
  std::string call(Service s, const std::string& request_body) const;

  std::map<Service, ServiceEndpoint> endpoints_;
  std::shared_ptr<Transport> transport_;
  BackoffPolicy backoff_;
};

}  // namespace groundseq::gateway
