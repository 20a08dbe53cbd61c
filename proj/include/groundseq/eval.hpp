// SPDX-License-Identifier: Apache-2.0
//
// Evaluation harness: pairwise diversity (PSNR_d, LPIPS_d), embedding
// fidelity (DINO, CLIP-I, CLIP-T), the four-images-per-case subject-driven
// protocol, and ablation sweeps.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "groundseq/annotate.hpp"
#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"
#include "groundseq/gateway.hpp"
#include "groundseq/sampling.hpp"

namespace groundseq::eval {

inline constexpr double kDefaultPsnrClampDb = 100.0;

/// Sum of squared sample differences; exact integer arithmetic.
std::uint64_t squared_error_sum(const ImageBuffer& a, const ImageBuffer& b);

/// 10 log10(255^2 / MSE); +infinity for identical buffers.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

struct PairScores {
  double psnr_d = 0.0;
  double lpips_d = 0.0;
  std::size_t pairs = 0;
};

/// Means over all unordered pairs (i < j). Infinite PSNR is clamped to `psnr_clamp_db`.
/// Per-pair scores are computed in parallel and summed in (i, j) order.
PairScores pairwise_diversity(std::span<const ImageBuffer> samples,
                              const gateway::ModelGateway& perceptual,
                              double psnr_clamp_db = kDefaultPsnrClampDb, int workers = 0);

/// Serial reference for pairwise_diversity.
PairScores pairwise_diversity_serial(std::span<const ImageBuffer> samples,
                                     const gateway::ModelGateway& perceptual,
                                     double psnr_clamp_db = kDefaultPsnrClampDb);

struct PromptSamples {
  std::string prompt_id;
  std::vector<ImageBuffer> images;
};

struct PromptDiversity {
  std::string prompt_id;
  double psnr_d = 0.0;
  double lpips_d = 0.0;
  std::size_t n_samples = 0;
};

struct DiversityReport {
  std::vector<PromptDiversity> per_prompt;
  double aggregate_psnr_d = 0.0;
  double aggregate_lpips_d = 0.0;
};
json to_json(const DiversityReport& r);

DiversityReport diversity_report(std::span<const PromptSamples> prompts,
                                 const gateway::ModelGateway& perceptual,
                                 double psnr_clamp_db = kDefaultPsnrClampDb, int workers = 0);

struct FidelityReport {
  double dino = 0.0;
  double clip_i = 0.0;
  double clip_t = 0.0;
  std::size_t pairs = 0;
};
json to_json(const FidelityReport& r);

double dot(std::span<const double> a, std::span<const double> b);

/// Mean that does not depend on the order of `values` (sums them sorted).
double order_invariant_mean(std::vector<double> values);

/// Aligned lists: generated[i] is compared with reference[i] (DINO, CLIP-I) and
/// prompts[i] (CLIP-T). Inputs are image URIs and prompt texts.
FidelityReport fidelity(std::span<const std::string> generated, std::span<const std::string> reference,
                        std::span<const std::string> prompts, const gateway::ModelGateway& embed);

// ---------------------------------------------------------------------------
// Subject-driven protocol

struct BenchCase {
  std::string case_id;
  std::string subject_id;
  std::vector<std::string> reference_uris;
  std::string prompt;
};
BenchCase bench_case_from_json(const json& j);
json to_json(const BenchCase& c);

struct ImageRequest {
  std::string case_id;
  int sample_index = 0;
  std::string prompt;
  std::vector<std::string> reference_uris;
  std::uint64_t seed = 0;
  bool operator==(const ImageRequest&) const = default;
};
json to_json(const ImageRequest& r);

/// Request sink for an external image generator. Returns the generated image URI.
class ImageGenerator {
 public:
  virtual ~ImageGenerator() = default;
  virtual std::string generate(const ImageRequest& request) = 0;
};

/// Records every request and answers "generated/{case_id}/{sample_index}.png".
class RecordingGenerator final : public ImageGenerator {
 public:
  std::string generate(const ImageRequest& request) override;
  const std::vector<ImageRequest>& requests() const { return requests_; }
  /// Requests for these case ids throw a ServiceError.
  std::set<std::string> failing_cases;

 private:
  std::vector<ImageRequest> requests_;
};

struct ProtocolOptions {
  int samples_per_case = 4;
  std::uint64_t seed = 0;
};

struct CaseRecord {
  std::string case_id;
  std::vector<std::string> generated_uris;
  std::optional<FidelityReport> fidelity;
  std::string error;
};

struct ProtocolResult {
  FidelityReport overall;
  std::vector<CaseRecord> cases;
  std::size_t requests_issued = 0;
};
json to_json(const ProtocolResult& r);

/// Issues samples_per_case requests per case in manifest order and scores every
/// generated image against the case's references and prompt. Failures are recorded
/// on the case and the protocol continues.
ProtocolResult dreambench_protocol(std::span<const BenchCase> cases, ImageGenerator& generator,
                                   const gateway::ModelGateway& embed,
                                   const ProtocolOptions& options = {});

// ---------------------------------------------------------------------------
// Ablation sweeps

struct SweepRow {
  std::string setting;
  std::map<std::string, double> metrics;
  bool failed = false;
  std::string error;
};

struct SweepTable {
  std::string axis;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
};
json to_json(const SweepTable& t);
/// Aligned-column text rendering.
std::string to_text(const SweepTable& t);

using SettingRunner = std::function<std::map<std::string, double>(const std::string& setting)>;

/// One row per setting; a throwing runner yields a failed row.
SweepTable ablation_sweep(std::string axis, std::span<const std::string> settings,
                          std::vector<std::string> columns, const SettingRunner& run);

/// Row labels of the temporal-interval ablation: 2, 8, 25, 50.
std::vector<std::string> t_ref_settings();

struct StrategySetting {
  std::string label;
  sampling::SamplingStrategy strategy;
};
/// "w/o samp.", "Pure samp.", "Top-P", "Temp", "Top-P+Temp" with p = 0.9, t = 0.8.
std::vector<StrategySetting> strategy_settings(int max_tokens = 64);

/// Deterministic stand-in for the image decoder: the picture depends only on
/// (c_brief, c_dense), so identical rewrites render identical images.
class StubRenderer {
 public:
  explicit StubRenderer(int width = 16, int height = 16, std::uint64_t seed = 0)
      : width_(width), height_(height), seed_(seed) {}
  ImageBuffer render(const sampling::GenerationRequest& request) const;

 private:
  int width_;
  int height_;
  std::uint64_t seed_;
};

struct TRefSweepInputs {
  std::vector<VideoRecord> corpus;
  const gateway::ModelGateway* gateway = nullptr;
  annotate::AnnotationConfig base;
  int workers = 0;
};

/// Columns DINO and CLIP-T. Each setting annotates the corpus at that t_ref and scores
/// the generated image of every sample against its target frame and caption.
SweepTable t_ref_sweep(const TRefSweepInputs& in, ImageGenerator& generator);

struct StrategySweepInputs {
  std::vector<std::string> prompts;
  const gateway::ModelGateway* gateway = nullptr;
  StubRenderer renderer;
  int samples_per_prompt = 4;
  std::uint64_t seed = 0;
  int max_tokens = 64;
  int workers = 0;
};

/// Columns PSNR_d and CLIP-T. Each prompt is rewritten samples_per_prompt times with
/// distinct seeds, rendered, and scored for diversity and prompt fidelity.
SweepTable strategy_sweep(const StrategySweepInputs& in);

}  // namespace groundseq::eval
