// SPDX-License-Identifier: Apache-2.0
//
// Autoregressive prompt rewriting: the dense caption is drawn token by token
// from the language model conditioned on the brief caption, with optional
// temperature and nucleus (top-p) reshaping of each step's distribution.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"
#include "groundseq/gateway.hpp"
#include "groundseq/rng.hpp"

namespace groundseq::sampling {

enum class StrategyKind { kGreedy, kPure, kTopP, kTemperature, kTopPAndTemperature };
std::string_view strategy_name(StrategyKind k);
std::optional<StrategyKind> parse_strategy(std::string_view name);

struct SamplingStrategy {
  StrategyKind kind = StrategyKind::kTopPAndTemperature;
  double p = 0.9;
  double t = 0.8;
  int max_tokens = 64;
  std::uint64_t seed = 0;
};
ValidationReport validate(const SamplingStrategy& s);
json to_json(const SamplingStrategy& s);
SamplingStrategy strategy_from_json(const json& j);

/// probs^(1/t), renormalized. t == 1 returns the input unchanged.
CategoricalDistribution apply_temperature(const CategoricalDistribution& d, double t);

/// Smallest high-probability prefix with cumulative mass >= p (ties: lower vocab id
/// first), renormalized. Dropped outcomes are removed; kept ones stay in input order.
CategoricalDistribution apply_top_p(const CategoricalDistribution& d, double p);

/// The strategy's reshaping; for the combined kind temperature runs before top-p.
/// Greedy and pure leave the distribution as is.
CategoricalDistribution transform(const CategoricalDistribution& d, const SamplingStrategy& s);

/// Highest-probability position; lowest vocab id wins exact ties.
std::size_t argmax_index(const CategoricalDistribution& d);

/// Inverse-CDF lookup of u in [0, 1) over the distribution's order.
std::size_t draw_index(const CategoricalDistribution& d, double u);

enum class Termination { kEos, kMaxTokens };

struct RewriteResult {
  std::vector<int> tokens;  // excludes the end-of-sequence token
  std::vector<std::string> surfaces;
  std::size_t m = 0;
  /// Sum of log-probabilities of every chosen token, the end-of-sequence token included,
  /// under the post-strategy distributions.
  double log_prob = 0.0;
  Termination terminated_by = Termination::kMaxTokens;
};

RewriteResult sample_rewrite(std::string_view c_brief, const gateway::ModelGateway& lm,
                             const SamplingStrategy& strategy, rng::Rng& rng);

/// Conditioning handed to the image generator.
struct GenerationRequest {
  std::string c_brief;
  std::string c_dense;
  SamplingStrategy strategy;
  std::uint64_t seed = 0;
};
json to_json(const GenerationRequest& r);

struct RewriteOutput {
  std::string c_dense;
  GenerationRequest request;
  RewriteResult rewrite;
};

RewriteOutput generate_with_rewrite(std::string_view c_brief, const gateway::ModelGateway& lm,
                                    const SamplingStrategy& strategy, rng::Rng& rng);

/// Seeds the generator from strategy.seed.
RewriteOutput generate_with_rewrite(std::string_view c_brief, const gateway::ModelGateway& lm,
                                    const SamplingStrategy& strategy);

}  // namespace groundseq::sampling
