// SPDX-License-Identifier: Apache-2.0
#include "groundseq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace groundseq::sampling {

std::string_view strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::kGreedy: return "greedy";
    case StrategyKind::kPure: return "pure";
    case StrategyKind::kTopP: return "top_p";
    case StrategyKind::kTemperature: return "temperature";
    case StrategyKind::kTopPAndTemperature: return "top_p_and_temperature";
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (auto k : {StrategyKind::kGreedy, StrategyKind::kPure, StrategyKind::kTopP,
                 StrategyKind::kTemperature, StrategyKind::kTopPAndTemperature}) {
    if (strategy_name(k) == name) return k;
  }
  return std::nullopt;
}

ValidationReport validate(const SamplingStrategy& s) {
  ValidationReport r;
  if (!(s.p > 0.0 && s.p <= 1.0)) r.add("p", "p in (0, 1]");
  if (!(s.t > 0.0) || std::isinf(s.t)) r.add("t", "t > 0");
  if (s.max_tokens < 1) r.add("max_tokens", "max_tokens >= 1");
  return r;
}

json to_json(const SamplingStrategy& s) {
  return {{"kind", strategy_name(s.kind)},
          {"p", s.p},
          {"t", s.t},
          {"max_tokens", s.max_tokens},
          {"seed", s.seed}};
}

SamplingStrategy strategy_from_json(const json& j) {
  SamplingStrategy s;
  const auto kind = parse_strategy(j.value("kind", std::string(strategy_name(s.kind))));
  if (!kind) throw ValidationError("unknown sampling strategy kind");
  s.kind = *kind;
  s.p = j.value("p", s.p);
  s.t = j.value("t", s.t);
  s.max_tokens = j.value("max_tokens", s.max_tokens);
  s.seed = j.value("seed", s.seed);
  require_valid(validate(s), "sampling strategy");
  return s;
}

namespace {

void normalize(std::vector<double>& probs) {
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(sum > 0.0)) throw ValidationError("distribution has no mass");
  for (double& p : probs) p /= sum;
}

}  // namespace

CategoricalDistribution apply_temperature(const CategoricalDistribution& d, double t) {
  if (!(t > 0.0) || std::isinf(t)) throw ValidationError("temperature must be > 0");
  require_valid(validate(d), "distribution");
  if (t == 1.0) return d;
  // Work in log space so small t does not underflow every outcome.
  double max_log = -std::numeric_limits<double>::infinity();
  for (double p : d.probs) {
    if (p > 0.0) max_log = std::max(max_log, std::log(p));
  }
  CategoricalDistribution out = d;
  for (double& p : out.probs) {
    p = p > 0.0 ? std::exp((std::log(p) - max_log) / t) : 0.0;
  }
  normalize(out.probs);
  return out;
}

CategoricalDistribution apply_top_p(const CategoricalDistribution& d, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw ValidationError("top-p threshold must lie in (0, 1]");
  require_valid(validate(d), "distribution");
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (d.probs[a] != d.probs[b]) return d.probs[a] > d.probs[b];
    return d.vocab_ids[a] < d.vocab_ids[b];
  });
  // Slack absorbs rounding in the running sum so p = 1 keeps the full support.
  constexpr double kSlack = 1e-12;
  std::vector<bool> keep(d.size(), false);
  double cum = 0.0;
  for (std::size_t idx : order) {
    keep[idx] = true;
    cum += d.probs[idx];
    if (cum >= p - kSlack) break;
  }
  CategoricalDistribution out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!keep[i]) continue;
    out.probs.push_back(d.probs[i]);
    out.vocab_ids.push_back(d.vocab_ids[i]);
  }
  normalize(out.probs);
  return out;
}

CategoricalDistribution transform(const CategoricalDistribution& d, const SamplingStrategy& s) {
  switch (s.kind) {
    case StrategyKind::kGreedy:
    case StrategyKind::kPure:
      return d;
    case StrategyKind::kTopP:
      return apply_top_p(d, s.p);
    case StrategyKind::kTemperature:
      return apply_temperature(d, s.t);
    case StrategyKind::kTopPAndTemperature:
      return apply_top_p(apply_temperature(d, s.t), s.p);
  }
  return d;
}

std::size_t argmax_index(const CategoricalDistribution& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d.probs[i] > d.probs[best] ||
        (d.probs[i] == d.probs[best] && d.vocab_ids[i] < d.vocab_ids[best])) {
      best = i;
    }
  }
  return best;
}

std::size_t draw_index(const CategoricalDistribution& d, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.probs[i] <= 0.0) continue;
    last_positive = i;
    cum += d.probs[i];
    if (u < cum) return i;
  }
  return last_positive;
}

RewriteResult sample_rewrite(std::string_view c_brief, const gateway::ModelGateway& lm,
                             const SamplingStrategy& strategy, rng::Rng& rng) {
  require_valid(validate(strategy), "sampling strategy");
  RewriteResult out;
  out.terminated_by = Termination::kMaxTokens;
  while (out.tokens.size() < static_cast<std::size_t>(strategy.max_tokens)) {
    const gateway::LmDistribution step = lm.lm_next_distribution(out.tokens, c_brief);
    const CategoricalDistribution shaped = transform(step.dist, strategy);
    std::size_t pick;
    if (strategy.kind == StrategyKind::kGreedy) {
      pick = argmax_index(shaped);
    } else {
      pick = draw_index(shaped, rng.uniform());
    }
    out.log_prob += std::log(shaped.probs[pick]);
    const int token = shaped.vocab_ids[pick];
    if (token == step.eos_id) {
      out.terminated_by = Termination::kEos;
      break;
    }
    // Surfaces are looked up on the untransformed step, which shares vocab ids.
    const auto it = std::find(step.dist.vocab_ids.begin(), step.dist.vocab_ids.end(), token);
    out.surfaces.push_back(step.tokens[static_cast<std::size_t>(it - step.dist.vocab_ids.begin())]);
    out.tokens.push_back(token);
  }
  out.m = out.tokens.size();
  return out;
}

json to_json(const GenerationRequest& r) {
  return {{"c_brief", r.c_brief},
          {"c_dense", r.c_dense},
          {"strategy", to_json(r.strategy)},
          {"seed", r.seed}};
}

RewriteOutput generate_with_rewrite(std::string_view c_brief, const gateway::ModelGateway& lm,
                                    const SamplingStrategy& strategy, rng::Rng& rng) {
  RewriteOutput out;
  out.rewrite = sample_rewrite(c_brief, lm, strategy, rng);
  for (std::size_t i = 0; i < out.rewrite.surfaces.size(); ++i) {
    if (i) out.c_dense += ' ';
    out.c_dense += out.rewrite.surfaces[i];
  }
  out.request = GenerationRequest{std::string(c_brief), out.c_dense, strategy, strategy.seed};
  return out;
}

RewriteOutput generate_with_rewrite(std::string_view c_brief, const gateway::ModelGateway& lm,
                                    const SamplingStrategy& strategy) {
  rng::Rng rng(strategy.seed);
  return generate_with_rewrite(c_brief, lm, strategy, rng);
}

}  // namespace groundseq::sampling
