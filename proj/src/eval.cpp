// SPDX-License-Identifier: Apache-2.0
#include "groundseq/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "groundseq/parallel.hpp"
#include "groundseq/rng.hpp"
#include "groundseq/sequence_format.hpp"

namespace groundseq::eval {

std::uint64_t squared_error_sum(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b) || a.data.size() != b.data.size()) {
    throw ValidationError("image dimension mismatch");
  }
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const int d = static_cast<int>(a.data[i]) - static_cast<int>(b.data[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  return sse;
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_valid(validate(a), "psnr: first image");
  require_valid(validate(b), "psnr: second image");
  const std::uint64_t sse = squared_error_sum(a, b);
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(a.sample_count());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> unordered_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

void require_samples(std::span<const ImageBuffer> samples) {
  if (samples.size() < 2) throw ValidationError("pairwise_diversity needs at least 2 samples");
  for (const auto& s : samples) {
    require_valid(validate(s), "pairwise_diversity sample");
    if (!s.same_shape(samples.front())) throw ValidationError("pairwise_diversity: dimension mismatch");
  }
}

PairScores finish(const std::vector<double>& psnrs, const std::vector<double>& lpips) {
  PairScores out;
  out.pairs = psnrs.size();
  double ps = 0.0, lp = 0.0;
  for (std::size_t k = 0; k < psnrs.size(); ++k) {
    ps += psnrs[k];
    lp += lpips[k];
  }
  out.psnr_d = ps / static_cast<double>(out.pairs);
  out.lpips_d = lp / static_cast<double>(out.pairs);
  return out;
}

}  // namespace

PairScores pairwise_diversity(std::span<const ImageBuffer> samples,
                              const gateway::ModelGateway& perceptual, double psnr_clamp_db,
                              int workers) {
  require_samples(samples);
  const auto pairs = unordered_pairs(samples.size());
  std::vector<double> psnrs(pairs.size()), lpips(pairs.size());
  parallel_for(static_cast<long>(pairs.size()), workers, [&](long k) {
    const auto [i, j] = pairs[static_cast<std::size_t>(k)];
    psnrs[static_cast<std::size_t>(k)] = std::min(psnr(samples[i], samples[j]), psnr_clamp_db);
    lpips[static_cast<std::size_t>(k)] = perceptual.perceptual_distance(samples[i], samples[j]);
  });
  return finish(psnrs, lpips);
}

PairScores pairwise_diversity_serial(std::span<const ImageBuffer> samples,
                                     const gateway::ModelGateway& perceptual,
                                     double psnr_clamp_db) {
  require_samples(samples);
  std::vector<double> psnrs, lpips;
  for (const auto& [i, j] : unordered_pairs(samples.size())) {
    psnrs.push_back(std::min(psnr(samples[i], samples[j]), psnr_clamp_db));
    lpips.push_back(perceptual.perceptual_distance(samples[i], samples[j]));
  }
  return finish(psnrs, lpips);
}

json to_json(const DiversityReport& r) {
  json rows = json::array();
  for (const auto& p : r.per_prompt) {
    rows.push_back({{"prompt_id", p.prompt_id},
                    {"psnr_d", p.psnr_d},
                    {"lpips_d", p.lpips_d},
                    {"n_samples", p.n_samples}});
  }
  return {{"per_prompt", std::move(rows)},
          {"aggregate_psnr_d", r.aggregate_psnr_d},
          {"aggregate_lpips_d", r.aggregate_lpips_d}};
}

DiversityReport diversity_report(std::span<const PromptSamples> prompts,
                                 const gateway::ModelGateway& perceptual, double psnr_clamp_db,
                                 int workers) {
  if (prompts.empty()) throw ValidationError("diversity_report: no prompts");
  DiversityReport r;
  double ps = 0.0, lp = 0.0;
  for (const auto& p : prompts) {
    PairScores s = pairwise_diversity(p.images, perceptual, psnr_clamp_db, workers);
    r.per_prompt.push_back({p.prompt_id, s.psnr_d, s.lpips_d, p.images.size()});
    ps += s.psnr_d;
    lp += s.lpips_d;
  }
  r.aggregate_psnr_d = ps / static_cast<double>(prompts.size());
  r.aggregate_lpips_d = lp / static_cast<double>(prompts.size());
  return r;
}

json to_json(const FidelityReport& r) {
  return {{"dino", r.dino}, {"clip_i", r.clip_i}, {"clip_t", r.clip_t}, {"pairs", r.pairs}};
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("embedding dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double order_invariant_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

namespace {

struct ImageScores {
  double dino = 0.0;
  double clip_i = 0.0;
  double clip_t = 0.0;
};

ImageScores score_image(const std::string& generated, std::span<const std::string> references,
                        const std::string& prompt, const gateway::ModelGateway& gw) {
  using gateway::EmbedSpace;
  const auto g_dino = gw.embed(generated, EmbedSpace::kDino);
  const auto g_clip = gw.embed(generated, EmbedSpace::kClipImage);
  ImageScores s;
  for (const auto& ref : references) {
    s.dino += dot(g_dino, gw.embed(ref, EmbedSpace::kDino));
    s.clip_i += dot(g_clip, gw.embed(ref, EmbedSpace::kClipImage));
  }
  s.dino /= static_cast<double>(references.size());
  s.clip_i /= static_cast<double>(references.size());
  s.clip_t = dot(g_clip, gw.embed(prompt, EmbedSpace::kClipText));
  return s;
}

FidelityReport summarize(const std::vector<ImageScores>& scores) {
  FidelityReport r;
  std::vector<double> d, ci, ct;
  for (const auto& s : scores) {
    d.push_back(s.dino);
    ci.push_back(s.clip_i);
    ct.push_back(s.clip_t);
  }
  r.dino = order_invariant_mean(std::move(d));
  r.clip_i = order_invariant_mean(std::move(ci));
  r.clip_t = order_invariant_mean(std::move(ct));
  r.pairs = scores.size();
  return r;
}

}  // namespace

FidelityReport fidelity(std::span<const std::string> generated, std::span<const std::string> reference,
                        std::span<const std::string> prompts, const gateway::ModelGateway& embed) {
  if (generated.size() != reference.size() || generated.size() != prompts.size()) {
    throw ValidationError("fidelity: generated, reference and prompt lists differ in length");
  }
  if (generated.empty()) throw ValidationError("fidelity: no pairs");
  std::vector<ImageScores> scores;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    scores.push_back(score_image(generated[i], reference.subspan(i, 1), prompts[i], embed));
  }
  return summarize(scores);
}

// ---------------------------------------------------------------------------

BenchCase bench_case_from_json(const json& j) {
  BenchCase c;
  try {
    j.at("case_id").get_to(c.case_id);
    c.subject_id = j.value("subject_id", std::string());
    j.at("reference_uris").get_to(c.reference_uris);
    j.at("prompt").get_to(c.prompt);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bench case: ") + e.what());
  }
  if (c.reference_uris.empty()) throw ValidationError("bench case " + c.case_id + ": no reference images");
  return c;
}

json to_json(const BenchCase& c) {
  return {{"case_id", c.case_id},
          {"subject_id", c.subject_id},
          {"reference_uris", c.reference_uris},
          {"prompt", c.prompt}};
}

json to_json(const ImageRequest& r) {
  return {{"case_id", r.case_id},
          {"sample_index", r.sample_index},
          {"prompt", r.prompt},
          {"reference_uris", r.reference_uris},
          {"seed", r.seed}};
}

std::string RecordingGenerator::generate(const ImageRequest& request) {
  requests_.push_back(request);
  if (failing_cases.count(request.case_id)) {
    throw gateway::ServiceError("generator failed for case " + request.case_id);
  }
  return "generated/" + request.case_id + "/" + std::to_string(request.sample_index) + ".png";
}

json to_json(const ProtocolResult& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    json e = {{"case_id", c.case_id}, {"generated_uris", c.generated_uris}};
    e["fidelity"] = c.fidelity ? to_json(*c.fidelity) : json(nullptr);
    if (!c.error.empty()) e["error"] = c.error;
    cases.push_back(std::move(e));
  }
  return {{"overall", to_json(r.overall)},
          {"requests_issued", r.requests_issued},
          {"cases", std::move(cases)}};
}

ProtocolResult dreambench_protocol(std::span<const BenchCase> cases, ImageGenerator& generator,
                                   const gateway::ModelGateway& embed,
                                   const ProtocolOptions& options) {
  if (options.samples_per_case < 1) throw ValidationError("samples_per_case must be >= 1");
  ProtocolResult out;
  std::vector<ImageScores> all;
  for (const auto& c : cases) {
    CaseRecord rec;
    rec.case_id = c.case_id;
    try {
      if (c.reference_uris.empty()) throw ValidationError("case has no reference images");
      for (int k = 0; k < options.samples_per_case; ++k) {
        ImageRequest req{c.case_id, k, c.prompt, c.reference_uris,
                         rng::keyed(options.seed, c.case_id, static_cast<std::uint64_t>(k))};
        ++out.requests_issued;
        rec.generated_uris.push_back(generator.generate(req));
      }
      std::vector<ImageScores> scores;
      for (const auto& uri : rec.generated_uris) {
        scores.push_back(score_image(uri, c.reference_uris, c.prompt, embed));
      }
      rec.fidelity = summarize(scores);
      all.insert(all.end(), scores.begin(), scores.end());
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    out.cases.push_back(std::move(rec));
  }
  out.overall = summarize(all);
  return out;
}

// ---------------------------------------------------------------------------

json to_json(const SweepTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json e = {{"setting", r.setting}, {"failed", r.failed}};
    json m = json::object();
    for (const auto& col : t.columns) {
      auto it = r.metrics.find(col);
      m[col] = it == r.metrics.end() ? json(nullptr) : json(it->second);
    }
    e["metrics"] = std::move(m);
    if (r.failed) e["error"] = r.error;
    rows.push_back(std::move(e));
  }
  return {{"axis", t.axis}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

std::string to_text(const SweepTable& t) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {t.axis};
  header.insert(header.end(), t.columns.begin(), t.columns.end());
  cells.push_back(header);
  for (const auto& r : t.rows) {
    std::vector<std::string> line = {r.setting};
    for (const auto& col : t.columns) {
      auto it = r.metrics.find(col);
      if (r.failed || it == r.metrics.end()) {
        line.push_back("failed");
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", it->second);
        line.push_back(buf);
      }
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream os;
  for (std::size_t l = 0; l < cells.size(); ++l) {
    for (std::size_t c = 0; c < cells[l].size(); ++c) {
      const auto& s = cells[l][c];
      if (c == 0) {
        os << s << std::string(width[c] - s.size(), ' ');
      } else {
        os << "  " << std::string(width[c] - s.size(), ' ') << s;
      }
    }
    os << '\n';
    if (l == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return os.str();
}

SweepTable ablation_sweep(std::string axis, std::span<const std::string> settings,
                          std::vector<std::string> columns, const SettingRunner& run) {
  if (settings.empty()) throw ValidationError("ablation_sweep: empty axis");
  SweepTable t{std::move(axis), std::move(columns), {}};
  for (const auto& s : settings) {
    SweepRow row{s, {}, false, {}};
    try {
      row.metrics = run(s);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
      row.metrics.clear();
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> t_ref_settings() { return {"2", "8", "25", "50"}; }

std::vector<StrategySetting> strategy_settings(int max_tokens) {
  using sampling::SamplingStrategy;
  using sampling::StrategyKind;
  const auto make = [&](StrategyKind k) {
    SamplingStrategy s;
    s.kind = k;
    s.p = 0.9;
    s.t = 0.8;
    s.max_tokens = max_tokens;
    return s;
  };
  return {{"w/o samp.", make(StrategyKind::kGreedy)},
          {"Pure samp.", make(StrategyKind::kPure)},
          {"Top-P", make(StrategyKind::kTopP)},
          {"Temp", make(StrategyKind::kTemperature)},
          {"Top-P+Temp", make(StrategyKind::kTopPAndTemperature)}};
}

ImageBuffer StubRenderer::render(const sampling::GenerationRequest& request) const {
  ImageBuffer img(width_, height_);
  const std::uint64_t base = rng::keyed(seed_, request.c_brief, request.c_dense);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(rng::mix64(base + i) & 0xFFu);
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(base));
  img.uri = std::string("render/") + hex + ".png";
  return img;
}

SweepTable t_ref_sweep(const TRefSweepInputs& in, ImageGenerator& generator) {
  if (in.gateway == nullptr) throw ValidationError("t_ref_sweep: no gateway");
  const auto settings = t_ref_settings();
  return ablation_sweep("t_ref", settings, {"DINO", "CLIP-T"}, [&](const std::string& setting) {
    annotate::AnnotationConfig cfg = in.base;
    cfg.t_ref = std::stoi(setting);
    const auto result = annotate::annotate_corpus(in.corpus, *in.gateway, cfg, in.workers);
    if (result.samples.empty()) throw ValidationError("no samples at t_ref=" + setting);
    std::vector<double> dino, clip_t;
    for (const auto& s : result.samples) {
      const InterleavedSample text = seqfmt::serialize(s, seqfmt::DropConfig{0.0, 0, true});
      ImageRequest req{s.video_id + "@t" + setting, 0, text.serialized_text, text.attachments,
                       rng::keyed(0, s.video_id, static_cast<std::uint64_t>(cfg.t_ref))};
      const std::string uri = generator.generate(req);
      const auto g_dino = in.gateway->embed(uri, gateway::EmbedSpace::kDino);
      const auto t_dino = in.gateway->embed(s.target_frame.uri, gateway::EmbedSpace::kDino);
      const auto g_clip = in.gateway->embed(uri, gateway::EmbedSpace::kClipImage);
      const auto c_text = in.gateway->embed(s.caption, gateway::EmbedSpace::kClipText);
      dino.push_back(dot(g_dino, t_dino));
      clip_t.push_back(dot(g_clip, c_text));
    }
    return std::map<std::string, double>{{"DINO", order_invariant_mean(dino)},
                                         {"CLIP-T", order_invariant_mean(clip_t)}};
  });
}

SweepTable strategy_sweep(const StrategySweepInputs& in) {
  if (in.gateway == nullptr) throw ValidationError("strategy_sweep: no gateway");
  if (in.prompts.empty()) throw ValidationError("strategy_sweep: no prompts");
  if (in.samples_per_prompt < 2) throw ValidationError("strategy_sweep: need >= 2 samples per prompt");
  const auto table = strategy_settings(in.max_tokens);
  std::vector<std::string> labels;
  for (const auto& s : table) labels.push_back(s.label);
  return ablation_sweep("strategy", labels, {"PSNR_d", "CLIP-T"}, [&](const std::string& label) {
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const StrategySetting& s) { return s.label == label; });
    std::vector<double> psnr_per_prompt, clip_t;
    for (std::size_t i = 0; i < in.prompts.size(); ++i) {
      std::vector<ImageBuffer> images;
      for (int k = 0; k < in.samples_per_prompt; ++k) {
        sampling::SamplingStrategy strategy = it->strategy;
        strategy.seed = rng::keyed(in.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k));
        const auto out = sampling::generate_with_rewrite(in.prompts[i], *in.gateway, strategy);
        ImageBuffer img = in.renderer.render(out.request);
        clip_t.push_back(dot(in.gateway->embed(img.uri, gateway::EmbedSpace::kClipImage),
                             in.gateway->embed(in.prompts[i], gateway::EmbedSpace::kClipText)));
        images.push_back(std::move(img));
      }
      psnr_per_prompt.push_back(pairwise_diversity(images, *in.gateway, kDefaultPsnrClampDb, in.workers).psnr_d);
    }
    return std::map<std::string, double>{{"PSNR_d", order_invariant_mean(psnr_per_prompt)},
                                         {"CLIP-T", order_invariant_mean(clip_t)}};
  });
}

}  // namespace groundseq::eval
