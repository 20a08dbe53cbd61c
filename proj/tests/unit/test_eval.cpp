// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "groundseq/eval.hpp"
#include "groundseq/filter.hpp"

using namespace groundseq;
using namespace groundseq::eval;
using gateway::StubConfig;
using gateway::StubGateway;

namespace {

ImageBuffer noise(rng::Rng& rng, int w, int h) {
  ImageBuffer b(w, h);
  for (auto& p : b.data) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return b;
}

// Brute force straight from the definitions, in floating point.
std::pair<double, double> brute_force(const std::vector<ImageBuffer>& xs, double clamp) {
  double psnr_sum = 0.0, lpips_sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      double se = 0.0, ad = 0.0;
      for (std::size_t k = 0; k < xs[i].data.size(); ++k) {
        const double d = double(xs[i].data[k]) - double(xs[j].data[k]);
        se += d * d;
        ad += std::abs(d);
      }
      const double mse = se / double(xs[i].data.size());
      psnr_sum += mse == 0.0 ? clamp : std::min(clamp, 10.0 * std::log10(255.0 * 255.0 / mse));
      lpips_sum += ad / (double(xs[i].data.size()) * 255.0);
      ++pairs;
    }
  }
  return {psnr_sum / pairs, lpips_sum / pairs};
}

std::vector<BenchCase> read_bench(const std::string& name) {
  std::ifstream in(test::data(name));
  std::vector<BenchCase> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(bench_case_from_json(json::parse(line)));
  }
  return out;
}

}  // namespace

TEST_CASE("psnr closed forms") {
  ImageBuffer a(2, 2), b(2, 2);
  for (auto& p : b.data) p = 1;
  CHECK(std::isinf(psnr(a, a)));
  CHECK(squared_error_sum(a, b) == 12);
  CHECK(std::abs(psnr(a, b) - 48.1308) <= 1e-3);
  CHECK(psnr(a, b) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
  CHECK_THROWS_AS(psnr(a, ImageBuffer(3, 2)), ValidationError);

  rng::Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto x = noise(rng, 5, 3), y = noise(rng, 5, 3);
    CHECK(psnr(x, y) == psnr(y, x));
  }
}

TEST_CASE("identical images: clamped psnr and zero lpips") {
  const StubGateway gw(StubConfig{});
  rng::Rng rng(2);
  const auto img = noise(rng, 4, 4);
  const std::vector<ImageBuffer> same(5, img);
  const auto s = pairwise_diversity(same, gw);
  CHECK(s.psnr_d == 100.0);
  CHECK(s.lpips_d == 0.0);
  CHECK(s.pairs == 10);
  CHECK(pairwise_diversity(same, gw, 60.0).psnr_d == 60.0);
}

TEST_CASE("diversity equals the brute-force oracle") {
  const StubGateway gw(StubConfig{});
  rng::Rng rng(12345);
  for (int inst = 0; inst < 200; ++inst) {
    const int n = rng.uniform_int(2, 6);
    const int w = rng.uniform_int(1, 6), h = rng.uniform_int(1, 6);
    std::vector<ImageBuffer> xs;
    const auto base = noise(rng, w, h);
    for (int k = 0; k < n; ++k) {
      ImageBuffer x = base;
      const int amp = rng.uniform_int(0, 3) * 20;
      for (auto& p : x.data) p = static_cast<std::uint8_t>(std::clamp(int(p) + rng.uniform_int(-amp, amp), 0, 255));
      xs.push_back(std::move(x));
    }
    const auto [psnr_ref, lpips_ref] = brute_force(xs, 100.0);
    const auto par = pairwise_diversity(xs, gw, 100.0, 3);
    const auto ser = pairwise_diversity_serial(xs, gw, 100.0);
    CHECK(std::abs(par.psnr_d - psnr_ref) <= 1e-9);
    CHECK(std::abs(par.lpips_d - lpips_ref) <= 1e-12);
    CHECK(par.psnr_d == ser.psnr_d);
    CHECK(par.lpips_d == ser.lpips_d);
    CHECK(par.pairs == static_cast<std::size_t>(n * (n - 1) / 2));

    std::vector<ImageBuffer> rev(xs.rbegin(), xs.rend());
    const auto r = pairwise_diversity(rev, gw);
    CHECK(std::abs(r.psnr_d - par.psnr_d) <= 1e-9);
    CHECK(std::abs(r.lpips_d - par.lpips_d) <= 1e-12);
  }
}

TEST_CASE("psnr_d does not increase with noise amplitude") {
  const StubGateway gw(StubConfig{});
  rng::Rng rng(6);
  const auto base = noise(rng, 16, 16);
  // A fixed noise pattern scaled by the amplitude, so the perturbation only grows.
  std::vector<std::vector<int>> pattern(4, std::vector<int>(base.data.size()));
  for (auto& p : pattern)
    for (auto& v : p) v = rng.uniform_int(-1000, 1000);
  double prev = std::numeric_limits<double>::infinity();
  for (int amp = 0; amp <= 60; amp += 5) {
    std::vector<ImageBuffer> xs;
    for (const auto& p : pattern) {
      ImageBuffer x(16, 16);
      for (std::size_t k = 0; k < x.data.size(); ++k) x.data[k] = static_cast<std::uint8_t>(100 + p[k] * amp / 1000);
      xs.push_back(std::move(x));
    }
    const double v = pairwise_diversity(xs, gw).psnr_d;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("diversity preconditions and report aggregation") {
  const StubGateway gw(StubConfig{});
  CHECK_THROWS_AS(pairwise_diversity(std::vector<ImageBuffer>{ImageBuffer(2, 2)}, gw), ValidationError);
  CHECK_THROWS_AS(pairwise_diversity(std::vector<ImageBuffer>{ImageBuffer(2, 2), ImageBuffer(2, 3)}, gw),
                  ValidationError);

  rng::Rng rng(9);
  std::vector<PromptSamples> prompts = {{"p1", {noise(rng, 3, 3), noise(rng, 3, 3)}},
                                        {"p2", {noise(rng, 3, 3), noise(rng, 3, 3), noise(rng, 3, 3)}},
                                        {"p3", std::vector<ImageBuffer>(2, ImageBuffer(3, 3))}};
  const auto rep = diversity_report(prompts, gw);
  REQUIRE(rep.per_prompt.size() == 3);
  double ps = 0.0, lp = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [p, l] = brute_force(prompts[i].images, 100.0);
    CHECK(rep.per_prompt[i].prompt_id == prompts[i].prompt_id);
    CHECK(rep.per_prompt[i].n_samples == prompts[i].images.size());
    CHECK(std::abs(rep.per_prompt[i].psnr_d - p) <= 1e-9);
    ps += rep.per_prompt[i].psnr_d;
    lp += rep.per_prompt[i].lpips_d;
  }
  CHECK(rep.aggregate_psnr_d == doctest::Approx(ps / 3).epsilon(1e-12));
  CHECK(rep.aggregate_lpips_d == doctest::Approx(lp / 3).epsilon(1e-12));
  const json j = to_json(rep);
  CHECK(j["per_prompt"].size() == 3);
  CHECK(j.contains("aggregate_psnr_d"));
}

TEST_CASE("fidelity over explicit vectors") {
  StubConfig c;
  c.embeddings["dino|g1"] = {1, 0, 0};
  c.embeddings["dino|r1"] = {0.5, std::sqrt(0.75), 0};
  c.embeddings["clip_image|g1"] = {0, 1, 0};
  c.embeddings["clip_image|r1"] = {0, 1, 0};
  c.embeddings["clip_text|a dog"] = {1, 0, 0};
  c.embeddings["dino|g2"] = {0, 0, 1};
  c.embeddings["dino|r2"] = {0, 0, 1};
  c.embeddings["clip_image|g2"] = {1, 0, 0};
  c.embeddings["clip_image|r2"] = {0, 0, 1};
  c.embeddings["clip_text|a cat"] = {0.6, 0.8, 0};
  const StubGateway gw(c);
  const std::vector<std::string> gen = {"g1", "g2"}, ref = {"r1", "r2"}, prompts = {"a dog", "a cat"};
  const auto f = fidelity(gen, ref, prompts, gw);
  CHECK(f.pairs == 2);
  CHECK(std::abs(f.dino - (0.5 + 1.0) / 2) <= 1e-12);
  CHECK(std::abs(f.clip_i - (1.0 + 0.0) / 2) <= 1e-12);
  CHECK(std::abs(f.clip_t - (0.0 + 0.6) / 2) <= 1e-12);

  const auto self = fidelity(std::vector<std::string>{"r1"}, std::vector<std::string>{"r1"},
                             std::vector<std::string>{"a dog"}, gw);
  CHECK(self.dino == doctest::Approx(1.0));
  CHECK(self.clip_i == doctest::Approx(1.0));

  const std::vector<std::string> g_rev = {"g2", "g1"}, r_rev = {"r2", "r1"}, p_rev = {"a cat", "a dog"};
  const auto rev = fidelity(g_rev, r_rev, p_rev, gw);
  CHECK(rev.dino == f.dino);
  CHECK(rev.clip_i == f.clip_i);
  CHECK(rev.clip_t == f.clip_t);

  CHECK_THROWS_AS(fidelity(gen, std::vector<std::string>{"r1"}, prompts, gw), ValidationError);
}

TEST_CASE("order invariant mean") {
  CHECK(order_invariant_mean({}) == 0.0);
  std::vector<double> v = {1e16, 1.0, -1e16, 3.0};
  const double m = order_invariant_mean(v);
  std::reverse(v.begin(), v.end());
  CHECK(order_invariant_mean(v) == m);
}

TEST_CASE("protocol: 750 cases issue 3000 requests") {
  const auto cases = read_bench("bench750.jsonl");
  REQUIRE(cases.size() == 750);
  const StubGateway gw(StubConfig::with_defaults(3));
  RecordingGenerator gen;
  const auto r = dreambench_protocol(cases, gen, gw, {4, 11});
  CHECK(r.requests_issued == 3000);
  CHECK(gen.requests().size() == 3000);
  CHECK(r.cases.size() == 750);
  for (const auto& c : r.cases) {
    CHECK(c.generated_uris.size() == 4);
    CHECK(c.error.empty());
  }
  CHECK(r.overall.pairs == 3000);
  for (double v : {r.overall.dino, r.overall.clip_i, r.overall.clip_t}) CHECK(std::abs(v) <= 1.0);

  RecordingGenerator again;
  dreambench_protocol(cases, again, gw, {4, 11});
  CHECK(again.requests() == gen.requests());
  RecordingGenerator other_seed;
  dreambench_protocol(cases, other_seed, gw, {4, 12});
  CHECK(other_seed.requests() != gen.requests());
}

TEST_CASE("protocol: one case issues four requests; failures are isolated") {
  const auto one = read_bench("bench1.jsonl");
  REQUIRE(one.size() == 1);
  const StubGateway gw(StubConfig::with_defaults());
  RecordingGenerator gen;
  const auto r = dreambench_protocol(one, gen, gw);
  CHECK(r.requests_issued == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(gen.requests()[static_cast<std::size_t>(k)].sample_index == k);
    CHECK(r.cases[0].generated_uris[static_cast<std::size_t>(k)] ==
          "generated/" + one[0].case_id + "/" + std::to_string(k) + ".png");
  }

  const auto cases = fixtures::bench_cases(3, 2);
  RecordingGenerator failing;
  failing.failing_cases = {cases[1].case_id};
  const auto f = dreambench_protocol(cases, failing, gw);
  CHECK(f.cases.size() == 6);
  CHECK(!f.cases[1].error.empty());
  CHECK_FALSE(f.cases[1].fidelity.has_value());
  CHECK(f.cases[2].fidelity.has_value());
  CHECK(f.overall.pairs == 20);
  CHECK(to_json(f)["cases"][1]["fidelity"].is_null());
}

TEST_CASE("sweep scaffolding") {
  const std::vector<std::string> settings = {"a", "b", "c"};
  const auto t = ablation_sweep("axis", settings, {"M1", "M2"}, [](const std::string& s) {
    if (s == "b") throw std::runtime_error("boom");
    return std::map<std::string, double>{{"M1", 0.5}, {"M2", 12.25}};
  });
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[1].failed);
  CHECK(t.rows[1].error == "boom");
  CHECK(to_text(t) ==
        "axis      M1       M2\n"
        "---------------------\n"
        "a     0.5000  12.2500\n"
        "b     failed   failed\n"
        "c     0.5000  12.2500\n");
  const json j = to_json(t);
  CHECK(j["columns"] == json::array({"M1", "M2"}));
  CHECK(j["rows"][1]["failed"] == true);
  CHECK_THROWS_AS(ablation_sweep("axis", {}, {"M"}, [](const std::string&) { return std::map<std::string, double>{}; }),
                  ValidationError);
}

TEST_CASE("t_ref sweep: four rows labeled 2, 8, 25, 50") {
  const auto corpus = fixtures::calibrated_corpus();
  const StubGateway gw(corpus.stub);
  TRefSweepInputs in;
  in.corpus = filter::run_filters(corpus.videos, gw, filter::FilterConfig{}).retained;
  in.gateway = &gw;
  RecordingGenerator gen;
  const auto t = t_ref_sweep(in, gen);
  CHECK(t.axis == "t_ref");
  CHECK(t.columns == std::vector<std::string>{"DINO", "CLIP-T"});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].setting == "2");
  CHECK(t.rows[1].setting == "8");
  CHECK(t.rows[2].setting == "25");
  CHECK(t.rows[3].setting == "50");
  for (const auto& r : t.rows) {
    CHECK_FALSE(r.failed);
    CHECK(std::abs(r.metrics.at("DINO")) <= 1.0);
    CHECK(std::abs(r.metrics.at("CLIP-T")) <= 1.0);
  }
  CHECK(!gen.requests().empty());
}

TEST_CASE("strategy sweep: five rows; greedy has no diversity") {
  const StubGateway gw(StubConfig::with_defaults(5));
  StrategySweepInputs in;
  in.prompts = fixtures::sweep_prompts();
  in.gateway = &gw;
  in.samples_per_prompt = 4;
  in.seed = 3;
  const auto t = strategy_sweep(in);
  CHECK(t.columns == std::vector<std::string>{"PSNR_d", "CLIP-T"});
  REQUIRE(t.rows.size() == 5);
  const std::vector<std::string> labels = {"w/o samp.", "Pure samp.", "Top-P", "Temp", "Top-P+Temp"};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t.rows[i].setting == labels[i]);
    CHECK_FALSE(t.rows[i].failed);
  }
  CHECK(t.rows[0].metrics.at("PSNR_d") == 100.0);
  CHECK(t.rows[1].metrics.at("PSNR_d") < 100.0);
  CHECK(to_json(strategy_sweep(in)) == to_json(t));

  const auto s = strategy_settings();
  CHECK(s[4].strategy.p == 0.9);
  CHECK(s[4].strategy.t == 0.8);
  in.samples_per_prompt = 1;
  CHECK_THROWS_AS(strategy_sweep(in), ValidationError);
}

TEST_CASE("stub renderer depends only on the rewrite") {
  const StubRenderer r;
  sampling::GenerationRequest a{"a dog", "a brown dog", {}, 1};
  sampling::GenerationRequest b{"a dog", "a brown dog", {}, 2};
  sampling::GenerationRequest c{"a dog", "a fluffy dog", {}, 1};
  CHECK(r.render(a).data == r.render(b).data);
  CHECK(r.render(a).data != r.render(c).data);
  CHECK(validate(r.render(a)).ok());
}
