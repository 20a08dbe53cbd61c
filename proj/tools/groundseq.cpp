// SPDX-License-Identifier: Apache-2.0
//
// groundseq command-line entry point.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "groundseq/annotate.hpp"
#include "groundseq/eval.hpp"
#include "groundseq/filter.hpp"
#include "groundseq/gateway_config.hpp"
#include "groundseq/image_io.hpp"
#include "groundseq/manifest.hpp"
#include "groundseq/psr.hpp"
#include "groundseq/sampling.hpp"
#include "groundseq/sequence_format.hpp"

namespace fs = std::filesystem;
using namespace groundseq;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitGateway = 2;

json read_json_file(const std::string& path) {
  try {
    return json::parse(store::read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::optional<std::string> env_base_url() {
  if (const char* v = std::getenv("GATEWAY_BASE_URL"); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

std::unique_ptr<gateway::ModelGateway> open_gateway(const std::string& path) {
  const json cfg = path.empty() ? json{{"kind", "stub"}} : read_json_file(path);
  return gateway::make_gateway(cfg, env_base_url());
}

/// Writes `text` to `out` atomically, or to stdout when `out` is empty.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    store::write_file_atomic(out, text);
  }
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

/// JSON Lines lines, skipping blank ones; errors carry the line number.
std::vector<json> read_jsonl(const std::string& path) {
  const std::string text = store::read_file(path);
  std::vector<json> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw store::ManifestError(line_no, path + ": " + e.what());
    }
  }
  return out;
}

bool is_manifest(const std::string& path) {
  const std::string text = store::read_file(path);
  const auto nl = text.find('\n');
  try {
    const json h = json::parse(text.substr(0, nl));
    return h.is_object() && h.value("kind", std::string()) == "manifest";
  } catch (const json::exception&) {
    return false;
  }
}

template <typename T>
std::vector<T> records_of(const store::Manifest& m, const char* what) {
  std::vector<T> out;
  for (const auto& r : m.records) {
    if (const auto* v = std::get_if<T>(&r)) {
      out.push_back(*v);
    } else {
      throw ValidationError(std::string("expected only ") + what + " records, found " +
                            std::string(store::record_type(r)));
    }
  }
  return out;
}

/// A corpus is a manifest of video records or plain JSON Lines of VideoRecord objects.
std::vector<VideoRecord> read_corpus(const std::string& path) {
  if (is_manifest(path)) return records_of<VideoRecord>(store::read_manifest(path), "video");
  std::vector<VideoRecord> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      out.push_back(j.get<VideoRecord>());
    } catch (const json::exception& e) {
      throw ValidationError(path + ": bad video record: " + e.what());
    }
  }
  return out;
}

template <typename T>
store::Manifest manifest_of(const std::vector<T>& items) {
  store::Manifest m;
  for (const auto& i : items) m.records.emplace_back(i);
  return m;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::vector<std::string> out;
  const std::string text = store::read_file(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

struct Common {
  std::string gateway;
  int workers = 0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_gateway = true) {
  if (with_gateway) cmd->add_option("--gateway", c.gateway, "gateway config JSON (default: built-in stub)");
  cmd->add_option("--workers", c.workers, "worker threads (0 = runtime default)");
  cmd->add_option("--out", c.out, "output path (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groundseq: grounded interleaved dataset construction and evaluation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all subcommand help");

  // filter
  Common filter_c;
  std::string filter_corpus, filter_config, filter_kept;
  auto* filter_cmd = app.add_subcommand("filter", "run the subtitle / scene-change / aesthetic cascade");
  add_common(filter_cmd, filter_c);
  filter_cmd->add_option("--corpus", filter_corpus, "video corpus (JSON Lines or manifest)")->required();
  filter_cmd->add_option("--config", filter_config, "FilterConfig JSON");
  filter_cmd->add_option("--kept", filter_kept, "write retained videos to this manifest");

  // annotate
  Common annotate_c;
  std::string annotate_corpus, annotate_config, annotate_report;
  std::optional<int> annotate_tref;
  auto* annotate_cmd = app.add_subcommand("annotate", "build frame-pair samples from videos");
  add_common(annotate_cmd, annotate_c);
  annotate_cmd->add_option("--corpus", annotate_corpus, "video corpus (JSON Lines or manifest)")->required();
  annotate_cmd->add_option("--config", annotate_config, "AnnotationConfig JSON");
  annotate_cmd->add_option("--t-ref", annotate_tref, "override t_ref");
  annotate_cmd->add_option("--report", annotate_report, "write the annotation report here");

  // serialize
  Common serialize_c;
  std::string serialize_in;
  double drop_prob = 0.3;
  std::uint64_t serialize_seed = 0;
  bool joint_drops = false;
  auto* serialize_cmd = app.add_subcommand("serialize", "render frame-pair samples as interleaved text");
  add_common(serialize_cmd, serialize_c, false);
  serialize_cmd->add_option("--in", serialize_in, "frame-pair manifest")->required();
  serialize_cmd->add_option("--drop-prob", drop_prob, "box/segment drop probability")->check(CLI::Range(0.0, 1.0));
  serialize_cmd->add_option("--seed", serialize_seed, "drop seed");
  serialize_cmd->add_flag("--joint-drops", joint_drops, "drop box and segment together");

  // psr-build
  Common psr_build_c;
  std::string psr_in;
  auto* psr_build_cmd = app.add_subcommand("psr-build", "build prompt-rewrite samples from recaption records");
  add_common(psr_build_cmd, psr_build_c, false);
  psr_build_cmd->add_option("--in", psr_in, "JSON Lines of {image_uri, c_brief, c_dense}")->required();

  // psr-sample
  Common psr_sample_c;
  std::string brief, strategy_name = "top_p_and_temperature";
  double p = 0.9, t = 0.8;
  std::uint64_t psr_seed = 0;
  int max_tokens = 64;
  auto* psr_sample_cmd = app.add_subcommand("psr-sample", "sample a dense caption from a brief one");
  add_common(psr_sample_cmd, psr_sample_c);
  psr_sample_cmd->add_option("--brief", brief, "brief caption")->required();
  psr_sample_cmd->add_option("--strategy", strategy_name,
                             "greedy | pure | top_p | temperature | top_p_and_temperature");
  psr_sample_cmd->add_option("--p", p, "top-p threshold");
  psr_sample_cmd->add_option("--t", t, "temperature");
  psr_sample_cmd->add_option("--seed", psr_seed, "sampling seed");
  psr_sample_cmd->add_option("--max-tokens", max_tokens, "token budget");

  // eval-diversity
  Common div_c;
  std::vector<std::string> div_images;
  std::string div_groups;
  double clamp_db = eval::kDefaultPsnrClampDb;
  auto* div_cmd = app.add_subcommand("eval-diversity", "pairwise PSNR_d / LPIPS_d over same-prompt samples");
  add_common(div_cmd, div_c);
  auto* div_images_opt = div_cmd->add_option("--images", div_images, "PNG/PPM images of one prompt");
  auto* div_groups_opt = div_cmd->add_option("--groups", div_groups, "JSON {prompt_id: [image paths]}");
  div_images_opt->excludes(div_groups_opt);
  div_cmd->add_option("--psnr-clamp", clamp_db, "dB value used for identical pairs");

  // eval-fidelity
  Common fid_c;
  std::string fid_generated, fid_reference, fid_prompts, fid_bench, fid_requests;
  int samples_per_case = 4;
  std::uint64_t fid_seed = 0;
  auto* fid_cmd = app.add_subcommand("eval-fidelity", "DINO / CLIP-I / CLIP-T scoring");
  add_common(fid_cmd, fid_c);
  auto* gen_opt = fid_cmd->add_option("--generated", fid_generated, "file of generated image URIs, one per line");
  fid_cmd->add_option("--reference", fid_reference, "file of reference image URIs")->needs(gen_opt);
  fid_cmd->add_option("--prompts", fid_prompts, "file of prompts")->needs(gen_opt);
  auto* bench_opt = fid_cmd->add_option("--bench", fid_bench, "subject-driven case manifest (JSON Lines)");
  bench_opt->excludes(gen_opt);
  fid_cmd->add_option("--samples-per-case", samples_per_case, "images per case")->needs(bench_opt);
  fid_cmd->add_option("--seed", fid_seed, "request seed")->needs(bench_opt);
  fid_cmd->add_option("--requests-out", fid_requests, "write the issued generation requests (JSON Lines)")
      ->needs(bench_opt);

  // sweep
  Common sweep_c;
  std::string axis, sweep_corpus, sweep_prompts, sweep_config;
  bool sweep_text = false;
  int sweep_samples = 4;
  std::uint64_t sweep_seed = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "ablation tables over t_ref or sampling strategy");
  add_common(sweep_cmd, sweep_c);
  sweep_cmd->add_option("--axis", axis, "t_ref | strategy")->required()->check(CLI::IsMember({"t_ref", "strategy"}));
  sweep_cmd->add_option("--corpus", sweep_corpus, "video corpus (t_ref axis)");
  sweep_cmd->add_option("--config", sweep_config, "AnnotationConfig JSON (t_ref axis)");
  sweep_cmd->add_option("--prompts", sweep_prompts, "brief captions, one per line (strategy axis)");
  sweep_cmd->add_option("--samples", sweep_samples, "samples per prompt (strategy axis)");
  sweep_cmd->add_option("--seed", sweep_seed, "sweep seed");
  sweep_cmd->add_flag("--text", sweep_text, "aligned text table instead of JSON");

  // stats
  Common stats_c;
  std::string stats_manifest;
  auto* stats_cmd = app.add_subcommand("stats", "record counts and caption/instance means");
  add_common(stats_cmd, stats_c, false);
  stats_cmd->add_option("manifest", stats_manifest, "manifest path")->required();

  if (argc <= 1) {
    std::cerr << app.help();
    return kExitValidation;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (const auto* sub : app.get_subcommands()) failed = sub;
    std::cerr << failed->help();
    return kExitValidation;
  }

  try {
    if (*filter_cmd) {
      const auto gw = open_gateway(filter_c.gateway);
      const filter::FilterConfig cfg =
          filter_config.empty() ? filter::FilterConfig{} : filter::filter_config_from_json(read_json_file(filter_config));
      const auto corpus = read_corpus(filter_corpus);
      const auto result = filter::run_filters(corpus, *gw, cfg, filter_c.workers);
      json report = filter::to_json(result.report);
      report["config"] = filter::to_json(cfg);
      emit(filter_c.out, pretty(report));
      if (!filter_kept.empty()) store::write_manifest(filter_kept, manifest_of(result.retained));
    } else if (*annotate_cmd) {
      const auto gw = open_gateway(annotate_c.gateway);
      annotate::AnnotationConfig cfg = annotate_config.empty()
                                           ? annotate::AnnotationConfig{}
                                           : annotate::annotation_config_from_json(read_json_file(annotate_config));
      if (annotate_tref) cfg.t_ref = *annotate_tref;
      const auto corpus = read_corpus(annotate_corpus);
      const auto result = annotate::annotate_corpus(corpus, *gw, cfg, annotate_c.workers);
      const store::Manifest m = manifest_of(result.samples);
      if (annotate_c.out.empty()) {
        std::cout << store::serialize(m);
      } else {
        store::write_manifest(annotate_c.out, m);
      }
      if (!annotate_report.empty()) store::write_file_atomic(annotate_report, pretty(annotate::to_json(result.report)));
    } else if (*serialize_cmd) {
      const auto samples = records_of<FramePairSample>(store::read_manifest(serialize_in), "frame_pair");
      seqfmt::DropConfig drop{drop_prob, serialize_seed, !joint_drops};
      std::vector<InterleavedSample> out;
      for (const auto& s : samples) out.push_back(seqfmt::serialize(s, drop));
      const store::Manifest m = manifest_of(out);
      if (serialize_c.out.empty()) {
        std::cout << store::serialize(m);
      } else {
        store::write_manifest(serialize_c.out, m);
      }
    } else if (*psr_build_cmd) {
      std::vector<PsrSample> out;
      for (const auto& j : read_jsonl(psr_in)) out.push_back(psr::build_psr_sample(psr::recaption_from_json(j)));
      const store::Manifest m = manifest_of(out);
      if (psr_build_c.out.empty()) {
        std::cout << store::serialize(m);
      } else {
        store::write_manifest(psr_build_c.out, m);
      }
    } else if (*psr_sample_cmd) {
      const auto gw = open_gateway(psr_sample_c.gateway);
      const auto kind = sampling::parse_strategy(strategy_name);
      if (!kind) throw ValidationError("unknown strategy '" + strategy_name + "'");
      sampling::SamplingStrategy s{*kind, p, t, max_tokens, psr_seed};
      require_valid(sampling::validate(s), "sampling strategy");
      const auto out = sampling::generate_with_rewrite(brief, *gw, s);
      json j = {{"c_brief", brief},
                {"c_dense", out.c_dense},
                {"tokens", out.rewrite.tokens},
                {"log_prob", out.rewrite.log_prob},
                {"terminated_by", out.rewrite.terminated_by == sampling::Termination::kEos ? "eos" : "max_tokens"},
                {"request", sampling::to_json(out.request)}};
      emit(psr_sample_c.out, pretty(j));
    } else if (*div_cmd) {
      const auto gw = open_gateway(div_c.gateway);
      std::vector<eval::PromptSamples> prompts;
      if (!div_groups.empty()) {
        for (const auto& [id, paths] : read_json_file(div_groups).items()) {
          eval::PromptSamples ps{id, {}};
          for (const auto& path : paths) ps.images.push_back(load_image(path.get<std::string>()));
          prompts.push_back(std::move(ps));
        }
      } else {
        eval::PromptSamples ps{"prompt", {}};
        for (const auto& path : div_images) ps.images.push_back(load_image(path));
        prompts.push_back(std::move(ps));
      }
      emit(div_c.out, pretty(eval::to_json(eval::diversity_report(prompts, *gw, clamp_db, div_c.workers))));
    } else if (*fid_cmd) {
      const auto gw = open_gateway(fid_c.gateway);
      if (!fid_bench.empty()) {
        std::vector<eval::BenchCase> cases;
        for (const auto& j : read_jsonl(fid_bench)) cases.push_back(eval::bench_case_from_json(j));
        // No image generator is linked in; requests are recorded and their URIs scored.
        eval::RecordingGenerator generator;
        const auto result = eval::dreambench_protocol(cases, generator, *gw, {samples_per_case, fid_seed});
        emit(fid_c.out, pretty(eval::to_json(result)));
        if (!fid_requests.empty()) {
          std::string lines;
          for (const auto& r : generator.requests()) lines += canonical_dump(eval::to_json(r)) + "\n";
          store::write_file_atomic(fid_requests, lines);
        }
      } else {
        if (fid_generated.empty() || fid_reference.empty() || fid_prompts.empty()) {
          throw ValidationError("eval-fidelity needs --bench, or --generated with --reference and --prompts");
        }
        const auto gen = read_lines(fid_generated), ref = read_lines(fid_reference), pr = read_lines(fid_prompts);
        emit(fid_c.out, pretty(eval::to_json(eval::fidelity(gen, ref, pr, *gw))));
      }
    } else if (*sweep_cmd) {
      const auto gw = open_gateway(sweep_c.gateway);
      eval::SweepTable table;
      if (axis == "t_ref") {
        if (sweep_corpus.empty()) throw ValidationError("sweep --axis t_ref needs --corpus");
        eval::TRefSweepInputs in;
        in.corpus = read_corpus(sweep_corpus);
        in.gateway = gw.get();
        if (!sweep_config.empty()) in.base = annotate::annotation_config_from_json(read_json_file(sweep_config));
        in.workers = sweep_c.workers;
        eval::RecordingGenerator generator;
        table = eval::t_ref_sweep(in, generator);
      } else {
        if (sweep_prompts.empty()) throw ValidationError("sweep --axis strategy needs --prompts");
        eval::StrategySweepInputs in;
        in.prompts = read_lines(sweep_prompts);
        in.gateway = gw.get();
        in.samples_per_prompt = sweep_samples;
        in.seed = sweep_seed;
        in.workers = sweep_c.workers;
        table = eval::strategy_sweep(in);
      }
      emit(sweep_c.out, sweep_text ? eval::to_text(table) : pretty(eval::to_json(table)));
    } else if (*stats_cmd) {
      emit(stats_c.out, pretty(store::to_json(store::stats(store::read_manifest(stats_manifest)))));
    }
  } catch (const gateway::GatewayError& e) {
    std::cerr << "gateway error: " << e.what() << "\n";
    return kExitGateway;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
