// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the checked-in fixture files under a target directory.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "fixtures.hpp"
#include "groundseq/gateway_config.hpp"

using namespace groundseq;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"write deterministic fixture files"};
  std::string dir;
  std::uint64_t seed = 7;
  app.add_option("dir", dir, "output directory")->required();
  app.add_option("--seed", seed, "corpus seed");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(dir);
    const fs::path d(dir);
    const auto corpus = fixtures::calibrated_corpus(seed);
    std::string lines;
    for (const auto& v : corpus.videos) lines += canonical_dump(json(v)) + "\n";
    store::write_file_atomic(d / "calibrated_corpus.jsonl", lines);
    store::write_file_atomic(d / "calibrated_stub.json", gateway::to_json(corpus.stub).dump(1) + "\n");
    store::write_file_atomic(d / "calibrated_intent.json", json(corpus.intended_verdict).dump(1) + "\n");

    const auto write_cases = [&](const fs::path& p, const std::vector<eval::BenchCase>& cases) {
      std::string out;
      for (const auto& c : cases) out += canonical_dump(eval::to_json(c)) + "\n";
      store::write_file_atomic(p, out);
    };
    write_cases(d / "bench750.jsonl", fixtures::bench_cases(30, 25));
    write_cases(d / "bench1.jsonl", fixtures::bench_cases(1, 1));

    std::string prompts;
    for (const auto& p : fixtures::sweep_prompts()) prompts += p + "\n";
    store::write_file_atomic(d / "prompts.txt", prompts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
