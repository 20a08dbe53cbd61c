// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic inputs shared by the fixture writer, the tests and
// the benchmark.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"
#include "groundseq/eval.hpp"
#include "groundseq/gateway.hpp"
#include "groundseq/manifest.hpp"
#include "groundseq/rng.hpp"

namespace groundseq::fixtures {

struct Corpus {
  std::vector<VideoRecord> videos;
  gateway::StubConfig stub;
  /// Verdict each video was authored to receive under the default FilterConfig.
  std::map<std::string, std::string> intended_verdict;
};

/// 100 videos: 10 with burned-in text, 10 with a scene cut, 10 below the aesthetic
/// bar and 70 clean ones. Every video also carries a caption, detections and a
/// track scenario so the annotation stage has work to do.
Corpus calibrated_corpus(std::uint64_t seed = 7, int videos = 100);

/// 30 subjects x 25 prompts by default.
std::vector<eval::BenchCase> bench_cases(int subjects = 30, int prompts_per_subject = 25);

/// A valid FramePairSample with 0-6 instances, multi-byte captions and assorted URIs.
FramePairSample random_frame_pair(rng::Rng& rng);

/// Frame-pair and psr records whose means sit near 4.9 instances, 25.4 caption
/// tokens, 10.2 brief tokens and 79.6 dense tokens.
store::Manifest synthetic_stats_manifest(std::size_t frame_pairs, std::size_t psr_samples,
                                         std::uint64_t seed);

/// One request/response pair per service, produced by dispatching against a stub.
struct WireExchange {
  gateway::Service service;
  json request;
  json response;
};
std::vector<WireExchange> wire_exchanges();

/// Brief captions for rewrite sweeps.
std::vector<std::string> sweep_prompts();

}  // namespace groundseq::fixtures
