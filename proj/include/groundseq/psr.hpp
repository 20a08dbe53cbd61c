// SPDX-License-Identifier: Apache-2.0
//
// Prompt-rewrite instruction samples built from (brief caption, dense
// caption, image) triples.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"

namespace groundseq::psr {

struct RecaptionRecord {
  std::string image_uri;
  std::string c_brief;
  std::string c_dense;
  std::size_t brief_token_count = 0;
  std::size_t dense_token_count = 0;

  /// Fills the token counts from a whitespace split.
  static RecaptionRecord make(std::string image_uri, std::string c_brief, std::string c_dense);
};
ValidationReport validate(const RecaptionRecord& r);

/// Reads {image_uri, c_brief, c_dense}; counts are recomputed when absent.
RecaptionRecord recaption_from_json(const json& j);
json to_json(const RecaptionRecord& r);

std::string render_user_turn(std::string_view c_brief);
std::string render_assistant_turn(std::string_view c_dense, std::string_view image_uri);

/// Throws ValidationError for invalid records or captions containing "<img>".
PsrSample build_psr_sample(const RecaptionRecord& rec);

struct ExtractedFields {
  std::string c_brief;
  std::string c_dense;
  std::string image_uri;
};
/// Inverse of the templates; nullopt when the turns do not match them.
std::optional<ExtractedFields> extract_fields(const PsrSample& s);

struct CorpusStats {
  double mean_brief_tokens = 0.0;
  double mean_dense_tokens = 0.0;
  std::size_t count = 0;
};
CorpusStats corpus_stats(std::span<const RecaptionRecord> records);

}  // namespace groundseq::psr
