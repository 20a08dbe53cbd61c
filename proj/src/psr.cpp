// SPDX-License-Identifier: Apache-2.0
#include "groundseq/psr.hpp"

#include <regex>

namespace groundseq::psr {

namespace {
constexpr std::string_view kUserPrefix = "Generate an image with prompt rewrite about ";
constexpr std::string_view kAssistantPrefix = "Here is my detailed description: ";
constexpr std::string_view kAssistantMiddle = " Here is the generated image: <img>";
constexpr std::string_view kAssistantSuffix = "</img>.";
}  // namespace

RecaptionRecord RecaptionRecord::make(std::string image_uri, std::string c_brief,
                                      std::string c_dense) {
  RecaptionRecord r;
  r.brief_token_count = whitespace_token_count(c_brief);
  r.dense_token_count = whitespace_token_count(c_dense);
  r.image_uri = std::move(image_uri);
  r.c_brief = std::move(c_brief);
  r.c_dense = std::move(c_dense);
  return r;
}

ValidationReport validate(const RecaptionRecord& r) {
  ValidationReport out;
  if (r.image_uri.empty()) out.add("image_uri", "image_uri non-empty");
  if (whitespace_token_count(r.c_brief) == 0) out.add("c_brief", "c_brief non-empty");
  if (whitespace_token_count(r.c_dense) == 0) out.add("c_dense", "c_dense non-empty");
  if (r.brief_token_count != whitespace_token_count(r.c_brief)) {
    out.add("brief_token_count", "brief_token_count matches whitespace split");
  }
  if (r.dense_token_count != whitespace_token_count(r.c_dense)) {
    out.add("dense_token_count", "dense_token_count matches whitespace split");
  }
  return out;
}

RecaptionRecord recaption_from_json(const json& j) {
  RecaptionRecord r;
  try {
    r = RecaptionRecord::make(j.at("image_uri").get<std::string>(), j.at("c_brief").get<std::string>(),
                              j.at("c_dense").get<std::string>());
    if (j.contains("brief_token_count")) j.at("brief_token_count").get_to(r.brief_token_count);
    if (j.contains("dense_token_count")) j.at("dense_token_count").get_to(r.dense_token_count);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("recaption record: ") + e.what());
  }
  require_valid(validate(r), "recaption record");
  return r;
}

json to_json(const RecaptionRecord& r) {
  return {{"image_uri", r.image_uri},
          {"c_brief", r.c_brief},
          {"c_dense", r.c_dense},
          {"brief_token_count", r.brief_token_count},
          {"dense_token_count", r.dense_token_count}};
}

std::string render_user_turn(std::string_view c_brief) {
  std::string s(kUserPrefix);
  s.append(c_brief).append(".");
  return s;
}

std::string render_assistant_turn(std::string_view c_dense, std::string_view image_uri) {
  std::string s(kAssistantPrefix);
  s.append(c_dense).append(kAssistantMiddle).append(image_uri).append(kAssistantSuffix);
  return s;
}

PsrSample build_psr_sample(const RecaptionRecord& rec) {
  require_valid(validate(rec), "recaption record " + rec.image_uri);
  for (const auto* field : {&rec.c_brief, &rec.c_dense, &rec.image_uri}) {
    if (field->find("<img>") != std::string::npos || field->find("</img>") != std::string::npos) {
      throw ValidationError("recaption record " + rec.image_uri + " contains a reserved <img> token");
    }
  }
  PsrSample s;
  s.c_brief = rec.c_brief;
  s.c_dense = rec.c_dense;
  s.image_uri = rec.image_uri;
  s.user_turn = render_user_turn(rec.c_brief);
  s.assistant_turn = render_assistant_turn(rec.c_dense, rec.image_uri);
  return s;
}

std::optional<ExtractedFields> extract_fields(const PsrSample& s) {
  static const std::regex user_re(R"(^Generate an image with prompt rewrite about ([\s\S]*)\.$)");
  static const std::regex assistant_re(
      R"(^Here is my detailed description: ([\s\S]*) Here is the generated image: <img>([\s\S]*)</img>\.$)");
  std::smatch um, am;
  if (!std::regex_match(s.user_turn, um, user_re)) return std::nullopt;
  if (!std::regex_match(s.assistant_turn, am, assistant_re)) return std::nullopt;
  return ExtractedFields{um[1].str(), am[1].str(), am[2].str()};
}

CorpusStats corpus_stats(std::span<const RecaptionRecord> records) {
  if (records.empty()) throw ValidationError("corpus_stats: empty corpus");
  CorpusStats st;
  std::size_t brief = 0, dense = 0;
  for (const auto& r : records) {
    brief += whitespace_token_count(r.c_brief);
    dense += whitespace_token_count(r.c_dense);
  }
  st.count = records.size();
  st.mean_brief_tokens = static_cast<double>(brief) / static_cast<double>(st.count);
  st.mean_dense_tokens = static_cast<double>(dense) / static_cast<double>(st.count);
  return st;
}

}  // namespace groundseq::psr
