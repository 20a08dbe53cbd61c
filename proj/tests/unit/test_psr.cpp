// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include <regex>

#include "groundseq/psr.hpp"
#include "groundseq/rng.hpp"

using namespace groundseq;
using namespace groundseq::psr;

TEST_CASE("templates are byte exact") {
  const auto s = build_psr_sample(RecaptionRecord::make("u1", "a dog", "a brown dog running on grass under sunlight"));
  CHECK(s.user_turn == "Generate an image with prompt rewrite about a dog.");
  CHECK(s.assistant_turn ==
        "Here is my detailed description: a brown dog running on grass under sunlight Here is the generated "
        "image: <img>u1</img>.");
  CHECK(s.c_brief == "a dog");
  CHECK(s.image_uri == "u1");
  CHECK(validate(s).ok());
}

TEST_CASE("reserved token and invalid records are rejected") {
  CHECK_THROWS_AS(build_psr_sample(RecaptionRecord::make("u", "a <img> dog", "dense")), ValidationError);
  CHECK_THROWS_AS(build_psr_sample(RecaptionRecord::make("u", "a dog", "dense <img>x</img>")), ValidationError);
  CHECK_THROWS_AS(build_psr_sample(RecaptionRecord::make("u", "  ", "dense")), ValidationError);
  CHECK_THROWS_AS(build_psr_sample(RecaptionRecord::make("", "a dog", "dense")), ValidationError);

  RecaptionRecord wrong = RecaptionRecord::make("u", "a dog", "a brown dog");
  wrong.dense_token_count = 7;
  CHECK(validate(wrong).mentions("dense_token_count"));
}

TEST_CASE("recaption JSON recomputes missing counts and checks given ones") {
  const auto r = recaption_from_json(json{{"image_uri", "i"}, {"c_brief", "a b c"}, {"c_dense", "d e"}});
  CHECK(r.brief_token_count == 3);
  CHECK(r.dense_token_count == 2);
  CHECK(recaption_from_json(to_json(r)).c_dense == "d e");
  CHECK_THROWS_AS(recaption_from_json(json{{"image_uri", "i"}, {"c_brief", "a"}, {"c_dense", "d"}, {"brief_token_count", 4}}),
                  ValidationError);
  CHECK_THROWS_AS(recaption_from_json(json{{"image_uri", "i"}}), ValidationError);
}

TEST_CASE("property: extraction inverts the templates") {
  rng::Rng rng(8);
  const std::vector<std::string> words = {"dog", "a", "café", "ümlaut", "x.y", "Here", "is", "my", "image:", ".", "<p>"};
  const auto sentence = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      if (i) s += rng.uniform() < 0.1 ? "  " : " ";
      s += words[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(words.size()) - 1))];
    }
    return s;
  };
  const std::regex user(R"(^Generate an image with prompt rewrite about ([\s\S]*)\.$)");
  const std::regex assistant(R"(^Here is my detailed description: ([\s\S]*) Here is the generated image: <img>([\s\S]*)</img>\.$)");
  for (int i = 0; i < 500; ++i) {
    const auto rec = RecaptionRecord::make("img/" + std::to_string(i) + " ñ.png", sentence(rng.uniform_int(1, 6)),
                                           sentence(rng.uniform_int(1, 40)));
    const auto s = build_psr_sample(rec);
    CHECK(build_psr_sample(rec).assistant_turn == s.assistant_turn);
    const auto back = extract_fields(s);
    REQUIRE(back.has_value());
    CHECK(back->c_brief == rec.c_brief);
    CHECK(back->c_dense == rec.c_dense);
    CHECK(back->image_uri == rec.image_uri);

    std::smatch mu, ma;
    REQUIRE(std::regex_match(s.user_turn, mu, user));
    CHECK(mu[1] == rec.c_brief);
    REQUIRE(std::regex_match(s.assistant_turn, ma, assistant));
    CHECK(ma[2] == rec.image_uri);
  }
  PsrSample broken = build_psr_sample(RecaptionRecord::make("u", "a", "b"));
  broken.user_turn.pop_back();
  CHECK_FALSE(extract_fields(broken).has_value());
}

TEST_CASE("corpus stats") {
  const std::vector<RecaptionRecord> two = {RecaptionRecord::make("a", "1 2 3 4 5 6 7 8", "d"),
                                            RecaptionRecord::make("b", "1 2 3 4 5 6 7 8 9 10 11 12", "d e f")};
  const auto st = corpus_stats(two);
  CHECK(st.mean_brief_tokens == 10.0);
  CHECK(st.mean_dense_tokens == 2.0);
  CHECK(st.count == 2);
  const auto one = corpus_stats(std::span(two).first(1));
  CHECK(one.mean_brief_tokens == 8.0);
  CHECK(one.mean_dense_tokens == 1.0);
  CHECK_THROWS_AS(corpus_stats({}), ValidationError);
}

TEST_CASE("synthetic corpus drawn to the target means") {
  // Brief lengths 10 or 11 (p=0.2 for 11), dense 79 or 80 (p=0.6 for 80).
  rng::Rng rng(2024);
  std::vector<RecaptionRecord> recs;
  const auto words = [](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += i ? " w" : "w";
    return s;
  };
  for (int i = 0; i < 5000; ++i) {
    recs.push_back(RecaptionRecord::make("u", words(rng.uniform() < 0.2 ? 11 : 10), words(rng.uniform() < 0.6 ? 80 : 79)));
  }
  const auto st = corpus_stats(recs);
  CHECK(std::abs(st.mean_brief_tokens - 10.2) <= 0.5);
  CHECK(std::abs(st.mean_dense_tokens - 79.6) <= 0.5);
}
