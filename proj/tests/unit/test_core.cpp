// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include "fixtures.hpp"
#include "groundseq/codec.hpp"
#include "groundseq/core.hpp"
#include "groundseq/rng.hpp"

using namespace groundseq;

TEST_CASE("full-frame box is valid, inverted box names x1 < x2") {
  CHECK(validate(BoundingBox{0, 0, 999, 999, 1.0}).ok());
  const auto r = validate(BoundingBox{500, 500, 400, 600, 1.0});
  CHECK_FALSE(r.ok());
  CHECK(r.mentions("x1 < x2"));
  CHECK(validate(BoundingBox{0, 0, 1000, 10, 1.0}).mentions("[0, 999]"));
  CHECK(validate(BoundingBox{0, 0, 10, 10, 1.5}).mentions("confidence"));
}

TEST_CASE("frame pair arithmetic identity") {
  rng::Rng rng(1);
  FramePairSample s = fixtures::random_frame_pair(rng);
  REQUIRE(validate(s).ok());
  s.reference_frame_index += 1;
  const auto r = validate(s);
  CHECK(r.mentions("reference_frame_index"));
}

TEST_CASE("video record invariants") {
  VideoRecord v{"v", {{1, "a", 10, 10}, {2, "b", 10, 10}}, {25, 1}, ""};
  CHECK(validate(v).ok());
  REQUIRE(v.frame(2) != nullptr);
  CHECK(v.frame(3) == nullptr);
  CHECK(v.frame(0) == nullptr);

  VideoRecord gap = v;
  gap.frames[1].index = 3;
  CHECK(validate(gap).mentions("strictly increasing"));
  VideoRecord empty = v;
  empty.frames.clear();
  CHECK(validate(empty).mentions("frames non-empty"));
  VideoRecord bad_fps = v;
  bad_fps.fps = {0, 1};
  CHECK(validate(bad_fps).mentions("fps"));
  VideoRecord bad_frame = v;
  bad_frame.frames[0].width = 0;
  CHECK(validate(bad_frame).mentions("frames[0].width"));
}

TEST_CASE("noun chunk spans are UTF-8 byte offsets") {
  const std::string caption = "un café noir";  // "é" is two bytes
  CHECK(validate(NounChunk{"café", 3, 8, 1}, caption).ok());
  CHECK(validate(NounChunk{"caf", 3, 6, 1}, caption).ok());
  CHECK(validate(NounChunk{"caf\xC3", 3, 7, 1}, caption).mentions("UTF-8"));
  CHECK(validate(NounChunk{"noir", 0, 4, 1}, caption).mentions("appears in caption"));
  CHECK(validate(NounChunk{"   ", 0, 3, 1}, "   x").mentions("non-empty"));
  CHECK(validate(NounChunk{"x", 3, 99, 1}, "   x").mentions("within caption"));

  const std::vector<NounChunk> overlapping = {{"un café", 0, 8, 1}, {"café", 3, 8, 2}};
  CHECK(validate(std::span<const NounChunk>(overlapping), caption).mentions("non-overlapping"));
  const std::vector<NounChunk> dup_ids = {{"un", 0, 2, 1}, {"noir", 9, 13, 1}};
  CHECK(validate(std::span<const NounChunk>(dup_ids), caption).mentions("unique"));
}

TEST_CASE("instance track entries must lie within the video") {
  VideoRecord v{"v", {{1, "a", 10, 10}, {2, "b", 10, 10}}, {25, 1}, ""};
  InstanceTrack t;
  t.chunk = {"dog", 0, 3, 1};
  t.per_frame[1] = {{1, 1, 5, 5, 1.0}, "seg"};
  CHECK(validate(t, v).ok());
  t.per_frame[3] = {{1, 1, 5, 5, 1.0}, "seg"};
  CHECK(validate(t, v).mentions("per_frame keys"));
  t.per_frame.erase(3);
  t.per_frame[2] = {{1, 1, 5, 5, 1.0}, ""};
  CHECK_FALSE(validate(t, v).ok());
}

TEST_CASE("categorical distribution invariants") {
  CHECK(validate(CategoricalDistribution{{0.5, 0.5}, {1, 2}}).ok());
  CHECK(validate(CategoricalDistribution{{0.5, 0.5 + 2e-9}, {1, 2}}).mentions("sum"));
  CHECK(validate(CategoricalDistribution{{0.5, 0.5 + 5e-10}, {1, 2}}).ok());
  CHECK(validate(CategoricalDistribution{{1.0}, {1, 2}}).mentions("vocab_ids"));
  CHECK(validate(CategoricalDistribution{{}, {}}).mentions("at least one"));
  CHECK(validate(CategoricalDistribution{{1.5, -0.5}, {1, 2}}).mentions("non-negative"));
}

TEST_CASE("psr sample templates") {
  PsrSample s{"a dog", "a brown dog", "u1", "Generate an image with prompt rewrite about a dog.",
              "Here is my detailed description: a brown dog Here is the generated image: <img>u1</img>."};
  CHECK(validate(s).ok());
  s.user_turn += " ";
  CHECK(validate(s).mentions("user_turn"));
}

TEST_CASE("interleaved sample attachments match <img> spans") {
  InterleavedSample s{"<p>dog</p><img>a.png</img> and <p>cat</p><b>[1,2,3,4]</b>", "t.png", {"a.png"}, 0};
  CHECK(validate(s).ok());
  s.attachments.push_back("b.png");
  CHECK(validate(s).mentions("attachments"));
  s.serialized_text = "<p>dog";
  CHECK(validate(s).mentions("grammar"));
}

TEST_CASE("image buffer shape") {
  CHECK(validate(ImageBuffer(2, 2)).ok());
  ImageBuffer b(2, 2);
  b.data.pop_back();
  CHECK(validate(b).mentions("data length"));
  CHECK(validate(ImageBuffer{}).mentions("width, height"));
}

TEST_CASE("whitespace token count") {
  CHECK(whitespace_token_count("") == 0);
  CHECK(whitespace_token_count("  a\tb\n c  ") == 3);
  CHECK(whitespace_token_count("café noir") == 2);
}

TEST_CASE("property: random valid frame pairs pass; single-field breaks fail") {
  rng::Rng rng(20240501);
  for (int i = 0; i < 500; ++i) {
    const FramePairSample s = fixtures::random_frame_pair(rng);
    REQUIRE_MESSAGE(validate(s).ok(), validate(s).to_string());

    FramePairSample t_ref = s;
    t_ref.t_ref = 0;
    t_ref.reference_frame_index = t_ref.target_frame.index;
    CHECK_FALSE(validate(t_ref).ok());

    FramePairSample target = s;
    target.target_frame.height = 0;
    CHECK_FALSE(validate(target).ok());

    if (!s.instances.empty()) {
      FramePairSample box = s;
      box.instances[0].box.x2 = box.instances[0].box.x1;
      CHECK_FALSE(validate(box).ok());

      FramePairSample span = s;
      span.instances[0].chunk.end = s.caption.size() + 1;
      CHECK_FALSE(validate(span).ok());

      FramePairSample seg = s;
      seg.instances[0].segment_uri.clear();
      CHECK_FALSE(validate(seg).ok());
    }
  }
}

TEST_CASE("property: JSON codec round-trips core types") {
  rng::Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const FramePairSample s = fixtures::random_frame_pair(rng);
    const json j = s;
    CHECK(j.get<FramePairSample>() == s);
    CHECK(canonical_dump(json::parse(canonical_dump(j))) == canonical_dump(j));
  }
  InstanceTrack t;
  t.chunk = {"dog", 0, 3, 1};
  t.per_frame[1] = {{1, 1, 5, 5, 0.5}, "seg/1"};
  t.per_frame[2] = {{2, 2, 6, 6, 0.5}, "seg/2"};
  t.lost_frames = {3, 4};
  CHECK(json(t).get<InstanceTrack>() == t);
  const CategoricalDistribution d{{0.25, 0.75}, {3, 9}};
  CHECK(json(d).get<CategoricalDistribution>() == d);
}
