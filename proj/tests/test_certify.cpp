#include <catch2/catch_amalgamated.hpp>

#include "wlign/certify.hpp"
#include "wlign/graph.hpp"

using namespace wlign;

TEST_CASE("report status reflects its checks") {
  CertificationReport rep;
  rep.experiment = "example";
  rep.skip_reason = "nothing to do";
  CHECK(rep.status() == "SKIP");
  rep.skip_reason.clear();
  rep.checks.push_back({"claim a", 10, 0, std::nullopt});
  CHECK(rep.status() == "PASS");
  rep.checks.push_back({"claim b", 10, 2, nlohmann::json{{"where", 3}}});
  CHECK(rep.status() == "FAIL");
  CHECK(rep.failed());
  CHECK_FALSE(rep.skipped());
}

TEST_CASE("report serialization is canonical") {
  CertificationReport rep;
  rep.experiment = "example";
  rep.instance = {{"k", 2}};
  rep.checks.push_back({"claim a", 4, 0, std::nullopt});
  auto doc = report_to_json(rep);
  CHECK(doc["experiment"] == "example");
  CHECK(doc["status"] == "PASS");
  REQUIRE(doc["checks"].size() == 1);
  CHECK(doc["checks"][0]["claim"] == "claim a");
  CHECK(doc["checks"][0]["instances"] == 4);
  CHECK(doc["checks"][0]["failures"] == 0);
  CHECK(doc["checks"][0]["first_counterexample"].is_null());
  CHECK_FALSE(doc.contains("skip_reason"));
  CHECK_FALSE(doc.contains("wall_clock_ms"));
  CHECK(report_to_json(rep, 12)["wall_clock_ms"] == 12);

  CertificationReport skip;
  skip.experiment = "example";
  skip.skip_reason = "graphs differ in size";
  auto sdoc = report_to_json(skip);
  CHECK(sdoc["status"] == "SKIP");
  CHECK(sdoc["checks"].empty());
  CHECK(sdoc["skip_reason"] == "graphs differ in size");
}

TEST_CASE("colour classes anchor equal pair profiles on an equivalent pair") {
  auto [g, h] = corpus("cycle6_vs_two_triangles");
  for (int m = 1; m <= 3; ++m) {
    auto rep = check_key_lemma(g, h, 2, m);
    INFO("m = " << m);
    REQUIRE(rep.status() == "PASS");
    REQUIRE(rep.checks.size() == 2);
    CHECK(rep.checks[0].instances > 0);
    CHECK(rep.checks[1].instances > 0);
  }
  // class sizes are {6,12,18} on each graph (diagonal, adjacent, other), so
  // cross pairs = 36+144+324 and within pairs = 2*(15+66+153)
  auto rep = check_key_lemma(g, h, 2, 1);
  CHECK(rep.checks[0].instances == 504);
  CHECK(rep.checks[1].instances == 468);
}

TEST_CASE("pair profile check skips once the refinement separates the graphs") {
  auto [p4, star] = corpus("path4_vs_star");
  auto m1 = check_key_lemma(p4, star, 2, 1);  // t' = 0: same atomic type counts
  CHECK(m1.status() == "PASS");
  auto m2 = check_key_lemma(p4, star, 2, 2);  // t' = 1 already separates them
  CHECK(m2.status() == "SKIP");
  CHECK(m2.checks.empty());
  CHECK_FALSE(m2.skip_reason.empty());

  auto g = corpus("cycle6_vs_two_triangles").first;
  CHECK(check_key_lemma(g, g, 2, 2).status() == "PASS");
  CHECK_THROWS_AS(check_key_lemma(g, g, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(check_key_lemma(g, g, 2, 0), std::invalid_argument);
}

TEST_CASE("class decomposition sieve holds over all patterns and anchors") {
  auto rep = check_observation_decomposition(4, 2);
  REQUIRE(rep.status() == "PASS");
  REQUIRE(rep.checks.size() == 1);
  // 15 arity-4 patterns, anchors are all pairs over n = 1..4: 15 * (1+4+9+16)
  CHECK(rep.checks[0].instances == 450);
  CHECK_THROWS_AS(check_observation_decomposition(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(check_observation_decomposition(3, 1), std::invalid_argument);
}

TEST_CASE("position action check honours the permutation cap") {
  auto [g, h] = corpus("cycle6_vs_two_triangles");
  auto rep = check_observation_permute(g, h, 3, 1, 2);
  REQUIRE(rep.status() == "PASS");
  REQUIRE(rep.checks.size() == 1);
  // 2 sampled permutations over 216 + 216 tuples
  CHECK(rep.checks[0].instances == 864);
  auto full = check_observation_permute(g, h, 3, 1);
  CHECK(full.checks[0].instances == 6 * 432);
  CHECK_THROWS_AS(check_observation_permute(g, h, 2, -1), std::invalid_argument);
}

TEST_CASE("truncated features refine no further than the matching round") {
  auto [g, h] = corpus("cycle6_vs_two_triangles");
  auto enc = encode_pair<Rational>(g, h, 2);
  SuiteModelParams params;
  params.min_depth = 2;
  params.max_depth = 2;
  params.max_channels = 4;
  auto model = sample_suite_model(2, enc.channels, 19, 0, params);
  for (int t = 0; t <= 2; ++t) {
    auto rep = check_lemma_feature_implication(g, h, 2, model, t);
    INFO("t = " << t);
    REQUIRE(rep.status() == "PASS");
    REQUIRE(rep.checks.size() == 2);
    CHECK(rep.instance["layers"] == t);
  }
  CHECK_THROWS_AS(check_lemma_feature_implication(g, h, 2, model, 3), std::invalid_argument);
  CHECK_THROWS_AS(check_lemma_feature_implication(g, h, 3, model, 1), std::invalid_argument);

  auto [p4, star] = corpus("path4_vs_star");
  auto enc2 = encode_pair<Rational>(p4, star, 2);
  auto model2 = sample_suite_model(2, enc2.channels, 19, 0, params);
  auto skip = check_lemma_feature_implication(p4, star, 2, model2, 1);
  CHECK(skip.status() == "SKIP");
}

TEST_CASE("network outputs coincide exactly on refinement-equivalent pairs") {
  auto [g, h] = corpus("cycle6_vs_two_triangles");
  auto enc = encode_pair<Rational>(g, h, 2);
  SuiteModelParams params;
  params.max_depth = 2;
  params.max_channels = 4;
  std::vector<IgnModel<Rational>> models;
  for (std::uint64_t i = 0; i < 4; ++i)
    models.push_back(sample_suite_model(2, enc.channels, 5, i, params));
  auto rep = check_theorem(g, h, 2, models);
  REQUIRE(rep.status() == "PASS");
  REQUIRE(rep.checks.size() == 2);
  CHECK(rep.checks[0].instances == 4);
  CHECK(rep.checks[1].instances > 0);

  auto [p4, star] = corpus("path4_vs_star");
  auto encps = encode_pair<Rational>(p4, star, 2);
  std::vector<IgnModel<Rational>> m2{sample_suite_model(2, encps.channels, 5, 0, params)};
  CHECK(check_theorem(p4, star, 2, m2).status() == "SKIP");

  auto [c6, c6r] = corpus("cycle6_vs_cycle6_relabelled");
  auto encr = encode_pair<Rational>(c6, c6r, 2);
  std::vector<IgnModel<Rational>> m3{sample_suite_model(2, encr.channels, 6, 0, params)};
  CHECK(check_theorem(c6, c6r, 2, m3).status() == "PASS");
}

TEST_CASE("anchor-free pattern classes ignore the anchor entirely") {
  auto [g, h] = corpus("cycle6_vs_two_triangles");
  auto rep = check_unused_constant_case(g, h, 2, 2, 4);
  REQUIRE(rep.status() == "PASS");
  REQUIRE(rep.checks.size() == 2);
  // arity-4 patterns whose constant classes are all unused in the first half,
  // anchored at every pair over n = 1..4
  CHECK(rep.checks[0].instances == 4 * 30);
  CHECK(rep.checks[1].instances > 0);
}

TEST_CASE("reports are byte-reproducible") {
  auto [g, h] = corpus("rook4x4_vs_shrikhande");
  auto a = report_to_json(check_key_lemma(g, h, 2, 1)).dump();
  auto b = report_to_json(check_key_lemma(g, h, 2, 1)).dump();
  CHECK(a == b);
}

TEST_CASE("suite model sampling is deterministic and respects the bounds") {
  SuiteModelParams params;
  params.max_depth = 3;
  params.max_channels = 8;
  for (std::uint64_t i = 0; i < 12; ++i) {
    auto m = sample_suite_model(2, 3, 42, i, params);
    CHECK(m.k == 2);
    CHECK(m.depth() >= params.min_depth);
    CHECK(m.depth() <= params.max_depth);
    int in = m.depth() > 0 ? m.layers.front().in_channels : m.invariant.in_channels;
    CHECK(in == 3);
    for (const auto& l : m.layers) CHECK(l.out_channels <= params.max_channels);
    auto again = sample_suite_model(2, 3, 42, i, params);
    CHECK(model_to_json(m, NumericMode::rational).dump() ==
          model_to_json(again, NumericMode::rational).dump());
  }
}
