#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <vector>

#include "wlign/graph.hpp"
#include "wlign/wl.hpp"

using namespace wlign;

namespace {

ColouredGraph random_graph(std::mt19937_64& rng, int n_max) {
  int n = 2 + static_cast<int>(rng() % (n_max - 1));
  std::vector<std::string> colours;
  bool coloured = rng() % 3 == 0;
  for (int v = 0; v < n; ++v) colours.push_back(coloured && rng() % 2 ? "b" : "a");
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng() % 2) edges.emplace_back(u, v);
  return make_graph(n, edges, std::move(colours), true);
}

// Partition refinement: equal new colours must come from equal old colours.
bool refines_previous(const TupleColouring& now, const TupleColouring& before) {
  std::map<int, int> back;
  for (std::size_t i = 0; i < now.colour_of.size(); ++i) {
    auto [it, fresh] = back.emplace(now.colour_of[i], before.colour_of[i]);
    if (!fresh && it->second != before.colour_of[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("dimension below two is rejected unless explicitly allowed") {
  auto g = corpus_detail::cycle(4);
  CHECK_THROWS_AS(wl_run(g, 1), std::invalid_argument);
  CHECK_THROWS_AS(wl_run(g, 0, std::nullopt, 1, true), std::invalid_argument);
  CHECK(wl_run(g, 1, std::nullopt, 1, true).k == 1);
}

TEST_CASE("complete graph stabilizes immediately with three pair classes") {
  auto k3 = make_graph(3, {{0, 1}, {0, 2}, {1, 2}}, {"a", "a", "a"}, true);
  auto hist = wl_run(k3, 2);
  CHECK(hist.stable_round == 0);
  CHECK(hist.rounds.front().num_classes == 2);  // diagonal and adjacent
  auto sizes = colour_histogram(hist.rounds.front());
  std::vector<std::int64_t> counts;
  for (auto& [c, s] : sizes) counts.push_back(s);
  CHECK(counts == std::vector<std::int64_t>{3, 6});
}

TEST_CASE("path and star agree at round zero and split at round one") {
  auto [p4, star] = corpus("path4_vs_star");
  auto pair = wl_run_joint(p4, star, 2);
  auto profile = wl_equivalence_profile(pair);
  REQUIRE(profile.size() >= 2);
  CHECK(profile[0]);
  CHECK_FALSE(profile[1]);
  CHECK_FALSE(wl_equivalent(pair));
}

TEST_CASE("six-cycle and two triangles: equivalent at k=2, separated at k=3 round zero") {
  auto [c6, tt] = corpus("cycle6_vs_two_triangles");
  auto pair2 = wl_run_joint(c6, tt, 2);
  CHECK(wl_equivalent(pair2));
  for (bool eq : wl_equivalence_profile(pair2)) CHECK(eq);

  auto pair3 = wl_run_joint(c6, tt, 3);
  CHECK_FALSE(wl_equivalent_at(pair3, 0));
}

TEST_CASE("strongly regular pair is never separated at k=3") {
  auto [rook, shri] = corpus("rook4x4_vs_shrikhande");
  auto pair = wl_run_joint(rook, shri, 3);
  CHECK(wl_equivalent(pair));
}

TEST_CASE("relabelling is invisible to the refinement") {
  for (const char* name : {"cycle6_vs_cycle6_relabelled", "directed_cycle6_vs_relabelled"}) {
    auto [g, h] = corpus(name);
    for (int k = 2; k <= 3; ++k) {
      auto pair = wl_run_joint(g, h, k);
      CHECK(wl_equivalent(pair));
    }
  }
}

TEST_CASE("refinement is monotone and stabilizes on random graphs") {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = random_graph(rng, 6);
    int k = 2 + static_cast<int>(rng() % 2);
    auto hist = wl_run(g, k);
    REQUIRE(hist.stable_round >= 0);
    std::uint64_t cap = 1;
    for (int i = 0; i < k; ++i) cap *= static_cast<std::uint64_t>(g.n);
    CHECK(static_cast<std::uint64_t>(hist.stable_round) < cap);
    for (std::size_t t = 1; t < hist.rounds.size(); ++t) {
      CHECK(refines_previous(hist.rounds[t], hist.rounds[t - 1]));
      CHECK(hist.rounds[t].num_classes >= hist.rounds[t - 1].num_classes);
    }
    // the recorded fixed point really is one
    auto& last = hist.rounds.back();
    auto& prev = hist.rounds[hist.rounds.size() - 2];
    CHECK(refines_previous(prev, last));  // equal partitions refine both ways
  }
}

TEST_CASE("worker count does not change the colouring") {
  auto [c6, tt] = corpus("cycle6_vs_two_triangles");
  auto solo = wl_run_joint(c6, tt, 3, std::nullopt, 1);
  auto wide = wl_run_joint(c6, tt, 3, std::nullopt, 4);
  REQUIRE(solo.g.rounds.size() == wide.g.rounds.size());
  for (std::size_t t = 0; t < solo.g.rounds.size(); ++t) {
    CHECK(solo.g.rounds[t].colour_of == wide.g.rounds[t].colour_of);
    CHECK(solo.h.rounds[t].colour_of == wide.h.rounds[t].colour_of);
  }
}

TEST_CASE("solo run equals the diagonal of a joint run") {
  auto [c6, tt] = corpus("cycle6_vs_two_triangles");
  auto solo = wl_run(c6, 2);
  auto joint = wl_run_joint(c6, c6, 2);
  REQUIRE(solo.rounds.size() == joint.g.rounds.size());
  for (std::size_t t = 0; t < solo.rounds.size(); ++t)
    CHECK(solo.rounds[t].colour_of == joint.g.rounds[t].colour_of);
  CHECK(wl_equivalent(joint));
}

TEST_CASE("round cap truncates the history") {
  auto [p4, star] = corpus("path4_vs_star");
  auto hist = wl_run(p4, 2, std::uint64_t{1});
  CHECK(hist.rounds.size() <= 2);
  // querying past the cap clamps to the last computed round
  CHECK(hist.at_round(10).colour_of == hist.rounds.back().colour_of);
  CHECK_THROWS_AS(hist.at_round(-1), std::invalid_argument);
}

TEST_CASE("graphs of different orders are never equivalent") {
  auto a = corpus_detail::cycle(4);
  auto b = corpus_detail::cycle(5);
  auto pair = wl_run_joint(a, b, 2);
  CHECK_FALSE(wl_equivalent_at(pair, 0));
  CHECK_FALSE(wl_equivalent(pair));
}

TEST_CASE("history serialization lists every tuple each round") {
  auto g = corpus_detail::cycle(4);
  auto hist = wl_run(g, 2);
  auto doc = history_to_json(hist);
  CHECK(doc["k"] == 2);
  CHECK(doc["n"] == 4);
  CHECK(doc["stable_round"] == hist.stable_round);
  REQUIRE(doc["rounds"].is_array());
  for (const auto& round : doc["rounds"]) {
    CHECK(round["colours"].size() == 16);
    CHECK(round["colours"][0].is_array());
  }
}
