#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "wlign/graph.hpp"

using namespace wlign;

TEST_CASE("make_graph validates its inputs") {
  CHECK_THROWS_AS(make_graph(0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_graph(2, {}, {"a"}), std::invalid_argument);
  CHECK_THROWS_AS(make_graph(2, {{0, 2}}, {"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(make_graph(2, {{-1, 0}}, {"a", "a"}), std::invalid_argument);
}

TEST_CASE("undirected edges are symmetrized") {
  auto g = make_graph(3, {{0, 1}}, {"a", "a", "a"}, true);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
  auto d = make_graph(3, {{0, 1}}, {"a", "a", "a"}, false);
  CHECK(d.has_edge(0, 1));
  CHECK_FALSE(d.has_edge(1, 0));
}

TEST_CASE("graph JSON round trip") {
  auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {"a", "b", "b", "a"}, true);
  auto back = graph_from_json(graph_to_json(g));
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);
  CHECK(back.colours == g.colours);
}

TEST_CASE("graph JSON rejects malformed documents") {
  CHECK_THROWS_AS(graph_from_string("not json"), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_string("[]"), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_string(R"({"n": 2, "colours": ["a","a"]})"), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_string(R"({"n": 2, "colours": ["a","a"], "edges": [[0]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph_from_string(R"({"n": 2, "colours": [1, 2], "edges": []})"),
                  std::invalid_argument);
}

TEST_CASE("relabel applies a vertex bijection") {
  auto g = make_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {"a", "b", "b", "a"}, true);
  std::vector<int> perm{3, 1, 0, 2};
  auto h = relabel(g, perm);
  for (int u = 0; u < g.n; ++u)
    for (int v = 0; v < g.n; ++v) CHECK(h.has_edge(perm[u], perm[v]) == g.has_edge(u, v));
  for (int v = 0; v < g.n; ++v) CHECK(h.colours[perm[v]] == g.colours[v]);
  CHECK_THROWS_AS(relabel(g, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(relabel(g, {0, 0, 1, 2}), std::invalid_argument);
}

namespace {

// Independent strong-regularity probe: degree and common-neighbour counts.
bool is_srg(const ColouredGraph& g, int n, int deg, int lambda, int mu) {
  if (g.n != n) return false;
  for (int v = 0; v < n; ++v) {
    int d = 0;
    for (int u = 0; u < n; ++u) d += g.has_edge(v, u) ? 1 : 0;
    if (d != deg) return false;
  }
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      int common = 0;
      for (int w = 0; w < n; ++w)
        if (g.has_edge(u, w) && g.has_edge(v, w)) ++common;
      if (common != (g.has_edge(u, v) ? lambda : mu)) return false;
    }
  return true;
}

int count_4_cliques(const ColouredGraph& g) {
  int count = 0;
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      for (int c = b + 1; c < g.n; ++c)
        for (int d = c + 1; d < g.n; ++d)
          if (g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(a, d) && g.has_edge(b, c) &&
              g.has_edge(b, d) && g.has_edge(c, d))
            ++count;
  return count;
}

}  // namespace

TEST_CASE("the strongly regular pair has the right parameters but different clique numbers") {
  auto [rook, shri] = corpus("rook4x4_vs_shrikhande");
  CHECK(is_srg(rook, 16, 6, 2, 2));
  CHECK(is_srg(shri, 16, 6, 2, 2));
  // Rows and columns of the grid give 4-cliques; the Cayley graph has none,
  // so the two graphs cannot be isomorphic.
  CHECK(count_4_cliques(rook) == 8);
  CHECK(count_4_cliques(shri) == 0);
}

TEST_CASE("corpus pairs load and match their names") {
  auto names = corpus_names();
  REQUIRE(names.size() == 5);
  for (const auto& name : names) {
    auto [g, h] = corpus(name);
    CHECK(g.n >= 4);
    CHECK(h.n == g.n);
  }
  CHECK_THROWS_AS(corpus("no_such_pair"), std::invalid_argument);

  auto [c6, tt] = corpus("cycle6_vs_two_triangles");
  CHECK(c6.edges.size() == 12);  // ordered pairs
  CHECK(tt.edges.size() == 12);
  auto [c, cr] = corpus("cycle6_vs_cycle6_relabelled");
  CHECK(cr.edges == relabel(c, corpus_detail::scramble6()).edges);
  auto [dc, dcr] = corpus("directed_cycle6_vs_relabelled");
  CHECK(dc.edges.size() == 6);  // one orientation only
  CHECK(dcr.edges == relabel(dc, corpus_detail::scramble6()).edges);
}

TEST_CASE("atomic types capture equality, adjacency, and colours") {
  auto g = make_graph(3, {{0, 1}}, {"a", "b", "b"}, true);
  auto alphabet = make_alphabet(g);
  auto t1 = atomic_type(g, {0, 1}, alphabet);
  auto t2 = atomic_type(g, {1, 0}, alphabet);
  auto t3 = atomic_type(g, {1, 2}, alphabet);
  auto t4 = atomic_type(g, {0, 0}, alphabet);
  CHECK(t1 != t2);  // colours differ by position
  CHECK(t2 != t3);  // adjacency differs
  CHECK(t1 != t4);  // equality profile differs
  CHECK(atomic_type(g, {1, 2}, alphabet) == t3);

  // Same labels, same structure, other vertices: types coincide.
  auto h = make_graph(3, {{2, 1}}, {"b", "b", "a"}, true);
  auto joint = make_alphabet(g, h);
  CHECK(atomic_type(g, {0, 1}, joint) == atomic_type(h, {2, 1}, joint));
}
