#pragma once

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wlign/tuples.hpp"

namespace wlign {

// Finite vertex-coloured graph. Edges are ordered pairs (directed internally);
// undirected inputs are symmetrized on load. Self-loops are permitted.
struct ColouredGraph {
  int n = 0;
  std::set<std::pair<int, int>> edges;
  std::vector<std::string> colours;  // one label per vertex

  std::vector<unsigned char> adj;  // n*n adjacency bits, row-major

  bool has_edge(int u, int v) const { return adj[static_cast<std::size_t>(u) * n + v] != 0; }
};

inline void rebuild_adjacency(ColouredGraph& g) {
  g.adj.assign(static_cast<std::size_t>(g.n) * g.n, 0);
  for (const auto& [u, v] : g.edges) g.adj[static_cast<std::size_t>(u) * g.n + v] = 1;
}

inline ColouredGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges,
                                std::vector<std::string> colours, bool undirected = false) {
  if (n < 1) throw std::invalid_argument("graph needs at least one vertex");
  if (static_cast<int>(colours.size()) != n)
    throw std::invalid_argument("colour array must list one label per vertex");
  ColouredGraph g;
  g.n = n;
  g.colours = std::move(colours);
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(u) + "," +
                                  std::to_string(v) + ")");
    g.edges.emplace(u, v);
    if (undirected) g.edges.emplace(v, u);
  }
  rebuild_adjacency(g);
  return g;
}

inline ColouredGraph graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("graph document must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    throw std::invalid_argument("graph document needs integer field \"n\"");
  if (!doc.contains("colours") || !doc["colours"].is_array())
    throw std::invalid_argument("graph document needs colour array \"colours\"");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw std::invalid_argument("graph document needs edge list \"edges\"");
  int n = doc["n"].get<int>();
  bool undirected = doc.value("undirected", false);
  std::vector<std::string> colours;
  for (const auto& c : doc["colours"]) {
    if (!c.is_string()) throw std::invalid_argument("colour labels must be strings");
    colours.push_back(c.get<std::string>());
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw std::invalid_argument("each edge must be a pair of vertex ids");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return make_graph(n, edges, std::move(colours), undirected);
}

inline ColouredGraph graph_from_string(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("malformed graph JSON");
  return graph_from_json(doc);
}

inline nlohmann::json graph_to_json(const ColouredGraph& g) {
  nlohmann::json doc;
  doc["n"] = g.n;
  doc["colours"] = g.colours;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  doc["edges"] = edges;
  return doc;
}

// Applies a vertex bijection: vertex v of the input becomes perm[v].
inline ColouredGraph relabel(const ColouredGraph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.n) throw std::invalid_argument("permutation size mismatch");
  std::vector<int> seen(g.n, 0);
  for (int p : perm) {
    if (p < 0 || p >= g.n || seen[p]++) throw std::invalid_argument("not a permutation");
  }
  ColouredGraph h;
  h.n = g.n;
  h.colours.resize(g.n);
  for (int v = 0; v < g.n; ++v) h.colours[perm[v]] = g.colours[v];
  for (const auto& [u, v] : g.edges) h.edges.emplace(perm[u], perm[v]);
  rebuild_adjacency(h);
  return h;
}

// Shared colour alphabet for cross-graph comparisons: labels are opaque
// strings interned to dense ids in sorted label order.
struct ColourAlphabet {
  std::map<std::string, int> id_of;

  int id(const std::string& label) const {
    auto it = id_of.find(label);
    return it == id_of.end() ? -1 : it->second;
  }
  int size() const { return static_cast<int>(id_of.size()); }
};

inline ColourAlphabet make_alphabet(const std::vector<const ColouredGraph*>& gs) {
  std::set<std::string> labels;
  for (const auto* g : gs)
    for (const auto& c : g->colours) labels.insert(c);
  ColourAlphabet a;
  int next = 0;
  for (const auto& l : labels) a.id_of.emplace(l, next++);
  return a;
}

inline ColourAlphabet make_alphabet(const ColouredGraph& g) { return make_alphabet({&g}); }
inline ColourAlphabet make_alphabet(const ColouredGraph& g, const ColouredGraph& h) {
  return make_alphabet({&g, &h});
}

// Isomorphism type of a k-tuple: which positions coincide, all k*k edge
// queries, and the vertex colours. Two tuples (possibly from different
// graphs over the same alphabet) get equal atomic types exactly when the
// correspondence v_i -> v_i' preserves equality, adjacency and colour.
struct AtomicType {
  std::vector<int> equality;        // partition of positions by vertex equality, RGS form
  std::vector<unsigned char> edge;  // k*k bits, edge[i*k+j] = [ (v_i,v_j) in E ]
  std::vector<int> colour;          // per-position colour id under the alphabet

  auto operator<=>(const AtomicType&) const = default;
};

inline AtomicType atomic_type(const ColouredGraph& g, const Tuple& t, const ColourAlphabet& a) {
  const int k = static_cast<int>(t.size());
  AtomicType at;
  at.equality.assign(k, 0);
  {
    int next = 0;
    std::map<int, int> block;
    for (int i = 0; i < k; ++i) {
      auto [it, fresh] = block.emplace(t[i], next);
      if (fresh) ++next;
      at.equality[i] = it->second;
    }
  }
  at.edge.assign(static_cast<std::size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) at.edge[static_cast<std::size_t>(i) * k + j] = g.has_edge(t[i], t[j]);
  at.colour.resize(k);
  for (int i = 0; i < k; ++i) {
    int id = a.id(g.colours[t[i]]);
    if (id < 0) throw std::invalid_argument("tuple colour missing from alphabet");
    at.colour[i] = id;
  }
  return at;
}

inline AtomicType atomic_type(const ColouredGraph& g, const Tuple& t) {
  return atomic_type(g, t, make_alphabet(g));
}

namespace corpus_detail {

inline ColouredGraph cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return make_graph(n, e, std::vector<std::string>(n, "a"), /*undirected=*/true);
}

inline ColouredGraph directed_cycle(int n) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < n; ++v) e.emplace_back(v, (v + 1) % n);
  return make_graph(n, e, std::vector<std::string>(n, "a"), /*undirected=*/false);
}

inline ColouredGraph two_triangles() {
  return make_graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}},
                    std::vector<std::string>(6, "a"), true);
}

inline ColouredGraph path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return make_graph(n, e, std::vector<std::string>(n, "a"), true);
}

inline ColouredGraph star(int leaves) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v <= leaves; ++v) e.emplace_back(0, v);
  return make_graph(leaves + 1, e, std::vector<std::string>(leaves + 1, "a"), true);
}

// 4x4 rook's graph: vertices are cells of a 4x4 grid, edges join cells
// sharing a row or a column. Strongly regular with parameters (16,6,2,2).
inline ColouredGraph rook4x4() {
  auto id = [](int i, int j) { return 4 * i + j; };
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      for (int j2 = j + 1; j2 < 4; ++j2) e.emplace_back(id(i, j), id(i, j2));
      for (int i2 = i + 1; i2 < 4; ++i2) e.emplace_back(id(i, j), id(i2, j));
    }
  return make_graph(16, e, std::vector<std::string>(16, "a"), true);
}

// Shrikhande graph as the Cayley graph of Z4 x Z4 with connection set
// {(1,0),(3,0),(0,1),(0,3),(1,1),(3,3)}; also SRG(16,6,2,2) but not
// isomorphic to the 4x4 rook's graph.
inline ColouredGraph shrikhande() {
  auto id = [](int i, int j) { return 4 * ((i % 4 + 4) % 4) + ((j % 4 + 4) % 4); };
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      e.emplace_back(id(i, j), id(i + 1, j));
      e.emplace_back(id(i, j), id(i, j + 1));
      e.emplace_back(id(i, j), id(i + 1, j + 1));
    }
  return make_graph(16, e, std::vector<std::string>(16, "a"), true);
}

inline std::vector<int> scramble6() { return {2, 1, 0, 5, 3, 4}; }

}  // namespace corpus_detail

// Built-in benchmark pairs. Every pair uses a uniform colouring and, except
// for the directed entry, a symmetric edge relation.
inline std::vector<std::string> corpus_names() {
  return {"cycle6_vs_two_triangles", "path4_vs_star", "rook4x4_vs_shrikhande",
          "cycle6_vs_cycle6_relabelled", "directed_cycle6_vs_relabelled"};
}

inline std::pair<ColouredGraph, ColouredGraph> corpus(const std::string& name) {
  using namespace corpus_detail;
  if (name == "cycle6_vs_two_triangles") return {cycle(6), two_triangles()};
  if (name == "path4_vs_star") return {path(4), star(3)};
  if (name == "rook4x4_vs_shrikhande") return {rook4x4(), shrikhande()};
  if (name == "cycle6_vs_cycle6_relabelled") return {cycle(6), relabel(cycle(6), scramble6())};
  if (name == "directed_cycle6_vs_relabelled")
    return {directed_cycle(6), relabel(directed_cycle(6), scramble6())};
  throw std::invalid_argument("unknown corpus pair: " + name);
}

}  // namespace wlign
