#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "wlign/graph.hpp"
#include "wlign/logic.hpp"

using namespace wlign;

namespace {

// Reference evaluator straight from the semantics: no memo, assignments in a
// map, counting by full enumeration of bound-variable tuples.
bool naive_eval(const ColouredGraph& g, const FormulaPtr& f, std::map<int, int>& alpha) {
  switch (f->kind) {
    case Formula::Kind::Const:
      return f->value;
    case Formula::Kind::Eq:
      return alpha.at(f->var1) == alpha.at(f->var2);
    case Formula::Kind::Col:
      return g.colours[alpha.at(f->var1)] == f->colour;
    case Formula::Kind::Edge:
      return g.has_edge(alpha.at(f->var1), alpha.at(f->var2));
    case Formula::Kind::Not:
      return !naive_eval(g, f->left, alpha);
    case Formula::Kind::And:
      return naive_eval(g, f->left, alpha) && naive_eval(g, f->right, alpha);
    case Formula::Kind::Count: {
      std::map<int, int> saved;
      for (int v : f->bound)
        if (alpha.count(v)) saved[v] = alpha[v];
      long hits = 0;
      std::vector<int> w(f->bound.size(), 0);
      while (true) {
        for (std::size_t i = 0; i < w.size(); ++i) alpha[f->bound[i]] = w[i];
        if (naive_eval(g, f->left, alpha)) ++hits;
        std::size_t i = 0;
        while (i < w.size() && ++w[i] == g.n) w[i++] = 0;
        if (i == w.size()) break;
      }
      for (int v : f->bound) alpha.erase(v);
      for (auto& [v, val] : saved) alpha[v] = val;
      return hits >= f->threshold;
    }
  }
  return false;
}

bool naive_closed(const ColouredGraph& g, const FormulaPtr& f) {
  std::map<int, int> alpha;
  return naive_eval(g, f, alpha);
}

ColouredGraph random_graph(std::mt19937_64& rng, int n) {
  std::vector<std::string> colours;
  for (int v = 0; v < n; ++v) colours.push_back(rng() % 2 ? "b" : "a");
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng() % 2) edges.emplace_back(u, v);
  return make_graph(n, edges, std::move(colours), true);
}

}  // namespace

TEST_CASE("formula constructors validate their arguments") {
  CHECK_THROWS_AS(f_eq(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(f_eq(1, 33), std::invalid_argument);
  CHECK_THROWS_AS(f_count(0, {1}, f_const(true)), std::invalid_argument);
  CHECK_THROWS_AS(f_count(1, {}, f_const(true)), std::invalid_argument);
  CHECK_THROWS_AS(f_count(1, {1, 1}, f_const(true)), std::invalid_argument);
}

TEST_CASE("rank and free variables match a recomputation from the definition") {
  auto phi = f_count(2, {2}, f_and(f_edge(1, 2), f_not(f_eq(1, 2))));
  CHECK(quantifier_rank(phi) == 1);
  CHECK(free_vars(phi) == std::vector<int>{1});

  auto tuple_count = f_count(3, {1, 2}, f_edge(1, 2));
  CHECK(quantifier_rank(tuple_count) == 2);  // a width-2 counter spends two ranks
  CHECK(free_vars(tuple_count).empty());

  auto nested = f_count(1, {1}, f_count(2, {2}, f_and(f_edge(1, 2), f_col("a", 2))));
  CHECK(quantifier_rank(nested) == 2);
  CHECK(free_vars(nested).empty());

  auto open = f_and(f_eq(1, 2), f_count(1, {2}, f_edge(3, 2)));
  CHECK(free_vars(open) == std::vector<int>{1, 2, 3});
  CHECK(quantifier_rank(open) == 1);
}

TEST_CASE("s-expression round trip") {
  auto phi = f_count(2, {2, 3}, f_and(f_edge(1, 2), f_not(f_col("blue", 3))));
  auto back = parse_formula(to_sexpr(phi));
  CHECK(to_sexpr(back) == to_sexpr(phi));

  CHECK(to_sexpr(f_const(true)) == "(true)");
  CHECK(to_sexpr(parse_formula("( exists>=  2 ( x2 )\n (edge x1  x2) )")) ==
        "(exists>= 2 (x2) (edge x1 x2))");

  // n-ary conjunction folds left
  auto folded = parse_formula("(and (true) (false) (= x1 x1))");
  CHECK(to_sexpr(folded) == "(and (and (true) (false)) (= x1 x1))");

  CHECK_THROWS_AS(parse_formula("(edge x1 x2) junk"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula("(exists>= 0 (x1) (true))"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula("(frob x1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula("(edge x1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula(""), std::invalid_argument);
}

TEST_CASE("evaluation agrees with the reference semantics on random sentences") {
  std::mt19937_64 rng(99);
  std::vector<std::string> alphabet{"a", "b"};
  int agree = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto g = random_graph(rng, 2 + static_cast<int>(rng() % 3));
    auto s = sample_sentence(3, 1 + static_cast<int>(rng() % 4), alphabet, rng());
    bool fast = evaluate(g, s.formula, std::vector<int>(3, 0));
    bool slow = naive_closed(g, s.formula);
    REQUIRE(fast == slow);
    agree += fast == slow;
  }
  CHECK(agree == 300);
}

TEST_CASE("tuple counting thresholds count assignments of the whole block") {
  // two disjoint edges: exactly 4 ordered adjacent pairs
  auto g = make_graph(4, {{0, 1}, {2, 3}}, {"a", "a", "a", "a"}, true);
  CHECK(evaluate(g, f_count(4, {1, 2}, f_edge(1, 2)), std::vector<int>(2, 0)));
  CHECK_FALSE(evaluate(g, f_count(5, {1, 2}, f_edge(1, 2)), std::vector<int>(2, 0)));
}

TEST_CASE("colour atoms with labels absent from the graph are false") {
  auto g = make_graph(2, {{0, 1}}, {"a", "a"}, true);
  CHECK_FALSE(evaluate(g, f_count(1, {1}, f_col("z", 1)), std::vector<int>(1, 0)));
}

TEST_CASE("free variables read the supplied assignment") {
  auto g = make_graph(3, {{0, 1}}, {"a", "a", "a"}, true);
  auto phi = f_edge(1, 2);
  CHECK(evaluate(g, phi, {0, 1}));
  CHECK_FALSE(evaluate(g, phi, {0, 2}));
  CHECK_THROWS_AS(evaluate(g, phi, {0}), std::invalid_argument);     // too narrow
  CHECK_THROWS_AS(evaluate(g, phi, {0, 3}), std::invalid_argument);  // vertex range
}

TEST_CASE("the degree sentence separates the path from the star") {
  auto [p4, star] = corpus("path4_vs_star");
  auto phi = parse_formula("(exists>= 1 (x1) (exists>= 3 (x2) (edge x1 x2)))");
  CHECK(quantifier_rank(phi) == 2);
  CHECK_FALSE(evaluate(p4, phi, std::vector<int>(2, 0)));
  CHECK(evaluate(star, phi, std::vector<int>(2, 0)));
}

TEST_CASE("sampler yields closed sentences within the rank budget, deterministically") {
  std::vector<std::string> alphabet{"a"};
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (int qr = 1; qr <= 5; ++qr) {
      auto s = sample_sentence(2, qr, alphabet, seed);
      CHECK_FALSE(s.degenerate);
      CHECK(free_vars(s.formula).empty());
      CHECK(quantifier_rank(s.formula) <= qr);
      CHECK(quantifier_rank(s.formula) >= 1);
      auto again = sample_sentence(2, qr, alphabet, seed);
      CHECK(to_sexpr(again.formula) == to_sexpr(s.formula));
    }
  }
  auto degenerate = sample_sentence(2, 0, alphabet, 5);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.formula->kind == Formula::Kind::Const);
}

TEST_CASE("agreement reports count and cap disagreements") {
  auto [p4, star] = corpus("path4_vs_star");
  std::vector<FormulaPtr> sentences{
      parse_formula("(exists>= 1 (x1) (exists>= 3 (x2) (edge x1 x2)))"),
      parse_formula("(exists>= 4 (x1) (= x1 x1))"),
      parse_formula("(exists>= 2 (x1 x2) (edge x1 x2))"),
  };
  auto rep = agree_on(p4, star, sentences, 2);
  CHECK(rep.sentences == 3);
  CHECK(rep.disagreements == 1);
  REQUIRE(rep.counterexamples.size() == 1);
  CHECK(rep.counterexamples[0] == to_sexpr(sentences[0]));
}
