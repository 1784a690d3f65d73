#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wlign/graph.hpp"
#include "wlign/tuples.hpp"

namespace wlign {

// Counting logic with a bounded variable supply x1..xk. Quantifier rank and
// free variables are cached at construction; the counting quantifier over an
// l-tuple of variables contributes l to the rank. A Boolean constant is kept
// as a leaf so the sampler can return something meaningful when asked for
// quantifier rank 0, where the grammar admits no closed atoms.
struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Const, Eq, Col, Edge, Not, And, Count };

  Kind kind;
  bool value = false;            // Const
  int var1 = 0, var2 = 0;        // Eq/Edge both, Col var1
  std::string colour;            // Col
  int threshold = 0;             // Count: at least this many witness tuples
  std::vector<int> bound;        // Count: quantified variables, in order
  FormulaPtr left, right;        // Not/Count use left only

  int qr = 0;
  std::uint32_t free_mask = 0;
  int max_var = 0;
};

namespace logic_detail {

inline void check_var(int i) {
  if (i < 1 || i > 32) throw std::invalid_argument("variable index out of range: x" + std::to_string(i));
}

inline FormulaPtr finish(Formula f) {
  for (std::uint32_t m = f.free_mask; m; m &= m - 1) {
    int v = std::countr_zero(m) + 1;
    f.max_var = std::max(f.max_var, v);
  }
  for (int v : f.bound) f.max_var = std::max(f.max_var, v);
  f.max_var = std::max({f.max_var, f.var1, f.var2});
  return std::make_shared<const Formula>(std::move(f));
}

}  // namespace logic_detail

inline FormulaPtr f_const(bool value) {
  Formula f;
  f.kind = Formula::Kind::Const;
  f.value = value;
  return logic_detail::finish(std::move(f));
}

inline FormulaPtr f_eq(int i, int j) {
  logic_detail::check_var(i);
  logic_detail::check_var(j);
  Formula f;
  f.kind = Formula::Kind::Eq;
  f.var1 = i;
  f.var2 = j;
  f.free_mask = (1u << (i - 1)) | (1u << (j - 1));
  return logic_detail::finish(std::move(f));
}

inline FormulaPtr f_col(std::string colour, int i) {
  logic_detail::check_var(i);
  Formula f;
  f.kind = Formula::Kind::Col;
  f.colour = std::move(colour);
  f.var1 = i;
  f.free_mask = 1u << (i - 1);
  return logic_detail::finish(std::move(f));
}

inline FormulaPtr f_edge(int i, int j) {
  logic_detail::check_var(i);
  logic_detail::check_var(j);
  Formula f;
  f.kind = Formula::Kind::Edge;
  f.var1 = i;
  f.var2 = j;
  f.free_mask = (1u << (i - 1)) | (1u << (j - 1));
  return logic_detail::finish(std::move(f));
}

inline FormulaPtr f_not(FormulaPtr phi) {
  Formula f;
  f.kind = Formula::Kind::Not;
  f.qr = phi->qr;
  f.free_mask = phi->free_mask;
  f.max_var = phi->max_var;
  f.left = std::move(phi);
  return logic_detail::finish(std::move(f));
}

inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Formula::Kind::And;
  f.qr = std::max(a->qr, b->qr);
  f.free_mask = a->free_mask | b->free_mask;
  f.max_var = std::max(a->max_var, b->max_var);
  f.left = std::move(a);
  f.right = std::move(b);
  return logic_detail::finish(std::move(f));
}

// "There are at least `threshold` distinct |vars|-tuples of witnesses."
inline FormulaPtr f_count(int threshold, std::vector<int> vars, FormulaPtr phi) {
  if (threshold < 1) throw std::invalid_argument("count threshold must be positive");
  if (vars.empty()) throw std::invalid_argument("count quantifier binds at least one variable");
  std::uint32_t seen = 0;
  for (int v : vars) {
    logic_detail::check_var(v);
    if (seen & (1u << (v - 1))) throw std::invalid_argument("count quantifier repeats a variable");
    seen |= 1u << (v - 1);
  }
  Formula f;
  f.kind = Formula::Kind::Count;
  f.threshold = threshold;
  f.bound = std::move(vars);
  f.qr = phi->qr + static_cast<int>(f.bound.size());
  f.free_mask = phi->free_mask & ~seen;
  f.left = std::move(phi);
  return logic_detail::finish(std::move(f));
}

inline int quantifier_rank(const FormulaPtr& f) { return f->qr; }

inline std::vector<int> free_vars(const FormulaPtr& f) {
  std::vector<int> out;
  for (std::uint32_t m = f->free_mask; m; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
  return out;
}

namespace logic_detail {

// Per-call evaluator; the memo key restricts the assignment to the free
// variables of the subformula, so unrelated bindings do not split entries.
class Evaluator {
 public:
  Evaluator(const ColouredGraph& g, int k) : g_(g), k_(k) {
    memo_ok_ = k <= 5 && g.n <= 4095;
  }

  bool eval(const Formula* f, std::vector<int>& alpha) {
    std::uint64_t key = 0;
    if (memo_ok_) {
      for (std::uint32_t m = f->free_mask; m; m &= m - 1)
        key = (key << 12) | static_cast<std::uint64_t>(alpha[std::countr_zero(m)]);
      auto& slot = memo_[f];
      auto it = slot.find(key);
      if (it != slot.end()) return it->second;
    }
    bool result;
    switch (f->kind) {
      case Formula::Kind::Const: result = f->value; break;
      case Formula::Kind::Eq: result = alpha[f->var1 - 1] == alpha[f->var2 - 1]; break;
      case Formula::Kind::Col: {
        // Colour tokens absent from the graph simply never hold.
        result = g_.colours[alpha[f->var1 - 1]] == f->colour;
        break;
      }
      case Formula::Kind::Edge: result = g_.has_edge(alpha[f->var1 - 1], alpha[f->var2 - 1]); break;
      case Formula::Kind::Not: result = !eval(f->left.get(), alpha); break;
      case Formula::Kind::And:
        result = eval(f->left.get(), alpha) && eval(f->right.get(), alpha);
        break;
      case Formula::Kind::Count: {
        const int l = static_cast<int>(f->bound.size());
        std::vector<int> saved(l);
        for (int i = 0; i < l; ++i) saved[i] = alpha[f->bound[i] - 1];
        long long hits = 0;
        Tuple w(l, 0);
        do {
          for (int i = 0; i < l; ++i) alpha[f->bound[i] - 1] = w[i];
          if (eval(f->left.get(), alpha) && ++hits >= f->threshold) break;
        } while (next_tuple(w, g_.n));
        for (int i = 0; i < l; ++i) alpha[f->bound[i] - 1] = saved[i];
        result = hits >= f->threshold;
        break;
      }
      default: throw std::logic_error("unhandled formula kind");
    }
    if (memo_ok_) memo_[f][key] = result;
    return result;
  }

 private:
  const ColouredGraph& g_;
  int k_;
  bool memo_ok_;
  std::unordered_map<const Formula*, std::unordered_map<std::uint64_t, bool>> memo_;
};

}  // namespace logic_detail

// Evaluates under a total assignment alpha (alpha[i-1] = value of xi).
inline bool evaluate(const ColouredGraph& g, const FormulaPtr& f, const std::vector<int>& alpha) {
  const int k = static_cast<int>(alpha.size());
  if (f->max_var > k)
    throw std::invalid_argument("formula uses x" + std::to_string(f->max_var) +
                                " but the assignment covers only " + std::to_string(k) +
                                " variables");
  for (int v : alpha)
    if (v < 0 || v >= g.n) throw std::invalid_argument("assignment value out of vertex range");
  std::vector<int> work(alpha);
  logic_detail::Evaluator ev(g, k);
  return ev.eval(f.get(), work);
}

// ---- S-expression surface syntax ----
// (= x1 x2) | (col label x1) | (edge x1 x2) | (not F) | (and F F) |
// (exists>= r (x1 x2 ...) F) | (true) | (false)

inline std::string to_sexpr(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Const: return f->value ? "(true)" : "(false)";
    case Formula::Kind::Eq:
      return "(= x" + std::to_string(f->var1) + " x" + std::to_string(f->var2) + ")";
    case Formula::Kind::Col: return "(col " + f->colour + " x" + std::to_string(f->var1) + ")";
    case Formula::Kind::Edge:
      return "(edge x" + std::to_string(f->var1) + " x" + std::to_string(f->var2) + ")";
    case Formula::Kind::Not: return "(not " + to_sexpr(f->left) + ")";
    case Formula::Kind::And: return "(and " + to_sexpr(f->left) + " " + to_sexpr(f->right) + ")";
    case Formula::Kind::Count: {
      std::string vars;
      for (std::size_t i = 0; i < f->bound.size(); ++i)
        vars += (i ? " x" : "x") + std::to_string(f->bound[i]);
      return "(exists>= " + std::to_string(f->threshold) + " (" + vars + ") " + to_sexpr(f->left) +
             ")";
    }
    default: throw std::logic_error("unhandled formula kind");
  }
}

namespace logic_detail {

struct SexprParser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    if (pos >= text.size()) throw std::invalid_argument("unexpected end of formula");
    return text[pos];
  }

  void expect(char c) {
    if (peek() != c) throw std::invalid_argument(std::string("expected '") + c + "' in formula");
    ++pos;
  }

  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    if (start == pos) throw std::invalid_argument("expected a token in formula");
    return text.substr(start, pos - start);
  }

  int variable() {
    std::string t = token();
    if (t.size() < 2 || t[0] != 'x') throw std::invalid_argument("expected a variable, got: " + t);
    return std::stoi(t.substr(1));
  }

  FormulaPtr formula() {
    expect('(');
    std::string head = token();
    FormulaPtr out;
    if (head == "true" || head == "false") {
      out = f_const(head == "true");
    } else if (head == "=") {
      int i = variable(), j = variable();
      out = f_eq(i, j);
    } else if (head == "col") {
      std::string label = token();
      out = f_col(label, variable());
    } else if (head == "edge") {
      int i = variable(), j = variable();
      out = f_edge(i, j);
    } else if (head == "not") {
      out = f_not(formula());
    } else if (head == "and") {
      FormulaPtr acc = formula();
      do {
        acc = f_and(acc, formula());
      } while (peek() != ')');
      out = acc;
    } else if (head == "exists>=") {
      int r = std::stoi(token());
      expect('(');
      std::vector<int> vars;
      while (peek() != ')') vars.push_back(variable());
      expect(')');
      out = f_count(r, vars, formula());
    } else {
      throw std::invalid_argument("unknown formula head: " + head);
    }
    expect(')');
    return out;
  }
};

}  // namespace logic_detail

inline FormulaPtr parse_formula(const std::string& text) {
  logic_detail::SexprParser p{text};
  FormulaPtr f = p.formula();
  p.skip_ws();
  if (p.pos != text.size()) throw std::invalid_argument("trailing input after formula");
  return f;
}

// ---- Seeded sentence sampling ----

struct SampledSentence {
  FormulaPtr formula;
  bool degenerate = false;  // rank budget 0 admits only Boolean constants
};

namespace logic_detail {

inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t m) { return rng() % m; }

struct SentenceSampler {
  int k;
  std::vector<std::string> alphabet;
  std::mt19937_64 rng;

  int scope_var(std::uint32_t scope) {
    std::vector<int> vars;
    for (std::uint32_t m = scope; m; m &= m - 1) vars.push_back(std::countr_zero(m) + 1);
    return vars[draw(rng, vars.size())];
  }

  FormulaPtr atom(std::uint32_t scope) {
    switch (draw(rng, alphabet.empty() ? 2 : 3)) {
      case 0: return f_eq(scope_var(scope), scope_var(scope));
      case 1: return f_edge(scope_var(scope), scope_var(scope));
      default: return f_col(alphabet[draw(rng, alphabet.size())], scope_var(scope));
    }
  }

  FormulaPtr quantifier(int budget, std::uint32_t scope, int depth) {
    int l = (budget >= 2 && k >= 2 && draw(rng, 5) == 0) ? 2 : 1;
    l = std::min(l, budget);
    std::vector<int> vars;
    std::uint32_t seen = 0;
    while (static_cast<int>(vars.size()) < l) {
      int v = static_cast<int>(draw(rng, k)) + 1;
      if (seen & (1u << (v - 1))) continue;
      seen |= 1u << (v - 1);
      vars.push_back(v);
    }
    int r = static_cast<int>(draw(rng, 3)) + 1;
    return f_count(r, vars, gen(budget - l, scope | seen, depth + 1));
  }

  FormulaPtr gen(int budget, std::uint32_t scope, int depth) {
    if (scope == 0) return quantifier(budget, scope, depth);  // only quantifiers can open scope
    if (depth >= 12) return atom(scope);
    std::uint64_t roll = draw(rng, 10);
    if (budget >= 1 && roll < 3) return quantifier(budget, scope, depth);
    if (roll < 5) return f_not(gen(budget, scope, depth + 1));
    if (roll < 7) return f_and(gen(budget, scope, depth + 1), gen(budget, scope, depth + 1));
    return atom(scope);
  }
};

}  // namespace logic_detail

// Deterministic in (k, max_qr, alphabet, seed). The result is a sentence of
// quantifier rank at most max_qr over variables x1..xk.
inline SampledSentence sample_sentence(int k, int max_qr, const std::vector<std::string>& alphabet,
                                       std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("variable supply must be positive");
  if (max_qr < 0) throw std::invalid_argument("quantifier rank bound must be nonnegative");
  std::mt19937_64 rng(seed);
  if (max_qr == 0) return {f_const(rng() % 2 == 0), true};
  logic_detail::SentenceSampler s{k, alphabet, std::mt19937_64(seed)};
  FormulaPtr f = s.gen(max_qr, 0, 0);
  if (f->free_mask != 0) throw std::logic_error("sampler produced an open formula");
  if (f->qr > max_qr) throw std::logic_error("sampler exceeded the rank budget");
  return {f, false};
}

struct AgreementReport {
  std::int64_t sentences = 0;
  std::int64_t disagreements = 0;
  std::vector<std::string> counterexamples;  // s-expressions, capped
};

// Evaluates each sentence on both graphs under the all-zero assignment.
inline AgreementReport agree_on(const ColouredGraph& g, const ColouredGraph& h,
                                const std::vector<FormulaPtr>& sentences, int k) {
  AgreementReport rep;
  std::vector<int> alpha(k, 0);
  for (const auto& f : sentences) {
    ++rep.sentences;
    if (evaluate(g, f, alpha) != evaluate(h, f, alpha)) {
      ++rep.disagreements;
      if (rep.counterexamples.size() < 5) rep.counterexamples.push_back(to_sexpr(f));
    }
  }
  return rep;
}

}  // namespace wlign
