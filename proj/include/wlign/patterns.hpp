#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlign/tuples.hpp"

namespace wlign {

// An equality pattern is a set partition of positions 0..arity-1, stored in
// restricted-growth form: rgs[i] is the block of position i, blocks numbered
// by first occurrence. Block order therefore coincides with "sorted by
// smallest element", and rgs is the canonical representative.
struct EqualityPattern {
  int arity = 0;
  std::vector<int> rgs;

  int num_blocks() const { return rgs.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1; }

  std::vector<std::vector<int>> blocks() const {
    std::vector<std::vector<int>> b(num_blocks());
    for (int i = 0; i < arity; ++i) b[rgs[i]].push_back(i);
    return b;
  }

  auto operator<=>(const EqualityPattern&) const = default;
};

inline std::vector<int> rgs_of_tuple(const Tuple& t) {
  std::vector<int> rgs(t.size());
  std::map<int, int> block;
  int next = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto [it, fresh] = block.emplace(t[i], next);
    if (fresh) ++next;
    rgs[i] = it->second;
  }
  return rgs;
}

inline EqualityPattern pattern_of(const Tuple& t) {
  return EqualityPattern{static_cast<int>(t.size()), rgs_of_tuple(t)};
}

// Canonicalizes an arbitrary block-of-position labelling into RGS form.
inline EqualityPattern pattern_from_labels(const std::vector<int>& labels) {
  std::vector<int> rgs(labels.size());
  std::map<int, int> seen;
  int next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] = seen.emplace(labels[i], next);
    if (fresh) ++next;
    rgs[i] = it->second;
  }
  return EqualityPattern{static_cast<int>(labels.size()), rgs};
}

constexpr int kMaxPatternArity = 10;

// All patterns of one arity in lexicographic RGS order; the position in this
// list is the pattern id used by layer coefficients and serialized models.
class PatternUniverse {
 public:
  explicit PatternUniverse(int arity) : arity_(arity) {
    if (arity < 1 || arity > kMaxPatternArity)
      throw std::invalid_argument("pattern arity must be in [1," +
                                  std::to_string(kMaxPatternArity) + "]");
    std::vector<int> rgs(arity, 0);
    enumerate(rgs, 1, 0);
    if (arity_ <= 6) {
      std::size_t span = 1;
      for (int i = 0; i < arity_; ++i) span *= static_cast<std::size_t>(arity_);
      dense_.assign(span, -1);
      for (std::size_t id = 0; id < list_.size(); ++id) dense_[encode(list_[id].rgs)] = static_cast<int>(id);
    } else {
      for (std::size_t id = 0; id < list_.size(); ++id) by_rgs_.emplace(list_[id].rgs, static_cast<int>(id));
    }
  }

  int arity() const { return arity_; }
  int size() const { return static_cast<int>(list_.size()); }
  const std::vector<EqualityPattern>& list() const { return list_; }
  const EqualityPattern& at(int id) const { return list_.at(id); }

  int id_of(const std::vector<int>& rgs) const {
    if (static_cast<int>(rgs.size()) != arity_) throw std::invalid_argument("rgs arity mismatch");
    int id = arity_ <= 6 ? dense_[encode(rgs)] : [&] {
      auto it = by_rgs_.find(rgs);
      return it == by_rgs_.end() ? -1 : it->second;
    }();
    if (id < 0) throw std::invalid_argument("not a canonical restricted-growth string");
    return id;
  }

  int id_of(const EqualityPattern& p) const { return id_of(p.rgs); }
  int id_of_tuple(const Tuple& t) const { return id_of(rgs_of_tuple(t)); }

 private:
  void enumerate(std::vector<int>& rgs, int pos, int maxb) {
    if (pos == arity_) {
      list_.push_back(EqualityPattern{arity_, rgs});
      return;
    }
    for (int b = 0; b <= maxb + 1; ++b) {
      rgs[pos] = b;
      enumerate(rgs, pos + 1, std::max(maxb, b));
    }
  }

  std::size_t encode(const std::vector<int>& rgs) const {
    std::size_t code = 0;
    for (int v : rgs) code = code * static_cast<std::size_t>(arity_) + static_cast<std::size_t>(v);
    return code;
  }

  int arity_;
  std::vector<EqualityPattern> list_;
  std::vector<int> dense_;
  std::map<std::vector<int>, int> by_rgs_;
};

inline const PatternUniverse& patterns(int arity) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<PatternUniverse>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(arity);
  if (it == cache.end()) it = cache.emplace(arity, std::make_unique<PatternUniverse>(arity)).first;
  return *it->second;
}

inline std::vector<EqualityPattern> enumerate_patterns(int arity) { return patterns(arity).list(); }

// Block taxonomy of an arity-2k pattern. A block is constant when its
// smallest position lies in the first half, variable otherwise; a constant
// block is "used" when it also reaches into the second half.
enum class ClassKind { constant_used, constant_unused, variable };

inline std::string class_kind_name(ClassKind k) {
  switch (k) {
    case ClassKind::constant_used: return "constant_used";
    case ClassKind::constant_unused: return "constant_unused";
    default: return "variable";
  }
}

struct ClassInfo {
  ClassKind kind;
  int rep;                     // smallest position of the block
  std::vector<int> first_half;   // positions < k
  std::vector<int> second_half;  // positions >= k, kept as 0-based slots i-k
};

inline std::vector<ClassInfo> classify(const EqualityPattern& mu, int k) {
  if (mu.arity != 2 * k) throw std::invalid_argument("pattern arity must be 2k");
  std::vector<ClassInfo> out;
  for (const auto& block : mu.blocks()) {
    ClassInfo info;
    info.rep = block.front();
    for (int pos : block)
      (pos < k ? info.first_half : info.second_half).push_back(pos < k ? pos : pos - k);
    info.kind = info.first_half.empty()
                    ? ClassKind::variable
                    : (info.second_half.empty() ? ClassKind::constant_unused : ClassKind::constant_used);
    out.push_back(std::move(info));
  }
  return out;
}

// The equality/inequality conditions carving out the pair class of mu,
// phrased for a candidate second tuple v2 relative to the anchor tuple v.
//
// (a) equal entries inside each block that touches the second half;
// (b) distinct entries across different such blocks;
// (c) second-half entries of a used constant block pinned to the anchor
//     entry at the block's smallest position;
// (d) entries of variable blocks avoid the anchor entries of unused
//     constant blocks.
//
// The anchor itself must realize the first-half structure of mu for the
// pair class to be inhabited at all; first_half_compatible checks that.
inline bool first_half_compatible(const EqualityPattern& mu, int k, const Tuple& v) {
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if ((mu.rgs[i] == mu.rgs[j]) != (v[i] == v[j])) return false;
  return true;
}

inline bool satisfies_a(const std::vector<ClassInfo>& cls, const Tuple& v2) {
  for (const auto& c : cls)
    for (std::size_t s = 1; s < c.second_half.size(); ++s)
      if (v2[c.second_half[s]] != v2[c.second_half[0]]) return false;
  return true;
}

inline bool satisfies_b(const std::vector<ClassInfo>& cls, const Tuple& v2) {
  for (std::size_t s = 0; s < cls.size(); ++s)
    for (std::size_t t = s + 1; t < cls.size(); ++t)
      for (int i : cls[s].second_half)
        for (int j : cls[t].second_half)
          if (v2[i] == v2[j]) return false;
  return true;
}

inline bool satisfies_c(const std::vector<ClassInfo>& cls, const Tuple& v, const Tuple& v2) {
  for (const auto& c : cls) {
    if (c.kind != ClassKind::constant_used) continue;
    for (int i : c.second_half)
      if (v2[i] != v[c.rep]) return false;
  }
  return true;
}

inline bool satisfies_d(const std::vector<ClassInfo>& cls, const Tuple& v, const Tuple& v2) {
  for (const auto& c : cls) {
    if (c.kind != ClassKind::variable) continue;
    for (const auto& u : cls) {
      if (u.kind != ClassKind::constant_unused) continue;
      for (int i : c.second_half)
        if (v2[i] == v[u.rep]) return false;
    }
  }
  return true;
}

// Equivalent to pattern_of(v . v2) == mu, via the condition route; the
// equivalence with the concatenation route is exercised by the test suite.
inline bool membership(const EqualityPattern& mu, int k, const Tuple& v, const Tuple& v2) {
  auto cls = classify(mu, k);
  return first_half_compatible(mu, k, v) && satisfies_a(cls, v2) && satisfies_b(cls, v2) &&
         satisfies_c(cls, v, v2) && satisfies_d(cls, v, v2);
}

// Oracle-grade: exhaustively enumerates [0,n)^k and keeps the second tuples
// whose concatenation with v realizes mu exactly.
inline std::set<Tuple> p_set(const EqualityPattern& mu, int k, const Tuple& v, int n) {
  std::set<Tuple> out;
  Tuple v2(k, 0), cat(2 * k);
  std::copy(v.begin(), v.end(), cat.begin());
  do {
    std::copy(v2.begin(), v2.end(), cat.begin() + k);
    if (pattern_of(cat) == mu) out.insert(v2);
  } while (next_tuple(v2, n));
  return out;
}

// Relaxed class: conditions (a), (b), (c) with (d) dropped. Empty whenever
// the anchor cannot realize mu's first half.
inline std::set<Tuple> p_tilde_set(const EqualityPattern& mu, int k, const Tuple& v, int n) {
  std::set<Tuple> out;
  if (!first_half_compatible(mu, k, v)) return out;
  auto cls = classify(mu, k);
  Tuple v2(k, 0);
  do {
    if (satisfies_a(cls, v2) && satisfies_b(cls, v2) && satisfies_c(cls, v, v2)) out.insert(v2);
  } while (next_tuple(v2, n));
  return out;
}

// Merges variable class var_class into unused constant class const_class
// (indices into the canonical block order); the merged block becomes a used
// constant class of the result.
inline EqualityPattern merge_classes(const EqualityPattern& mu, int k, int var_class,
                                     int const_class) {
  auto cls = classify(mu, k);
  if (var_class < 0 || var_class >= static_cast<int>(cls.size()) || const_class < 0 ||
      const_class >= static_cast<int>(cls.size()))
    throw std::invalid_argument("class index out of range");
  if (cls[var_class].kind != ClassKind::variable)
    throw std::invalid_argument("merge source must be a variable class");
  if (cls[const_class].kind != ClassKind::constant_unused)
    throw std::invalid_argument("merge target must be an unused constant class");
  std::vector<int> labels = mu.rgs;
  for (int& l : labels)
    if (l == var_class) l = const_class;
  return pattern_from_labels(labels);
}

// Position action on k-tuples: entry at position i moves to position pi[i].
inline Tuple permute_tuple(const std::vector<int>& pi, const Tuple& v) {
  Tuple out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[pi[i]] = v[i];
  return out;
}

// Position action on arity-2k patterns: first-half positions are relabelled
// through pi, second-half positions stay put.
inline EqualityPattern permute_pattern(const std::vector<int>& pi, const EqualityPattern& mu,
                                       int k) {
  if (mu.arity != 2 * k) throw std::invalid_argument("pattern arity must be 2k");
  if (static_cast<int>(pi.size()) != k) throw std::invalid_argument("permutation arity mismatch");
  std::vector<int> labels(2 * k);
  for (int i = 0; i < 2 * k; ++i) {
    int image = i < k ? pi[i] : i;
    labels[image] = mu.rgs[i];
  }
  return pattern_from_labels(labels);
}

// Goodness: every used constant class that reaches slot i as its first
// second-half slot must also contain first-half position i. Good patterns
// make the pinned slots readable off the first half directly.
inline bool is_good(const EqualityPattern& mu, int k) {
  for (const auto& c : classify(mu, k)) {
    if (c.kind != ClassKind::constant_used) continue;
    int first_slot = c.second_half.front();
    if (std::find(c.first_half.begin(), c.first_half.end(), first_slot) == c.first_half.end())
      return false;
  }
  return true;
}

struct GoodifyResult {
  std::vector<int> pi;  // position permutation of [0,k)
  EqualityPattern pattern;
};

// Sends the representative of each used constant class to that class's first
// second-half slot, then extends by mapping the remaining positions in
// increasing order onto the remaining targets in increasing order.
inline GoodifyResult goodify(const EqualityPattern& mu, int k) {
  auto cls = classify(mu, k);
  std::vector<int> pi(k, -1);
  std::vector<char> target_taken(k, 0);
  for (const auto& c : cls) {
    if (c.kind != ClassKind::constant_used) continue;
    int j = c.second_half.front();
    pi[c.rep] = j;
    target_taken[j] = 1;
  }
  int next = 0;
  for (int i = 0; i < k; ++i) {
    if (pi[i] >= 0) continue;
    while (target_taken[next]) ++next;
    pi[i] = next;
    target_taken[next] = 1;
  }
  return GoodifyResult{pi, permute_pattern(pi, mu, k)};
}

struct DecomposeResult {
  std::set<Tuple> exact;      // pair class of mu at the anchor
  std::set<Tuple> sieved;     // relaxed class minus all merged relaxed classes
  bool agree = false;
};

// The pair class equals the relaxed class with every merge of a variable
// class into an unused constant class sieved out.
inline DecomposeResult decompose(const EqualityPattern& mu, int k, const Tuple& v, int n) {
  DecomposeResult r;
  r.exact = p_set(mu, k, v, n);
  r.sieved = p_tilde_set(mu, k, v, n);
  auto cls = classify(mu, k);
  for (int s = 0; s < static_cast<int>(cls.size()); ++s) {
    if (cls[s].kind != ClassKind::variable) continue;
    for (int t = 0; t < static_cast<int>(cls.size()); ++t) {
      if (cls[t].kind != ClassKind::constant_unused) continue;
      for (const auto& v2 : p_tilde_set(merge_classes(mu, k, s, t), k, v, n)) r.sieved.erase(v2);
    }
  }
  r.agree = r.exact == r.sieved;
  return r;
}

// True when every block of fine sits inside one block of coarse.
inline bool refines(const EqualityPattern& fine, const EqualityPattern& coarse) {
  if (fine.arity != coarse.arity) throw std::invalid_argument("arity mismatch");
  std::vector<int> image(fine.num_blocks(), -1);
  for (int i = 0; i < fine.arity; ++i) {
    int b = fine.rgs[i];
    if (image[b] < 0)
      image[b] = coarse.rgs[i];
    else if (image[b] != coarse.rgs[i])
      return false;
  }
  return true;
}

}  // namespace wlign
