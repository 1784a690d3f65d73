#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlign/graph.hpp"
#include "wlign/parallel.hpp"
#include "wlign/tuples.hpp"

namespace wlign {

// Colour ids stand in for the abstract injective hash: two tuples receive the
// same id in one refinement context exactly when their signatures coincide.
// Sharing a context across both graphs of a comparison makes ids comparable
// across graphs. Ids are handed out per round in sorted signature order, so a
// run is deterministic however the per-tuple work is scheduled.
using Signature = std::vector<std::int64_t>;

class SignatureInterner {
 public:
  // Batch barrier: sorts the round's distinct signatures, then assigns fresh
  // ids in that order. Returns the id for each input signature.
  void intern_round(const std::vector<const Signature*>& sigs, std::vector<int>& ids_out) {
    std::vector<const Signature*> order(sigs);
    std::sort(order.begin(), order.end(),
              [](const Signature* a, const Signature* b) { return *a < *b; });
    for (const Signature* s : order) {
      auto it = table_.lower_bound(*s);
      if (it == table_.end() || it->first != *s) table_.emplace_hint(it, *s, next_++);
    }
    ids_out.resize(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) ids_out[i] = table_.at(*sigs[i]);
  }

  int size() const { return next_; }

 private:
  std::map<Signature, int> table_;
  int next_ = 0;
};

struct TupleColouring {
  int k = 0;
  int round = 0;
  std::vector<int> colour_of;  // by flat tuple index, lexicographic order
  int num_classes = 0;
};

struct RefinementHistory {
  int k = 0;
  int n = 0;
  std::vector<TupleColouring> rounds;
  int stable_round = -1;  // first t with the same partition at t and t+1; -1 if the cap hit first

  const TupleColouring& at_round(int t) const {
    if (t < 0) throw std::invalid_argument("round must be nonnegative");
    std::size_t idx = std::min<std::size_t>(t, rounds.size() - 1);
    return rounds[idx];
  }
};

struct WlPair {
  RefinementHistory g, h;
  int last_round() const { return static_cast<int>(g.rounds.size()) - 1; }
};

namespace wl_detail {

inline void require_k(int k, bool allow_k1) {
  if (k < 1 || (k == 1 && !allow_k1))
    throw std::invalid_argument(
        "tuple dimension must be at least 2 (pass allow_k1 to explore the degenerate k=1 case)");
}

inline Signature atomic_signature(const ColouredGraph& g, const Tuple& t,
                                  const ColourAlphabet& alphabet) {
  AtomicType at = atomic_type(g, t, alphabet);
  Signature sig;
  sig.reserve(1 + at.equality.size() + at.edge.size() + at.colour.size());
  sig.push_back(0);  // round tag
  for (int x : at.equality) sig.push_back(x);
  for (unsigned char x : at.edge) sig.push_back(x);
  for (int x : at.colour) sig.push_back(x);
  return sig;
}

inline std::vector<Signature> atomic_signatures(const ColouredGraph& g, int k,
                                                const ColourAlphabet& alphabet, int jobs) {
  std::uint64_t count = tuple_count(g.n, k);
  std::vector<Signature> sigs(count);
  parallel_for(count, jobs, [&](std::uint64_t idx) {
    Tuple t;
    index_to_tuple(idx, g.n, k, t);
    sigs[idx] = atomic_signature(g, t, alphabet);
  });
  return sigs;
}

// Signature of one refinement step: previous colour plus, per position, the
// sorted multiset of previous colours over all single-vertex substitutions.
inline std::vector<Signature> round_signatures(const ColouredGraph& g, int k, int round,
                                               const std::vector<int>& prev, int jobs) {
  const int n = g.n;
  std::uint64_t count = tuple_count(n, k);
  std::vector<std::uint64_t> pow(k);
  pow[k - 1] = 1;
  for (int i = k - 2; i >= 0; --i) pow[i] = pow[i + 1] * static_cast<std::uint64_t>(n);
  std::vector<Signature> sigs(count);
  parallel_for(count, jobs, [&](std::uint64_t idx) {
    Tuple t;
    index_to_tuple(idx, n, k, t);
    Signature sig;
    sig.reserve(2 + static_cast<std::size_t>(k) * n);
    sig.push_back(round);
    sig.push_back(prev[idx]);
    std::vector<int> bag(n);
    for (int i = 0; i < k; ++i) {
      std::uint64_t base = idx - static_cast<std::uint64_t>(t[i]) * pow[i];
      for (int v = 0; v < n; ++v) bag[v] = prev[base + static_cast<std::uint64_t>(v) * pow[i]];
      std::sort(bag.begin(), bag.end());
      sig.insert(sig.end(), bag.begin(), bag.end());
    }
    sigs[idx] = sig;
  });
  return sigs;
}

inline int count_classes(const std::vector<int>& colours) {
  std::vector<int> sorted(colours);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<int>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

inline TupleColouring make_colouring(int k, int round, std::vector<int> colours) {
  TupleColouring c;
  c.k = k;
  c.round = round;
  c.num_classes = count_classes(colours);
  c.colour_of = std::move(colours);
  return c;
}

}  // namespace wl_detail

// Joint refinement of a graph pair in one interning context. Rounds run in
// lockstep until both partitions are stable or max_rounds is hit; the default
// cap n^k always suffices since an unstable round adds a class.
inline WlPair wl_run_joint(const ColouredGraph& g, const ColouredGraph& h, int k,
                           std::optional<std::uint64_t> max_rounds = std::nullopt, int jobs = 1,
                           bool allow_k1 = false) {
  wl_detail::require_k(k, allow_k1);
  if (g.n < 1 || h.n < 1) throw std::invalid_argument("graphs must be nonempty");
  ColourAlphabet alphabet = make_alphabet(g, h);
  std::uint64_t cap = max_rounds.value_or(
      std::max(tuple_count(g.n, k), tuple_count(h.n, k)));

  WlPair pair;
  pair.g.k = pair.h.k = k;
  pair.g.n = g.n;
  pair.h.n = h.n;

  auto intern_both = [&](SignatureInterner& interner, const std::vector<Signature>& sg,
                         const std::vector<Signature>& sh, std::vector<int>& cg,
                         std::vector<int>& ch) {
    std::vector<const Signature*> all;
    all.reserve(sg.size() + sh.size());
    for (const auto& s : sg) all.push_back(&s);
    for (const auto& s : sh) all.push_back(&s);
    std::vector<int> ids;
    interner.intern_round(all, ids);
    cg.assign(ids.begin(), ids.begin() + sg.size());
    ch.assign(ids.begin() + sg.size(), ids.end());
  };

  SignatureInterner interner;
  {
    auto sg = wl_detail::atomic_signatures(g, k, alphabet, jobs);
    auto sh = wl_detail::atomic_signatures(h, k, alphabet, jobs);
    std::vector<int> cg, ch;
    intern_both(interner, sg, sh, cg, ch);
    pair.g.rounds.push_back(wl_detail::make_colouring(k, 0, std::move(cg)));
    pair.h.rounds.push_back(wl_detail::make_colouring(k, 0, std::move(ch)));
  }

  for (std::uint64_t t = 1; t <= cap; ++t) {
    bool g_stable = pair.g.stable_round >= 0, h_stable = pair.h.stable_round >= 0;
    if (g_stable && h_stable) break;
    auto sg = wl_detail::round_signatures(g, k, static_cast<int>(t), pair.g.rounds.back().colour_of, jobs);
    auto sh = wl_detail::round_signatures(h, k, static_cast<int>(t), pair.h.rounds.back().colour_of, jobs);
    std::vector<int> cg, ch;
    intern_both(interner, sg, sh, cg, ch);
    pair.g.rounds.push_back(wl_detail::make_colouring(k, static_cast<int>(t), std::move(cg)));
    pair.h.rounds.push_back(wl_detail::make_colouring(k, static_cast<int>(t), std::move(ch)));
    // Refinement never merges classes, so an unchanged class count means the
    // partition is unchanged.
    int last = static_cast<int>(pair.g.rounds.size()) - 1;
    if (pair.g.stable_round < 0 &&
        pair.g.rounds[last].num_classes == pair.g.rounds[last - 1].num_classes)
      pair.g.stable_round = last - 1;
    if (pair.h.stable_round < 0 &&
        pair.h.rounds[last].num_classes == pair.h.rounds[last - 1].num_classes)
      pair.h.stable_round = last - 1;
  }
  return pair;
}

// Single-graph refinement in a private context.
inline RefinementHistory wl_run(const ColouredGraph& g, int k,
                                std::optional<std::uint64_t> max_rounds = std::nullopt,
                                int jobs = 1, bool allow_k1 = false) {
  return wl_run_joint(g, g, k, max_rounds, jobs, allow_k1).g;
}

inline std::map<int, std::int64_t> colour_histogram(const TupleColouring& c) {
  std::map<int, std::int64_t> hist;
  for (int id : c.colour_of) ++hist[id];
  return hist;
}

// Colour multiset equality at round t; rounds past the recorded history fall
// back to the stable colouring. Graphs of different sizes always differ.
inline bool wl_equivalent_at(const WlPair& pair, int t) {
  if (pair.g.n != pair.h.n) return false;
  return colour_histogram(pair.g.at_round(t)) == colour_histogram(pair.h.at_round(t));
}

// One entry per computed round, 0..last_round().
inline std::vector<bool> wl_equivalence_profile(const WlPair& pair) {
  std::vector<bool> eq;
  for (int t = 0; t <= pair.last_round(); ++t) eq.push_back(wl_equivalent_at(pair, t));
  return eq;
}

// Equivalent at every computed round; with both graphs run to stability this
// certifies indistinguishability at every finite round.
inline bool wl_equivalent(const WlPair& pair) {
  auto eq = wl_equivalence_profile(pair);
  return std::all_of(eq.begin(), eq.end(), [](bool b) { return b; });
}

inline nlohmann::json history_to_json(const RefinementHistory& hist) {
  nlohmann::json doc;
  doc["k"] = hist.k;
  doc["n"] = hist.n;
  doc["stable_round"] = hist.stable_round;
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& r : hist.rounds) {
    nlohmann::json rd;
    rd["round"] = r.round;
    rd["num_classes"] = r.num_classes;
    nlohmann::json colours = nlohmann::json::array();
    Tuple t(hist.k, 0);
    std::uint64_t idx = 0;
    do {
      colours.push_back({t, r.colour_of[idx]});
      ++idx;
    } while (next_tuple(t, hist.n));
    rd["colours"] = colours;
    nlohmann::json sizes = nlohmann::json::object();
    for (const auto& [id, cnt] : colour_histogram(r)) sizes[std::to_string(id)] = cnt;
    rd["class_sizes"] = sizes;
    rounds.push_back(rd);
  }
  doc["rounds"] = rounds;
  return doc;
}

}  // namespace wlign
