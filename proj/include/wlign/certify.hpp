#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlign/graph.hpp"
#include "wlign/ign.hpp"
#include "wlign/patterns.hpp"
#include "wlign/tuples.hpp"
#include "wlign/wl.hpp"

namespace wlign {

// Every verdict below is computed in exact arithmetic; a report is a pure
// function of its inputs and seeds. SKIP means a precondition of the claim
// did not hold on the instance, so the claim was not exercised.
struct CheckResult {
  std::string claim;
  std::int64_t instances = 0;
  std::int64_t failures = 0;
  std::optional<nlohmann::json> first_counterexample;
};

struct CertificationReport {
  std::string experiment;
  nlohmann::json instance;
  std::vector<CheckResult> checks;
  std::string skip_reason;  // nonempty only for SKIP

  bool skipped() const { return checks.empty(); }
  bool failed() const {
    return std::any_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.failures > 0; });
  }
  std::string status() const { return skipped() ? "SKIP" : (failed() ? "FAIL" : "PASS"); }
};

inline nlohmann::json report_to_json(const CertificationReport& rep,
                                     std::optional<std::int64_t> wall_ms = std::nullopt) {
  nlohmann::json doc;
  doc["experiment"] = rep.experiment;
  doc["instance"] = rep.instance;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    nlohmann::json cj;
    cj["claim"] = c.claim;
    cj["instances"] = c.instances;
    cj["failures"] = c.failures;
    cj["first_counterexample"] = c.first_counterexample ? *c.first_counterexample : nlohmann::json();
    checks.push_back(cj);
  }
  doc["checks"] = checks;
  doc["status"] = rep.status();
  if (rep.skipped()) doc["skip_reason"] = rep.skip_reason;
  if (wall_ms) doc["wall_clock_ms"] = *wall_ms;  // only on request: reports stay byte-reproducible
  return doc;
}

namespace certify_detail {

inline nlohmann::json pair_instance(const ColouredGraph& g, const ColouredGraph& h, int k) {
  nlohmann::json j;
  j["n_g"] = g.n;
  j["n_h"] = h.n;
  j["k"] = k;
  return j;
}

// Classes of the round-t colouring restricted to each graph.
inline std::map<int, std::vector<std::uint64_t>> classes_of(const TupleColouring& c) {
  std::map<int, std::vector<std::uint64_t>> out;
  for (std::uint64_t idx = 0; idx < c.colour_of.size(); ++idx) out[c.colour_of[idx]].push_back(idx);
  return out;
}

// Multiset, per arity-2k pattern, of the round-t colours over the second
// tuple of every pair anchored at v; buckets are sorted for comparison.
inline std::vector<std::vector<int>> pair_profile(const Tuple& v, int n, int k,
                                                  const std::vector<int>& colours) {
  const auto& uni = patterns(2 * k);
  std::vector<std::vector<int>> buckets(uni.size());
  Tuple cat(2 * k);
  std::copy(v.begin(), v.end(), cat.begin());
  Tuple v2(k, 0);
  std::uint64_t idx2 = 0;
  do {
    std::copy(v2.begin(), v2.end(), cat.begin() + k);
    buckets[uni.id_of_tuple(cat)].push_back(colours[idx2]);
    ++idx2;
  } while (next_tuple(v2, n));
  for (auto& b : buckets) std::sort(b.begin(), b.end());
  return buckets;
}

// Members of one matched colour class, grouped by an arbitrary profile.
// Counts agreeing pairs across the two graphs and within each graph; the
// class is uniform exactly when every pair agrees.
struct GroupTally {
  std::int64_t cross_pairs = 0;
  std::int64_t cross_agree = 0;
  std::int64_t within_pairs = 0;
  std::int64_t within_agree = 0;
  bool split = false;
  std::uint64_t witness_a = 0, witness_b = 0;  // first members of two distinct groups
  bool witness_a_in_g = true, witness_b_in_g = true;
};

template <class ProfileFn>
GroupTally tally_matched_class(const std::vector<std::uint64_t>& members_g,
                               const std::vector<std::uint64_t>& members_h, ProfileFn&& profile) {
  using Profile = std::decay_t<decltype(profile(std::uint64_t{0}, true))>;
  std::vector<Profile> distinct;
  std::vector<std::int64_t> in_g, in_h;
  std::vector<std::uint64_t> first;
  std::vector<bool> first_in_g;
  auto place = [&](std::uint64_t idx, bool g_side) {
    Profile p = profile(idx, g_side);
    for (std::size_t i = 0; i < distinct.size(); ++i)
      if (distinct[i] == p) {
        ++(g_side ? in_g : in_h)[i];
        return;
      }
    distinct.push_back(std::move(p));
    in_g.push_back(g_side ? 1 : 0);
    in_h.push_back(g_side ? 0 : 1);
    first.push_back(idx);
    first_in_g.push_back(g_side);
  };
  for (auto idx : members_g) place(idx, true);
  for (auto idx : members_h) place(idx, false);

  auto choose2 = [](std::int64_t m) { return m * (m - 1) / 2; };
  GroupTally t;
  t.cross_pairs = static_cast<std::int64_t>(members_g.size()) * members_h.size();
  t.within_pairs = choose2(static_cast<std::int64_t>(members_g.size())) +
                   choose2(static_cast<std::int64_t>(members_h.size()));
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    t.cross_agree += in_g[i] * in_h[i];
    t.within_agree += choose2(in_g[i]) + choose2(in_h[i]);
  }
  if (distinct.size() > 1) {
    t.split = true;
    t.witness_a = first[0];
    t.witness_a_in_g = first_in_g[0];
    t.witness_b = first[1];
    t.witness_b_in_g = first_in_g[1];
  }
  return t;
}

inline std::vector<int> shared_colour_keys(const std::map<int, std::vector<std::uint64_t>>& cg,
                                           const std::map<int, std::vector<std::uint64_t>>& ch) {
  std::vector<int> keys;
  for (const auto& [c, v] : cg) keys.push_back(c);
  for (const auto& [c, v] : ch)
    if (!cg.count(c)) keys.push_back(c);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace certify_detail

// Key lemma instance: with t = m(k-1) and t' = (m-1)(k-1), tuples that agree
// at round t must anchor, pattern by pattern, equal multisets of round-t'
// colours over their pair classes. Requires the graphs to be equivalent at
// round t'; anything else skips.
inline CertificationReport check_key_lemma(const ColouredGraph& g, const ColouredGraph& h, int k,
                                           int m, int jobs = 1) {
  if (k < 2) throw std::invalid_argument("tuple dimension must be at least 2");
  if (m < 1) throw std::invalid_argument("round multiplier must be positive");
  const int t = m * (k - 1), tp = (m - 1) * (k - 1);

  CertificationReport rep;
  rep.experiment = "key_lemma";
  rep.instance = certify_detail::pair_instance(g, h, k);
  rep.instance["m"] = m;
  rep.instance["t"] = t;
  rep.instance["t_prime"] = tp;

  if (g.n != h.n) {
    rep.skip_reason = "graphs have different vertex counts";
    return rep;
  }
  WlPair pair = wl_run_joint(g, h, k, std::nullopt, jobs);
  if (!wl_equivalent_at(pair, tp)) {
    rep.skip_reason = "graphs are distinguishable at round " + std::to_string(tp);
    return rep;
  }

  const auto& col_tp_g = pair.g.at_round(tp).colour_of;
  const auto& col_tp_h = pair.h.at_round(tp).colour_of;
  auto cg = certify_detail::classes_of(pair.g.at_round(t));
  auto ch = certify_detail::classes_of(pair.h.at_round(t));

  CheckResult cross, within;
  cross.claim = "cross-graph colour-matched tuple pairs anchor equal per-pattern colour multisets";
  within.claim = "within-graph colour-matched tuple pairs anchor equal per-pattern colour multisets";
  const std::vector<std::uint64_t> none;
  for (int colour : certify_detail::shared_colour_keys(cg, ch)) {
    const auto& mg = cg.count(colour) ? cg.at(colour) : none;
    const auto& mh = ch.count(colour) ? ch.at(colour) : none;
    auto tally = certify_detail::tally_matched_class(mg, mh, [&](std::uint64_t idx, bool g_side) {
      Tuple v = index_to_tuple(idx, g.n, k);
      return certify_detail::pair_profile(v, g.n, k, g_side ? col_tp_g : col_tp_h);
    });
    cross.instances += tally.cross_pairs;
    cross.failures += tally.cross_pairs - tally.cross_agree;
    within.instances += tally.within_pairs;
    within.failures += tally.within_pairs - tally.within_agree;
    bool fresh_failure = (tally.cross_agree < tally.cross_pairs && !cross.first_counterexample) ||
                         (tally.within_agree < tally.within_pairs && !within.first_counterexample);
    if (tally.split && fresh_failure) {
      nlohmann::json cx;
      cx["colour"] = colour;
      cx["tuple_a"] = index_to_tuple(tally.witness_a, g.n, k);
      cx["side_a"] = tally.witness_a_in_g ? "g" : "h";
      cx["tuple_b"] = index_to_tuple(tally.witness_b, g.n, k);
      cx["side_b"] = tally.witness_b_in_g ? "g" : "h";
      if (tally.cross_agree < tally.cross_pairs && !cross.first_counterexample)
        cross.first_counterexample = cx;
      if (tally.within_agree < tally.within_pairs && !within.first_counterexample)
        within.first_counterexample = cx;
    }
  }
  rep.checks.push_back(std::move(cross));
  rep.checks.push_back(std::move(within));
  return rep;
}

// Graph-free identity: the pair class equals the relaxed class minus the
// merged relaxed classes, for every pattern and anchor over every vertex
// count up to n_max.
inline CertificationReport check_observation_decomposition(int n_max, int k) {
  if (k < 2) throw std::invalid_argument("tuple dimension must be at least 2");
  if (n_max < 1) throw std::invalid_argument("vertex count bound must be positive");
  CertificationReport rep;
  rep.experiment = "decomposition";
  rep.instance = {{"n_max", n_max}, {"k", k}};
  CheckResult check;
  check.claim = "pair class equals relaxed class sieved by merged relaxed classes";
  for (int n = 1; n <= n_max; ++n) {
    for (const auto& mu : patterns(2 * k).list()) {
      Tuple v(k, 0);
      do {
        ++check.instances;
        auto d = decompose(mu, k, v, n);
        if (!d.agree) {
          ++check.failures;
          if (!check.first_counterexample)
            check.first_counterexample =
                nlohmann::json{{"n", n}, {"pattern", patterns(2 * k).id_of(mu)}, {"anchor", v}};
        }
      } while (next_tuple(v, n));
    }
  }
  rep.checks.push_back(std::move(check));
  return rep;
}

// Round-t colours are invariant under simultaneously permuting tuple
// positions on both sides: matched classes stay matched after the action.
// Permutations are enumerated in lexicographic order, capped at max_perms.
inline CertificationReport check_observation_permute(const ColouredGraph& g,
                                                     const ColouredGraph& h, int k, int t,
                                                     int max_perms = 720, int jobs = 1) {
  if (k < 2) throw std::invalid_argument("tuple dimension must be at least 2");
  if (t < 0) throw std::invalid_argument("round must be nonnegative");
  CertificationReport rep;
  rep.experiment = "permute_invariance";
  rep.instance = certify_detail::pair_instance(g, h, k);
  rep.instance["t"] = t;

  WlPair pair = wl_run_joint(g, h, k, std::nullopt, jobs);
  const auto& col_g = pair.g.at_round(t).colour_of;
  const auto& col_h = pair.h.at_round(t).colour_of;

  CheckResult check;
  check.claim = "position action preserves colour-matching of tuples";
  std::vector<int> pi(k);
  for (int i = 0; i < k; ++i) pi[i] = i;
  int used = 0;
  do {
    if (++used > max_perms) break;
    // One map colour -> permuted colour must fit every tuple of both graphs;
    // a conflict names two colour-matched tuples split by the action.
    std::map<int, int> image;
    auto scan = [&](const ColouredGraph& graph, const std::vector<int>& col) {
      Tuple v(k, 0);
      std::uint64_t idx = 0;
      do {
        ++check.instances;
        int pc = col[tuple_to_index(permute_tuple(pi, v), graph.n)];
        auto [it, fresh] = image.emplace(col[idx], pc);
        if (!fresh && it->second != pc) {
          ++check.failures;
          if (!check.first_counterexample)
            check.first_counterexample = nlohmann::json{{"permutation", pi},
                                                        {"colour", col[idx]},
                                                        {"tuple", v},
                                                        {"got", pc},
                                                        {"expected", it->second}};
        }
        ++idx;
      } while (next_tuple(v, graph.n));
    };
    scan(g, col_g);
    scan(h, col_h);
  } while (std::next_permutation(pi.begin(), pi.end()));
  rep.checks.push_back(std::move(check));
  return rep;
}

// Feature implication: if the graphs agree at round t, tuples matched at
// round t carry identical rows after floor(t/(k-1)) layers. Exact mode only.
inline CertificationReport check_lemma_feature_implication(const ColouredGraph& g,
                                                           const ColouredGraph& h, int k,
                                                           const IgnModel<Rational>& model, int t,
                                                           int jobs = 1) {
  if (k < 2) throw std::invalid_argument("tuple dimension must be at least 2");
  if (model.k != k) throw std::invalid_argument("model order does not match k");
  const int d = model.depth();
  if (t < 0 || t > (d + 1) * (k - 1) - 1)
    throw std::invalid_argument("round exceeds the depth the model can mirror: t <= (d+1)(k-1)-1");
  const int layers = t / (k - 1);
  if (d < (t + k - 2) / (k - 1))
    throw std::invalid_argument("model too shallow for the requested round");

  CertificationReport rep;
  rep.experiment = "feature_implication";
  rep.instance = certify_detail::pair_instance(g, h, k);
  rep.instance["t"] = t;
  rep.instance["layers"] = layers;
  rep.instance["depth"] = d;

  if (g.n != h.n) {
    rep.skip_reason = "graphs have different vertex counts";
    return rep;
  }
  WlPair pair = wl_run_joint(g, h, k, std::nullopt, jobs);
  if (!wl_equivalent_at(pair, t)) {
    rep.skip_reason = "graphs are distinguishable at round " + std::to_string(t);
    return rep;
  }

  auto enc = encode_pair<Rational>(g, h, k, jobs);
  if (model.depth() > 0 && model.layers.front().in_channels != enc.channels)
    throw std::invalid_argument("model input channels do not match the encoded pair");
  if (model.depth() == 0 && model.invariant.in_channels != enc.channels)
    throw std::invalid_argument("model input channels do not match the encoded pair");
  FeatureTensor<Rational> fg = forward_trunc(model, enc.g, layers, jobs);
  FeatureTensor<Rational> fh = forward_trunc(model, enc.h, layers, jobs);

  auto cg = certify_detail::classes_of(pair.g.at_round(t));
  auto ch = certify_detail::classes_of(pair.h.at_round(t));

  CheckResult cross, within;
  cross.claim = "cross-graph colour-matched tuple pairs carry equal truncated feature rows";
  within.claim = "within-graph colour-matched tuple pairs carry equal truncated feature rows";
  const std::vector<std::uint64_t> none;
  for (int colour : certify_detail::shared_colour_keys(cg, ch)) {
    const auto& mg = cg.count(colour) ? cg.at(colour) : none;
    const auto& mh = ch.count(colour) ? ch.at(colour) : none;
    auto tally = certify_detail::tally_matched_class(mg, mh, [&](std::uint64_t idx, bool g_side) {
      const FeatureTensor<Rational>& f = g_side ? fg : fh;
      return std::vector<Rational>(f.row(idx), f.row(idx) + f.channels);
    });
    cross.instances += tally.cross_pairs;
    cross.failures += tally.cross_pairs - tally.cross_agree;
    within.instances += tally.within_pairs;
    within.failures += tally.within_pairs - tally.within_agree;
    if (tally.split) {
      nlohmann::json cx = nlohmann::json{{"colour", colour},
                                         {"tuple_a", index_to_tuple(tally.witness_a, g.n, k)},
                                         {"side_a", tally.witness_a_in_g ? "g" : "h"},
                                         {"tuple_b", index_to_tuple(tally.witness_b, g.n, k)},
                                         {"side_b", tally.witness_b_in_g ? "g" : "h"}};
      if (tally.cross_agree < tally.cross_pairs && !cross.first_counterexample)
        cross.first_counterexample = cx;
      if (tally.within_agree < tally.within_pairs && !within.first_counterexample)
        within.first_counterexample = cx;
    }
  }
  rep.checks.push_back(std::move(cross));
  rep.checks.push_back(std::move(within));
  return rep;
}

// Endgame statement: on a pair the refinement never separates, no sampled
// network may separate the graphs either, at any truncation or at the final
// invariant output.
inline CertificationReport check_theorem(const ColouredGraph& g, const ColouredGraph& h, int k,
                                         const std::vector<IgnModel<Rational>>& models,
                                         int jobs = 1) {
  if (k < 2) throw std::invalid_argument("tuple dimension must be at least 2");
  CertificationReport rep;
  rep.experiment = "theorem";
  rep.instance = certify_detail::pair_instance(g, h, k);
  rep.instance["models"] = models.size();

  if (g.n != h.n) {
    rep.skip_reason = "graphs have different vertex counts";
    return rep;
  }
  WlPair pair = wl_run_joint(g, h, k, std::nullopt, jobs);
  if (!wl_equivalent(pair)) {
    rep.skip_reason = "graphs are distinguishable by the refinement";
    return rep;
  }

  auto enc = encode_pair<Rational>(g, h, k, jobs);
  CheckResult outputs;
  outputs.claim = "network outputs coincide on refinement-equivalent graphs";
  CheckResult rows;
  rows.claim = "feature-row multisets coincide at every truncation depth";
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& model = models[i];
    if (model.k != k) throw std::invalid_argument("model order does not match k");
    // One pass through the stack serves every truncation depth.
    FeatureTensor<Rational> fg = enc.g, fh = enc.h;
    for (int t = 0; t <= model.depth(); ++t) {
      if (t > 0) {
        fg = apply_equivariant(model.layers[t - 1], fg, jobs);
        apply_activation_inplace(model.activation, fg);
        fh = apply_equivariant(model.layers[t - 1], fh, jobs);
        apply_activation_inplace(model.activation, fh);
      }
      ++rows.instances;
      if (sorted_rows(fg) != sorted_rows(fh)) {
        ++rows.failures;
        if (!rows.first_counterexample)
          rows.first_counterexample = nlohmann::json{{"model", i}, {"truncation", t}};
      }
    }
    ++outputs.instances;
    if (finish_forward(model, fg) != finish_forward(model, fh)) {
      ++outputs.failures;
      if (!outputs.first_counterexample)
        outputs.first_counterexample = nlohmann::json{{"model", i}};
    }
  }
  rep.checks.push_back(std::move(outputs));
  rep.checks.push_back(std::move(rows));
  return rep;
}

// Patterns without used constant classes: the relaxed class is one exact
// arity-k pattern class, the same for every anchor that can realize the
// pattern, and its colour multisets agree across graphs equivalent at round
// t. The structural half is graph-free and runs over all n <= n_struct.
inline CertificationReport check_unused_constant_case(const ColouredGraph& g,
                                                      const ColouredGraph& h, int k, int t,
                                                      int n_struct = 5, int jobs = 1) {
  if (k < 2) throw std::invalid_argument("tuple dimension must be at least 2");
  CertificationReport rep;
  rep.experiment = "unused_constant_case";
  rep.instance = certify_detail::pair_instance(g, h, k);
  rep.instance["t"] = t;
  rep.instance["n_struct"] = n_struct;

  const auto& uni2k = patterns(2 * k);

  // Arity-k pattern induced by the second half.
  auto induced = [&](const EqualityPattern& mu) {
    std::vector<int> labels(mu.rgs.begin() + k, mu.rgs.end());
    return pattern_from_labels(labels);
  };
  auto no_used = [&](const EqualityPattern& mu) {
    for (const auto& c : classify(mu, k))
      if (c.kind == ClassKind::constant_used) return false;
    return true;
  };

  CheckResult structural;
  structural.claim = "relaxed class depends on the anchor only through realizability";
  for (const auto& mu : uni2k.list()) {
    if (!no_used(mu)) continue;
    EqualityPattern tau = induced(mu);
    for (int n = 1; n <= n_struct; ++n) {
      std::set<Tuple> tau_class;
      {
        Tuple v2(k, 0);
        do {
          if (pattern_of(v2) == tau) tau_class.insert(v2);
        } while (next_tuple(v2, n));
      }
      Tuple v(k, 0);
      do {
        ++structural.instances;
        auto pt = p_tilde_set(mu, k, v, n);
        bool ok = first_half_compatible(mu, k, v) ? pt == tau_class : pt.empty();
        if (!ok) {
          ++structural.failures;
          if (!structural.first_counterexample)
            structural.first_counterexample =
                nlohmann::json{{"n", n}, {"pattern", uni2k.id_of(mu)}, {"anchor", v}};
        }
      } while (next_tuple(v, n));
    }
  }
  rep.checks.push_back(std::move(structural));

  if (g.n != h.n) {
    rep.skip_reason = "graphs have different vertex counts";
    rep.checks.clear();
    return rep;
  }
  WlPair pair = wl_run_joint(g, h, k, std::nullopt, jobs);
  if (!wl_equivalent_at(pair, t)) {
    rep.skip_reason = "graphs are distinguishable at round " + std::to_string(t);
    rep.checks.clear();
    return rep;
  }
  const auto& col_g = pair.g.at_round(t).colour_of;
  const auto& col_h = pair.h.at_round(t).colour_of;

  CheckResult multisets;
  multisets.claim = "anchor-free colour multisets agree pattern by pattern";
  for (const auto& mu : uni2k.list()) {
    if (!no_used(mu)) continue;
    EqualityPattern tau = induced(mu);
    ++multisets.instances;
    auto collect = [&](const std::vector<int>& col, int n) {
      std::vector<int> vals;
      Tuple v2(k, 0);
      std::uint64_t idx = 0;
      do {
        if (pattern_of(v2) == tau) vals.push_back(col[idx]);
        ++idx;
      } while (next_tuple(v2, n));
      std::sort(vals.begin(), vals.end());
      return vals;
    };
    if (collect(col_g, g.n) != collect(col_h, h.n)) {
      ++multisets.failures;
      if (!multisets.first_counterexample)
        multisets.first_counterexample = nlohmann::json{{"pattern", uni2k.id_of(mu)}};
    }
  }
  rep.checks.push_back(std::move(multisets));
  return rep;
}

// ---- Model sampling for the certification suites ----

struct SuiteModelParams {
  int max_depth = 3;
  int max_channels = 8;
  int min_depth = 0;
};

// Shapes are drawn per model index from (seed, index) alone.
inline IgnModel<Rational> sample_suite_model(int k, int s0, std::uint64_t seed, std::uint64_t index,
                                             const SuiteModelParams& params) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + index + 1);
  ModelShape shape;
  shape.k = k;
  int span = params.max_depth - params.min_depth + 1;
  int d = params.min_depth + static_cast<int>(rng() % span);
  shape.channels.push_back(s0);
  for (int i = 0; i < d; ++i)
    shape.channels.push_back(1 + static_cast<int>(rng() % params.max_channels));
  shape.invariant_out = 1 + static_cast<int>(rng() % params.max_channels);
  shape.mlp_dims = {1 + static_cast<int>(rng() % params.max_channels),
                    1 + static_cast<int>(rng() % 3)};
  return sample_model(shape, rng());
}

}  // namespace wlign
