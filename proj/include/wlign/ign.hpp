#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wlign/graph.hpp"
#include "wlign/parallel.hpp"
#include "wlign/patterns.hpp"
#include "wlign/rational.hpp"
#include "wlign/tuples.hpp"
#include "wlign/wl.hpp"

namespace wlign {

// Order-k feature tensor: one channel vector per k-tuple, tuples in
// lexicographic order. S is Rational (exact, certifiable) or double.
template <class S>
struct FeatureTensor {
  int k = 0, n = 0, channels = 0;
  std::vector<S> values;  // [tuple_index * channels + c]

  S* row(std::uint64_t idx) { return values.data() + idx * channels; }
  const S* row(std::uint64_t idx) const { return values.data() + idx * channels; }
  std::uint64_t rows() const { return tuple_count(n, k); }
};

// Linear equivariant layer over the equality-pattern basis: one coefficient
// matrix per arity-2k pattern and one bias vector per arity-k pattern.
// Absent (zero) entries are simply zero in the dense storage.
template <class S>
struct EquivariantLayerSpec {
  int k = 0, in_channels = 0, out_channels = 0;
  std::vector<S> coeffs;  // [mu * out * in + a * in + b]
  std::vector<S> bias;    // [tau * out + a]

  const S& coeff(int mu, int a, int b) const {
    return coeffs[(static_cast<std::size_t>(mu) * out_channels + a) * in_channels + b];
  }
  S& coeff(int mu, int a, int b) {
    return coeffs[(static_cast<std::size_t>(mu) * out_channels + a) * in_channels + b];
  }
};

template <class S>
EquivariantLayerSpec<S> make_equivariant_layer(int k, int p, int q) {
  EquivariantLayerSpec<S> spec;
  spec.k = k;
  spec.in_channels = p;
  spec.out_channels = q;
  spec.coeffs.assign(static_cast<std::size_t>(patterns(2 * k).size()) * q * p, S(0));
  spec.bias.assign(static_cast<std::size_t>(patterns(k).size()) * q, S(0));
  return spec;
}

template <class S>
struct InvariantLayerSpec {
  int k = 0, in_channels = 0, out_channels = 0;
  std::vector<S> coeffs;  // [tau * out * in + a * in + b]
  std::vector<S> consts;  // [a]
};

template <class S>
InvariantLayerSpec<S> make_invariant_layer(int k, int p, int q) {
  InvariantLayerSpec<S> spec;
  spec.k = k;
  spec.in_channels = p;
  spec.out_channels = q;
  spec.coeffs.assign(static_cast<std::size_t>(patterns(k).size()) * q * p, S(0));
  spec.consts.assign(q, S(0));
  return spec;
}

template <class S>
struct DenseLayer {
  int in = 0, out = 0;
  std::vector<S> weights;  // [a * in + b]
  std::vector<S> bias;     // [a]
};

template <class S>
struct IgnModel {
  int k = 0;
  Activation activation = Activation::relu;
  std::vector<EquivariantLayerSpec<S>> layers;
  InvariantLayerSpec<S> invariant;
  std::vector<DenseLayer<S>> mlp;

  int depth() const { return static_cast<int>(layers.size()); }
};

// ---- Encoding ----

template <class S>
struct EncodedPair {
  FeatureTensor<S> g, h;
  int channels = 0;  // distinct round-0 colours across both graphs
};

namespace ign_detail {

template <class S>
FeatureTensor<S> one_hot(int k, int n, int channels, const std::vector<int>& colour_of) {
  FeatureTensor<S> t;
  t.k = k;
  t.n = n;
  t.channels = channels;
  t.values.assign(tuple_count(n, k) * static_cast<std::uint64_t>(channels), S(0));
  for (std::uint64_t idx = 0; idx < colour_of.size(); ++idx)
    t.values[idx * channels + colour_of[idx]] = S(1);
  return t;
}

}  // namespace ign_detail

// One-hot encoding of the round-0 colouring, jointly interned so that both
// tensors share one channel dictionary.
template <class S>
EncodedPair<S> encode_pair(const ColouredGraph& g, const ColouredGraph& h, int k, int jobs = 1) {
  if (k < 2) throw std::invalid_argument("tensor order must be at least 2");
  ColourAlphabet alphabet = make_alphabet(g, h);
  SignatureInterner interner;
  auto sg = wl_detail::atomic_signatures(g, k, alphabet, jobs);
  auto sh = wl_detail::atomic_signatures(h, k, alphabet, jobs);
  std::vector<const Signature*> all;
  for (const auto& s : sg) all.push_back(&s);
  for (const auto& s : sh) all.push_back(&s);
  std::vector<int> ids;
  interner.intern_round(all, ids);
  std::vector<int> cg(ids.begin(), ids.begin() + sg.size());
  std::vector<int> ch(ids.begin() + sg.size(), ids.end());
  EncodedPair<S> out;
  out.channels = interner.size();
  out.g = ign_detail::one_hot<S>(k, g.n, out.channels, cg);
  out.h = ign_detail::one_hot<S>(k, h.n, out.channels, ch);
  return out;
}

template <class S>
FeatureTensor<S> encode(const ColouredGraph& g, int k, int jobs = 1) {
  return encode_pair<S>(g, g, k, jobs).g;
}

// ---- Equivariant layer application ----

namespace ign_detail {

// Structure shared by every application of an order-k layer. For a pattern nu
// of arity 2k we record: which anchor patterns tau satisfy nu's first-half
// equalities, the partition sigma the second half induces on the k slots, and
// which sigma-blocks are pinned to an anchor position by a cross-half block.
// Group sums over the unpinned slots then depend on the anchor only through
// the pinned values, which is what makes the n^k-per-pattern pass possible.
struct TableSpec {
  std::vector<int> slot_block;  // sigma as block id per slot
  int num_blocks = 0;
  std::vector<int> pinned_blocks;  // ascending block ids
};

struct PatternPlanEntry {
  std::vector<char> anchor_compatible;  // by arity-k pattern id
  int table = 0;                        // index into EquivariantPlan::tables
  std::vector<int> pin_sources;         // anchor positions, aligned with pinned_blocks
};

struct EquivariantPlan {
  int k;
  std::vector<PatternPlanEntry> entries;          // by arity-2k pattern id
  std::vector<TableSpec> tables;
  std::vector<std::vector<int>> strict_refiners;  // by arity-2k pattern id
  std::vector<int> sieve_order;                   // pattern ids, finest first
};

inline const EquivariantPlan& equivariant_plan(int k) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<EquivariantPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return *it->second;

  auto plan = std::make_unique<EquivariantPlan>();
  plan->k = k;
  const auto& uni2k = patterns(2 * k);
  const auto& unik = patterns(k);
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> table_ids;

  for (int nu = 0; nu < uni2k.size(); ++nu) {
    const auto& pat = uni2k.at(nu);
    PatternPlanEntry entry;

    entry.anchor_compatible.assign(unik.size(), 0);
    for (int tau = 0; tau < unik.size(); ++tau) {
      const auto& tp = unik.at(tau);
      bool ok = true;
      for (int i = 0; i < k && ok; ++i)
        for (int j = i + 1; j < k && ok; ++j)
          if (pat.rgs[i] == pat.rgs[j] && tp.rgs[i] != tp.rgs[j]) ok = false;
      entry.anchor_compatible[tau] = ok;
    }

    TableSpec ts;
    std::vector<int> canon(2 * k, -1);  // nu block id -> sigma block id
    ts.slot_block.assign(k, -1);
    for (int slot = 0; slot < k; ++slot) {
      int b = pat.rgs[k + slot];
      if (canon[b] < 0) canon[b] = ts.num_blocks++;
      ts.slot_block[slot] = canon[b];
    }
    std::vector<int> sources(ts.num_blocks, -1);
    for (int i = 0; i < k; ++i) {
      int b = pat.rgs[i];
      if (canon[b] >= 0 && sources[canon[b]] < 0) sources[canon[b]] = i;
    }
    for (int b = 0; b < ts.num_blocks; ++b)
      if (sources[b] >= 0) {
        ts.pinned_blocks.push_back(b);
        entry.pin_sources.push_back(sources[b]);
      }

    auto key = std::make_pair(ts.slot_block, ts.pinned_blocks);
    auto [tit, fresh] = table_ids.emplace(key, static_cast<int>(plan->tables.size()));
    if (fresh) plan->tables.push_back(ts);
    entry.table = tit->second;
    plan->entries.push_back(std::move(entry));
  }

  plan->strict_refiners.assign(uni2k.size(), {});
  for (int eps = 0; eps < uni2k.size(); ++eps)
    for (int nu = 0; nu < uni2k.size(); ++nu)
      if (nu != eps && refines(uni2k.at(nu), uni2k.at(eps)))
        plan->strict_refiners[eps].push_back(nu);

  for (int id = 0; id < uni2k.size(); ++id) plan->sieve_order.push_back(id);
  std::sort(plan->sieve_order.begin(), plan->sieve_order.end(), [&](int a, int b) {
    int ba = uni2k.at(a).num_blocks(), bb = uni2k.at(b).num_blocks();
    return ba != bb ? ba > bb : a < b;
  });

  auto& ref = *plan;
  cache.emplace(k, std::move(plan));
  return ref;
}

}  // namespace ign_detail

template <class S>
void check_layer_input(const EquivariantLayerSpec<S>& spec, const FeatureTensor<S>& a) {
  if (spec.k != a.k) throw std::invalid_argument("layer and tensor order disagree");
  if (spec.in_channels != a.channels)
    throw std::invalid_argument("layer expects " + std::to_string(spec.in_channels) +
                                " input channels, tensor has " + std::to_string(a.channels));
}

// Reference implementation: the double loop over tuple pairs, classifying
// each pair by the exact equality pattern of its concatenation. Quadratic in
// the number of tuples; kept as the oracle for the grouped fast path.
template <class S>
FeatureTensor<S> apply_equivariant_naive(const EquivariantLayerSpec<S>& spec,
                                         const FeatureTensor<S>& a) {
  check_layer_input(spec, a);
  const int k = a.k, n = a.n, p = spec.in_channels, q = spec.out_channels;
  const auto& uni2k = patterns(2 * k);
  const auto& unik = patterns(k);
  FeatureTensor<S> out;
  out.k = k;
  out.n = n;
  out.channels = q;
  out.values.assign(a.rows() * q, S(0));
  Tuple v(k, 0);
  std::uint64_t idx1 = 0;
  do {
    S* row = out.row(idx1);
    int tau = unik.id_of_tuple(v);
    for (int c = 0; c < q; ++c) row[c] = spec.bias[static_cast<std::size_t>(tau) * q + c];
    Tuple cat(2 * k);
    std::copy(v.begin(), v.end(), cat.begin());
    Tuple v2(k, 0);
    std::uint64_t idx2 = 0;
    do {
      std::copy(v2.begin(), v2.end(), cat.begin() + k);
      int mu = uni2k.id_of_tuple(cat);
      const S* in = a.row(idx2);
      for (int c = 0; c < q; ++c)
        for (int b = 0; b < p; ++b) row[c] += spec.coeff(mu, c, b) * in[b];
      ++idx2;
    } while (next_tuple(v2, n));
    ++idx1;
  } while (next_tuple(v, n));
  return out;
}

// Grouped implementation. Exact pattern sums are recovered from "at least
// these equalities" sums by a sieve over the refinement order, applied to the
// coefficients once per call; the at-least sums themselves are group sums
// keyed by the values at the pinned slots, built in one pass per table.
template <class S>
FeatureTensor<S> apply_equivariant(const EquivariantLayerSpec<S>& spec, const FeatureTensor<S>& a,
                                   int jobs = 1) {
  check_layer_input(spec, a);
  const int k = a.k, n = a.n, p = spec.in_channels, q = spec.out_channels;
  const auto& plan = ign_detail::equivariant_plan(k);
  const auto& unik = patterns(k);
  const int num2k = static_cast<int>(plan.entries.size());

  // Sieve the coefficients: sieved[nu] solves sum over refinements of eps of
  // sieved == coeff(eps) for every eps, finest patterns first.
  std::vector<S> sieved(spec.coeffs);
  std::vector<char> live(num2k, 0);
  for (int eps : plan.sieve_order) {
    S* dst = sieved.data() + static_cast<std::size_t>(eps) * q * p;
    for (int nu : plan.strict_refiners[eps]) {
      if (!live[nu]) continue;
      const S* src = sieved.data() + static_cast<std::size_t>(nu) * q * p;
      for (int i = 0; i < q * p; ++i) dst[i] -= src[i];
    }
    for (int i = 0; i < q * p && !live[eps]; ++i)
      if (dst[i] != 0) live[eps] = 1;
  }

  // Group-sum tables, one per distinct (sigma, pinned set).
  std::vector<std::vector<S>> tables(plan.tables.size());
  for (std::size_t ti = 0; ti < plan.tables.size(); ++ti) {
    const auto& ts = plan.tables[ti];
    std::uint64_t keys = 1;
    for (std::size_t i = 0; i < ts.pinned_blocks.size(); ++i) keys *= static_cast<std::uint64_t>(n);
    tables[ti].assign(keys * p, S(0));
    Tuple blockval(ts.num_blocks, 0);
    Tuple v2(k);
    do {
      for (int slot = 0; slot < k; ++slot) v2[slot] = blockval[ts.slot_block[slot]];
      std::uint64_t key = 0;
      for (int b : ts.pinned_blocks) key = key * n + static_cast<std::uint64_t>(blockval[b]);
      const S* in = a.row(tuple_to_index(v2, n));
      S* dst = tables[ti].data() + key * p;
      for (int b = 0; b < p; ++b) dst[b] += in[b];
    } while (next_tuple(blockval, n));
  }

  FeatureTensor<S> out;
  out.k = k;
  out.n = n;
  out.channels = q;
  out.values.assign(a.rows() * q, S(0));
  parallel_for(a.rows(), jobs, [&](std::uint64_t idx1) {
    Tuple v = index_to_tuple(idx1, n, k);
    int tau = unik.id_of_tuple(v);
    S* row = out.row(idx1);
    for (int c = 0; c < q; ++c) row[c] = spec.bias[static_cast<std::size_t>(tau) * q + c];
    for (int nu = 0; nu < num2k; ++nu) {
      if (!live[nu]) continue;
      const auto& entry = plan.entries[nu];
      if (!entry.anchor_compatible[tau]) continue;
      std::uint64_t key = 0;
      for (int src : entry.pin_sources) key = key * n + static_cast<std::uint64_t>(v[src]);
      const S* m = tables[entry.table].data() + key * p;
      const S* cs = sieved.data() + static_cast<std::size_t>(nu) * q * p;
      for (int c = 0; c < q; ++c)
        for (int b = 0; b < p; ++b) row[c] += cs[static_cast<std::size_t>(c) * p + b] * m[b];
    }
  });
  return out;
}

template <class S>
void apply_activation_inplace(Activation act, FeatureTensor<S>& a) {
  if (act == Activation::identity) return;
  for (S& x : a.values) x = apply_activation_scalar(act, x);
}

template <class S>
std::vector<S> apply_invariant(const InvariantLayerSpec<S>& spec, const FeatureTensor<S>& a) {
  if (spec.k != a.k) throw std::invalid_argument("layer and tensor order disagree");
  if (spec.in_channels != a.channels) throw std::invalid_argument("invariant layer channel mismatch");
  const int p = spec.in_channels, q = spec.out_channels;
  const auto& unik = patterns(a.k);
  // Per-pattern totals first, then one small matrix product per pattern.
  std::vector<S> totals(static_cast<std::size_t>(unik.size()) * p, S(0));
  Tuple v(a.k, 0);
  std::uint64_t idx = 0;
  do {
    int tau = unik.id_of_tuple(v);
    const S* in = a.row(idx);
    S* dst = totals.data() + static_cast<std::size_t>(tau) * p;
    for (int b = 0; b < p; ++b) dst[b] += in[b];
    ++idx;
  } while (next_tuple(v, a.n));
  std::vector<S> out(spec.consts);
  for (int tau = 0; tau < unik.size(); ++tau) {
    const S* tot = totals.data() + static_cast<std::size_t>(tau) * p;
    for (int c = 0; c < q; ++c) {
      const S* w = spec.coeffs.data() + (static_cast<std::size_t>(tau) * q + c) * p;
      for (int b = 0; b < p; ++b) out[c] += w[b] * tot[b];
    }
  }
  return out;
}

template <class S>
std::vector<S> apply_dense(const DenseLayer<S>& layer, const std::vector<S>& x) {
  if (static_cast<int>(x.size()) != layer.in) throw std::invalid_argument("dense layer input mismatch");
  std::vector<S> out(layer.bias);
  for (int a = 0; a < layer.out; ++a)
    for (int b = 0; b < layer.in; ++b) out[a] += layer.weights[static_cast<std::size_t>(a) * layer.in + b] * x[b];
  return out;
}

// F^(t): the first t equivariant layers, each followed by the activation.
template <class S>
FeatureTensor<S> forward_trunc(const IgnModel<S>& model, const FeatureTensor<S>& a, int t,
                               int jobs = 1) {
  if (t < 0 || t > model.depth())
    throw std::invalid_argument("truncation depth must lie in [0, model depth]");
  FeatureTensor<S> cur = a;
  for (int i = 0; i < t; ++i) {
    cur = apply_equivariant(model.layers[i], cur, jobs);
    apply_activation_inplace(model.activation, cur);
  }
  return cur;
}

// Invariant collapse and dense head over fully stacked features (activation
// between dense layers, none after the last).
template <class S>
std::vector<S> finish_forward(const IgnModel<S>& model, const FeatureTensor<S>& feats) {
  std::vector<S> x = apply_invariant(model.invariant, feats);
  for (std::size_t i = 0; i < model.mlp.size(); ++i) {
    if (i > 0)
      for (S& v : x) v = apply_activation_scalar(model.activation, v);
    x = apply_dense(model.mlp[i], x);
  }
  return x;
}

// Full network: equivariant stack, then the head.
template <class S>
std::vector<S> forward(const IgnModel<S>& model, const FeatureTensor<S>& a, int jobs = 1) {
  return finish_forward(model, forward_trunc(model, a, model.depth(), jobs));
}

template <class S>
std::vector<std::vector<S>> sorted_rows(const FeatureTensor<S>& a) {
  std::vector<std::vector<S>> rows;
  rows.reserve(a.rows());
  for (std::uint64_t i = 0; i < a.rows(); ++i)
    rows.emplace_back(a.row(i), a.row(i) + a.channels);
  std::sort(rows.begin(), rows.end());
  return rows;
}

// Feature-level comparison after t layers: multisets of per-tuple rows.
template <class S>
bool ign_equivalent_at(const IgnModel<S>& model, const FeatureTensor<S>& ag,
                       const FeatureTensor<S>& ah, int t, int jobs = 1) {
  if (ag.n != ah.n)
    throw std::invalid_argument("feature comparison requires equal vertex counts");
  if (ag.channels != ah.channels) throw std::invalid_argument("encoding channel mismatch");
  return sorted_rows(forward_trunc(model, ag, t, jobs)) ==
         sorted_rows(forward_trunc(model, ah, t, jobs));
}

// Vertex action: row of pi(v) in the result is the row of v in the input.
template <class S>
FeatureTensor<S> permute_vertices(const std::vector<int>& perm, const FeatureTensor<S>& a) {
  if (static_cast<int>(perm.size()) != a.n) throw std::invalid_argument("permutation size mismatch");
  FeatureTensor<S> out;
  out.k = a.k;
  out.n = a.n;
  out.channels = a.channels;
  out.values.assign(a.values.size(), S(0));
  Tuple v(a.k, 0), pv(a.k);
  std::uint64_t idx = 0;
  do {
    for (int i = 0; i < a.k; ++i) pv[i] = perm[v[i]];
    S* dst = out.row(tuple_to_index(pv, a.n));
    const S* src = a.row(idx);
    for (int c = 0; c < a.channels; ++c) dst[c] = src[c];
    ++idx;
  } while (next_tuple(v, a.n));
  return out;
}

// ---- Model sampling ----

struct ModelShape {
  int k = 0;
  std::vector<int> channels;  // s0..sd for the equivariant stack
  int invariant_out = 1;
  std::vector<int> mlp_dims;  // widths after the invariant layer
};

namespace ign_detail {

inline Rational small_rational(std::mt19937_64& rng) {
  long num = static_cast<long>(rng() % 7) - 3;  // -3..3
  long den = rng() % 2 == 0 ? 1 : 2;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace ign_detail

// Deterministic in (shape, seed); coefficients are small rationals with
// denominator 1 or 2, the regime the certification suites run in.
inline IgnModel<Rational> sample_model(const ModelShape& shape, std::uint64_t seed) {
  if (shape.k < 2) throw std::invalid_argument("tensor order must be at least 2");
  if (shape.channels.empty()) throw std::invalid_argument("channel chain must start at s0");
  std::mt19937_64 rng(seed);
  IgnModel<Rational> model;
  model.k = shape.k;
  model.activation = Activation::relu;
  for (std::size_t i = 0; i + 1 < shape.channels.size(); ++i) {
    auto layer = make_equivariant_layer<Rational>(shape.k, shape.channels[i], shape.channels[i + 1]);
    for (auto& c : layer.coeffs) c = ign_detail::small_rational(rng);
    for (auto& c : layer.bias) c = ign_detail::small_rational(rng);
    model.layers.push_back(std::move(layer));
  }
  model.invariant = make_invariant_layer<Rational>(shape.k, shape.channels.back(), shape.invariant_out);
  for (auto& c : model.invariant.coeffs) c = ign_detail::small_rational(rng);
  for (auto& c : model.invariant.consts) c = ign_detail::small_rational(rng);
  int prev = shape.invariant_out;
  for (int width : shape.mlp_dims) {
    DenseLayer<Rational> d;
    d.in = prev;
    d.out = width;
    d.weights.resize(static_cast<std::size_t>(width) * prev);
    d.bias.resize(width);
    for (auto& c : d.weights) c = ign_detail::small_rational(rng);
    for (auto& c : d.bias) c = ign_detail::small_rational(rng);
    model.mlp.push_back(std::move(d));
    prev = width;
  }
  return model;
}

inline IgnModel<double> to_float_model(const IgnModel<Rational>& m) {
  IgnModel<double> out;
  out.k = m.k;
  out.activation = m.activation;
  for (const auto& l : m.layers) {
    EquivariantLayerSpec<double> d;
    d.k = l.k;
    d.in_channels = l.in_channels;
    d.out_channels = l.out_channels;
    for (const auto& c : l.coeffs) d.coeffs.push_back(c.get_d());
    for (const auto& c : l.bias) d.bias.push_back(c.get_d());
    out.layers.push_back(std::move(d));
  }
  out.invariant.k = m.invariant.k;
  out.invariant.in_channels = m.invariant.in_channels;
  out.invariant.out_channels = m.invariant.out_channels;
  for (const auto& c : m.invariant.coeffs) out.invariant.coeffs.push_back(c.get_d());
  for (const auto& c : m.invariant.consts) out.invariant.consts.push_back(c.get_d());
  for (const auto& l : m.mlp) {
    DenseLayer<double> d;
    d.in = l.in;
    d.out = l.out;
    for (const auto& c : l.weights) d.weights.push_back(c.get_d());
    for (const auto& c : l.bias) d.bias.push_back(c.get_d());
    out.mlp.push_back(std::move(d));
  }
  return out;
}

// ---- Serialization ----

namespace ign_detail {

template <class S>
nlohmann::json sparse_entries3(const std::vector<S>& v, int d1, int d2, int d3) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      for (int l = 0; l < d3; ++l) {
        const S& x = v[(static_cast<std::size_t>(i) * d2 + j) * d3 + l];
        if (x != S(0)) arr.push_back({i, j, l, scalar_to_string(x)});
      }
  return arr;
}

template <class S>
nlohmann::json sparse_entries2(const std::vector<S>& v, int d1, int d2) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j) {
      const S& x = v[static_cast<std::size_t>(i) * d2 + j];
      if (x != S(0)) arr.push_back({i, j, scalar_to_string(x)});
    }
  return arr;
}

template <class S>
nlohmann::json sparse_entries1(const std::vector<S>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != S(0)) arr.push_back({i, scalar_to_string(v[i])});
  return arr;
}

template <class S>
void read_entries3(const nlohmann::json& arr, std::vector<S>& v, int d1, int d2, int d3,
                   const char* what) {
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 4) throw std::invalid_argument(std::string("bad ") + what);
    int i = e[0].get<int>(), j = e[1].get<int>(), l = e[2].get<int>();
    if (i < 0 || i >= d1 || j < 0 || j >= d2 || l < 0 || l >= d3)
      throw std::invalid_argument(std::string(what) + " index out of range");
    v[(static_cast<std::size_t>(i) * d2 + j) * d3 + l] = scalar_from_string<S>(e[3].get<std::string>());
  }
}

template <class S>
void read_entries2(const nlohmann::json& arr, std::vector<S>& v, int d1, int d2, const char* what) {
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 3) throw std::invalid_argument(std::string("bad ") + what);
    int i = e[0].get<int>(), j = e[1].get<int>();
    if (i < 0 || i >= d1 || j < 0 || j >= d2)
      throw std::invalid_argument(std::string(what) + " index out of range");
    v[static_cast<std::size_t>(i) * d2 + j] = scalar_from_string<S>(e[2].get<std::string>());
  }
}

template <class S>
void read_entries1(const nlohmann::json& arr, std::vector<S>& v, const char* what) {
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument(std::string("bad ") + what);
    std::size_t i = e[0].get<std::size_t>();
    if (i >= v.size()) throw std::invalid_argument(std::string(what) + " index out of range");
    v[i] = scalar_from_string<S>(e[1].get<std::string>());
  }
}

}  // namespace ign_detail

template <class S>
nlohmann::json model_to_json(const IgnModel<S>& m, NumericMode mode) {
  nlohmann::json doc;
  doc["k"] = m.k;
  doc["mode"] = mode_name(mode);
  doc["activation"] = activation_name(m.activation);
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : m.layers) {
    nlohmann::json lj;
    lj["in"] = l.in_channels;
    lj["out"] = l.out_channels;
    lj["coeffs"] = ign_detail::sparse_entries3(l.coeffs, patterns(2 * m.k).size(), l.out_channels,
                                               l.in_channels);
    lj["bias"] = ign_detail::sparse_entries2(l.bias, patterns(m.k).size(), l.out_channels);
    layers.push_back(lj);
  }
  doc["layers"] = layers;
  nlohmann::json inv;
  inv["in"] = m.invariant.in_channels;
  inv["out"] = m.invariant.out_channels;
  inv["coeffs"] = ign_detail::sparse_entries3(m.invariant.coeffs, patterns(m.k).size(),
                                              m.invariant.out_channels, m.invariant.in_channels);
  inv["consts"] = ign_detail::sparse_entries1(m.invariant.consts);
  doc["invariant"] = inv;
  nlohmann::json mlp;
  nlohmann::json dls = nlohmann::json::array();
  for (const auto& l : m.mlp) {
    nlohmann::json dj;
    dj["in"] = l.in;
    dj["out"] = l.out;
    dj["weights"] = ign_detail::sparse_entries2(l.weights, l.out, l.in);
    dj["bias"] = ign_detail::sparse_entries1(l.bias);
    dls.push_back(dj);
  }
  mlp["layers"] = dls;
  doc["mlp"] = mlp;
  // Pattern id dictionary, for auditing serialized coefficients.
  nlohmann::json pt;
  auto blocks_json = [](const PatternUniverse& u) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : u.list()) arr.push_back(p.blocks());
    return arr;
  };
  pt["arity_2k"] = blocks_json(patterns(2 * m.k));
  pt["arity_k"] = blocks_json(patterns(m.k));
  doc["pattern_ids"] = pt;
  return doc;
}

template <class S>
IgnModel<S> model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("k")) throw std::invalid_argument("malformed model document");
  IgnModel<S> m;
  m.k = doc["k"].get<int>();
  if (m.k < 2) throw std::invalid_argument("model order must be at least 2");
  m.activation = parse_activation(doc.value("activation", "relu"));
  for (const auto& lj : doc.at("layers")) {
    auto layer = make_equivariant_layer<S>(m.k, lj.at("in").get<int>(), lj.at("out").get<int>());
    ign_detail::read_entries3(lj.at("coeffs"), layer.coeffs, patterns(2 * m.k).size(),
                              layer.out_channels, layer.in_channels, "layer coefficients");
    ign_detail::read_entries2(lj.at("bias"), layer.bias, patterns(m.k).size(), layer.out_channels,
                              "layer bias");
    m.layers.push_back(std::move(layer));
  }
  const auto& inv = doc.at("invariant");
  m.invariant = make_invariant_layer<S>(m.k, inv.at("in").get<int>(), inv.at("out").get<int>());
  ign_detail::read_entries3(inv.at("coeffs"), m.invariant.coeffs, patterns(m.k).size(),
                            m.invariant.out_channels, m.invariant.in_channels,
                            "invariant coefficients");
  ign_detail::read_entries1(inv.at("consts"), m.invariant.consts, "invariant constants");
  for (const auto& dj : doc.at("mlp").at("layers")) {
    DenseLayer<S> d;
    d.in = dj.at("in").get<int>();
    d.out = dj.at("out").get<int>();
    d.weights.assign(static_cast<std::size_t>(d.in) * d.out, S(0));
    d.bias.assign(d.out, S(0));
    ign_detail::read_entries2(dj.at("weights"), d.weights, d.out, d.in, "dense weights");
    ign_detail::read_entries1(dj.at("bias"), d.bias, "dense bias");
    m.mlp.push_back(std::move(d));
  }
  // Shape coherence across the stack.
  int prev = -1;
  for (const auto& l : m.layers) {
    if (prev >= 0 && l.in_channels != prev) throw std::invalid_argument("layer channel chain broken");
    prev = l.out_channels;
  }
  if (prev >= 0 && m.invariant.in_channels != prev)
    throw std::invalid_argument("invariant layer does not match the stack output");
  prev = m.invariant.out_channels;
  for (const auto& l : m.mlp) {
    if (l.in != prev) throw std::invalid_argument("dense layer chain broken");
    prev = l.out;
  }
  return m;
}

template <class S>
nlohmann::json tensor_to_json(const FeatureTensor<S>& t, NumericMode mode) {
  nlohmann::json doc;
  doc["k"] = t.k;
  doc["n"] = t.n;
  doc["channels"] = t.channels;
  doc["mode"] = mode_name(mode);
  nlohmann::json rows = nlohmann::json::array();
  Tuple v(t.k, 0);
  std::uint64_t idx = 0;
  do {
    nlohmann::json vals = nlohmann::json::array();
    for (int c = 0; c < t.channels; ++c) vals.push_back(scalar_to_string(t.row(idx)[c]));
    rows.push_back({v, vals});
    ++idx;
  } while (next_tuple(v, t.n));
  doc["rows"] = rows;
  return doc;
}

}  // namespace wlign
