#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace wlign {

// Exact arithmetic mode uses GMP rationals; float mode uses doubles.
using Rational = mpq_class;

enum class NumericMode { rational, float64 };

inline NumericMode parse_mode(const std::string& s) {
  if (s == "rational") return NumericMode::rational;
  if (s == "float") return NumericMode::float64;
  throw std::invalid_argument("unknown numeric mode: " + s);
}

inline std::string mode_name(NumericMode m) {
  return m == NumericMode::rational ? "rational" : "float";
}

// Accepts "num" or "num/den"; result is canonicalized with den > 0.
inline Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

inline std::string to_decimal_string(const Rational& q) { return q.get_str(); }

template <class S>
S scalar_from_string(const std::string& s) {
  Rational q = rational_from_string(s);
  if constexpr (std::is_same_v<S, Rational>) {
    return q;
  } else {
    return q.get_d();
  }
}

template <class S>
std::string scalar_to_string(const S& x) {
  if constexpr (std::is_same_v<S, Rational>) {
    return x.get_str();
  } else {
    return std::to_string(x);
  }
}

enum class Activation { identity, relu, sign };

inline Activation parse_activation(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "sign") return Activation::sign;
  throw std::invalid_argument("unknown activation: " + s +
                              " (transcendental activations are not representable exactly)");
}

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    default: return "sign";
  }
}

template <class S>
S apply_activation_scalar(Activation act, const S& x) {
  switch (act) {
    case Activation::identity: return x;
    case Activation::relu: return x > 0 ? x : S(0);
    default: return x > 0 ? S(1) : (x < 0 ? S(-1) : S(0));
  }
}

}  // namespace wlign
