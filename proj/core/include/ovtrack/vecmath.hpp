#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ovtrack/error.hpp"

namespace ovtrack {

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("dot: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Returns v / ||v||. Vectors already unit within 1e-9 are passed through
/// untouched so repeated ingestion is byte-stable.
inline std::vector<double> normalized(std::span<const double> v) {
  const double n = l2_norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InputError("normalized: zero or non-finite vector norm");
  }
  std::vector<double> out(v.begin(), v.end());
  if (std::abs(n - 1.0) > 1e-9) {
    for (double& x : out) x /= n;
  }
  return out;
}

/// Cosine of the angle between two nonzero vectors.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw InputError("cosine: zero vector");
  }
  return dot(a, b) / (na * nb);
}

}  // namespace ovtrack
