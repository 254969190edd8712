#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "densfda/density.hpp"
#include "densfda/rng.hpp"

namespace densfda::testing {

inline DensityFn from_fn(const Grid& g, const std::function<double(double)>& f, double floor = 0.0) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = f(g[j]);
  return normalize(GridFn(g, std::move(v)), floor);
}

inline DensityFn uniform(const Grid& g) {
  return from_fn(g, [](double) { return 1.0; });
}

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Densities on [0,1] with smooth random shape: a floor plus a few Gaussian bumps.
inline DensityFn random_density(const Grid& g, Rng& rng) {
  const int bumps = 1 + static_cast<int>(rng.below(3));
  std::vector<double> c(bumps), s(bumps), w(bumps);
  for (int b = 0; b < bumps; ++b) {
    c[b] = rng.uniform(0.2, 0.8);
    s[b] = rng.uniform(0.08, 0.2);
    w[b] = rng.uniform(0.5, 1.5);
  }
  return from_fn(g, [&](double x) {
    double v = 0.3;
    for (int b = 0; b < bumps; ++b) v += w[b] * phi((x - c[b]) / s[b]) / s[b];
    return v;
  });
}

}  // namespace densfda::testing
