#pragma once

#include <cstddef>
#include <vector>

#include "densfda/density.hpp"
#include "densfda/fpca.hpp"

namespace densfda {

/// Square-root density: a point on the unit sphere of L2.
struct SpherePoint {
  Grid grid;
  std::vector<double> values;

  GridFn fn() const { return GridFn(grid, values); }
};

SpherePoint sqrt_embed(const DensityFn& f);
DensityFn square_back(const SpherePoint& p, double floor = kDefaultFloor);

double sphere_inner(const SpherePoint& p, const SpherePoint& q);

/// Great-circle distance arccos<p, q>, evaluated as 2 asin(|p - q| / 2) for
/// accuracy near zero.
double geodesic_distance(const SpherePoint& p, const SpherePoint& q);

std::vector<double> log_map(const SpherePoint& base, const SpherePoint& p);
SpherePoint exp_map(const SpherePoint& base, const std::vector<double>& v);

struct KarcherOptions {
  double tol = 1e-9;
  std::size_t max_iter = 200;
};

SpherePoint karcher_mean(const std::vector<SpherePoint>& sample, const KarcherOptions& opts = {});

/// Tangent-space PCA at the Karcher mean. `tangent` holds the decomposition
/// of the log-mapped sample (its mean is the residual Karcher gradient).
struct PgaResult {
  SpherePoint mean;
  EigenSystem tangent;
};

PgaResult pga(const std::vector<SpherePoint>& sample, std::size_t K = SIZE_MAX,
              const KarcherOptions& opts = {});

std::vector<DensityFn> hs_represent(const PgaResult& model, std::size_t K, double floor = kDefaultFloor);
std::vector<DensityFn> hs_represent(const std::vector<DensityFn>& sample, std::size_t K,
                                    double floor = kDefaultFloor);

DensityFn hs_mode(const PgaResult& model, std::size_t k, double alpha, double floor = kDefaultFloor);
DensityFn hs_mode(const std::vector<DensityFn>& sample, std::size_t k, double alpha,
                  double floor = kDefaultFloor);

}  // namespace densfda
