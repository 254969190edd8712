#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "densfda/density.hpp"
#include "densfda/frechet.hpp"
#include "densfda/rng.hpp"

namespace densfda {

// Setting 1: N(0, sigma^2) on [-3, 3], log sigma ~ U[-1.5, 1.5].
// Setting 2: N(mu, 1) on [-5, 5], mu ~ U[-3, 3].
// Setting 3: N(mu, sigma^2) on [-5, 5], log sigma ~ U[-1, 1], mu ~ U[-2.5, 2.5].
enum class SettingId { s1 = 1, s2 = 2, s3 = 3 };

struct Observation {
  bool sampled = false;
  std::size_t n_obs = 100;
  // In native units of the setting's support; mapped to the unit interval
  // before it reaches the kernel estimator.
  double bandwidth = 0.2;
};

struct SettingSpec {
  SettingId id = SettingId::s2;
  std::size_t n = 50;
  Observation observed;
  std::uint64_t seed = 7;
  std::size_t grid_points = 512;
  double floor = kDefaultFloor;

  void validate() const;
  Grid grid() const;
};

/// phi((x - mu) / sigma) / (sigma * (Phi(zb) - Phi(za))) on the grid, floored
/// and normalized to unit trapezoidal mass.
DensityFn truncated_normal_density(double mu, double sigma, const Grid& grid, double floor = kDefaultFloor);

/// Inverse-CDF draws using the analytic CDF tabulated on a 4096-point grid.
std::vector<double> sample_truncated_normal(double mu, double sigma, double lo, double hi, std::size_t count,
                                            Rng& rng);

struct GeneratedSample {
  std::vector<DensityFn> truth;
  std::vector<DensityFn> densities;  // truth, or kernel estimates when sampled
  std::vector<std::vector<double>> raw;
  std::vector<double> mu;
  std::vector<double> sigma;
};

GeneratedSample gen_setting(const SettingSpec& spec, Rng& rng);
GeneratedSample gen_setting(const SettingSpec& spec);

struct Quartiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

Quartiles quartiles(std::vector<double> values);

inline const std::vector<std::string> kMeanKinds = {"l2", "wasserstein", "fisher_rao"};

struct ReplicationResult {
  std::size_t rep = 0;
  bool ok = true;
  std::string error;
  // FVE at K' = 1..K per method name.
  std::map<std::string, std::vector<double>> fve;
  // Per mean kind: d_W and d_2 from the truncated N(0, 1) center.
  std::map<std::string, double> mean_dist_w;
  std::map<std::string, double> mean_dist_l2;
  std::map<std::string, DensityFn> means;
};

struct SimulationResult {
  SettingSpec spec;
  std::vector<std::string> methods;
  std::size_t K = 1;
  Metric metric = Metric::l2;
  std::size_t reps = 0;
  std::vector<ReplicationResult> replications;
  std::map<std::string, Quartiles> fve_summary;  // at K
  // Frechet mean of the per-replication Frechet means, per mean kind.
  std::map<std::string, DensityFn> aggregate_means;
  std::map<std::string, double> aggregate_dist_w;
  std::optional<DensityFn> target;

  std::size_t failed() const;
};

/// Replication r draws from Rng::stream(spec.seed, r); results are identical
/// for any thread count.
SimulationResult run_comparison(const SettingSpec& spec, const std::vector<MethodKind>& methods, std::size_t K,
                                Metric metric, std::size_t reps, std::size_t threads = 1);

}  // namespace densfda
