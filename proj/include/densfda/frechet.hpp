#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "densfda/density.hpp"
#include "densfda/fpca.hpp"
#include "densfda/hilbert_sphere.hpp"
#include "densfda/transforms.hpp"

namespace densfda {

enum class Metric { l2, wasserstein };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

double distance(const DensityFn& f, const DensityFn& g, Metric metric);

struct MethodKind {
  enum class Type { ordinary_fpca, transform, hilbert_sphere };

  Type type = Type::transform;
  TransformSpec transform = TransformSpec::lqd();

  static MethodKind fpca() { return {Type::ordinary_fpca, {}}; }
  static MethodKind lqd() { return {Type::transform, TransformSpec::lqd()}; }
  static MethodKind log_hazard(double delta = 0.1) { return {Type::transform, TransformSpec::log_hazard(delta)}; }
  static MethodKind hs() { return {Type::hilbert_sphere, {}}; }

  static MethodKind parse(std::string_view name, double delta = 0.1);
  std::string name() const;
};

DensityFn wasserstein_frechet_mean(const std::vector<DensityFn>& sample, double floor = kDefaultFloor);
DensityFn frechet_mean(const std::vector<DensityFn>& sample, Metric metric, double floor = kDefaultFloor);
double frechet_variance(const std::vector<DensityFn>& sample, const DensityFn& mean, Metric metric);

/// A fitted decomposition for one method, reused across truncation levels.
class RepresentationModel {
 public:
  RepresentationModel(const std::vector<DensityFn>& sample, const MethodKind& method,
                      double floor = kDefaultFloor);

  const MethodKind& method() const noexcept { return method_; }
  std::size_t sample_size() const noexcept { return n_; }
  // Components with nonzero variance in the working space.
  std::size_t components() const noexcept;
  const EigenSystem& system() const noexcept;

  /// Truncated density representations; K above components() uses all of them.
  std::vector<DensityFn> represent(std::size_t K) const;

  /// Mode k (from 1) at alpha. For transform methods this is
  /// psi^-1(nu + alpha sqrt(tau_k) rho_k); K = 0 style alpha = 0 returns the
  /// mapped-back mean.
  DensityFn mode(std::size_t k, double alpha) const;

 private:
  MethodKind method_;
  double floor_;
  std::size_t n_;
  std::vector<DensityFn> singleton_;
  std::optional<EigenSystem> system_;
  std::optional<PgaResult> pga_;
  std::optional<TransformedFn> template_;
};

DensityFn transformation_mode(const std::vector<DensityFn>& sample, const TransformSpec& spec,
                              std::size_t k, double alpha, double floor = kDefaultFloor);

std::vector<DensityFn> represent(const std::vector<DensityFn>& sample, const MethodKind& method,
                                 std::size_t K, double floor = kDefaultFloor);

struct FrechetReport {
  Metric metric = Metric::l2;
  std::string method;
  double v_infinity = 0.0;
  std::vector<double> v_k;  // K = 1..K_max
  std::vector<double> fve;
  std::size_t selected_k = 0;
  bool threshold_reached = false;
  double p = 0.9;
  std::string source = "densities";
};

struct Selection {
  std::size_t k;
  bool reached;
};

/// Smallest K (from 1) with fve[K-1] > p; (fve.size(), false) if none.
Selection select_k(const std::vector<double>& fve, double p);
Selection select_k(const FrechetReport& report, double p);

/// Default truncation range for a fitted model: smallest K reaching
/// (1 - 1e-8) of the total working-space variance, capped at min(n - 1, 20).
std::size_t default_k_max(const RepresentationModel& model);

FrechetReport fve_curve(const RepresentationModel& model, const std::vector<DensityFn>& sample,
                        Metric metric, std::size_t k_max, double p = 0.9);
FrechetReport fve_curve(const std::vector<DensityFn>& sample, const MethodKind& method, Metric metric,
                        std::size_t k_max, double p = 0.9, double floor = kDefaultFloor);

}  // namespace densfda
