#include "densfda/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "densfda/error.hpp"
#include "densfda/hilbert_sphere.hpp"
#include "densfda/kde.hpp"
#include "densfda/parallel.hpp"

namespace densfda {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double support_half_width(SettingId id) { return id == SettingId::s1 ? 3.0 : 5.0; }

double quantile_sorted(const std::vector<double>& v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

void SettingSpec::validate() const {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "setting needs n >= 2");
  if (observed.sampled && observed.n_obs < 10) throw Error(ErrorCode::InvalidArgument, "sampled setting needs N_obs >= 10");
  if (observed.sampled) {
    const double h = observed.bandwidth / (2.0 * support_half_width(id));
    if (!(h > 0.0 && h < 0.5)) throw Error(ErrorCode::BadBandwidth, "bandwidth out of range for the support");
  }
}

Grid SettingSpec::grid() const {
  const double a = support_half_width(id);
  return Grid(-a, a, grid_points);
}

DensityFn truncated_normal_density(double mu, double sigma, const Grid& grid, double floor) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::DegenerateSigma, "sigma must be positive");
  const double mass = normal_cdf((grid.hi() - mu) / sigma) - normal_cdf((grid.lo() - mu) / sigma);
  if (!(mass > 0.0)) throw Error(ErrorCode::DegenerateSigma, "no normal mass inside the support");
  std::vector<double> v(grid.size());
  const double c = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi) * mass);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double z = (grid[j] - mu) / sigma;
    v[j] = c * std::exp(-0.5 * z * z);
  }
  return normalize(GridFn(grid, std::move(v)), floor);
}

std::vector<double> sample_truncated_normal(double mu, double sigma, double lo, double hi, std::size_t count,
                                            Rng& rng) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::DegenerateSigma, "sigma must be positive");
  const Grid fine(lo, hi, 4096);
  const std::vector<double> xs = fine.points();
  const double za = normal_cdf((lo - mu) / sigma);
  const double mass = normal_cdf((hi - mu) / sigma) - za;
  std::vector<double> cdf(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) cdf[j] = (normal_cdf((xs[j] - mu) / sigma) - za) / mass;
  cdf.front() = 0.0;
  cdf.back() = 1.0;
  std::vector<double> out(count);
  for (double& x : out) x = invert_cdf(xs, cdf, rng.uniform());
  return out;
}

GeneratedSample gen_setting(const SettingSpec& spec, Rng& rng) {
  spec.validate();
  const Grid grid = spec.grid();
  GeneratedSample out;
  for (std::size_t i = 0; i < spec.n; ++i) {
    double mu = 0.0;
    double sigma = 1.0;
    switch (spec.id) {
      case SettingId::s1:
        sigma = std::exp(rng.uniform(-1.5, 1.5));
        break;
      case SettingId::s2:
        mu = rng.uniform(-3.0, 3.0);
        break;
      case SettingId::s3:
        sigma = std::exp(rng.uniform(-1.0, 1.0));
        mu = rng.uniform(-2.5, 2.5);
        break;
    }
    out.mu.push_back(mu);
    out.sigma.push_back(sigma);
    out.truth.push_back(truncated_normal_density(mu, sigma, grid, spec.floor));
  }
  if (!spec.observed.sampled) {
    out.densities = out.truth;
    return out;
  }
  const KdeConfig cfg{spec.observed.bandwidth / grid.width(), KernelSpec{KernelFamily::gaussian}, grid, spec.floor};
  for (std::size_t i = 0; i < spec.n; ++i) {
    out.raw.push_back(sample_truncated_normal(out.mu[i], out.sigma[i], grid.lo(), grid.hi(), spec.observed.n_obs, rng));
    out.densities.push_back(estimate_density(out.raw.back(), cfg));
  }
  return out;
}

GeneratedSample gen_setting(const SettingSpec& spec) {
  Rng rng(spec.seed);
  return gen_setting(spec, rng);
}

Quartiles quartiles(std::vector<double> values) {
  Quartiles q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  q.min = values.front();
  q.max = values.back();
  q.q1 = quantile_sorted(values, 0.25);
  q.median = quantile_sorted(values, 0.5);
  q.q3 = quantile_sorted(values, 0.75);
  return q;
}

std::size_t SimulationResult::failed() const {
  return static_cast<std::size_t>(
      std::count_if(replications.begin(), replications.end(), [](const auto& r) { return !r.ok; }));
}

SimulationResult run_comparison(const SettingSpec& spec, const std::vector<MethodKind>& methods, std::size_t K,
                                Metric metric, std::size_t reps, std::size_t threads) {
  spec.validate();
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "reps must be at least 1");
  if (K == 0 || K > spec.n - 1) throw Error(ErrorCode::KTooLarge, "K out of range for the sample size");

  SimulationResult result;
  result.spec = spec;
  result.K = K;
  result.metric = metric;
  result.reps = reps;
  for (const auto& m : methods) result.methods.push_back(m.name());
  const Grid grid = spec.grid();
  const DensityFn target = truncated_normal_density(0.0, 1.0, grid, spec.floor);
  result.target = target;

  result.replications.resize(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    ReplicationResult& rr = result.replications[r];
    rr.rep = r;
    try {
      Rng rng = Rng::stream(spec.seed, r);
      const GeneratedSample gen = gen_setting(spec, rng);
      const auto& sample = gen.densities;

      const DensityFn center = frechet_mean(sample, metric, spec.floor);
      const double v_inf = frechet_variance(sample, center, metric);
      for (const auto& method : methods) {
        const RepresentationModel model(sample, method, spec.floor);
        std::vector<double> curve;
        for (std::size_t k = 1; k <= K; ++k) {
          const std::vector<DensityFn> rep = model.represent(k);
          double err = 0.0;
          for (std::size_t i = 0; i < sample.size(); ++i) {
            const double d = distance(sample[i], rep[i], metric);
            err += d * d;
          }
          err /= static_cast<double>(sample.size());
          curve.push_back(v_inf > 0.0 ? (v_inf - err) / v_inf : 1.0);
        }
        rr.fve[method.name()] = std::move(curve);
      }

      std::vector<SpherePoint> pts;
      for (const auto& f : sample) pts.push_back(sqrt_embed(f));
      rr.means.emplace("l2", cross_sectional_mean(sample));
      rr.means.emplace("wasserstein", wasserstein_frechet_mean(sample, spec.floor));
      rr.means.emplace("fisher_rao", square_back(karcher_mean(pts), spec.floor));
      for (const auto& [kind, mean] : rr.means) {
        rr.mean_dist_w[kind] = dist_wasserstein(mean, target);
        rr.mean_dist_l2[kind] = dist_l2(mean, target);
      }
    } catch (const Error& e) {
      rr.ok = false;
      rr.error = std::string(to_string(e.code())) + ": " + e.what();
      rr.fve.clear();
      rr.means.clear();
    }
  });

  for (const auto& name : result.methods) {
    std::vector<double> at_k;
    for (const auto& rr : result.replications) {
      if (rr.ok) at_k.push_back(rr.fve.at(name).back());
    }
    result.fve_summary[name] = quartiles(std::move(at_k));
  }

  for (const auto& kind : kMeanKinds) {
    std::vector<DensityFn> means;
    for (const auto& rr : result.replications) {
      if (rr.ok) means.push_back(rr.means.at(kind));
    }
    if (means.empty()) continue;
    DensityFn agg = [&] {
      if (kind == "l2") return cross_sectional_mean(means);
      if (kind == "wasserstein") return wasserstein_frechet_mean(means, spec.floor);
      std::vector<SpherePoint> pts;
      for (const auto& f : means) pts.push_back(sqrt_embed(f));
      return square_back(karcher_mean(pts), spec.floor);
    }();
    result.aggregate_dist_w[kind] = dist_wasserstein(agg, target);
    result.aggregate_means.emplace(kind, std::move(agg));
  }
  return result;
}

}  // namespace densfda
