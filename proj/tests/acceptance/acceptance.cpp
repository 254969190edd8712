// Acceptance run: one PASS/FAIL line per criterion.
//
//   densfda_acceptance [--threads N] [--only 1,4] [--expect-fail 1,2]
//
// Exit status is 0 when every failing criterion is listed in --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "densfda/error.hpp"
#include "densfda/fpca.hpp"
#include "densfda/frechet.hpp"
#include "densfda/hilbert_sphere.hpp"
#include "densfda/kde.hpp"
#include "densfda/parallel.hpp"
#include "densfda/regression.hpp"
#include "densfda/rng.hpp"
#include "densfda/simulation.hpp"
#include "densfda/transforms.hpp"

using namespace densfda;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

DensityFn from_fn(const Grid& g, const std::function<double(double)>& f, double floor = 0.0) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = f(g[j]);
  return normalize(GridFn(g, std::move(v)), floor);
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

std::vector<double> cos_basis(const Grid& g, int k) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::sqrt(2.0) * std::cos(k * std::numbers::pi * g[j]);
  return v;
}

const std::vector<MethodKind> kCompared{MethodKind::lqd(), MethodKind::fpca(), MethodKind::hs()};

struct SettingRun {
  SimulationResult result;
  double seconds = 0.0;
};

SettingRun run_setting(int setting, bool sampled, std::size_t threads) {
  SettingSpec spec;
  spec.id = static_cast<SettingId>(setting);
  spec.n = 50;
  spec.observed.sampled = sampled;
  spec.observed.n_obs = 100;
  spec.observed.bandwidth = 0.2;
  const std::size_t K = setting == 3 ? 2 : 1;
  const auto t0 = std::chrono::steady_clock::now();
  SettingRun run{run_comparison(spec, kCompared, K, Metric::l2, 50, threads)};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

Outcome fve_ordering(const std::vector<SettingRun>& runs) {
  Outcome o{true, ""};
  double seconds = 0.0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto& r = runs[s].result;
    seconds += runs[s].seconds;
    const double lqd = r.fve_summary.at("lqd").median;
    const double fpca = r.fve_summary.at("fpca").median;
    const double hs = r.fve_summary.at("hs").median;
    bool ok = lqd > fpca && r.failed() == 0;
    if (s > 0) ok = ok && lqd > hs;
    o.pass = o.pass && ok;
    o.detail += "s" + std::to_string(s + 1) + " median lqd/fpca/hs " + fmt("%.3f", lqd) + "/" + fmt("%.3f", fpca) +
                "/" + fmt("%.3f", hs) + (ok ? "" : " (order violated)") + "; ";
  }
  o.pass = o.pass && seconds <= 300.0;
  o.detail += fmt("%.1f s", seconds);
  return o;
}

Outcome mean_recovery(const SimulationResult& r) {
  const double agg = r.aggregate_dist_w.at("wasserstein");
  std::size_t closer = 0, ok = 0;
  for (const auto& rr : r.replications) {
    if (!rr.ok) continue;
    ++ok;
    if (rr.mean_dist_w.at("wasserstein") < rr.mean_dist_w.at("l2")) ++closer;
  }
  const double frac = ok ? static_cast<double>(closer) / static_cast<double>(r.replications.size()) : 0.0;
  return {agg < 0.05 && frac >= 0.9,
          "d_W(W-mean, N(0,1)) = " + fmt("%.4f", agg) + ", W-mean closer than cross-sectional in " +
              std::to_string(closer) + "/" + std::to_string(r.replications.size()) + " replications"};
}

Outcome kde_rate(std::size_t threads) {
  const Grid g(-3.0, 3.0, 512);
  const DensityFn target = truncated_normal_density(0.0, 1.0, g, kDefaultFloor);
  const std::size_t reps = 200;
  std::vector<double> lx, ly;
  std::string detail;
  for (std::size_t N : {100, 400, 1600, 6400}) {
    // h = N^(-1/3) in the units of the data, mapped onto the unit interval
    const double h = std::pow(static_cast<double>(N), -1.0 / 3.0) / g.width();
    std::vector<double> ise(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
      Rng rng = Rng::stream(404, N * 100000 + r);
      const auto s = sample_truncated_normal(0.0, 1.0, g.lo(), g.hi(), N, rng);
      const double d = dist_l2(estimate_density(s, KdeConfig{h, KernelSpec{}, g, kDefaultFloor}), target);
      ise[r] = d * d;
    });
    const double mise = std::accumulate(ise.begin(), ise.end(), 0.0) / static_cast<double>(reps);
    lx.push_back(std::log(static_cast<double>(N)));
    ly.push_back(std::log(mise));
    detail += "N=" + std::to_string(N) + " MISE " + fmt("%.3g", mise) + "; ";
  }
  const double b = slope(lx, ly);
  return {std::abs(b + 2.0 / 3.0) <= 0.15, detail + "slope " + fmt("%.3f", b)};
}

Outcome mode_rate(std::size_t threads) {
  const Grid g = Grid::unit(512);
  const std::vector<double> tau{0.25, 0.0625};
  const std::vector<std::vector<double>> rho{cos_basis(g, 1), cos_basis(g, 2)};
  const auto member = [&](double a, double b) {
    std::vector<double> x(g.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = a * std::sqrt(tau[0]) * rho[0][j] + b * std::sqrt(tau[1]) * rho[1][j];
    return x;
  };
  std::vector<double> alphas;
  for (int i = -8; i <= 8; ++i) alphas.push_back(0.25 * i);
  // true modes psi^-1(nu + alpha sqrt(tau_k) rho_k) with nu = 0
  std::vector<std::vector<DensityFn>> truth(2);
  for (double a : alphas) {
    truth[0].push_back(lqd_inverse(TransformedFn{g, member(a, 0.0), TransformSpec::lqd(), g}));
    truth[1].push_back(lqd_inverse(TransformedFn{g, member(0.0, a), TransformSpec::lqd(), g}));
  }

  const std::size_t reps = 40;
  std::vector<double> lx, ly;
  std::string detail;
  for (std::size_t n : {50, 100, 200, 400, 800}) {
    std::vector<double> err(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
      Rng rng = Rng::stream(505, n * 1000 + r);
      std::vector<DensityFn> sample;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.normal(), b = rng.normal();
        sample.push_back(lqd_inverse(TransformedFn{g, member(a, b), TransformSpec::lqd(), g}));
      }
      const RepresentationModel model(sample, MethodKind::lqd());
      double worst = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        const double sign = quad::inner(g, model.system().eigenfunctions[k], rho[k]) >= 0.0 ? 1.0 : -1.0;
        for (std::size_t a = 0; a < alphas.size(); ++a) {
          worst = std::max(worst, dist_wasserstein(model.mode(k + 1, sign * alphas[a]), truth[k][a]));
        }
      }
      err[r] = worst;
    });
    const double mean = std::accumulate(err.begin(), err.end(), 0.0) / static_cast<double>(reps);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(mean));
    detail += "n=" + std::to_string(n) + " " + fmt("%.4f", mean) + "; ";
  }
  const double b = slope(lx, ly);
  return {std::abs(b + 0.5) <= 0.15, detail + "slope " + fmt("%.3f", b)};
}

// Truncated normal quantile from the analytic CDF, by bisection.
double tn_quantile(double mu, double sigma, double lo, double hi, double u) {
  const auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
  const double pa = cdf((lo - mu) / sigma), pb = cdf((hi - mu) / sigma);
  const double target = pa + u * (pb - pa);
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double c = 0.5 * (a + b);
    (cdf((c - mu) / sigma) < target ? a : b) = c;
  }
  return 0.5 * (a + b);
}

double sorted_matching(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc / static_cast<double>(x.size()));
}

Outcome wasserstein_oracle() {
  const Grid g(-5.0, 5.0, 1024);
  const std::size_t count = 1000;
  Rng rng(606);
  double worst = 0.0, worst_iid = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const double mu1 = rng.uniform(-2.0, 2.0), s1 = rng.uniform(0.5, 1.5);
    double mu2 = mu1;
    while (std::abs(mu2 - mu1) < 1.5) mu2 = rng.uniform(-2.5, 2.5);
    const double s2 = rng.uniform(0.5, 1.5);
    const double exact = dist_wasserstein(truncated_normal_density(mu1, s1, g, 0.0), truncated_normal_density(mu2, s2, g, 0.0));
    // equal-weight atoms at the midpoint quantile levels
    std::vector<double> x(count), y(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
      x[i] = tn_quantile(mu1, s1, g.lo(), g.hi(), u);
      y[i] = tn_quantile(mu2, s2, g.lo(), g.hi(), u);
    }
    worst = std::max(worst, std::abs(sorted_matching(x, y) - exact) / exact);
    const double iid = sorted_matching(sample_truncated_normal(mu1, s1, g.lo(), g.hi(), count, rng),
                                       sample_truncated_normal(mu2, s2, g.lo(), g.hi(), count, rng));
    worst_iid = std::max(worst_iid, std::abs(iid - exact) / exact);
  }
  return {worst <= 0.02, "largest relative gap over 20 pairs " + fmt("%.2e", worst) + " (iid draws, for reference: " +
                             fmt("%.4f", worst_iid) + ")"};
}

Outcome property_suites(std::size_t threads) {
  std::vector<std::string> failures;
  const auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const Grid unit = Grid::unit(512);

  // transform round trips
  const std::vector<DensityFn> shapes{
      from_fn(unit, [](double x) { return 2.0 * (1.0 + x) / 3.0; }),
      truncated_normal_density(0.0, 1.0, Grid(-3.0, 3.0, 512), 0.0),
      from_fn(unit, [](double x) { return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x); }),
      from_fn(unit, [](double x) { return 0.2 + 0.6 * phi((x - 0.3) / 0.1) / 0.1 + 0.4 * phi((x - 0.7) / 0.12) / 0.12; }),
  };
  const auto lh = TransformSpec::log_hazard(0.1);
  double worst_q = 0.0, worst_h = 0.0;
  for (const auto& f : shapes) {
    worst_q = std::max(worst_q, dist_sup(lqd_inverse(lqd_forward(f)), f));
    const DensityFn back = log_hazard_inverse(log_hazard_forward(f, lh), lh);
    const double cut = f.grid().lo() + 0.9 * f.grid().width();
    for (std::size_t j = 0; j < f.grid().size(); ++j) {
      if (f.grid()[j] <= cut + 1e-12) worst_h = std::max(worst_h, std::abs(back.values()[j] - f.values()[j]));
    }
  }
  check(worst_q <= 1e-3, "LQD round trip " + fmt("%.2e", worst_q));
  check(worst_h <= 1e-3, "log hazard round trip " + fmt("%.2e", worst_h));

  // every representation and mode is a valid density
  SettingSpec spec;
  spec.id = SettingId::s3;
  spec.n = 30;
  const auto sample = gen_setting(spec).densities;
  const auto valid = [&](const DensityFn& f) {
    return std::abs(quad::integrate(f.grid(), f.values()) - 1.0) <= 1e-10 && f.min_value() >= spec.floor * (1 - 1e-12);
  };
  std::size_t invalid = 0;
  const std::vector<MethodKind> methods{MethodKind::lqd(), MethodKind::log_hazard(0.1), MethodKind::fpca(), MethodKind::hs()};
  std::vector<std::size_t> bad(methods.size(), 0);
  parallel_for(methods.size(), threads, [&](std::size_t m) {
    const RepresentationModel model(sample, methods[m], spec.floor);
    for (std::size_t K : {1, 2, 3, 10}) {
      for (const auto& f : model.represent(K)) bad[m] += valid(f) ? 0 : 1;
    }
    for (std::size_t k = 1; k <= 3; ++k) {
      for (double a : {-3.0, -1.5, 0.0, 1.5, 3.0}) bad[m] += valid(model.mode(k, a)) ? 0 : 1;
    }
  });
  invalid = std::accumulate(bad.begin(), bad.end(), std::size_t{0});
  check(invalid == 0, std::to_string(invalid) + " invalid densities");

  // density FPCA: zero-integral eigenfunctions, trace and Parseval identities
  const EigenSystem sys = fpca(sample);
  double worst_int = 0.0;
  for (std::size_t k = 0; k < sys.components(); ++k) {
    if (sys.eigenvalues[k] > 1e-10) worst_int = std::max(worst_int, std::abs(quad::integrate(sys.grid, sys.eigenfunctions[k])));
  }
  check(worst_int <= 1e-8, "eigenfunction integral " + fmt("%.2e", worst_int));
  std::vector<GridFn> fns;
  for (const auto& f : sample) fns.push_back(f.fn());
  const auto cov = covariance(fns, sys.mean);
  std::vector<double> diag(sys.grid.size());
  for (std::size_t j = 0; j < diag.size(); ++j) diag[j] = cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
  const double trace = quad::integrate(sys.grid, diag);
  const double sum = std::accumulate(sys.eigenvalues.begin(), sys.eigenvalues.end(), 0.0);
  check(std::abs(sum - trace) <= 1e-6 * trace, "trace identity " + fmt("%.2e", std::abs(sum - trace) / trace));
  double worst_parseval = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    std::vector<double> d(sys.grid.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = sample[i].values()[j] - sys.mean[j];
    const double n2 = quad::inner(sys.grid, d, d);
    worst_parseval = std::max(worst_parseval, std::abs(sys.scores.row(static_cast<Eigen::Index>(i)).squaredNorm() - n2) / n2);
  }
  check(worst_parseval <= 1e-6, "Parseval " + fmt("%.2e", worst_parseval));

  // sphere exp/log inversion
  double worst_sphere = 0.0;
  for (std::size_t i = 0; i + 1 < sample.size(); ++i) {
    const SpherePoint p = sqrt_embed(sample[i]), q = sqrt_embed(sample[i + 1]);
    const SpherePoint back = exp_map(p, log_map(p, q));
    for (std::size_t j = 0; j < back.values.size(); ++j) worst_sphere = std::max(worst_sphere, std::abs(back.values[j] - q.values[j]));
  }
  check(worst_sphere <= 1e-9, "sphere exp/log " + fmt("%.2e", worst_sphere));

  std::string detail = "round trips lqd " + fmt("%.1e", worst_q) + ", loghazard " + fmt("%.1e", worst_h) +
                       "; eigenfunction integral " + fmt("%.1e", worst_int) + "; trace " +
                       fmt("%.1e", std::abs(sum - trace) / trace) + "; sphere " + fmt("%.1e", worst_sphere);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

Outcome regression_substitute(std::size_t threads) {
  const Grid g = Grid::unit(512);
  const std::size_t n = 65;
  Rng rng(1);
  std::vector<double> loc(n), noise(n);
  std::vector<DensityFn> dens;
  for (std::size_t i = 0; i < n; ++i) {
    loc[i] = rng.uniform(0.25, 0.75);
    const double m = loc[i];
    dens.push_back(from_fn(g, [m](double x) { return 0.5 + 0.5 * phi((x - m) / 0.08) / 0.08; }));
  }
  for (double& e : noise) e = rng.normal();
  // noise: centered, orthogonal to the location, variance 10% of the signal's
  const auto center = [](std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= m;
  };
  std::vector<double> lc = loc;
  center(lc);
  center(noise);
  const double proj = std::inner_product(noise.begin(), noise.end(), lc.begin(), 0.0) /
                      std::inner_product(lc.begin(), lc.end(), lc.begin(), 0.0);
  for (std::size_t i = 0; i < n; ++i) noise[i] -= proj * lc[i];
  const double scale = std::sqrt(0.1 * std::inner_product(lc.begin(), lc.end(), lc.begin(), 0.0) /
                                 std::inner_product(noise.begin(), noise.end(), noise.begin(), 0.0));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = loc[i] + scale * noise[i];

  const CvOptions opts{10, 50, 7, threads};
  const std::vector<std::size_t> ks{2};
  const auto lqd = regression_table(dens, y, ScoreMethod::lqd, ks, opts).front();
  const auto fpc = regression_table(dens, y, ScoreMethod::fpca, ks, opts).front();
  return {lqd.cv_mse < fpc.cv_mse && lqd.r2 >= 0.9,
          "K=2 CV MSE lqd " + fmt("%.5f", lqd.cv_mse) + " vs fpca " + fmt("%.5f", fpc.cv_mse) + "; R2 lqd " +
              fmt("%.3f", lqd.r2) + " fpca " + fmt("%.3f", fpc.r2)};
}

std::set<int> parse_set(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"densfda acceptance criteria"};
  std::size_t threads = 0;
  std::string only, expect_fail;
  app.add_option("--threads", threads, "worker threads (0: DENSFDA_THREADS or 1)");
  app.add_option("--only", only, "comma list of criteria to run");
  app.add_option("--expect-fail", expect_fail, "comma list of criteria known to fail");
  CLI11_PARSE(app, argc, argv);
  threads = resolve_threads(threads);
  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8} : parse_set(only);
  const std::set<int> expected = parse_set(expect_fail);

  int unexpected = 0;
  const auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
    if (!selected.count(id)) return;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const bool known = expected.count(id) > 0;
    std::printf("criterion %d %s: %s  [%s]%s\n", id, title, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                !o.pass && known ? " (known failure, documented)" : "");
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  };

  std::vector<SettingRun> full;
  const auto full_runs = [&]() -> const std::vector<SettingRun>& {
    if (full.empty()) {
      for (int s = 1; s <= 3; ++s) full.push_back(run_setting(s, false, threads));
    }
    return full;
  };

  report(1, "FVE ordering, full densities", [&] { return fve_ordering(full_runs()); });
  report(2, "FVE ordering, estimated densities", [&] {
    std::vector<SettingRun> runs;
    for (int s = 1; s <= 3; ++s) runs.push_back(run_setting(s, true, threads));
    return fve_ordering(runs);
  });
  report(3, "Wasserstein mean recovery", [&] { return mean_recovery(full_runs()[1].result); });
  report(4, "KDE rate", [&] { return kde_rate(threads); });
  report(5, "mode convergence rate", [&] { return mode_rate(threads); });
  report(6, "Wasserstein oracle", wasserstein_oracle);
  report(7, "property suites", [&] { return property_suites(threads); });
  report(8, "regression substitute", [&] { return regression_substitute(threads); });
  return unexpected == 0 ? 0 : 1;
}
