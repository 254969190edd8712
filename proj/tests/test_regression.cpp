#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "densfda/error.hpp"
#include "densfda/regression.hpp"
#include "densfda/rng.hpp"
#include "support.hpp"

using namespace densfda;

namespace {

Eigen::MatrixXd normal_matrix(Eigen::Index n, Eigen::Index k, Rng& rng) {
  Eigen::MatrixXd m(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = rng.normal();
  }
  return m;
}

// Location family on [0,1]: half uniform, half a bump at m_i.
struct Family {
  std::vector<DensityFn> densities;
  std::vector<double> location;
};

Family location_family(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const Grid g = Grid::unit(256);
  Family f;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = rng.uniform(0.25, 0.75);
    f.location.push_back(m);
    f.densities.push_back(densfda::testing::from_fn(
        g, [m](double x) { return 0.5 + 0.5 * densfda::testing::phi((x - m) / 0.08) / 0.08; }));
  }
  return f;
}

}  // namespace

TEST(Flr, NoiselessFit) {
  Rng rng(1);
  const Eigen::MatrixXd s = normal_matrix(30, 2, rng);
  std::vector<double> y(30);
  for (Eigen::Index i = 0; i < 30; ++i) y[static_cast<std::size_t>(i)] = 2.0 + 3.0 * s(i, 0);
  const FlrModel m = fit_flr(s, y);
  EXPECT_NEAR(m.intercept, 2.0, 1e-8);
  EXPECT_NEAR(m.coefficients[0], 3.0, 1e-8);
  EXPECT_NEAR(m.coefficients[1], 0.0, 1e-8);
  EXPECT_NEAR(m.r2, 1.0, 1e-8);
  const auto pred = predict(m, s);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(pred[i], y[i], 1e-8);
}

TEST(Flr, NullModelHasSmallR2) {
  int small = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(31, static_cast<std::uint64_t>(t));
    const Eigen::MatrixXd s = normal_matrix(65, 1, rng);
    std::vector<double> y(65);
    for (double& v : y) v = rng.normal();
    if (fit_flr(s, y).r2 < 0.2) ++small;
  }
  EXPECT_GE(small, 95);
}

TEST(Flr, PermutationInvariant) {
  Rng rng(2);
  const Eigen::MatrixXd s = normal_matrix(25, 3, rng);
  std::vector<double> y(25);
  for (double& v : y) v = rng.normal();
  const FlrModel a = fit_flr(s, y);

  std::vector<std::size_t> perm(25);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[3], perm[11]);
  Eigen::MatrixXd sp(25, 3);
  std::vector<double> yp(25);
  for (std::size_t i = 0; i < 25; ++i) {
    sp.row(static_cast<Eigen::Index>(i)) = s.row(static_cast<Eigen::Index>(perm[i]));
    yp[i] = y[perm[i]];
  }
  const FlrModel b = fit_flr(sp, yp);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a.coefficients[k], b.coefficients[k], 1e-10);
  const auto ra = predict(a, s), rb = predict(b, sp);
  for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(y[perm[i]] - ra[perm[i]], yp[i] - rb[i], 1e-10);
}

TEST(Flr, RankDeficiency) {
  Rng rng(3);
  Eigen::MatrixXd s = normal_matrix(20, 3, rng);
  s.col(2) = 2.0 * s.col(1);
  std::vector<double> y(20);
  for (double& v : y) v = rng.normal();
  const FlrModel m = fit_flr(s, y);
  EXPECT_EQ(m.dropped, 1u);
  EXPECT_EQ(m.coefficients[2], 0.0);
  EXPECT_THROW(fit_flr(s, y, false), Error);
  EXPECT_THROW(fit_flr(normal_matrix(3, 2, rng), std::vector<double>(3, 1.0)), Error);
}

TEST(Cv, LowNoiseLinearResponse) {
  const Family f = location_family(60, 4);
  const ScoreBasis basis = fit_basis(f.densities, ScoreMethod::lqd, 1);
  Rng rng(5);
  const double noise_sd = 0.05;
  std::vector<double> y(f.densities.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1.0 + 2.0 * basis.system.scores(static_cast<Eigen::Index>(i), 0) + noise_sd * rng.normal();
  const double mse = cv_mse(f.densities, y, ScoreMethod::lqd, 1, CvOptions{10, 5, 7, 1});
  EXPECT_LE(mse, 1.2 * noise_sd * noise_sd);
}

TEST(Cv, LocationResponseFavorsLqd) {
  const Family f = location_family(65, 6);
  Rng rng(7);
  std::vector<double> y(f.location.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f.location[i] + 0.03 * rng.normal();
  const CvOptions opts{10, 5, 7, 1};
  EXPECT_LT(cv_mse(f.densities, y, ScoreMethod::lqd, 2, opts), cv_mse(f.densities, y, ScoreMethod::fpca, 2, opts));
}

TEST(Cv, Deterministic) {
  const Family f = location_family(30, 8);
  const CvOptions opts{5, 2, 11, 1};
  const double a = cv_mse(f.densities, f.location, ScoreMethod::fpca, 2, opts);
  const double b = cv_mse(f.densities, f.location, ScoreMethod::fpca, 2, CvOptions{5, 2, 11, 3});
  EXPECT_EQ(a, b);
  EXPECT_THROW(cv_mse(f.densities, f.location, ScoreMethod::fpca, 2, CvOptions{1, 2, 11, 1}), Error);
  EXPECT_THROW(cv_mse(f.densities, f.location, ScoreMethod::fpca, 2, CvOptions{40, 2, 11, 1}), Error);
}

TEST(Table, RowsPerK) {
  const Family f = location_family(30, 9);
  const std::vector<std::size_t> ks{1, 2, 3};
  const auto rows = regression_table(f.densities, f.location, ScoreMethod::lqd, ks, CvOptions{5, 2, 1, 1});
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].K, ks[i]);
    if (i > 0) EXPECT_GE(rows[i].r2, rows[i - 1].r2 - 1e-12);
  }
  EXPECT_EQ(parse_score_method("fpca"), ScoreMethod::fpca);
  EXPECT_THROW(parse_score_method("hs"), Error);
}
