#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>

#include "jsdd/channel.hpp"
#include "support/oracles.hpp"

using namespace jsdd;

TEST_CASE("covariance diagonal is exactly one") {
  for (int m : {4, 16, 33}) {
    const Eigen::MatrixXcd r = toeplitz_covariance({30.0, 10.0}, m);
    for (int i = 0; i < m; ++i) {
      CHECK(std::abs(r(i, i) - cd{1.0, 0.0}) < 1e-12);
    }
  }
}

TEST_CASE("vanishing spread approaches the rank-one limit") {
  const Eigen::MatrixXcd r = toeplitz_covariance({0.0, 1e-6}, 6, 64);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(std::abs(r(i, j) - cd{1.0, 0.0}) < 1e-6);
    }
  }
}

TEST_CASE("covariance entry matches adaptive quadrature") {
  const Eigen::MatrixXcd r = toeplitz_covariance({30.0, 7.5}, 8);
  // Frozen from the independent adaptive rule; re-derived below as well.
  const cd frozen{0.004313416207607679, 0.979048504085999};
  CHECK(std::abs(r(0, 1) - frozen) < 1e-10);
  const cd reference = oracle::covariance_entry(30.0, 7.5, -1);
  CHECK(std::abs(r(0, 1) - reference) < 1e-10);
  // Spot-check a longer lag too.
  CHECK(std::abs(r(7, 0) - oracle::covariance_entry(30.0, 7.5, 7)) < 1e-10);
}

TEST_CASE("covariance is Hermitian Toeplitz and PSD") {
  const Eigen::MatrixXcd r = toeplitz_covariance({-20.0, 7.5}, 24);
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 24; ++j) {
      CHECK(r(i, j) == std::conj(r(j, i)));
      if (i > 0 && j > 0) CHECK(r(i, j) == r(i - 1, j - 1));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("covariance rejects degenerate geometry") {
  CHECK_THROWS_AS(toeplitz_covariance({30.0, 0.0}, 8), std::invalid_argument);
  CHECK_THROWS_AS(toeplitz_covariance({85.0, 10.0}, 8), std::invalid_argument);
  CHECK_THROWS_AS(toeplitz_covariance({0.0, 10.0}, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(validate(UserGeometry{0.0, 95.0}), std::invalid_argument);
}

TEST_CASE("eigen_truncate on identity and rank-one input") {
  const ChannelStats id = eigen_truncate(Eigen::MatrixXcd::Identity(4, 4));
  CHECK(id.rank == 4);
  for (int i = 0; i < 4; ++i) CHECK(id.eigvals(i) == doctest::Approx(1.0));

  Eigen::VectorXcd a(3);
  a << cd{0.5, 0.5}, cd{0.5, 0.0}, cd{0.0, 0.5};
  a /= a.norm();
  const ChannelStats r1 = eigen_truncate(a * a.adjoint());
  CHECK(r1.rank == 1);
  CHECK(r1.eigvals(0) == doctest::Approx(1.0));
}

TEST_CASE("eigen_truncate satisfies the stats invariants") {
  const Eigen::MatrixXcd r = toeplitz_covariance({0.0, 10.0}, 64);
  const double rel_tol = 1e-3;
  const ChannelStats stats = eigen_truncate(r, rel_tol);

  // Rank agrees with an independent count on a fresh eigensolve.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
  int expect_rank = 0;
  const double cut = rel_tol * es.eigenvalues().maxCoeff();
  for (int i = 0; i < 64; ++i) {
    if (es.eigenvalues()(i) >= cut) ++expect_rank;
  }
  CHECK(stats.rank == expect_rank);
  CHECK(stats.rank < 64);  // the one-ring channel is genuinely low rank

  const Eigen::MatrixXcd gram = stats.eigvecs.adjoint() * stats.eigvecs;
  CHECK((gram - Eigen::MatrixXcd::Identity(stats.rank, stats.rank)).norm() < 1e-10);
  for (int i = 0; i + 1 < stats.rank; ++i) CHECK(stats.eigvals(i) >= stats.eigvals(i + 1));
  CHECK(stats.eigvals(stats.rank - 1) > 0.0);

  const Eigen::MatrixXcd recon =
      stats.eigvecs * stats.eigvals.asDiagonal() * stats.eigvecs.adjoint();
  CHECK((r - recon).norm() / r.norm() <= rel_tol * std::sqrt(64.0));
  CHECK(std::abs(r.trace().real() - 64.0) < 1e-8);
}

TEST_CASE("eigen_truncate rejects the zero matrix") {
  CHECK_THROWS_AS(eigen_truncate(Eigen::MatrixXcd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("dft_select frozen examples") {
  const DftSelection a = dft_select({30.0, 0.0}, 16);
  CHECK(a.indices == std::vector<int>{5});

  const DftSelection b = dft_select({0.0, 0.0}, 8);
  CHECK(b.indices == std::vector<int>{1});

  const DftSelection c = dft_select({0.0, 5.0}, 64);
  // Support straddles zero: wraparound union with I_max < I_min.
  CHECK(c.indices == oracle::dft_selection_bruteforce(0.0, 5.0, 64));
  CHECK(c.indices.front() > c.indices.back());
}

TEST_CASE("dft_select equals exhaustive argmin across a grid") {
  for (double mean : {-60.0, -30.0, 0.0, 15.0, 45.0}) {
    for (double spread : {0.0, 2.0, 5.0, 10.0}) {
      for (int m : {8, 16, 64, 128}) {
        const DftSelection sel = dft_select({mean, spread}, m);
        CHECK(sel.indices == oracle::dft_selection_bruteforce(mean, spread, m));
        const Eigen::MatrixXcd gram = sel.basis.adjoint() * sel.basis;
        CHECK((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).norm() <
              1e-12);
      }
    }
  }
}

TEST_CASE("subspace alignment limits and growth in antenna count") {
  const UserGeometry geom{0.0, 10.0};
  const auto alignment = [&](int m) {
    const ChannelStats stats = eigen_truncate(toeplitz_covariance(geom, m));
    return subspace_alignment(stats, dft_select(geom, m));
  };
  const double a32 = alignment(32);
  const double a64 = alignment(64);
  const double a128 = alignment(128);
  const double a256 = alignment(256);
  CHECK(a256 > a32);
  CHECK(a256 >= a32);  // non-decreasing endpoints of the sweep
  CHECK(a256 <= 1.0 + 1e-12);
  CHECK(a64 > 0.0);
  CHECK(a128 > 0.0);

  // Identical and orthogonal subspaces hit the extremes.
  ChannelStats fake;
  fake.rank = 2;
  fake.eigvecs = Eigen::MatrixXcd::Zero(8, 2);
  fake.eigvecs(0, 0) = 1.0;
  fake.eigvecs(1, 1) = 1.0;
  fake.eigvals = Eigen::VectorXd::Ones(2);
  DftSelection same;
  same.indices = {1, 2};
  same.basis = fake.eigvecs;
  CHECK(subspace_alignment(fake, same) == doctest::Approx(1.0));
  DftSelection orth;
  orth.indices = {3, 4};
  orth.basis = Eigen::MatrixXcd::Zero(8, 2);
  orth.basis(2, 0) = 1.0;
  orth.basis(3, 1) = 1.0;
  CHECK(subspace_alignment(fake, orth) == doctest::Approx(0.0));
}

TEST_CASE("physical channel draws match the second-order model") {
  RngStream rng(1234);

  // Single path at zero spread: every antenna sees the same magnitude.
  const Eigen::VectorXcd h1 = draw_physical_channel({25.0, 0.0}, 8, 1, rng);
  for (int m = 1; m < 8; ++m) {
    CHECK(std::abs(h1(m)) == doctest::Approx(std::abs(h1(0))).epsilon(1e-12));
  }

  const int m = 8, draws = 100000;
  const UserGeometry geom{10.0, 10.0};
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
  double energy = 0.0, energy_sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    const Eigen::VectorXcd h = draw_physical_channel(geom, m, 200, rng);
    acc += h * h.adjoint();
    const double e = h.squaredNorm();
    energy += e;
    energy_sq += e * e;
  }
  acc /= draws;
  const double mean_energy = energy / draws;
  const double sd_energy =
      std::sqrt((energy_sq / draws - mean_energy * mean_energy) / draws);
  CHECK(std::abs(mean_energy - m) <= 3.0 * sd_energy);

  const Eigen::MatrixXcd r = toeplitz_covariance(geom, m);
  CHECK((acc - r).norm() / r.norm() <= 0.05);
}

TEST_CASE("effective pair has the prescribed joint statistics") {
  const int r = 3, draws = 100000;
  Eigen::VectorXd lam(r);
  lam << 1.0, 1.0, 1.0;

  for (double xi : {0.0, 0.8}) {
    RngStream rng(99 + static_cast<int>(10 * xi));
    Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(r, r);
    Eigen::MatrixXcd self = Eigen::MatrixXcd::Zero(r, r);
    for (int d = 0; d < draws; ++d) {
      const EffectiveChannelPair p = draw_effective_pair(lam, xi, rng);
      cross += p.true_ch * p.est_ch.adjoint();
      self += p.true_ch * p.true_ch.adjoint();
    }
    cross /= draws;
    self /= draws;
    // Entry-level Monte Carlo noise is ~ 1/sqrt(draws); 3 sigma bands.
    const double band = 3.0 / std::sqrt(static_cast<double>(draws));
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        const cd expect_cross = (i == j) ? cd{xi, 0.0} : cd{0.0, 0.0};
        const cd expect_self = (i == j) ? cd{lam(i), 0.0} : cd{0.0, 0.0};
        CHECK(std::abs(cross(i, j) - expect_cross) <= 2.0 * band);
        CHECK(std::abs(self(i, j) - expect_self) <= 2.0 * band);
      }
    }
  }
  RngStream rng(7);
  CHECK_THROWS_AS(draw_effective_pair(lam, 1.0, rng), std::invalid_argument);
}

TEST_CASE("low-rank representation reproduces the covariance") {
  const UserGeometry geom{20.0, 7.5};
  const int m = 16;
  const ChannelStats stats = eigen_truncate(toeplitz_covariance(geom, m));
  RngStream rng(31);
  const int draws = 20000;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXcd v(stats.rank);
    for (int i = 0; i < stats.rank; ++i) v(i) = rng.cgauss();
    const Eigen::VectorXcd h =
        stats.eigvecs * stats.eigvals.cwiseSqrt().asDiagonal() * v;
    acc += h * h.adjoint();
  }
  acc /= draws;
  CHECK((acc - stats.covariance).norm() / stats.covariance.norm() < 0.06);
}

TEST_CASE("orthogonality defect over selections and eigenbases") {
  const DftSelection a = dft_select({-30.0, 5.0}, 64);
  const DftSelection b = dft_select({30.0, 5.0}, 64);
  CHECK(orthogonality_defect({a, b}) == 0.0);
  CHECK_FALSE(selections_overlap({a, b}));
  CHECK_NOTHROW(ensure_disjoint({a, b}));

  CHECK(selections_overlap({a, a}));
  CHECK_THROWS_AS(ensure_disjoint({a, a}), std::domain_error);
  const double self_defect = orthogonality_defect({a, a});
  CHECK(self_defect ==
        doctest::Approx(std::sqrt(static_cast<double>(a.indices.size()))));

  const auto defect_at = [&](int m) {
    const ChannelStats left = eigen_truncate(toeplitz_covariance({-30.0, 5.0}, m));
    const ChannelStats right = eigen_truncate(toeplitz_covariance({30.0, 5.0}, m));
    return orthogonality_defect(std::vector<ChannelStats>{left, right});
  };
  const double d128 = defect_at(128);
  const double d256 = defect_at(256);
  CHECK(d128 > 0.0);
  CHECK(d256 < d128);
}
