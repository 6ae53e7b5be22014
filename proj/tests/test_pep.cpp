#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "jsdd/pep.hpp"
#include "support/oracles.hpp"

using namespace jsdd;

namespace {

Eigen::MatrixXcd random_matrix(RngStream& rng, int rows, int cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.cgauss();
  }
  return m;
}

Eigen::MatrixXcd random_psd(RngStream& rng, int n, double scale = 1.0) {
  const Eigen::MatrixXcd g = random_matrix(rng, n, n);
  return scale * (g * g.adjoint()) / n;
}

double recompute_b(const PepProblem& p) {
  double quad = 0.0, logdet = 0.0;
  for (int i = 0; i < p.rank(); ++i) {
    quad += p.a_diag(i) * std::norm(p.mu(i));
    logdet += std::log(p.a_diag(i));
  }
  return quad + std::log(2.0) + logdet;
}

}  // namespace

TEST_CASE("build_problem closed-form pieces") {
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(3);

  EffectiveChannelPair blind;
  blind.corr = 0.0;
  blind.est_ch = Eigen::VectorXcd::Zero(3);
  blind.true_ch = Eigen::VectorXcd::Zero(3);
  const PepProblem p0 = build_problem(lam, blind, 0.5, 1.0, 2);
  CHECK(p0.mu.norm() == 0.0);
  CHECK((p0.a_diag - lam).norm() == 0.0);

  EffectiveChannelPair pair;
  pair.corr = 0.8;
  pair.est_ch = Eigen::VectorXcd::Zero(3);
  pair.est_ch(0) = 1.0;
  pair.true_ch = pair.est_ch;
  const PepProblem p1 = build_problem(lam, pair, 0.5, 1.0, 2);
  CHECK(p1.a_diag(0) == doctest::Approx(0.36));
  CHECK(std::abs(p1.mu(0) - cd{0.8 / 0.36, 0.0}) < 1e-15);
  CHECK(std::abs(p1.mu(1)) == 0.0);

  pair.corr = 1.0;
  CHECK_THROWS_AS(build_problem(lam, pair, 0.5, 1.0, 2), std::invalid_argument);
  pair.corr = 0.5;
  CHECK_THROWS_AS(build_problem(lam, pair, 0.5, 1.0, 4), std::invalid_argument);
}

TEST_CASE("const_b is recomputable from the stored fields") {
  RngStream rng(5);
  for (int t = 0; t < 20; ++t) {
    const SyntheticInstance inst = make_instance(rng, 4, 2, 0.6, 0.8, 2.0);
    CHECK(inst.problem.const_b == doctest::Approx(recompute_b(inst.problem)).epsilon(1e-12));
  }
}

TEST_CASE("zero precoder gives the bound 1/2 and objective -ln 2") {
  RngStream rng(9);
  const SyntheticInstance inst = make_instance(rng, 4, 2, 0.7, 1.0, 3.0);
  const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(4, 2);
  CHECK(pep_bound(inst.problem, zero) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(objective(inst.problem, zero) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  // The same limit through rho -> 0 with a fixed nonzero precoder.
  EffectiveChannelPair pair;
  pair.corr = inst.corr;
  pair.est_ch = inst.est_ch;
  pair.true_ch = inst.est_ch;
  const PepProblem tiny = build_problem(inst.eigvals, pair, 1e-14, 3.0, 2);
  const Eigen::MatrixXcd m = random_matrix(rng, 4, 2);
  CHECK(pep_bound(tiny, m) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("bound and log objective are consistent") {
  RngStream rng(13);
  for (int t = 0; t < 20; ++t) {
    const SyntheticInstance inst = make_instance(rng, 5, 2, 0.5, 1.2, 2.5);
    const Eigen::MatrixXcd m = random_matrix(rng, 5, 2);
    const double f = objective(inst.problem, m);
    CHECK(pep_bound(inst.problem, m) == doctest::Approx(std::exp(f)).epsilon(1e-10));
  }
}

TEST_CASE("objective decreases along an amplitude scan") {
  RngStream rng(21);
  const SyntheticInstance inst = make_instance(rng, 4, 2, 0.8, 1.0, 10.0);
  Eigen::MatrixXcd dir = Eigen::MatrixXcd::Zero(4, 2);
  dir.col(0) = inst.est_ch.normalized();  // direction containing mu
  double prev = objective(inst.problem, 0.0 * dir);
  for (double scale : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const double cur = objective(inst.problem, scale * dir);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("omega objective matches the precoder objective up to b") {
  RngStream rng(33);
  for (int t = 0; t < 10; ++t) {
    const SyntheticInstance inst = make_instance(rng, 4, 2, 0.6, 0.9, 2.0);
    const Eigen::MatrixXcd m = random_matrix(rng, 4, 2);
    const OmegaEval eval = objective_omega(inst.problem, m * m.adjoint());
    CHECK(eval.value ==
          doctest::Approx(objective(inst.problem, m) + inst.problem.const_b).epsilon(1e-10));
  }

  const SyntheticInstance inst = make_instance(rng, 4, 2, 0.6, 0.9, 2.0);
  const OmegaEval at_zero = objective_omega(inst.problem, Eigen::MatrixXcd::Zero(4, 4));
  double quad = 0.0, logdet = 0.0;
  for (int i = 0; i < 4; ++i) {
    quad += inst.problem.a_diag(i) * std::norm(inst.problem.mu(i));
    logdet += std::log(inst.problem.a_diag(i));
  }
  CHECK(at_zero.value == doctest::Approx(quad + logdet).epsilon(1e-12));
}

TEST_CASE("omega gradient matches central finite differences") {
  RngStream rng(37);
  const SyntheticInstance inst = make_instance(rng, 4, 2, 0.7, 1.1, 2.0);
  const Eigen::MatrixXcd omega = random_psd(rng, 4);
  const OmegaEval eval = objective_omega(inst.problem, omega);
  const double step = 1e-6;
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXcd dir = random_matrix(rng, 4, 4);
    dir = 0.5 * (dir + dir.adjoint()).eval();
    dir /= dir.norm();
    const double fp = objective_omega(inst.problem, omega + step * dir).value;
    const double fm = objective_omega(inst.problem, omega - step * dir).value;
    const double fd = (fp - fm) / (2.0 * step);
    const double analytic = (eval.grad.adjoint() * dir).trace().real();
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
  }
}

TEST_CASE("omega objective is convex along random segments") {
  RngStream rng(43);
  const SyntheticInstance inst = make_instance(rng, 4, 2, 0.5, 0.8, 2.0);
  for (int t = 0; t < 100; ++t) {
    const Eigen::MatrixXcd w1 = random_psd(rng, 4);
    const Eigen::MatrixXcd w2 = random_psd(rng, 4);
    const double f1 = objective_omega(inst.problem, w1).value;
    const double f2 = objective_omega(inst.problem, w2).value;
    for (double w : {0.25, 0.5, 0.75}) {
      const double mid = objective_omega(inst.problem, w * w1 + (1.0 - w) * w2).value;
      CHECK(mid <= w * f1 + (1.0 - w) * f2 + 1e-9);
    }
  }
}

TEST_CASE("bound is non-increasing in rho") {
  RngStream rng(47);
  const SyntheticInstance base = make_instance(rng, 4, 2, 0.6, 1.0, 2.0);
  const Eigen::MatrixXcd m = random_matrix(rng, 4, 2);
  EffectiveChannelPair pair;
  pair.corr = base.corr;
  pair.est_ch = base.est_ch;
  pair.true_ch = base.est_ch;
  double prev = std::numeric_limits<double>::infinity();
  for (double rho : {0.01, 0.1, 0.5, 1.0, 5.0, 50.0}) {
    const PepProblem p = build_problem(base.eigvals, pair, rho, 2.0, 2);
    const double g = pep_bound(p, m);
    CHECK(g <= prev + 1e-15);
    prev = g;
  }
}

TEST_CASE("schur complement block matches the quadratic constraint") {
  RngStream rng(53);
  const SyntheticInstance inst = make_instance(rng, 3, 2, 0.7, 1.3, 2.0);
  const PepProblem& p = inst.problem;
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXcd omega = random_psd(rng, 3);
    Eigen::MatrixXcd b = p.rho * omega;
    b.diagonal() += p.a_diag.cwiseInverse().cast<cd>();
    const double quad = p.mu.dot(b.llt().solve(p.mu)).real();
    for (double eta : {0.5 * quad, quad + 1e-9 + 0.5 * std::abs(quad)}) {
      Eigen::MatrixXcd block(4, 4);
      block.topLeftCorner(3, 3) = b;
      block.topRightCorner(3, 1) = p.mu;
      block.bottomLeftCorner(1, 3) = p.mu.adjoint();
      block(3, 3) = eta;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
      const bool psd = es.eigenvalues().minCoeff() >= -1e-9;
      CHECK(psd == (quad <= eta));
    }
  }
}

TEST_CASE("chernoff oracle is exact for the zero precoder") {
  RngStream rng(61);
  const SyntheticInstance inst = make_instance(rng, 3, 2, 0.5, 1.0, 2.0);
  const OracleEstimate est =
      chernoff_oracle(inst.problem, Eigen::MatrixXcd::Zero(3, 2), inst.est_ch,
                      inst.corr, inst.eigvals, 10000, rng);
  CHECK(est.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("closed-form bound agrees with the Monte Carlo oracle") {
  RngStream rng(67);
  for (double xi : {0.0, 0.5, 0.9}) {
    const SyntheticInstance inst = make_instance(rng, 4, 2, xi, 0.8, 2.0);
    const Eigen::MatrixXcd m =
        std::sqrt(2.0) * random_matrix(rng, 4, 2).normalized();
    RngStream oracle_rng = RngStream::derive(inst.problem.rank(), 0xacc, 77);
    const OracleEstimate est = chernoff_oracle(inst.problem, m, inst.est_ch, inst.corr,
                                               inst.eigvals, 200000, oracle_rng);
    const double closed = pep_bound(inst.problem, m);
    CHECK(std::abs(est.mean - closed) <= 3.0 * est.std_error);
  }
}
