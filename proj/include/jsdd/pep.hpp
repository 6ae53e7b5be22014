#pragma once

#include <Eigen/Dense>
#include <complex>

#include "jsdd/channel.hpp"
#include "jsdd/rng.hpp"

namespace jsdd {

/// Per-user pairwise-error-probability optimization datum. The conditioning
/// matrix A = (1 - xi^2) Lambda is diagonal by construction and kept as its
/// diagonal (positive, non-increasing).
struct PepProblem {
  Eigen::VectorXd a_diag;  // diag of A
  Eigen::VectorXcd mu;     // xi * A^{-1} * est_ch
  double rho = 0.0;        // rho_min > 0
  double power_cap = 0.0;  // alpha = T P_max / L
  int n_streams = 0;       // N <= r
  double const_b = 0.0;    // mu^H A mu + ln 2 + ln det A

  int rank() const { return static_cast<int>(a_diag.size()); }
};

/// Precoding matrix M (r x N); the power constraint is ||M||_F^2 <= alpha.
struct Precoder {
  Eigen::MatrixXcd m;
};

PepProblem build_problem(const Eigen::VectorXd& eigvals, const EffectiveChannelPair& pair,
                         double rho, double power_cap, int n_streams);
PepProblem build_problem(const ChannelStats& stats, const EffectiveChannelPair& pair,
                         double rho, double power_cap, int n_streams);

/// Chernoff bound on the worst pairwise error probability,
/// det(B^{-1}) exp(mu^H (B^{-1} - A) mu) / (2 det A) with
/// B = rho M M^H + A^{-1}. Evaluated in log domain.
double pep_bound(const PepProblem& p, const Eigen::MatrixXcd& m);
double pep_bound(const PepProblem& p, const Precoder& m);

/// Log of the bound: mu^H B^{-1} mu - ln det B - b.
double objective(const PepProblem& p, const Eigen::MatrixXcd& m);
double objective(const PepProblem& p, const Precoder& m);

struct OmegaEval {
  double value;            // mu^H (rho W + A^{-1})^{-1} mu - ln det(rho W + A^{-1})
  Eigen::MatrixXcd grad;   // Hermitian; first-order change = Re tr(grad^H dW)
};

/// Convex objective in the lifted variable W = M M^H, with analytic gradient.
OmegaEval objective_omega(const PepProblem& p, const Eigen::MatrixXcd& omega);

struct OracleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E[(1/2) exp(-rho ||M^H v||^2)] over the channel
/// conditional v | est_ch. (est_ch, corr, eigvals) must be the raw data that
/// produced the problem.
OracleEstimate chernoff_oracle(const PepProblem& p, const Eigen::MatrixXcd& m,
                               const Eigen::VectorXcd& est_ch, double corr,
                               const Eigen::VectorXd& eigvals, int n_samples,
                               RngStream& rng);

/// Deterministic synthetic instance for solver tests and CLI experiments.
struct SyntheticInstance {
  PepProblem problem;
  Eigen::VectorXd eigvals;
  Eigen::VectorXcd est_ch;
  double corr = 0.0;
};

SyntheticInstance make_instance(RngStream& rng, int rank, int n_streams, double corr,
                                double rho, double power_cap);

}  // namespace jsdd
