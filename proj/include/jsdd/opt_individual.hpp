#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jsdd/pep.hpp"
#include "jsdd/rng.hpp"

namespace jsdd {

struct SolverOptions {
  int max_iters = 100;            // SCA outer iterations
  double rel_tol = 1e-6;          // relative objective-change stop
  double bisect_tol = 1e-10;
  int randomization_count = 1000;
  double step_init = 1.0;
  int pg_max_iters = 2000;        // projected gradient iterations
  // sum-power solver knobs
  int admm_max_inner = 500;
  double admm_resid_tol = 1e-6;
  double admm_penalty = 1.0;      // delta > 0
};

struct SolveTrace {
  std::vector<double> objective_per_iter;
  std::vector<double> residual_per_iter;  // ADMM primal residuals (empty otherwise)
  bool converged = false;
  int iters = 0;
};

// --- SDR route -------------------------------------------------------------

struct SdrResult {
  Eigen::MatrixXcd omega;  // r x r PSD with trace <= alpha
  SolveTrace trace;
};

/// Minimizes the convex lifted objective over {W PSD, tr W <= alpha} by
/// projected gradient with Armijo backtracking; the feasible set admits an
/// exact eigenvalue-space projection.
SdrResult solve_sdr(const PepProblem& p, const SolverOptions& opts = {});

/// Exact Euclidean projection onto {W Hermitian PSD, tr W <= cap}.
Eigen::MatrixXcd project_psd_trace(const Eigen::MatrixXcd& h, double cap);

struct KktMultipliers {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
};

/// Least-squares recovery of the trace and slack multipliers from the
/// stationarity condition restricted to range(omega).
KktMultipliers estimate_kkt_multipliers(const PepProblem& p, const Eigen::MatrixXcd& omega);

struct RankCheck {
  bool holds = false;
  int rank_lhs = 0;
};

/// Sufficient condition for the relaxation to be tight:
/// rank(kappa2 I - rho Btilde^T) >= r + 1 - N implies rank(omega) <= N.
RankCheck rank_sufficiency(const PepProblem& p, const Eigen::MatrixXcd& omega,
                           double kappa2, double tol = 1e-6);
RankCheck rank_sufficiency(const PepProblem& p, const Eigen::MatrixXcd& omega);

/// Eigen-extraction when rank(omega) <= N, otherwise Gaussian randomization:
/// candidates omega^{1/2} G with G ~ CN(0, 1/N) entries, power-clipped, best
/// objective kept.
Precoder extract_or_randomize(const PepProblem& p, const Eigen::MatrixXcd& omega,
                              const SolverOptions& opts, RngStream& rng);

// --- SCA route ---------------------------------------------------------—--

/// Convex majorizer of the objective at an expansion point, in the quadratic
/// form phi(x) = x^H Psi x - 2 Re(beta^H x) + d over x = vec(M). The pieces
/// are exposed so the majorization inequalities can be checked directly.
struct SurrogateExpansion {
  Eigen::VectorXd c_diag;       // C = sqrt(rho) A^{1/2} (diagonal)
  Eigen::VectorXcd omega_vec;   // A^{1/2} mu
  Eigen::MatrixXcd m_hat;
  Eigen::MatrixXcd g_hat_inv;   // (M^H C^H C M + I)^{-1} at the expansion point
  Eigen::MatrixXcd p_hat_inv;   // I + C M M^H C^H
  Eigen::VectorXcd gamma;
  Eigen::MatrixXcd xi_mat;
  Eigen::MatrixXcd gamma_lin;   // linear-term matrix
  double a1 = 0.0, a2 = 0.0, c_const = 0.0;

  Eigen::MatrixXcd psi() const;    // (gamma gamma^H + Xi)^T kron diag(c)^2
  Eigen::VectorXcd beta() const;   // vec(gamma_lin)
  double d_const() const { return c_const + a1 + a2; }

  // Exact split objective pieces and their majorizers (for property tests).
  double f1(const Eigen::MatrixXcd& m) const;
  double f2(const Eigen::MatrixXcd& m) const;
  double f1_hat(const Eigen::MatrixXcd& m) const;
  double f2_hat(const Eigen::MatrixXcd& m) const;
  double surrogate(const Eigen::MatrixXcd& m) const;  // phi(vec(M))
};

SurrogateExpansion build_surrogate(const PepProblem& p, const Eigen::MatrixXcd& m_hat);

struct ScaResult {
  Precoder precoder;
  SolveTrace trace;
};

/// Successive convex approximation: minimize the majorizer over the power
/// ball (a QCQP-1) and re-expand until the objective change stalls.
ScaResult solve_sca(const PepProblem& p, const Precoder& m0, const SolverOptions& opts = {});
/// Random start drawn on the power sphere from the given seed.
ScaResult solve_sca(const PepProblem& p, std::uint64_t init_seed,
                    const SolverOptions& opts = {});

/// Random precoder with ||M||_F^2 = alpha.
Precoder random_start(const PepProblem& p, std::uint64_t seed);

/// Minimizes x^H Psi x - 2 Re(beta^H x) subject to ||x||^2 <= cap. Interior
/// stationary points are returned directly (minimum-norm convention for
/// singular Psi); otherwise the multiplier is bisected until the boundary
/// constraint is met.
Eigen::VectorXcd qcqp1_solve(const Eigen::MatrixXcd& psd, const Eigen::VectorXcd& lin,
                             double cap, double bisect_tol = 1e-10);

// --- closed-form special cases ---------------------------------------------

/// Waterfilling q_i = [1/k - 1/(rho a_i)]^+ over the first n slots with
/// sum q = total; exact water level.
Eigen::VectorXd waterfill(const Eigen::VectorXd& gains, double total, int n);

/// High-SNR solution: waterfilling over the top-N conditioned eigenvalues,
/// M = [diag(sqrt(q)); 0].
Precoder waterfill_high_snr(const PepProblem& p);

/// Low-SNR solution: single beamforming direction given by the top
/// eigenvector of Theta = Lambda + Lambda^{1/2} w w^H Lambda^{1/2} with
/// w = A^{1/2} mu, all power on the first stream.
Precoder solve_low_snr(const PepProblem& p, const Eigen::VectorXcd& est_ch, double corr,
                       const Eigen::VectorXd& eigvals);

/// No-CSI solution (mu = 0): waterfilling over Lambda at the given rho.
Precoder waterfill_no_csi(const PepProblem& p);

}  // namespace jsdd
