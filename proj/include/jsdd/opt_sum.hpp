#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jsdd/opt_individual.hpp"
#include "jsdd/pep.hpp"

namespace jsdd {

enum class SumCriterion { MinMax, Average };

/// Joint design datum: per-user problems (their individual power caps are
/// ignored), rate weights L_k / T, and the shared power budget.
struct SumProblem {
  std::vector<PepProblem> users;
  std::vector<double> weights;
  double total_power = 0.0;
  SumCriterion criterion = SumCriterion::Average;
};

struct SumSolution {
  std::vector<Precoder> precoders;
  std::vector<double> user_power;  // (L_k/T) ||M_k||_F^2
  SolveTrace outer_trace;          // criterion value per outer SCA iteration
  SolveTrace admm_trace;           // inner residuals of the first ADMM solve
  bool converged = false;
};

/// max_k or mean_k of the per-user PEP bounds at the given precoders.
double sum_criterion_value(const SumProblem& prob, SumCriterion crit,
                           const std::vector<Eigen::MatrixXcd>& m_list);

/// SCA outer loop with consensus-ADMM inner solves. The solver warm-starts
/// from the uniform-split individual solution and cross-seeds the two
/// criteria, returning the best candidate under the requested criterion.
SumSolution solve_sum(const SumProblem& prob, const SolverOptions& opts = {});

/// Frozen per-user surrogate with the eigendecomposition needed by the
/// step-1 bisection.
struct SurrogateCache {
  Eigen::MatrixXcd evecs;
  Eigen::VectorXd evals;
  Eigen::VectorXcd beta;        // original coordinates
  Eigen::VectorXcd beta_eig;    // eigenbasis coordinates
  double d_const = 0.0;
  int rows = 0, cols = 0;       // precoder shape

  double phi(const Eigen::VectorXcd& x) const;  // x^H Psi x - 2 Re(beta^H x) + d
};

SurrogateCache cache_surrogate(const PepProblem& p, const Eigen::MatrixXcd& m_hat);

struct Step1Result {
  Eigen::VectorXcd x;
  double tau = 0.0;
  double lambda = 0.0;        // KKT multiplier of the surrogate constraint
  double phi_residual = 0.0;  // phi(x) - ln(tau) at the returned point
  int bisect_iters = 0;
};

/// Appendix-style per-user subproblem: minimize
/// tau + (delta/2)||x - v||^2 + (delta/2)(tau - q)^2 subject to
/// phi(x) <= ln(tau). Interior case returned directly, otherwise the
/// multiplier is bisected on the monotone dual residual.
Step1Result admm_step1(const SurrogateCache& cache, double delta,
                       const Eigen::VectorXcd& v, double q, double bisect_tol);

/// Consensus update of the precoders: projection of X_k - V_k onto the
/// weighted sum-power ball (closed form for equal weights, QCQP-1 after the
/// variable change otherwise). t-updates follow the criterion.
void admm_step2(const std::vector<Eigen::MatrixXcd>& x_list,
                const std::vector<Eigen::MatrixXcd>& v_list,
                const std::vector<double>& tau_list, const std::vector<double>& chi_list,
                const std::vector<double>& weights, double total_power,
                SumCriterion criterion, std::vector<Eigen::MatrixXcd>& m_list,
                std::vector<double>& t_list);

}  // namespace jsdd
