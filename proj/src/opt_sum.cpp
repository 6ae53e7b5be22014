#include "jsdd/opt_sum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jsdd {

namespace {

Eigen::VectorXcd to_vec(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd reshape_vec(const Eigen::VectorXcd& x, int rows, int cols) {
  return Eigen::Map<const Eigen::MatrixXcd>(x.data(), rows, cols);
}

void validate(const SumProblem& prob) {
  if (prob.users.empty()) throw std::invalid_argument("sum problem needs users");
  if (prob.users.size() != prob.weights.size()) {
    throw std::invalid_argument("one rate weight per user required");
  }
  for (double w : prob.weights) {
    if (!(w > 0.0)) throw std::invalid_argument("rate weights must be positive");
  }
  if (!(prob.total_power > 0.0)) throw std::invalid_argument("power budget must be positive");
}

// log of the criterion value (monotone in the criterion itself).
double log_criterion(const SumProblem& prob, SumCriterion crit,
                     const std::vector<Eigen::MatrixXcd>& m_list) {
  const int k = static_cast<int>(prob.users.size());
  std::vector<double> logs(k);
  for (int i = 0; i < k; ++i) logs[i] = objective(prob.users[i], m_list[i]);
  const double top = *std::max_element(logs.begin(), logs.end());
  if (crit == SumCriterion::MinMax) return top;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - top);
  return top + std::log(acc / k);
}

}  // namespace

double sum_criterion_value(const SumProblem& prob, SumCriterion crit,
                           const std::vector<Eigen::MatrixXcd>& m_list) {
  return std::exp(log_criterion(prob, crit, m_list));
}

SurrogateCache cache_surrogate(const PepProblem& p, const Eigen::MatrixXcd& m_hat) {
  const SurrogateExpansion s = build_surrogate(p, m_hat);
  SurrogateCache cache;
  cache.rows = static_cast<int>(m_hat.rows());
  cache.cols = static_cast<int>(m_hat.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.psi());
  cache.evecs = es.eigenvectors();
  cache.evals = es.eigenvalues().cwiseMax(0.0);
  cache.beta = s.beta();
  cache.beta_eig = cache.evecs.adjoint() * cache.beta;
  cache.d_const = s.d_const();
  return cache;
}

double SurrogateCache::phi(const Eigen::VectorXcd& x) const {
  const Eigen::VectorXcd xe = evecs.adjoint() * x;
  double quad = 0.0;
  for (int i = 0; i < xe.size(); ++i) quad += evals(i) * std::norm(xe(i));
  return quad - 2.0 * beta_eig.dot(xe).real() + d_const;
}

Step1Result admm_step1(const SurrogateCache& cache, double delta,
                       const Eigen::VectorXcd& v, double q, double bisect_tol) {
  if (!(delta > 0.0)) throw std::invalid_argument("penalty must be positive");
  const int n = static_cast<int>(v.size());
  const Eigen::VectorXcd ve = cache.evecs.adjoint() * v;

  const auto phi_eig = [&](const Eigen::VectorXcd& xe) {
    double quad = 0.0;
    for (int i = 0; i < n; ++i) quad += cache.evals(i) * std::norm(xe(i));
    return quad - 2.0 * cache.beta_eig.dot(xe).real() + cache.d_const;
  };

  Step1Result out;
  const double tau_free = (delta * q - 1.0) / delta;
  if (tau_free > 0.0) {
    const double phi_v = phi_eig(ve);
    if (phi_v <= std::log(tau_free)) {
      out.x = v;
      out.tau = tau_free;
      out.lambda = 0.0;
      out.phi_residual = phi_v - std::log(tau_free);
      return out;
    }
  }

  const double half = 0.5 * delta;
  const auto x_eig_at = [&](double lam) {
    Eigen::VectorXcd xe(n);
    for (int i = 0; i < n; ++i) {
      xe(i) = (half * ve(i) + lam * cache.beta_eig(i)) / (half + lam * cache.evals(i));
    }
    return xe;
  };
  const double dq = delta * q - 1.0;
  const auto tau_at = [&](double lam) {
    return (dq + std::sqrt(dq * dq + 4.0 * delta * lam)) / (2.0 * delta);
  };
  const auto dual_residual = [&](double lam) {
    return phi_eig(x_eig_at(lam)) - std::log(tau_at(lam));
  };

  double hi = 1.0;
  while (dual_residual(hi) > 0.0) {
    hi *= 4.0;
    if (hi > 1e30) {
      throw std::runtime_error("step-1 bisection bracket overflow; surrogate infeasible");
    }
  }
  double lo = 0.0;
  double lam = hi, resid = dual_residual(hi);
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = dual_residual(mid);
    ++out.bisect_iters;
    if (std::abs(r) < bisect_tol) {
      lam = mid;
      resid = r;
      break;
    }
    if (r > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    lam = mid;
    resid = r;
  }
  out.x = cache.evecs * x_eig_at(lam);
  out.tau = tau_at(lam);
  out.lambda = lam;
  out.phi_residual = resid;
  return out;
}

void admm_step2(const std::vector<Eigen::MatrixXcd>& x_list,
                const std::vector<Eigen::MatrixXcd>& v_list,
                const std::vector<double>& tau_list, const std::vector<double>& chi_list,
                const std::vector<double>& weights, double total_power,
                SumCriterion criterion, std::vector<Eigen::MatrixXcd>& m_list,
                std::vector<double>& t_list) {
  const int k = static_cast<int>(x_list.size());
  if (criterion == SumCriterion::Average) {
    for (int i = 0; i < k; ++i) t_list[i] = tau_list[i] + chi_list[i];
  } else {
    double t = 0.0;
    for (int i = 0; i < k; ++i) t += tau_list[i] - chi_list[i];
    t /= k;
    for (int i = 0; i < k; ++i) t_list[i] = t;
  }

  const bool equal_weights = std::all_of(weights.begin(), weights.end(), [&](double w) {
    return std::abs(w - weights.front()) < 1e-15;
  });

  if (equal_weights) {
    const double radius_sq = total_power / weights.front();
    double norm_sq = 0.0;
    for (int i = 0; i < k; ++i) {
      m_list[i] = x_list[i] - v_list[i];
      norm_sq += m_list[i].squaredNorm();
    }
    if (norm_sq > radius_sq) {
      const double scale = std::sqrt(radius_sq / norm_sq);
      for (int i = 0; i < k; ++i) m_list[i] *= scale;
    }
    return;
  }

  // Unequal rates: scale per user by sqrt(w) so the constraint becomes a
  // single Euclidean ball, then solve the QCQP-1.
  int total = 0;
  for (int i = 0; i < k; ++i) total += static_cast<int>(x_list[i].size());
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(total, total);
  Eigen::VectorXcd beta(total);
  int off = 0;
  for (int i = 0; i < k; ++i) {
    const int sz = static_cast<int>(x_list[i].size());
    const Eigen::VectorXcd d = to_vec(x_list[i] - v_list[i]);
    psi.block(off, off, sz, sz) =
        (1.0 / weights[i]) * Eigen::MatrixXcd::Identity(sz, sz);
    beta.segment(off, sz) = d / std::sqrt(weights[i]);
    off += sz;
  }
  const Eigen::VectorXcd sol = qcqp1_solve(psi, beta, total_power);
  off = 0;
  for (int i = 0; i < k; ++i) {
    const int sz = static_cast<int>(x_list[i].size());
    m_list[i] = reshape_vec(sol.segment(off, sz) / std::sqrt(weights[i]),
                            static_cast<int>(x_list[i].rows()),
                            static_cast<int>(x_list[i].cols()));
    off += sz;
  }
}

namespace {

struct RunResult {
  std::vector<Eigen::MatrixXcd> m_list;
  SolveTrace outer_trace;
  SolveTrace admm_trace;
  bool converged = false;
};

RunResult run_sca_admm(const SumProblem& prob, SumCriterion crit,
                       const std::vector<Eigen::MatrixXcd>& init,
                       const SolverOptions& opts) {
  const int k = static_cast<int>(prob.users.size());
  const double delta = opts.admm_penalty;
  RunResult run;
  run.m_list = init;
  double crit_log = log_criterion(prob, crit, run.m_list);
  run.outer_trace.objective_per_iter.push_back(std::exp(crit_log));

  for (int outer = 0; outer < opts.max_iters; ++outer) {
    std::vector<SurrogateCache> caches(k);
    for (int i = 0; i < k; ++i) caches[i] = cache_surrogate(prob.users[i], run.m_list[i]);

    // Consensus variables, frozen-surrogate inner solve.
    std::vector<Eigen::MatrixXcd> m = run.m_list, x = run.m_list;
    std::vector<Eigen::MatrixXcd> duals(k);
    std::vector<double> tau(k), t(k), chi(k, 0.0);
    for (int i = 0; i < k; ++i) {
      duals[i] = Eigen::MatrixXcd::Zero(m[i].rows(), m[i].cols());
      tau[i] = std::exp(objective(prob.users[i], run.m_list[i]));
    }
    if (crit == SumCriterion::Average) {
      t = tau;
    } else {
      const double start = *std::max_element(tau.begin(), tau.end());
      std::fill(t.begin(), t.end(), start);
    }

    bool inner_converged = false;
    SolveTrace inner_trace;
    for (int inner = 0; inner < opts.admm_max_inner; ++inner) {
      for (int i = 0; i < k; ++i) {
        const double q = t[i] + chi[i];
        const Step1Result s1 =
            admm_step1(caches[i], delta, to_vec(m[i] + duals[i]), q, opts.bisect_tol);
        x[i] = reshape_vec(s1.x, caches[i].rows, caches[i].cols);
        tau[i] = s1.tau;
      }
      admm_step2(x, duals, tau, chi, prob.weights, prob.total_power, crit, m, t);
      double resid = 0.0;
      for (int i = 0; i < k; ++i) {
        duals[i] += m[i] - x[i];
        chi[i] += t[i] - tau[i];
        resid = std::max(resid, (m[i] - x[i]).norm());
        resid = std::max(resid, std::abs(t[i] - tau[i]));
      }
      inner_trace.residual_per_iter.push_back(resid);
      inner_trace.objective_per_iter.push_back(
          sum_criterion_value(prob, crit, m));
      inner_trace.iters = inner + 1;
      if (resid < opts.admm_resid_tol) {
        inner_converged = true;
        break;
      }
    }
    inner_trace.converged = inner_converged;
    if (outer == 0) run.admm_trace = inner_trace;

    run.m_list = m;
    const double crit_log_new = log_criterion(prob, crit, run.m_list);
    run.outer_trace.objective_per_iter.push_back(std::exp(crit_log_new));
    run.outer_trace.iters = outer + 1;
    if (std::abs(crit_log_new - crit_log) <= opts.rel_tol) {
      run.converged = true;
      crit_log = crit_log_new;
      break;
    }
    crit_log = crit_log_new;
  }
  run.outer_trace.converged = run.converged;
  return run;
}

}  // namespace

SumSolution solve_sum(const SumProblem& prob, const SolverOptions& opts) {
  validate(prob);
  const int k = static_cast<int>(prob.users.size());

  // Uniform-split warm start: each user solved individually at its share of
  // the budget.
  std::vector<Eigen::MatrixXcd> warm(k);
  for (int i = 0; i < k; ++i) {
    PepProblem pi = prob.users[i];
    pi.power_cap = prob.total_power / (k * prob.weights[i]);
    const ScaResult r = solve_sca(pi, 0x50a1u + static_cast<std::uint64_t>(i), opts);
    warm[i] = r.precoder.m;
  }

  std::vector<std::vector<Eigen::MatrixXcd>> pool;
  pool.push_back(warm);
  const RunResult avg1 = run_sca_admm(prob, SumCriterion::Average, warm, opts);
  pool.push_back(avg1.m_list);
  const RunResult mm1 = run_sca_admm(prob, SumCriterion::MinMax, warm, opts);
  pool.push_back(mm1.m_list);
  const RunResult avg2 = run_sca_admm(prob, SumCriterion::Average, mm1.m_list, opts);
  pool.push_back(avg2.m_list);
  const RunResult mm2 = run_sca_admm(prob, SumCriterion::MinMax, avg1.m_list, opts);
  pool.push_back(mm2.m_list);

  std::size_t best = 0;
  double best_val = log_criterion(prob, prob.criterion, pool[0]);
  for (std::size_t c = 1; c < pool.size(); ++c) {
    const double v = log_criterion(prob, prob.criterion, pool[c]);
    if (v < best_val) {
      best_val = v;
      best = c;
    }
  }

  SumSolution out;
  out.precoders.resize(k);
  out.user_power.resize(k);
  for (int i = 0; i < k; ++i) {
    out.precoders[i].m = pool[best][i];
    out.user_power[i] = prob.weights[i] * pool[best][i].squaredNorm();
  }
  const RunResult& primary = (prob.criterion == SumCriterion::Average) ? avg1 : mm1;
  out.outer_trace = primary.outer_trace;
  out.admm_trace = primary.admm_trace;
  out.converged = primary.converged;
  return out;
}

}  // namespace jsdd
