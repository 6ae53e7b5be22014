#include "jsdd/pep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jsdd/kern.hpp"

namespace jsdd {

namespace {

// B = rho M M^H + A^{-1}, positive definite for every M.
Eigen::MatrixXcd form_b(const PepProblem& p, const Eigen::MatrixXcd& m) {
  Eigen::MatrixXcd b = p.rho * (m * m.adjoint());
  b.diagonal() += p.a_diag.cwiseInverse().cast<cd>();
  return b;
}

double logdet_from_llt(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (int i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

}  // namespace

PepProblem build_problem(const Eigen::VectorXd& eigvals, const EffectiveChannelPair& pair,
                         double rho, double power_cap, int n_streams) {
  const int r = static_cast<int>(eigvals.size());
  if (!(pair.corr >= 0.0 && pair.corr < 1.0)) {
    throw std::invalid_argument("correlation must lie in [0, 1); A is singular at 1");
  }
  if (pair.est_ch.size() != r) throw std::invalid_argument("estimate/rank mismatch");
  if (n_streams < 1 || n_streams > r) {
    throw std::invalid_argument("stream count must satisfy 1 <= N <= rank");
  }
  if (!(rho > 0.0) || !(power_cap > 0.0)) {
    throw std::invalid_argument("rho and power cap must be positive");
  }
  for (int i = 0; i < r; ++i) {
    if (!(eigvals(i) > 0.0)) throw std::invalid_argument("eigenvalues must be positive");
  }

  PepProblem p;
  p.a_diag = (1.0 - pair.corr * pair.corr) * eigvals;
  p.mu = pair.corr * p.a_diag.cwiseInverse().cast<cd>().asDiagonal() * pair.est_ch;
  p.rho = rho;
  p.power_cap = power_cap;
  p.n_streams = n_streams;
  double quad = 0.0, logdet = 0.0;
  for (int i = 0; i < r; ++i) {
    quad += p.a_diag(i) * std::norm(p.mu(i));
    logdet += std::log(p.a_diag(i));
  }
  p.const_b = quad + std::log(2.0) + logdet;
  return p;
}

PepProblem build_problem(const ChannelStats& stats, const EffectiveChannelPair& pair,
                         double rho, double power_cap, int n_streams) {
  return build_problem(stats.eigvals, pair, rho, power_cap, n_streams);
}

double objective(const PepProblem& p, const Eigen::MatrixXcd& m) {
  if (m.rows() != p.rank()) throw std::invalid_argument("precoder rank mismatch");
  const Eigen::MatrixXcd b = form_b(p, m);
  Eigen::LLT<Eigen::MatrixXcd> llt(b);
  const Eigen::VectorXcd sol = llt.solve(p.mu);
  const double quad = p.mu.dot(sol).real();
  return quad - logdet_from_llt(llt) - p.const_b;
}

double objective(const PepProblem& p, const Precoder& m) { return objective(p, m.m); }

double pep_bound(const PepProblem& p, const Eigen::MatrixXcd& m) {
  return std::exp(objective(p, m));
}

double pep_bound(const PepProblem& p, const Precoder& m) { return pep_bound(p, m.m); }

OmegaEval objective_omega(const PepProblem& p, const Eigen::MatrixXcd& omega) {
  const int r = p.rank();
  if (omega.rows() != r || omega.cols() != r) {
    throw std::invalid_argument("omega dimension mismatch");
  }
  Eigen::MatrixXcd b = p.rho * 0.5 * (omega + omega.adjoint());
  b.diagonal() += p.a_diag.cwiseInverse().cast<cd>();

  Eigen::LLT<Eigen::MatrixXcd> llt(b);
  const Eigen::MatrixXcd b_inv = llt.solve(Eigen::MatrixXcd::Identity(r, r));
  const Eigen::VectorXcd w = b_inv * p.mu;

  OmegaEval out;
  out.value = p.mu.dot(w).real() - logdet_from_llt(llt);
  out.grad = -p.rho * (b_inv + w * w.adjoint());
  out.grad = 0.5 * (out.grad + out.grad.adjoint()).eval();
  return out;
}

OracleEstimate chernoff_oracle(const PepProblem& p, const Eigen::MatrixXcd& m,
                               const Eigen::VectorXcd& est_ch, double corr,
                               const Eigen::VectorXd& eigvals, int n_samples,
                               RngStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  const int r = p.rank();
  const int n = static_cast<int>(m.cols());
  if (est_ch.size() != r || eigvals.size() != r) {
    throw std::invalid_argument("raw channel data dimension mismatch");
  }
  const double err_scale = std::sqrt(1.0 - corr * corr);
  Eigen::VectorXd sd = eigvals.cwiseSqrt();
  Eigen::VectorXcd v(r);
  Eigen::MatrixXcd m_cols = m;  // column-major access for the kernels

  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    for (int i = 0; i < r; ++i) {
      v(i) = corr * est_ch(i) + err_scale * sd(i) * rng.cgauss();
    }
    double energy = 0.0;
    for (int c = 0; c < n; ++c) {
      energy += std::norm(kern::cdot(m_cols.col(c).data(), v.data(), r));
    }
    const double w = 0.5 * std::exp(-p.rho * energy);
    sum += w;
    sum_sq += w * w;
  }
  OracleEstimate est;
  est.mean = sum / n_samples;
  const double var = std::max(0.0, sum_sq / n_samples - est.mean * est.mean);
  est.std_error = std::sqrt(var / n_samples);
  return est;
}

SyntheticInstance make_instance(RngStream& rng, int rank, int n_streams, double corr,
                                double rho, double power_cap) {
  SyntheticInstance inst;
  inst.corr = corr;
  inst.eigvals.resize(rank);
  for (int i = 0; i < rank; ++i) inst.eigvals(i) = 0.2 + 1.8 * rng.u01();
  std::sort(inst.eigvals.data(), inst.eigvals.data() + rank, std::greater<double>());
  EffectiveChannelPair pair = draw_effective_pair(inst.eigvals, corr, rng);
  inst.est_ch = pair.est_ch;
  inst.problem = build_problem(inst.eigvals, pair, rho, power_cap, n_streams);
  return inst;
}

}  // namespace jsdd
