#include "jsdd/opt_individual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace jsdd {

namespace {

Eigen::MatrixXcd reshape_vec(const Eigen::VectorXcd& x, int rows, int cols) {
  return Eigen::Map<const Eigen::MatrixXcd>(x.data(), rows, cols);
}

Eigen::VectorXcd to_vec(const Eigen::MatrixXcd& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

double logdet_psd(const Eigen::MatrixXcd& h) {
  Eigen::LLT<Eigen::MatrixXcd> llt(h);
  double acc = 0.0;
  for (int i = 0; i < h.rows(); ++i) acc += std::log(llt.matrixLLT()(i, i).real());
  return 2.0 * acc;
}

}  // namespace

// --- SDR: projected gradient on the lifted convex problem -------------------

Eigen::MatrixXcd project_psd_trace(const Eigen::MatrixXcd& h, double cap) {
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  if (lam.sum() > cap) {
    // Simplex-style water shift: lambda_i <- max(lambda_i - theta, 0) with
    // sum equal to cap.
    std::vector<double> sorted(lam.data(), lam.data() + lam.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double prefix = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      prefix += sorted[k];
      const double cand = (prefix - cap) / static_cast<double>(k + 1);
      if (k + 1 == sorted.size() || sorted[k + 1] <= cand) {
        theta = cand;
        break;
      }
    }
    lam = (lam.array() - theta).max(0.0);
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

SdrResult solve_sdr(const PepProblem& p, const SolverOptions& opts) {
  const int r = p.rank();
  SdrResult res;
  Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(r, r);
  OmegaEval cur = objective_omega(p, omega);
  res.trace.objective_per_iter.push_back(cur.value);

  double step = opts.step_init;
  for (int it = 0; it < opts.pg_max_iters; ++it) {
    Eigen::MatrixXcd trial;
    OmegaEval next;
    bool stalled = false;
    while (true) {
      trial = project_psd_trace(omega - step * cur.grad, p.power_cap);
      next = objective_omega(p, trial);
      const double lin = (cur.grad.adjoint() * (trial - omega)).trace().real();
      if (next.value <= cur.value + 1e-4 * lin) break;
      step *= 0.5;
      if (step < 1e-18) {
        stalled = true;
        break;
      }
    }
    if (stalled) {
      res.trace.converged = true;
      break;
    }
    const double drop = cur.value - next.value;
    omega = trial;
    cur = next;
    res.trace.objective_per_iter.push_back(cur.value);
    res.trace.iters = it + 1;
    if (drop <= opts.rel_tol * std::max(1.0, std::abs(cur.value))) {
      res.trace.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1e12);
  }
  res.omega = omega;
  return res;
}

KktMultipliers estimate_kkt_multipliers(const PepProblem& p, const Eigen::MatrixXcd& omega) {
  const int r = p.rank();
  Eigen::MatrixXcd b = p.rho * 0.5 * (omega + omega.adjoint());
  b.diagonal() += p.a_diag.cwiseInverse().cast<cd>();
  const Eigen::MatrixXcd b_tilde =
      Eigen::LLT<Eigen::MatrixXcd>(b).solve(Eigen::MatrixXcd::Identity(r, r));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (omega + omega.adjoint()));
  const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> active;
  for (int i = 0; i < r; ++i) {
    if (es.eigenvalues()(i) > 1e-8 * std::max(lam_max, 1e-300)) active.push_back(i);
  }
  if (active.empty()) return {0.0, 0.0};

  const Eigen::MatrixXcd rank1 =
      p.rho * (b_tilde * p.mu * p.mu.adjoint() * b_tilde).transpose();
  const Eigen::MatrixXcd lin = p.rho * b_tilde.transpose();

  // Stationarity restricted to range(omega): kappa2 u - kappa1 (rank1 u) = lin u.
  const bool fit_kappa1 = p.mu.norm() > 1e-14;
  const int cols = fit_kappa1 ? 2 : 1;
  Eigen::MatrixXd lhs(2 * r * static_cast<int>(active.size()), cols);
  Eigen::VectorXd rhs(2 * r * static_cast<int>(active.size()));
  int row = 0;
  for (int idx : active) {
    const Eigen::VectorXcd u = es.eigenvectors().col(idx);
    const Eigen::VectorXcd wu = rank1 * u;
    const Eigen::VectorXcd ru = lin * u;
    for (int c = 0; c < r; ++c) {
      lhs(row, 0) = u(c).real();
      if (fit_kappa1) lhs(row, 1) = -wu(c).real();
      rhs(row) = ru(c).real();
      ++row;
      lhs(row, 0) = u(c).imag();
      if (fit_kappa1) lhs(row, 1) = -wu(c).imag();
      rhs(row) = ru(c).imag();
      ++row;
    }
  }
  const Eigen::VectorXd sol = lhs.colPivHouseholderQr().solve(rhs);
  KktMultipliers out;
  out.kappa2 = sol(0);
  out.kappa1 = fit_kappa1 ? sol(1) : 0.0;
  return out;
}

RankCheck rank_sufficiency(const PepProblem& p, const Eigen::MatrixXcd& omega,
                           double kappa2, double tol) {
  const int r = p.rank();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> om_es(0.5 * (omega + omega.adjoint()));
  const double om_max = om_es.eigenvalues().cwiseAbs().maxCoeff();
  const bool omega_zero = om_max <= 1e-14;

  Eigen::MatrixXcd b = p.rho * 0.5 * (omega + omega.adjoint());
  b.diagonal() += p.a_diag.cwiseInverse().cast<cd>();
  const Eigen::MatrixXcd b_tilde =
      Eigen::LLT<Eigen::MatrixXcd>(b).solve(Eigen::MatrixXcd::Identity(r, r));
  const Eigen::MatrixXcd lhs_mat =
      kappa2 * Eigen::MatrixXcd::Identity(r, r) - p.rho * b_tilde.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (lhs_mat + lhs_mat.adjoint()));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  RankCheck check;
  if (top > 0.0) {
    for (int i = 0; i < r; ++i) {
      if (std::abs(es.eigenvalues()(i)) > tol * top) ++check.rank_lhs;
    }
  }
  check.holds = omega_zero || check.rank_lhs >= r + 1 - p.n_streams;
  return check;
}

RankCheck rank_sufficiency(const PepProblem& p, const Eigen::MatrixXcd& omega) {
  return rank_sufficiency(p, omega, std::max(0.0, estimate_kkt_multipliers(p, omega).kappa2));
}

Precoder extract_or_randomize(const PepProblem& p, const Eigen::MatrixXcd& omega,
                              const SolverOptions& opts, RngStream& rng) {
  const int r = p.rank();
  const int n = p.n_streams;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (omega + omega.adjoint()));
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double lam_max = lam.maxCoeff();
  int num_rank = 0;
  for (int i = 0; i < r; ++i) {
    if (lam(i) > 1e-8 * lam_max) ++num_rank;
  }

  Precoder out;
  out.m = Eigen::MatrixXcd::Zero(r, n);
  if (lam_max <= 0.0) return out;

  if (num_rank <= n) {
    int col = 0;
    for (int i = r - 1; i >= 0 && col < n; --i) {  // descending eigenvalues
      if (lam(i) > 1e-8 * lam_max) {
        out.m.col(col++) = std::sqrt(lam(i)) * es.eigenvectors().col(i);
      }
    }
    return out;
  }

  const Eigen::MatrixXcd half =
      es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  const double entry_sd = std::sqrt(1.0 / n);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd g(r, n);
  for (int trial = 0; trial < opts.randomization_count; ++trial) {
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = entry_sd * rng.cgauss();
    }
    Eigen::MatrixXcd cand = half * g;
    const double pw = cand.squaredNorm();
    if (pw > p.power_cap) cand *= std::sqrt(p.power_cap / pw);
    const double val = objective(p, cand);
    if (val < best) {
      best = val;
      out.m = cand;
    }
  }
  return out;
}

// --- surrogate machinery -----------------------------------------------—--

SurrogateExpansion build_surrogate(const PepProblem& p, const Eigen::MatrixXcd& m_hat) {
  const int r = p.rank();
  const int n = static_cast<int>(m_hat.cols());
  SurrogateExpansion s;
  s.c_diag = (p.rho * p.a_diag).cwiseSqrt();
  s.omega_vec = p.a_diag.cwiseSqrt().cast<cd>().asDiagonal() * p.mu;
  s.m_hat = m_hat;

  const Eigen::MatrixXcd cm = s.c_diag.cast<cd>().asDiagonal() * m_hat;  // C M
  const Eigen::MatrixXcd g_hat =
      cm.adjoint() * cm + Eigen::MatrixXcd::Identity(n, n);
  s.g_hat_inv = Eigen::LLT<Eigen::MatrixXcd>(g_hat).solve(Eigen::MatrixXcd::Identity(n, n));
  s.p_hat_inv = Eigen::MatrixXcd::Identity(r, r) + cm * cm.adjoint();

  s.gamma = s.g_hat_inv * cm.adjoint() * s.omega_vec;
  s.xi_mat = s.g_hat_inv * cm.adjoint() * s.p_hat_inv * cm * s.g_hat_inv;
  s.gamma_lin = s.c_diag.cast<cd>().asDiagonal() *
                ((s.omega_vec * s.omega_vec.adjoint() + s.p_hat_inv) * cm * s.g_hat_inv);

  s.a1 = s.gamma.squaredNorm();
  s.a2 = s.xi_mat.trace().real() - logdet_psd(s.p_hat_inv) +
         (s.p_hat_inv.trace().real() - r);
  // c = omega^H omega - (b + ln det A^{-1})
  double logdet_a = 0.0;
  for (int i = 0; i < r; ++i) logdet_a += std::log(p.a_diag(i));
  s.c_const = s.omega_vec.squaredNorm() - (p.const_b - logdet_a);
  return s;
}

Eigen::MatrixXcd SurrogateExpansion::psi() const {
  const int r = static_cast<int>(c_diag.size());
  const int n = static_cast<int>(gamma.size());
  const Eigen::MatrixXcd s_mat = gamma * gamma.adjoint() + xi_mat;
  const Eigen::VectorXd d = c_diag.cwiseAbs2();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(r * n, r * n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      const cd f = s_mat(l, j);  // S^T(j, l)
      for (int i = 0; i < r; ++i) out(j * r + i, l * r + i) = f * d(i);
    }
  }
  return out;
}

Eigen::VectorXcd SurrogateExpansion::beta() const { return to_vec(gamma_lin); }

double SurrogateExpansion::f1(const Eigen::MatrixXcd& m) const {
  const int n = static_cast<int>(m.cols());
  const Eigen::MatrixXcd cm = c_diag.cast<cd>().asDiagonal() * m;
  const Eigen::MatrixXcd g = cm.adjoint() * cm + Eigen::MatrixXcd::Identity(n, n);
  const Eigen::VectorXcd t = cm.adjoint() * omega_vec;
  return -t.dot(Eigen::LLT<Eigen::MatrixXcd>(g).solve(t)).real();
}

double SurrogateExpansion::f2(const Eigen::MatrixXcd& m) const {
  const int n = static_cast<int>(m.cols());
  const Eigen::MatrixXcd cm = c_diag.cast<cd>().asDiagonal() * m;
  const Eigen::MatrixXcd g = cm.adjoint() * cm + Eigen::MatrixXcd::Identity(n, n);
  return -logdet_psd(g);  // ln det P = -ln det(I + C M M^H C^H)
}

double SurrogateExpansion::f1_hat(const Eigen::MatrixXcd& m) const {
  const Eigen::MatrixXcd cm = c_diag.cast<cd>().asDiagonal() * m;
  const double quad = (cm * gamma).squaredNorm();
  const cd lin = (m.adjoint() * (c_diag.cast<cd>().asDiagonal() *
                                 (omega_vec * omega_vec.adjoint() *
                                  (c_diag.cast<cd>().asDiagonal() * m_hat) * g_hat_inv)))
                     .trace();
  return quad - 2.0 * lin.real() + a1;
}

double SurrogateExpansion::f2_hat(const Eigen::MatrixXcd& m) const {
  const Eigen::MatrixXcd cm = c_diag.cast<cd>().asDiagonal() * m;
  const double quad = (cm.adjoint() * cm * xi_mat).trace().real();
  const cd lin = (m.adjoint() * (c_diag.cast<cd>().asDiagonal() *
                                 (p_hat_inv * (c_diag.cast<cd>().asDiagonal() * m_hat) *
                                  g_hat_inv)))
                     .trace();
  return quad - 2.0 * lin.real() + a2;
}

double SurrogateExpansion::surrogate(const Eigen::MatrixXcd& m) const {
  const Eigen::VectorXcd x = to_vec(m);
  const cd lin = beta().dot(x);
  return (x.adjoint() * psi() * x)(0).real() - 2.0 * lin.real() + d_const();
}

// --- QCQP-1 -----------------------------------------------------------—--

Eigen::VectorXcd qcqp1_solve(const Eigen::MatrixXcd& psd, const Eigen::VectorXcd& lin,
                             double cap, double bisect_tol) {
  if (!(cap > 0.0)) throw std::invalid_argument("power cap must be positive");
  const int n = static_cast<int>(lin.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (psd + psd.adjoint()));
  const Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXcd b = es.eigenvectors().adjoint() * lin;
  const double d_max = d.maxCoeff();
  const double d_floor = std::max(d_max, 1.0) * 1e-14;

  // Minimum-norm stationary point; directions with zero curvature and a
  // nonzero linear pull force the boundary.
  bool unbounded_dir = false;
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  double norm_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    if (d(i) > d_floor) {
      y(i) = b(i) / d(i);
      norm_sq += std::norm(y(i));
    } else if (std::abs(b(i)) > 1e-14 * std::max(1.0, lin.norm())) {
      unbounded_dir = true;
    }
  }
  if (!unbounded_dir && norm_sq <= cap) {
    return es.eigenvectors() * y;
  }

  // ||x(t)||^2 with x(t) = (Psi + t I)^{-1} beta is strictly decreasing in t.
  const auto norm_at = [&](double t) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::norm(b(i)) / ((d(i) + t) * (d(i) + t));
    return acc;
  };
  double hi = std::max(lin.norm() / std::sqrt(cap), 1e-300);
  while (norm_at(hi) > cap) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = norm_at(mid);
    if (std::abs(v - cap) <= bisect_tol * std::max(1.0, cap)) {
      lo = hi = mid;
      break;
    }
    (v > cap ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
  }
  const double t_star = 0.5 * (lo + hi);
  for (int i = 0; i < n; ++i) y(i) = b(i) / (d(i) + t_star);
  return es.eigenvectors() * y;
}

// --- SCA --------------------------------------------------------------—--

Precoder random_start(const PepProblem& p, std::uint64_t seed) {
  RngStream rng = RngStream::derive(seed, 0x5cau, p.rank(), p.n_streams);
  Precoder m;
  m.m.resize(p.rank(), p.n_streams);
  for (int i = 0; i < p.rank(); ++i) {
    for (int j = 0; j < p.n_streams; ++j) m.m(i, j) = rng.cgauss();
  }
  m.m *= std::sqrt(p.power_cap / m.m.squaredNorm());
  return m;
}

ScaResult solve_sca(const PepProblem& p, const Precoder& m0, const SolverOptions& opts) {
  if (m0.m.rows() != p.rank() || m0.m.cols() != p.n_streams) {
    throw std::invalid_argument("start point dimension mismatch");
  }
  if (m0.m.squaredNorm() > p.power_cap * (1.0 + 1e-9)) {
    throw std::invalid_argument("start point violates the power constraint");
  }
  ScaResult res;
  Eigen::MatrixXcd m = m0.m;
  double f = objective(p, m);
  res.trace.objective_per_iter.push_back(f);

  for (int it = 0; it < opts.max_iters; ++it) {
    const SurrogateExpansion s = build_surrogate(p, m);
    const Eigen::VectorXcd x =
        qcqp1_solve(s.psi(), s.beta(), p.power_cap, opts.bisect_tol);
    m = reshape_vec(x, p.rank(), p.n_streams);
    const double f_new = objective(p, m);
    res.trace.objective_per_iter.push_back(f_new);
    res.trace.iters = it + 1;
    if (std::abs(f - f_new) <= opts.rel_tol * std::max(1.0, std::abs(f))) {
      res.trace.converged = true;
      f = f_new;
      break;
    }
    f = f_new;
  }
  res.precoder.m = m;
  return res;
}

ScaResult solve_sca(const PepProblem& p, std::uint64_t init_seed, const SolverOptions& opts) {
  return solve_sca(p, random_start(p, init_seed), opts);
}

// --- closed-form special cases ----------------------------------------—--

Eigen::VectorXd waterfill(const Eigen::VectorXd& gains, double total, int n) {
  if (n < 1 || n > gains.size()) throw std::invalid_argument("bad stream count");
  if (!(total > 0.0)) throw std::invalid_argument("power budget must be positive");
  for (int i = 0; i < n; ++i) {
    if (!(gains(i) > 0.0)) throw std::invalid_argument("gains must be positive");
  }
  Eigen::VectorXd inv = gains.head(n).cwiseInverse();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return inv(a) < inv(b); });

  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  double prefix = 0.0;
  int active = 0;
  double level = 0.0;
  for (int k = 0; k < n; ++k) {
    prefix += inv(order[k]);
    const double cand = (total + prefix) / static_cast<double>(k + 1);
    if (cand > inv(order[k])) {
      active = k + 1;
      level = cand;
    }
  }
  for (int k = 0; k < active; ++k) {
    q(order[k]) = level - inv(order[k]);
  }
  return q;
}

Precoder waterfill_high_snr(const PepProblem& p) {
  const Eigen::VectorXd gains = p.rho * p.a_diag.head(p.n_streams);
  const Eigen::VectorXd q = waterfill(gains, p.power_cap, p.n_streams);
  Precoder m;
  m.m = Eigen::MatrixXcd::Zero(p.rank(), p.n_streams);
  for (int i = 0; i < p.n_streams; ++i) m.m(i, i) = std::sqrt(q(i));
  return m;
}

Precoder waterfill_no_csi(const PepProblem& p) {
  if (p.mu.norm() > 1e-12 * std::max(1.0, p.a_diag.maxCoeff())) {
    throw std::invalid_argument("no-CSI solution requires mu = 0 (xi = 0)");
  }
  return waterfill_high_snr(p);
}

Precoder solve_low_snr(const PepProblem& p, const Eigen::VectorXcd& est_ch, double corr,
                       const Eigen::VectorXd& eigvals) {
  const int r = p.rank();
  if (est_ch.size() != r || eigvals.size() != r) {
    throw std::invalid_argument("raw channel data dimension mismatch");
  }
  // w = A^{1/2} mu = corr * A^{-1/2} est_ch
  const Eigen::VectorXcd w =
      corr * p.a_diag.cwiseSqrt().cwiseInverse().cast<cd>().asDiagonal() * est_ch;

  Eigen::VectorXcd top_dir;
  if (w.norm() < 1e-14) {
    top_dir = Eigen::VectorXcd::Zero(r);
    top_dir(0) = 1.0;  // Theta diagonal with eigenvalues already descending
  } else {
    const Eigen::VectorXcd lw = eigvals.cwiseSqrt().cast<cd>().asDiagonal() * w;
    Eigen::MatrixXcd theta = lw * lw.adjoint();
    theta.diagonal() += eigvals.cast<cd>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(theta);
    top_dir = es.eigenvectors().col(r - 1);
  }
  Precoder m;
  m.m = Eigen::MatrixXcd::Zero(r, p.n_streams);
  m.m.col(0) = std::sqrt(p.power_cap) * top_dir;
  return m;
}

}  // namespace jsdd
