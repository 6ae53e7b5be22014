#pragma once

// Independent reference computations for the test suites. Everything here is
// deliberately implemented from first principles (adaptive quadrature,
// exhaustive search) and must stay decoupled from the library code paths it
// checks.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

// ---- adaptive Simpson quadrature -------------------------------------------

namespace detail {

template <typename F, typename V>
V simpson_rec(const F& f, double a, double b, V fa, V fm, V fb, V whole, double tol,
              int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const V flm = f(lm), frm = f(rm);
  const V left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const V right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const V delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

template <typename F>
auto adaptive_simpson(const F& f, double a, double b, double tol = 1e-12,
                      int max_depth = 40) {
  const auto fa = f(a);
  const auto fm = f(0.5 * (a + b));
  const auto fb = f(b);
  const auto whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// One-ring covariance entry at lag d by adaptive quadrature.
inline cd covariance_entry(double mean_deg, double spread_deg, int lag,
                           double tol = 1e-13) {
  const double deg = M_PI / 180.0;
  const double lo = (mean_deg - spread_deg) * deg;
  const double hi = (mean_deg + spread_deg) * deg;
  const auto f = [&](double theta) {
    const double phase = -M_PI * lag * std::sin(theta);
    return cd{std::cos(phase), std::sin(phase)};
  };
  return adaptive_simpson(f, lo, hi, tol) / (hi - lo);
}

// ---- exhaustive DFT-column argmin ------------------------------------------

inline int dft_argmin(double xi, int num_antennas) {
  int best = 1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= num_antennas; ++i) {
    const double dist = std::abs(xi - 2.0 * M_PI * (i - 1) / num_antennas);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

inline std::vector<int> dft_selection_bruteforce(double mean_deg, double spread_deg,
                                                 int num_antennas) {
  const double deg = M_PI / 180.0;
  auto wrap = [](double x) {
    double r = std::fmod(x, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    return r;
  };
  const int i_min = dft_argmin(wrap(M_PI * std::sin((mean_deg - spread_deg) * deg)),
                               num_antennas);
  const int i_max = dft_argmin(wrap(M_PI * std::sin((mean_deg + spread_deg) * deg)),
                               num_antennas);
  std::vector<int> out;
  if (i_max >= i_min) {
    for (int i = i_min; i <= i_max; ++i) out.push_back(i);
  } else {
    for (int i = i_min; i <= num_antennas; ++i) out.push_back(i);
    for (int i = 1; i <= i_max; ++i) out.push_back(i);
  }
  return out;
}

// ---- exhaustive joint ML decoding ------------------------------------------

/// Joint maximum likelihood over the full L-symbol product constellation.
/// Codewords are rebuilt from the coefficient matrices directly.
inline std::vector<int> joint_ml(const Eigen::RowVectorXcd& received,
                                 const Eigen::RowVectorXcd& eff_row,
                                 const std::vector<Eigen::MatrixXi>& phi,
                                 const std::vector<Eigen::MatrixXi>& psi,
                                 const std::vector<cd>& points) {
  const int l = static_cast<int>(phi.size());
  const int q = static_cast<int>(points.size());
  std::vector<int> idx(l, 0), best(l, 0);
  double best_metric = std::numeric_limits<double>::infinity();
  long total = 1;
  for (int i = 0; i < l; ++i) total *= q;
  for (long code = 0; code < total; ++code) {
    long rem = code;
    for (int i = 0; i < l; ++i) {
      idx[i] = static_cast<int>(rem % q);
      rem /= q;
    }
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(phi[0].rows(), phi[0].cols());
    for (int i = 0; i < l; ++i) {
      z += points[idx[i]].real() * phi[i].cast<double>().cast<cd>();
      z += cd{0.0, 1.0} * points[idx[i]].imag() * psi[i].cast<double>().cast<cd>();
    }
    const double metric = (received - eff_row * z).squaredNorm();
    if (metric < best_metric - 1e-15) {
      best_metric = metric;
      best = idx;
    }
  }
  return best;
}

// ---- waterfilling by bisection ---------------------------------------------

/// 1-D search for the water level: q_i = max(1/kappa - 1/c_i, 0) with
/// sum q = total.
inline Eigen::VectorXd waterfill_bisect(const Eigen::VectorXd& gains, double total,
                                        int n, double tol = 1e-14) {
  const auto fill = [&](double inv_level) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::max(inv_level - 1.0 / gains(i), 0.0);
    return acc;
  };
  double lo = 0.0, hi = total + 1.0 / gains.minCoeff() + 1.0;
  while (fill(hi) < total) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fill(mid) < total ? lo : hi) = mid;
    if (hi - lo < tol * std::max(1.0, hi)) break;
  }
  const double inv_level = 0.5 * (lo + hi);
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q(i) = std::max(inv_level - 1.0 / gains(i), 0.0);
  return q;
}

// ---- textbook two-branch diversity BER ---------------------------------—--

/// QPSK bit error rate with maximum-ratio-style reception of an Alamouti
/// block over CN(0, I_2): E[ Q(sqrt(g X)) ] with X ~ sum of two unit
/// exponentials, by quadrature of the closed-form density x e^{-x}.
inline double alamouti_qpsk_ber(double gain_over_noise) {
  const auto q_func = [](double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); };
  const auto integrand = [&](double x) {
    return q_func(std::sqrt(gain_over_noise * x)) * x * std::exp(-x);
  };
  // The integrand decays like x e^{-x}; 60 units of x is far past double
  // precision relevance.
  return adaptive_simpson(integrand, 0.0, 60.0, 1e-13);
}

// ---- simple statistics -----------------------------------------------------

inline double binomial_sigma(double p, double n) {
  return std::sqrt(std::max(p * (1.0 - p), 1e-300) / n);
}

}  // namespace oracle
