#include "jsdd/channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "jsdd/quadrature.hpp"

namespace jsdd {

namespace {

constexpr double kDeg2Rad = M_PI / 180.0;

}  // namespace

void validate(const UserGeometry& geom) {
  if (!(geom.spread_deg >= 0.0) || geom.spread_deg >= 90.0) {
    throw std::invalid_argument("angular spread must lie in [0, 90) degrees");
  }
  if (geom.mean_angle_deg - geom.spread_deg < -90.0 ||
      geom.mean_angle_deg + geom.spread_deg > 90.0) {
    throw std::invalid_argument("angular support leaves [-90, 90] degrees");
  }
}

Eigen::VectorXcd dft_column(int num_antennas, int index) {
  if (index < 1 || index > num_antennas) {
    throw std::invalid_argument("DFT column index out of range");
  }
  Eigen::VectorXcd col(num_antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
  for (int m = 0; m < num_antennas; ++m) {
    const double phase = -2.0 * M_PI * static_cast<double>(index - 1) * m / num_antennas;
    col(m) = scale * cd{std::cos(phase), std::sin(phase)};
  }
  return col;
}

Eigen::VectorXcd steering_vector(double angle_deg, int num_antennas) {
  Eigen::VectorXcd a(num_antennas);
  const double s = std::sin(angle_deg * kDeg2Rad);
  for (int m = 0; m < num_antennas; ++m) {
    const double phase = -M_PI * m * s;
    a(m) = cd{std::cos(phase), std::sin(phase)};
  }
  return a;
}

int auto_quad_nodes(const UserGeometry& geom, int num_antennas) {
  const double lo = (geom.mean_angle_deg - geom.spread_deg) * kDeg2Rad;
  const double hi = (geom.mean_angle_deg + geom.spread_deg) * kDeg2Rad;
  const double phase_range = M_PI * (num_antennas - 1) * std::abs(std::sin(hi) - std::sin(lo));
  return std::max(64, static_cast<int>(phase_range / 3.0) + 32);
}

Eigen::MatrixXcd toeplitz_covariance(const UserGeometry& geom, int num_antennas,
                                     int quad_nodes) {
  validate(geom);
  if (num_antennas < 1) throw std::invalid_argument("antenna count must be positive");
  if (geom.spread_deg == 0.0) {
    throw std::invalid_argument(
        "zero spread degenerates the covariance integral; use the steering outer product");
  }
  if (quad_nodes == 0) {
    quad_nodes = auto_quad_nodes(geom, num_antennas);
  } else if (quad_nodes < 16) {
    throw std::invalid_argument("quad_nodes must be >= 16");
  }

  const QuadRule& rule = gauss_legendre(quad_nodes);
  const double lo = (geom.mean_angle_deg - geom.spread_deg) * kDeg2Rad;
  const double hi = (geom.mean_angle_deg + geom.spread_deg) * kDeg2Rad;
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);

  std::vector<double> sins(quad_nodes);
  for (int q = 0; q < quad_nodes; ++q) {
    sins[q] = std::sin(mid + half * rule.nodes[q]);
  }

  // First column of the Toeplitz matrix; the (1/2D) prefactor cancels the
  // interval half-width, so weights enter with factor 1/2 and the lag-0
  // entry is exactly the weight sum / 2 = 1.
  Eigen::VectorXcd first(num_antennas);
  for (int d = 0; d < num_antennas; ++d) {
    double re = 0.0, im = 0.0;
    for (int q = 0; q < quad_nodes; ++q) {
      const double phase = -M_PI * d * sins[q];
      re += rule.weights[q] * std::cos(phase);
      im += rule.weights[q] * std::sin(phase);
    }
    first(d) = 0.5 * cd{re, im};
  }

  Eigen::MatrixXcd cov(num_antennas, num_antennas);
  for (int m = 0; m < num_antennas; ++m) {
    for (int n = 0; n < num_antennas; ++n) {
      cov(m, n) = (m >= n) ? first(m - n) : std::conj(first(n - m));
    }
  }
  return cov;
}

ChannelStats eigen_truncate(const Eigen::MatrixXcd& covariance, double rel_tol) {
  if (covariance.rows() != covariance.cols()) {
    throw std::invalid_argument("covariance must be square");
  }
  if ((covariance - covariance.adjoint()).norm() > 1e-10 * std::max(1.0, covariance.norm())) {
    throw std::invalid_argument("covariance must be Hermitian");
  }
  if (rel_tol <= 0.0) throw std::invalid_argument("rel_tol must be positive");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(covariance);
  const int m = static_cast<int>(covariance.rows());
  const double lam_max = es.eigenvalues()(m - 1);
  if (!(lam_max > 0.0)) {
    throw std::invalid_argument("covariance has no positive eigenvalue");
  }
  const double cut = rel_tol * lam_max;
  int rank = 0;
  for (int i = 0; i < m; ++i) {
    if (es.eigenvalues()(i) >= cut) ++rank;
  }

  ChannelStats stats;
  stats.num_antennas = m;
  stats.covariance = covariance;
  stats.rank = rank;
  stats.eigvals.resize(rank);
  stats.eigvecs.resize(m, rank);
  for (int i = 0; i < rank; ++i) {
    const int src = m - 1 - i;  // descending order
    stats.eigvals(i) = es.eigenvalues()(src);
    stats.eigvecs.col(i) = es.eigenvectors().col(src);
  }
  return stats;
}

DftSelection dft_select(const UserGeometry& geom, int num_antennas) {
  validate(geom);
  if (num_antennas < 2) throw std::invalid_argument("need at least 2 antennas");

  const auto wrap = [](double x) {
    double r = std::fmod(x, 2.0 * M_PI);
    if (r < 0.0) r += 2.0 * M_PI;
    return r;
  };
  const double xi_min = wrap(M_PI * std::sin((geom.mean_angle_deg - geom.spread_deg) * kDeg2Rad));
  const double xi_max = wrap(M_PI * std::sin((geom.mean_angle_deg + geom.spread_deg) * kDeg2Rad));

  const auto nearest_index = [&](double xi) {
    int best = 1;
    double best_dist = std::abs(xi);
    for (int i = 2; i <= num_antennas; ++i) {
      const double dist = std::abs(xi - 2.0 * M_PI * (i - 1) / num_antennas);
      if (dist < best_dist) {
        best = i;
        best_dist = dist;
      }
    }
    return best;
  };
  const int i_min = nearest_index(xi_min);
  const int i_max = nearest_index(xi_max);

  DftSelection sel;
  if (i_max >= i_min) {
    for (int i = i_min; i <= i_max; ++i) sel.indices.push_back(i);
  } else {
    for (int i = i_min; i <= num_antennas; ++i) sel.indices.push_back(i);
    for (int i = 1; i <= i_max; ++i) sel.indices.push_back(i);
  }
  sel.basis.resize(num_antennas, static_cast<int>(sel.indices.size()));
  for (std::size_t c = 0; c < sel.indices.size(); ++c) {
    sel.basis.col(static_cast<int>(c)) = dft_column(num_antennas, sel.indices[c]);
  }
  return sel;
}

double subspace_alignment(const ChannelStats& exact, const DftSelection& approx) {
  if (exact.eigvecs.rows() != approx.basis.rows()) {
    throw std::invalid_argument("bases live in different antenna dimensions");
  }
  const double overlap = (exact.eigvecs.adjoint() * approx.basis).squaredNorm();
  const int r = std::min<int>(exact.rank, static_cast<int>(approx.indices.size()));
  return overlap / r;
}

Eigen::VectorXcd draw_physical_channel(const UserGeometry& geom, int num_antennas,
                                       int path_count, RngStream& rng) {
  validate(geom);
  if (path_count < 1) throw std::invalid_argument("path count must be >= 1");
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(num_antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(path_count));
  for (int q = 0; q < path_count; ++q) {
    const cd gain = rng.cgauss();
    const double theta =
        geom.mean_angle_deg + geom.spread_deg * (2.0 * rng.u01() - 1.0);
    h += gain * steering_vector(theta, num_antennas);
  }
  return scale * h;
}

EffectiveChannelPair draw_effective_pair(const Eigen::VectorXd& eigvals, double corr,
                                         RngStream& rng) {
  if (!(corr >= 0.0 && corr < 1.0)) {
    throw std::invalid_argument("correlation must lie in [0, 1)");
  }
  const int r = static_cast<int>(eigvals.size());
  EffectiveChannelPair pair;
  pair.corr = corr;
  pair.est_ch.resize(r);
  pair.true_ch.resize(r);
  const double err_scale = std::sqrt(1.0 - corr * corr);
  for (int i = 0; i < r; ++i) {
    const double sd = std::sqrt(eigvals(i));
    const cd est = sd * rng.cgauss();
    const cd err = sd * rng.cgauss();
    pair.est_ch(i) = est;
    pair.true_ch(i) = corr * est + err_scale * err;
  }
  return pair;
}

EffectiveChannelPair draw_effective_pair(const ChannelStats& stats, double corr,
                                         RngStream& rng) {
  return draw_effective_pair(stats.eigvals, corr, rng);
}

double orthogonality_defect(const std::vector<Eigen::MatrixXcd>& bases) {
  double worst = 0.0;
  for (std::size_t k = 0; k < bases.size(); ++k) {
    for (std::size_t m = k + 1; m < bases.size(); ++m) {
      if (bases[k].rows() != bases[m].rows()) {
        throw std::invalid_argument("bases live in different antenna dimensions");
      }
      worst = std::max(worst, (bases[k].adjoint() * bases[m]).norm());
    }
  }
  return worst;
}

double orthogonality_defect(const std::vector<ChannelStats>& stats) {
  std::vector<Eigen::MatrixXcd> bases;
  bases.reserve(stats.size());
  for (const auto& s : stats) bases.push_back(s.eigvecs);
  return orthogonality_defect(bases);
}

double orthogonality_defect(const std::vector<DftSelection>& selections) {
  if (!selections_overlap(selections)) {
    return 0.0;  // distinct DFT columns are orthogonal, no numerics needed
  }
  std::vector<Eigen::MatrixXcd> bases;
  bases.reserve(selections.size());
  for (const auto& s : selections) bases.push_back(s.basis);
  return orthogonality_defect(bases);
}

bool selections_overlap(const std::vector<DftSelection>& selections) {
  std::set<int> seen;
  for (const auto& sel : selections) {
    for (int idx : sel.indices) {
      if (!seen.insert(idx).second) return true;
    }
  }
  return false;
}

void ensure_disjoint(const std::vector<DftSelection>& selections) {
  if (selections_overlap(selections)) {
    throw std::domain_error(
        "DFT column selections overlap between scheduled users; "
        "angular supports must be non-overlapping");
  }
}

}  // namespace jsdd
