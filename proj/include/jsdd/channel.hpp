#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "jsdd/rng.hpp"

namespace jsdd {

using cd = std::complex<double>;

/// One-ring user geometry: mean azimuth and angular spread, in degrees.
/// The interval [mean - spread, mean + spread] must stay inside [-90, 90].
struct UserGeometry {
  double mean_angle_deg = 0.0;
  double spread_deg = 0.0;
};

void validate(const UserGeometry& geom);

/// Low-rank second-order statistics of one user's channel.
struct ChannelStats {
  int num_antennas = 0;
  Eigen::MatrixXcd covariance;  // M x M Hermitian PSD, unit diagonal
  Eigen::MatrixXcd eigvecs;     // M x r, orthonormal columns
  Eigen::VectorXd eigvals;      // length r, positive, non-increasing
  int rank = 0;
};

/// Correlated (true, estimated) effective channel pair.
struct EffectiveChannelPair {
  Eigen::VectorXcd true_ch;  // length r
  Eigen::VectorXcd est_ch;   // length r
  double corr = 0.0;         // xi in [0, 1)
};

/// DFT-column approximation of a user's eigenbasis.
struct DftSelection {
  std::vector<int> indices;  // 1-based column indices, distinct
  Eigen::MatrixXcd basis;    // M x r, exactly orthonormal DFT columns
};

/// Unit-norm column i (1-based) of the M-point DFT matrix.
Eigen::VectorXcd dft_column(int num_antennas, int index);

/// ULA steering vector [1, e^{-j pi sin}, ..., e^{-j pi (M-1) sin}]^T.
Eigen::VectorXcd steering_vector(double angle_deg, int num_antennas);

/// Node count that resolves the integrand oscillation for this geometry and
/// array size (used when toeplitz_covariance gets quad_nodes = 0).
int auto_quad_nodes(const UserGeometry& geom, int num_antennas);

/// One-ring channel covariance: Hermitian Toeplitz with entries
/// (1/2D) * integral of e^{-j pi (m-n) sin t} over the angular interval,
/// evaluated with fixed-order Gauss-Legendre quadrature.
/// quad_nodes = 0 selects auto_quad_nodes; explicit values must be >= 16.
/// Requires spread > 0.
Eigen::MatrixXcd toeplitz_covariance(const UserGeometry& geom, int num_antennas,
                                     int quad_nodes = 0);

/// Full Hermitian eigendecomposition, truncated to eigenvalues
/// >= rel_tol * lambda_max.
ChannelStats eigen_truncate(const Eigen::MatrixXcd& covariance, double rel_tol = 1e-3);

/// DFT-column index selection from the angular support. When the mapped
/// support wraps past 2*pi the index set is the union {i >= I_min} and
/// {i <= I_max}; argmin ties go to the smaller index.
DftSelection dft_select(const UserGeometry& geom, int num_antennas);

/// ||U_exact^H U_dft||_F^2 / min(r_exact, r_dft); 1 for identical subspaces
/// of equal rank.
double subspace_alignment(const ChannelStats& exact, const DftSelection& approx);

/// Physical channel draw: (1/sqrt(Q)) sum of unit Gaussian path gains times
/// steering vectors with angles uniform on the support interval.
Eigen::VectorXcd draw_physical_channel(const UserGeometry& geom, int num_antennas,
                                       int path_count, RngStream& rng);

/// Draws (true, estimated) effective channels with marginals CN(0, diag(lam))
/// and cross-covariance corr * diag(lam). Requires corr in [0, 1).
EffectiveChannelPair draw_effective_pair(const Eigen::VectorXd& eigvals, double corr,
                                         RngStream& rng);
EffectiveChannelPair draw_effective_pair(const ChannelStats& stats, double corr,
                                         RngStream& rng);

/// Max over pairs k != m of ||U_k^H U_m||_F.
double orthogonality_defect(const std::vector<Eigen::MatrixXcd>& bases);
double orthogonality_defect(const std::vector<ChannelStats>& stats);
/// DFT-selection overload: exactly 0 when all index sets are disjoint.
double orthogonality_defect(const std::vector<DftSelection>& selections);

bool selections_overlap(const std::vector<DftSelection>& selections);

/// Throws when two scheduled users share DFT columns (the scheme assumes
/// non-overlapping angular supports).
void ensure_disjoint(const std::vector<DftSelection>& selections);

}  // namespace jsdd
