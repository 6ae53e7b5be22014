#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace jsdd {

using cd = std::complex<double>;

/// Orthogonal space-time block code given by its real coefficient matrices:
/// the codeword is Z = sum_i phi[i] * Re(s_i) + j * sum_i psi[i] * Im(s_i),
/// with all coefficient entries in {-1, 0, 1}.
struct OstbcCode {
  std::string name;
  int n_streams = 0;  // N: antenna streams (rows)
  int n_slots = 0;    // T: time slots (columns)
  int n_symbols = 0;  // L: symbols per codeword
  std::vector<Eigen::MatrixXi> phi;
  std::vector<Eigen::MatrixXi> psi;

  double rate() const { return static_cast<double>(n_symbols) / n_slots; }
};

/// Alamouti code, (N, T, L) = (2, 2, 2).
OstbcCode alamouti();
/// Rate-3/4 code for four antennas, (N, T, L) = (4, 4, 3).
OstbcCode rate34_4();
/// Rate-1/2 code for eight antennas, (N, T, L) = (8, 16, 8): the real
/// orthogonal design carries the real parts over the first 8 slots and the
/// imaginary parts over the last 8.
OstbcCode rate12_8();

OstbcCode code_by_name(const std::string& name);

struct CodeViolation {
  std::string identity;  // which defining identity failed
  int n = 0, i = 0;      // offending index pair (1-based)
};

/// Checks every defining identity in integer arithmetic; nullopt on pass,
/// otherwise the first violation found.
std::optional<CodeViolation> verify_code(const OstbcCode& code);

/// Codeword matrix for one symbol vector (length L).
Eigen::MatrixXcd encode(const OstbcCode& code, const Eigen::VectorXcd& symbols);

/// Unit-average-energy constellation with Gray bit labeling.
struct Constellation {
  std::string name;
  int bits_per_symbol = 0;
  std::vector<cd> points;
  std::vector<unsigned> labels;  // bit pattern of each point

  /// Index of the nearest point; ties go to the lowest index.
  int nearest(cd z) const;
  double min_distance() const;
};

Constellation bpsk();
Constellation qpsk();
Constellation constellation_by_name(const std::string& name);

/// Minimum normalized codeword distance rho_min = d_min^2 / (4 sigma^2).
double rho_min(const Constellation& constel, double noise_var);

/// Symbol-by-symbol ML decoding of y = eff_row * Z + noise, where eff_row is
/// the 1 x N effective channel known at the receiver. Returns constellation
/// point indices; equals exhaustive joint ML thanks to the orthogonal
/// structure. A zero effective row yields the lowest-index point everywhere.
std::vector<int> ml_decode(const Eigen::RowVectorXcd& received,
                           const Eigen::RowVectorXcd& eff_row, const OstbcCode& code,
                           const Constellation& constel);

/// Bit helpers for BER counting.
int hamming_distance(unsigned a, unsigned b);

}  // namespace jsdd
