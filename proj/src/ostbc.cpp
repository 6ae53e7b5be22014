#include "jsdd/ostbc.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "jsdd/kern.hpp"

namespace jsdd {

namespace {

// Codes with entries of the form +/- s_i or +/- conj(s_i) are written as two
// signed index tables: re_tab(r,c) = +/-i places the real part of symbol i,
// im_tab(r,c) the imaginary part.
OstbcCode from_tables(const std::string& name, int n, int t, int l,
                      const std::vector<std::vector<int>>& re_tab,
                      const std::vector<std::vector<int>>& im_tab) {
  OstbcCode code;
  code.name = name;
  code.n_streams = n;
  code.n_slots = t;
  code.n_symbols = l;
  code.phi.assign(l, Eigen::MatrixXi::Zero(n, t));
  code.psi.assign(l, Eigen::MatrixXi::Zero(n, t));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < t; ++c) {
      if (const int v = re_tab[r][c]; v != 0) {
        code.phi[std::abs(v) - 1](r, c) = (v > 0) ? 1 : -1;
      }
      if (const int v = im_tab[r][c]; v != 0) {
        code.psi[std::abs(v) - 1](r, c) = (v > 0) ? 1 : -1;
      }
    }
  }
  return code;
}

// 8x8 real orthogonal design in eight variables (Hurwitz-Radon family).
const std::vector<std::vector<int>>& real_design_8() {
  static const std::vector<std::vector<int>> tab = {
      {1, 2, 3, 4, 5, 6, 7, 8},       {-2, 1, 4, -3, 6, -5, -8, 7},
      {-3, -4, 1, 2, 7, 8, -5, -6},   {-4, 3, -2, 1, 8, -7, 6, -5},
      {-5, -6, -7, -8, 1, 2, 3, 4},   {-6, 5, -8, 7, -2, 1, -4, 3},
      {-7, 8, 5, -6, -3, 4, 1, -2},   {-8, -7, 6, 5, -4, -3, 2, 1}};
  return tab;
}

}  // namespace

OstbcCode alamouti() {
  return from_tables("alamouti", 2, 2, 2, {{1, -2}, {2, 1}}, {{1, 2}, {2, -1}});
}

OstbcCode rate34_4() {
  return from_tables("rate34_4", 4, 4, 3,
                     {{1, 2, 3, 0}, {-2, 1, 0, -3}, {-3, 0, 1, 2}, {0, 3, -2, 1}},
                     {{1, 2, 3, 0}, {2, -1, 0, -3}, {3, 0, -1, 2}, {0, -3, 2, 1}});
}

OstbcCode rate12_8() {
  OstbcCode code;
  code.name = "rate12_8";
  code.n_streams = 8;
  code.n_slots = 16;
  code.n_symbols = 8;
  code.phi.assign(8, Eigen::MatrixXi::Zero(8, 16));
  code.psi.assign(8, Eigen::MatrixXi::Zero(8, 16));
  const auto& tab = real_design_8();
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const int v = tab[r][c];
      const int sign = (v > 0) ? 1 : -1;
      code.phi[std::abs(v) - 1](r, c) = sign;       // real parts, slots 0..7
      code.psi[std::abs(v) - 1](r, c + 8) = sign;   // imaginary parts, slots 8..15
    }
  }
  return code;
}

OstbcCode code_by_name(const std::string& name) {
  if (name == "alamouti") return alamouti();
  if (name == "rate34_4") return rate34_4();
  if (name == "rate12_8") return rate12_8();
  throw std::invalid_argument("unknown OSTBC code: " + name);
}

std::optional<CodeViolation> verify_code(const OstbcCode& code) {
  const int n = code.n_streams;
  const int l = code.n_symbols;
  if (static_cast<int>(code.phi.size()) != l || static_cast<int>(code.psi.size()) != l) {
    return CodeViolation{"coefficient count != L", 0, 0};
  }
  const Eigen::MatrixXi eye = Eigen::MatrixXi::Identity(n, n);
  for (int i = 0; i < l; ++i) {
    if (code.phi[i].rows() != n || code.phi[i].cols() != code.n_slots ||
        code.psi[i].rows() != n || code.psi[i].cols() != code.n_slots) {
      return CodeViolation{"coefficient shape", 0, i + 1};
    }
    if (code.phi[i].cwiseAbs().maxCoeff() > 1 || code.psi[i].cwiseAbs().maxCoeff() > 1) {
      return CodeViolation{"entries outside {-1,0,1}", 0, i + 1};
    }
    if ((code.phi[i] * code.phi[i].transpose() - eye).cwiseAbs().maxCoeff() != 0) {
      return CodeViolation{"phi_i phi_i^H != I", i + 1, i + 1};
    }
    if ((code.psi[i] * code.psi[i].transpose() - eye).cwiseAbs().maxCoeff() != 0) {
      return CodeViolation{"psi_i psi_i^H != I", i + 1, i + 1};
    }
  }
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < l; ++b) {
      if (a != b) {
        if (((code.phi[a] * code.phi[b].transpose() +
              code.phi[b] * code.phi[a].transpose()).cwiseAbs().maxCoeff()) != 0) {
          return CodeViolation{"phi_n phi_i^H != -phi_i phi_n^H", a + 1, b + 1};
        }
        if (((code.psi[a] * code.psi[b].transpose() +
              code.psi[b] * code.psi[a].transpose()).cwiseAbs().maxCoeff()) != 0) {
          return CodeViolation{"psi_n psi_i^H != -psi_i psi_n^H", a + 1, b + 1};
        }
      }
      if (((code.phi[a] * code.psi[b].transpose() -
            code.psi[a] * code.phi[b].transpose()).cwiseAbs().maxCoeff()) != 0) {
        return CodeViolation{"phi_n psi_i^H != psi_n phi_i^H", a + 1, b + 1};
      }
    }
  }
  return std::nullopt;
}

Eigen::MatrixXcd encode(const OstbcCode& code, const Eigen::VectorXcd& symbols) {
  if (symbols.size() != code.n_symbols) {
    throw std::invalid_argument("symbol count does not match the code");
  }
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(code.n_streams, code.n_slots);
  for (int i = 0; i < code.n_symbols; ++i) {
    z += symbols(i).real() * code.phi[i].cast<double>().cast<cd>();
    z += cd{0.0, 1.0} * symbols(i).imag() * code.psi[i].cast<double>().cast<cd>();
  }
  return z;
}

int Constellation::nearest(cd z) const {
  int best = 0;
  double best_d = std::norm(z - points[0]);
  for (int i = 1; i < static_cast<int>(points.size()); ++i) {
    const double d = std::norm(z - points[i]);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

double Constellation::min_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < points.size(); ++a) {
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      d = std::min(d, std::abs(points[a] - points[b]));
    }
  }
  return d;
}

Constellation bpsk() {
  Constellation c;
  c.name = "bpsk";
  c.bits_per_symbol = 1;
  c.points = {cd{1.0, 0.0}, cd{-1.0, 0.0}};
  c.labels = {0u, 1u};
  return c;
}

Constellation qpsk() {
  Constellation c;
  c.name = "qpsk";
  c.bits_per_symbol = 2;
  const double s = M_SQRT1_2;
  c.points = {cd{s, s}, cd{-s, s}, cd{-s, -s}, cd{s, -s}};
  c.labels = {0b00u, 0b01u, 0b11u, 0b10u};  // Gray around the circle
  return c;
}

Constellation constellation_by_name(const std::string& name) {
  if (name == "bpsk") return bpsk();
  if (name == "qpsk") return qpsk();
  throw std::invalid_argument("unknown constellation: " + name);
}

double rho_min(const Constellation& constel, double noise_var) {
  if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance must be positive");
  const double dmin = constel.min_distance();
  if (!(dmin > 0.0)) throw std::invalid_argument("degenerate constellation");
  return dmin * dmin / (4.0 * noise_var);
}

std::vector<int> ml_decode(const Eigen::RowVectorXcd& received,
                           const Eigen::RowVectorXcd& eff_row, const OstbcCode& code,
                           const Constellation& constel) {
  if (received.size() != code.n_slots || eff_row.size() != code.n_streams) {
    throw std::invalid_argument("decoder dimensions do not match the code");
  }
  const double gain = kern::norm_sq(eff_row.data(), eff_row.size());
  std::vector<int> decisions(code.n_symbols, 0);
  if (gain == 0.0) return decisions;  // degenerate channel, lowest-index points

  // Matched-filter statistic per symbol: the orthogonal structure makes
  // joint ML separable, with u_i = Re(y (g Phi_i)^H) + j Im(y (g Psi_i)^H).
  Eigen::RowVectorXcd row_phi(code.n_slots), row_psi(code.n_slots);
  for (int i = 0; i < code.n_symbols; ++i) {
    row_phi = eff_row * code.phi[i].cast<double>().cast<cd>();
    row_psi = eff_row * code.psi[i].cast<double>().cast<cd>();
    const cd zr = kern::cdot(row_phi.data(), received.data(), code.n_slots);
    const cd zi = kern::cdot(row_psi.data(), received.data(), code.n_slots);
    const cd stat{zr.real() / gain, zi.imag() / gain};
    decisions[i] = constel.nearest(stat);
  }
  return decisions;
}

int hamming_distance(unsigned a, unsigned b) { return std::popcount(a ^ b); }

}  // namespace jsdd
