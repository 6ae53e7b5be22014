#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "jsdd/ostbc.hpp"
#include "jsdd/rng.hpp"
#include "support/oracles.hpp"

using namespace jsdd;

namespace {

Eigen::VectorXcd random_symbols(const Constellation& constel, int count, RngStream& rng) {
  Eigen::VectorXcd s(count);
  for (int i = 0; i < count; ++i) {
    const int idx = std::min(static_cast<int>(rng.u01() * constel.points.size()),
                             static_cast<int>(constel.points.size()) - 1);
    s(i) = constel.points[idx];
  }
  return s;
}

double codeword_identity_gap(const OstbcCode& code, const Eigen::VectorXcd& s) {
  const Eigen::MatrixXcd z = encode(code, s);
  const Eigen::MatrixXcd target =
      s.squaredNorm() * Eigen::MatrixXcd::Identity(code.n_streams, code.n_streams);
  return (z * z.adjoint() - target).norm();
}

}  // namespace

TEST_CASE("provided codes have the stated shapes and rates") {
  const OstbcCode a = alamouti();
  CHECK(a.n_streams == 2);
  CHECK(a.n_slots == 2);
  CHECK(a.n_symbols == 2);
  CHECK(a.rate() == doctest::Approx(1.0));

  const OstbcCode b = rate34_4();
  CHECK(b.n_streams == 4);
  CHECK(b.n_slots == 4);
  CHECK(b.n_symbols == 3);
  CHECK(b.rate() == doctest::Approx(0.75));

  const OstbcCode c = rate12_8();
  CHECK(c.n_streams == 8);
  CHECK(c.n_slots == 16);
  CHECK(c.n_symbols == 8);
  CHECK(c.rate() == doctest::Approx(0.5));
}

TEST_CASE("all provided codes pass the exhaustive identity check") {
  CHECK_FALSE(verify_code(alamouti()).has_value());
  CHECK_FALSE(verify_code(rate34_4()).has_value());
  CHECK_FALSE(verify_code(rate12_8()).has_value());
}

TEST_CASE("a corrupted code fails verification and the codeword identity") {
  OstbcCode bad = alamouti();
  bad.phi[0](0, 0) = -bad.phi[0](0, 0);
  const auto violation = verify_code(bad);
  REQUIRE(violation.has_value());
  CHECK(violation->identity == "phi_i phi_i^H != I");
  CHECK(violation->i == 1);

  RngStream rng(3);
  const Constellation q = qpsk();
  bool broke = false;
  for (int t = 0; t < 50; ++t) {
    broke |= codeword_identity_gap(bad, random_symbols(q, bad.n_symbols, rng)) > 1e-6;
  }
  CHECK(broke);
}

TEST_CASE("alamouti codeword structure") {
  Eigen::VectorXcd s(2);
  s << cd{1.0, 0.0}, cd{0.0, 1.0};
  const Eigen::MatrixXcd z = encode(alamouti(), s);
  CHECK(z(0, 0) == s(0));
  CHECK(z(0, 1) == -std::conj(s(1)));
  CHECK(z(1, 0) == s(1));
  CHECK(z(1, 1) == std::conj(s(0)));
  CHECK((z * z.adjoint() - 2.0 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("encoding is linear and satisfies the codeword identity") {
  const Eigen::MatrixXcd zero =
      encode(alamouti(), Eigen::VectorXcd::Zero(2));
  CHECK(zero.norm() == 0.0);

  RngStream rng(17);
  const Constellation q = qpsk();
  for (const OstbcCode& code : {alamouti(), rate34_4(), rate12_8()}) {
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXcd s = random_symbols(q, code.n_symbols, rng);
      CHECK(codeword_identity_gap(code, s) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(encode(alamouti(), Eigen::VectorXcd::Zero(3)), std::invalid_argument);
}

TEST_CASE("constellations are unit energy with balanced quadratures") {
  for (const Constellation& c : {bpsk(), qpsk()}) {
    double energy = 0.0;
    cd cross{0.0, 0.0};
    for (const cd& p : c.points) {
      energy += std::norm(p);
      cross += p.real() * std::conj(cd{p.imag(), 0.0});
    }
    CHECK(energy / c.points.size() == doctest::Approx(1.0));
    CHECK(std::abs(cross) < 1e-14);
    CHECK(static_cast<int>(c.labels.size()) == static_cast<int>(c.points.size()));
  }
  // Gray property: nearest neighbours differ in exactly one bit.
  const Constellation q = qpsk();
  const double dmin = q.min_distance();
  for (std::size_t a = 0; a < q.points.size(); ++a) {
    for (std::size_t b = a + 1; b < q.points.size(); ++b) {
      if (std::abs(q.points[a] - q.points[b]) < dmin * 1.001) {
        CHECK(hamming_distance(q.labels[a], q.labels[b]) == 1);
      }
    }
  }
}

TEST_CASE("rho_min hits the known modulation values") {
  CHECK(rho_min(qpsk(), 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rho_min(bpsk(), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rho_min(qpsk(), 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(rho_min(qpsk(), 0.0), std::invalid_argument);
}

TEST_CASE("noiseless decoding round-trips on every code") {
  RngStream rng(23);
  const Constellation q = qpsk();
  for (const OstbcCode& code : {alamouti(), rate34_4(), rate12_8()}) {
    for (int t = 0; t < 1000; ++t) {
      Eigen::RowVectorXcd eff(code.n_streams);
      for (int i = 0; i < code.n_streams; ++i) eff(i) = rng.cgauss();
      const Eigen::VectorXcd s = random_symbols(q, code.n_symbols, rng);
      const Eigen::RowVectorXcd y = eff * encode(code, s);
      const std::vector<int> out = ml_decode(y, eff, code, q);
      for (int i = 0; i < code.n_symbols; ++i) {
        CHECK(q.points[out[i]] == s(i));
      }
    }
  }
}

TEST_CASE("zero effective channel decodes to the lowest-index point") {
  RngStream rng(29);
  const Constellation q = qpsk();
  const OstbcCode code = alamouti();
  Eigen::RowVectorXcd y(2);
  y << rng.cgauss(), rng.cgauss();
  const std::vector<int> out =
      ml_decode(y, Eigen::RowVectorXcd::Zero(2), code, q);
  CHECK(out == std::vector<int>{0, 0});
}

TEST_CASE("symbol-by-symbol decisions equal exhaustive joint ML") {
  RngStream rng(41);
  const Constellation q = qpsk();
  for (const OstbcCode& code : {alamouti(), rate34_4()}) {
    for (int t = 0; t < 1000; ++t) {
      Eigen::RowVectorXcd eff(code.n_streams);
      for (int i = 0; i < code.n_streams; ++i) eff(i) = rng.cgauss();
      const Eigen::VectorXcd s = random_symbols(q, code.n_symbols, rng);
      Eigen::RowVectorXcd y = eff * encode(code, s);
      for (int i = 0; i < code.n_slots; ++i) y(i) += 0.7 * rng.cgauss();

      const std::vector<int> fast = ml_decode(y, eff, code, q);
      const std::vector<int> brute =
          oracle::joint_ml(y, eff, code.phi, code.psi, q.points);
      CHECK(fast == brute);
    }
  }
}
