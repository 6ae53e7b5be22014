#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "jsdd/kern.hpp"
#include "jsdd/rng.hpp"

using jsdd::RngStream;
using jsdd::kern::cd;

namespace {

std::vector<cd> random_vec(RngStream& rng, std::size_t n) {
  std::vector<cd> v(n);
  for (auto& x : v) x = rng.cgauss();
  return v;
}

}  // namespace

TEST_CASE("scalar cdot matches a naive accumulation") {
  RngStream rng(11);
  const auto a = random_vec(rng, 17);
  const auto b = random_vec(rng, 17);
  cd expect{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) expect += std::conj(a[i]) * b[i];
  const cd got = jsdd::kern::scalar::cdot(a.data(), b.data(), a.size());
  CHECK(std::abs(got - expect) < 1e-12);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!jsdd::kern::backend_available(jsdd::kern::Backend::Avx2)) {
    return;  // nothing to compare on this machine
  }
  RngStream rng(7);
  for (std::size_t n : {0, 1, 2, 3, 4, 7, 8, 15, 16, 33, 128, 1001}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const cd alpha = rng.cgauss();

    const cd d_s = jsdd::kern::scalar::cdot(a.data(), b.data(), n);
    const cd d_v = jsdd::kern::avx2::cdot(a.data(), b.data(), n);
    CHECK(std::abs(d_s - d_v) <= 1e-12 * (1.0 + std::abs(d_s)));

    const double n_s = jsdd::kern::scalar::norm_sq(a.data(), n);
    const double n_v = jsdd::kern::avx2::norm_sq(a.data(), n);
    CHECK(n_s == doctest::Approx(n_v).epsilon(1e-12));

    auto y_s = b, y_v = b;
    jsdd::kern::scalar::axpy(alpha, a.data(), y_s.data(), n);
    jsdd::kern::avx2::axpy(alpha, a.data(), y_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(y_s[i] - y_v[i]) <= 1e-12 * (1.0 + std::abs(y_s[i])));
    }
  }
}

TEST_CASE("backend forcing round-trips") {
  const auto original = jsdd::kern::active_backend();
  jsdd::kern::force_backend(jsdd::kern::Backend::Scalar);
  CHECK(jsdd::kern::active_backend() == jsdd::kern::Backend::Scalar);
  jsdd::kern::reset_backend();
  CHECK(jsdd::kern::active_backend() == original);
}

TEST_CASE("rng streams are independent of spare-state history") {
  RngStream a = RngStream::derive(42, 1, 2, 3);
  RngStream b = RngStream::derive(42, 1, 2, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c = RngStream::derive(42, 1, 2, 4);
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= (a.next_u64() != c.next_u64());
  CHECK(differs);
}

TEST_CASE("complex gaussian has unit second moment") {
  RngStream rng(5);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += std::norm(rng.cgauss());
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));
}
