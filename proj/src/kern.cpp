#include "jsdd/kern.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>

namespace jsdd::kern {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool avx2_tu_compiled() {
#if defined(JSDD_HAVE_AVX2_TU)
  return true;
#else
  return false;
#endif
}

Backend detect() {
  if (std::getenv("JSDD_FORCE_SCALAR") != nullptr) return Backend::Scalar;
  if (avx2_tu_compiled() && cpu_has_avx2()) return Backend::Avx2;
  return Backend::Scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool backend_available(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return avx2_tu_compiled() && cpu_has_avx2();
  }
  return false;
}

void force_backend(Backend b) {
  if (!backend_available(b)) {
    throw std::invalid_argument("requested kernel backend is not available on this machine");
  }
  g_backend.store(b, std::memory_order_relaxed);
}

void reset_backend() { g_backend.store(detect(), std::memory_order_relaxed); }

cd cdot(const cd* a, const cd* b, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::cdot(a, b, n) : scalar::cdot(a, b, n);
}

double norm_sq(const cd* a, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::norm_sq(a, n) : scalar::norm_sq(a, n);
}

void axpy(cd alpha, const cd* x, cd* y, std::size_t n) {
  if (active_backend() == Backend::Avx2) {
    avx2::axpy(alpha, x, y, n);
  } else {
    scalar::axpy(alpha, x, y, n);
  }
}

}  // namespace jsdd::kern
