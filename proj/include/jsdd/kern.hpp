#pragma once

#include <complex>
#include <cstddef>

// Small complex-vector kernels used in the Monte-Carlo inner loops.
// Scalar reference implementations always exist; an AVX2 variant is picked
// at runtime when the CPU supports it. Both variants are exported so the
// test suite can check them against each other on the same inputs.

namespace jsdd::kern {

using cd = std::complex<double>;

enum class Backend { Scalar, Avx2 };

/// Backend currently used by the dispatching entry points.
Backend active_backend();

/// True if the named backend can run on this machine.
bool backend_available(Backend b);

/// Overrides backend selection (tests). Throws std::invalid_argument if the
/// requested backend is unavailable.
void force_backend(Backend b);

/// Restores runtime auto-detection.
void reset_backend();

// Dispatching entry points.
cd cdot(const cd* a, const cd* b, std::size_t n);     // sum conj(a_i) * b_i
double norm_sq(const cd* a, std::size_t n);           // sum |a_i|^2
void axpy(cd alpha, const cd* x, cd* y, std::size_t n);  // y += alpha * x

namespace scalar {
cd cdot(const cd* a, const cd* b, std::size_t n);
double norm_sq(const cd* a, std::size_t n);
void axpy(cd alpha, const cd* x, cd* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
// Only call when backend_available(Backend::Avx2).
cd cdot(const cd* a, const cd* b, std::size_t n);
double norm_sq(const cd* a, std::size_t n);
void axpy(cd alpha, const cd* x, cd* y, std::size_t n);
}  // namespace avx2

}  // namespace jsdd::kern
