#pragma once

#include <vector>

namespace jsdd {

struct QuadRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre nodes and weights, computed by Newton iteration on the
/// Legendre polynomial roots. Cached per order.
const QuadRule& gauss_legendre(int order);

}  // namespace jsdd
