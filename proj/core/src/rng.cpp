#include "ovtrack/rng.hpp"

#include "ovtrack/vecmath.hpp"

namespace ovtrack {

std::vector<double> Rng::unit_vector(int dim) {
  // Rejection on the degenerate all-tiny draw keeps normalization sane.
  for (;;) {
    std::vector<double> v = gaussian_vector(dim);
    if (l2_norm(v) > 1e-9) return normalized(v);
  }
}

}  // namespace ovtrack
