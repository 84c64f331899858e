#include "dcmu/vec2.hpp"

#include <stdexcept>

namespace dcmu {

Mat2 Mat2::inverse(double tol) const {
  const double d = det();
  if (!(std::abs(d) > tol)) {
    throw std::domain_error("Mat2::inverse: singular matrix");
  }
  return {yy / d, -xy / d, -yx / d, xx / d};
}

namespace {

// Half-spread of the eigenvalues of the symmetric part.
double sym_radius(const Mat2& m) {
  const double off = 0.5 * (m.xy + m.yx);
  return std::hypot(0.5 * (m.xx - m.yy), off);
}

}  // namespace

double Mat2::max_sym_eigenvalue() const { return 0.5 * trace() + sym_radius(*this); }

double Mat2::min_sym_eigenvalue() const { return 0.5 * trace() - sym_radius(*this); }

}  // namespace dcmu
