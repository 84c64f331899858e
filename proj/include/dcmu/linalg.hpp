#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dcmu {

/// Dense row-major n x n matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * n_, n_};
  }
  [[nodiscard]] bool symmetric(double tol = 0.0) const;

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_{0};
  std::vector<double> data_;
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  SquareMatrix vectors;        // column k pairs with values[k]
  int sweeps{0};
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Rotations are
/// applied in fixed (p, q) row order, so results are reproducible bit for bit.
/// Stops once the off-diagonal Frobenius norm is <= `off_tol` or after
/// `max_sweeps` sweeps.
SymmetricEigen jacobi_eigen(const SquareMatrix& a, double off_tol = 1e-12, int max_sweeps = 100);

}  // namespace dcmu
