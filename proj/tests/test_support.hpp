#pragma once

#include <random>
#include <vector>

#include "ncdist/moyal_algebra.hpp"
#include "ncdist/states.hpp"

namespace ncdist::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(0x5eed);
  return engine;
}

// Entries uniform in the unit disk.
inline CMatrix random_disk_matrix(Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<double> r(0.0, 1.0), phi(0.0, 6.283185307179586);
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = std::polar(std::sqrt(r(rng())), phi(rng()));
  return m;
}

inline MoyalElement random_element(double theta, std::size_t order) {
  return MoyalElement(theta, random_disk_matrix(static_cast<Eigen::Index>(order), static_cast<Eigen::Index>(order)));
}

inline std::size_t random_order(std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng());
}

inline MoyalPureState random_finite_state(double theta, std::size_t support) {
  std::normal_distribution<double> g;
  std::vector<Complex> w(support);
  for (auto& x : w) x = Complex(g(rng()), g(rng()));
  return finite_state(w, theta);
}

// sum_p a_{mp} b_{pn} with explicit loops, zero outside each operand.
inline CMatrix naive_product(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index n = std::max(a.rows(), b.rows());
  CMatrix c = CMatrix::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index q = 0; q < n; ++q)
      for (Eigen::Index p = 0; p < n; ++p) {
        const Complex x = (m < a.rows() && p < a.cols()) ? a(m, p) : Complex{};
        const Complex y = (p < b.rows() && q < b.cols()) ? b(p, q) : Complex{};
        c(m, q) += x * y;
      }
  return c;
}

}  // namespace ncdist::testing
