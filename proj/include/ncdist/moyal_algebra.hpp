#pragma once

// Moyal plane algebra in the harmonic-oscillator matrix base f_{mn}.
//
// An element a = sum a_{mn} f_{mn} is stored as its dense N x N coefficient
// matrix. The star product becomes matrix multiplication, the involution the
// conjugate transpose, and the trace 2*pi*theta times the matrix trace.

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace ncdist {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

class MoyalElement {
 public:
  /// Zero element of the given order.
  MoyalElement(double theta, std::size_t order);
  /// Takes ownership of a square coefficient matrix.
  MoyalElement(double theta, CMatrix coeffs);

  /// Basis element f_{mn}; order is max(m, n) + 1 unless a larger one is given.
  static MoyalElement basis(double theta, std::size_t m, std::size_t n, std::size_t order = 0);
  /// Radial element with the given diagonal.
  static MoyalElement radial(double theta, std::span<const double> diagonal);

  double theta() const noexcept { return theta_; }
  std::size_t order() const noexcept { return static_cast<std::size_t>(coeffs_.rows()); }
  const CMatrix& coeffs() const noexcept { return coeffs_; }
  /// a_{mn}; zero outside the stored block.
  Complex operator()(std::size_t m, std::size_t n) const noexcept;

  bool is_radial(double tol = 0.0) const;
  bool is_self_adjoint(double tol = 0.0) const;

  /// Zero-padded copy of at least the given order (never truncates).
  MoyalElement padded(std::size_t order) const;

  MoyalElement operator+(const MoyalElement& other) const;
  MoyalElement operator-(const MoyalElement& other) const;
  MoyalElement operator*(Complex scale) const;

 private:
  double theta_;
  CMatrix coeffs_;
};

inline MoyalElement operator*(Complex scale, const MoyalElement& a) { return a * scale; }

/// Max entrywise deviation between two elements after zero-padding.
double max_abs_diff(const MoyalElement& a, const MoyalElement& b);

/// Throws ParameterError unless the two deformation parameters agree exactly.
void require_same_theta(double lhs, double rhs, const char* where);

/// Zero-pads a coefficient matrix to n x n.
CMatrix pad_to(const CMatrix& m, Eigen::Index n);

MoyalElement star(const MoyalElement& a, const MoyalElement& b);
MoyalElement involution(const MoyalElement& a);

/// Integral of a over the plane: 2*pi*theta * sum_m a_{mm}.
Complex trace_integral(const MoyalElement& a);

/// L2 inner product, antilinear in the first slot.
Complex l2_inner(const MoyalElement& a, const MoyalElement& b);

/// Weighted norm ||a||_{s,t}^2 = sum theta^{s+t} (m+1/2)^s (n+1/2)^t |a_{mn}|^2.
double gst_norm(const MoyalElement& a, double s, double t);

/// Frechet semi-norm rho_k = ||a||_{k,k}.
double seminorm_rho(const MoyalElement& a, unsigned k);

}  // namespace ncdist
