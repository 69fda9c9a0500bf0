#include "ncdist/moyal_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ncdist/errors.hpp"

namespace ncdist {

namespace {

void require_positive_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw ParameterError("Moyal deformation parameter theta must be positive and finite, got " +
                         std::to_string(theta));
  }
}

}  // namespace

MoyalElement::MoyalElement(double theta, std::size_t order)
    : theta_(theta), coeffs_(CMatrix::Zero(static_cast<Eigen::Index>(order), static_cast<Eigen::Index>(order))) {
  require_positive_theta(theta);
}

MoyalElement::MoyalElement(double theta, CMatrix coeffs) : theta_(theta), coeffs_(std::move(coeffs)) {
  require_positive_theta(theta);
  if (coeffs_.rows() != coeffs_.cols()) {
    throw ParameterError("matrix-base coefficients must be square");
  }
}

MoyalElement MoyalElement::basis(double theta, std::size_t m, std::size_t n, std::size_t order) {
  MoyalElement e(theta, std::max({m + 1, n + 1, order}));
  e.coeffs_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = 1.0;
  return e;
}

MoyalElement MoyalElement::radial(double theta, std::span<const double> diagonal) {
  MoyalElement e(theta, diagonal.size());
  for (std::size_t i = 0; i < diagonal.size(); ++i) {
    e.coeffs_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diagonal[i];
  }
  return e;
}

Complex MoyalElement::operator()(std::size_t m, std::size_t n) const noexcept {
  if (m >= order() || n >= order()) return {};
  return coeffs_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
}

bool MoyalElement::is_radial(double tol) const {
  for (Eigen::Index i = 0; i < coeffs_.rows(); ++i)
    for (Eigen::Index j = 0; j < coeffs_.cols(); ++j)
      if (i != j && std::abs(coeffs_(i, j)) > tol) return false;
  return true;
}

bool MoyalElement::is_self_adjoint(double tol) const {
  return (coeffs_ - coeffs_.adjoint()).cwiseAbs().maxCoeff() <= tol || coeffs_.size() == 0;
}

MoyalElement MoyalElement::padded(std::size_t order) const {
  if (order <= this->order()) return *this;
  return MoyalElement(theta_, pad_to(coeffs_, static_cast<Eigen::Index>(order)));
}

MoyalElement MoyalElement::operator+(const MoyalElement& other) const {
  require_same_theta(theta_, other.theta_, "addition");
  const auto n = static_cast<Eigen::Index>(std::max(order(), other.order()));
  return MoyalElement(theta_, pad_to(coeffs_, n) + pad_to(other.coeffs_, n));
}

MoyalElement MoyalElement::operator-(const MoyalElement& other) const {
  return *this + other * Complex(-1.0);
}

MoyalElement MoyalElement::operator*(Complex scale) const { return MoyalElement(theta_, coeffs_ * scale); }

double max_abs_diff(const MoyalElement& a, const MoyalElement& b) {
  const auto n = static_cast<Eigen::Index>(std::max(a.order(), b.order()));
  if (n == 0) return 0.0;
  return (pad_to(a.coeffs(), n) - pad_to(b.coeffs(), n)).cwiseAbs().maxCoeff();
}

void require_same_theta(double lhs, double rhs, const char* where) {
  if (lhs != rhs) {
    throw ParameterError(std::string("theta mismatch in ") + where + ": " + std::to_string(lhs) + " vs " +
                         std::to_string(rhs));
  }
}

CMatrix pad_to(const CMatrix& m, Eigen::Index n) {
  if (m.rows() == n && m.cols() == n) return m;
  CMatrix out = CMatrix::Zero(n, n);
  const auto r = std::min(n, m.rows());
  const auto c = std::min(n, m.cols());
  out.topLeftCorner(r, c) = m.topLeftCorner(r, c);
  return out;
}

MoyalElement star(const MoyalElement& a, const MoyalElement& b) {
  require_same_theta(a.theta(), b.theta(), "star");
  const auto n = static_cast<Eigen::Index>(std::max(a.order(), b.order()));
  // f_{mp} * f_{pn} = f_{mn}: the star product is the matrix product of coefficients.
  return MoyalElement(a.theta(), pad_to(a.coeffs(), n) * pad_to(b.coeffs(), n));
}

MoyalElement involution(const MoyalElement& a) { return MoyalElement(a.theta(), a.coeffs().adjoint()); }

Complex trace_integral(const MoyalElement& a) {
  return 2.0 * std::numbers::pi * a.theta() * a.coeffs().trace();
}

Complex l2_inner(const MoyalElement& a, const MoyalElement& b) {
  require_same_theta(a.theta(), b.theta(), "l2_inner");
  const auto n = static_cast<Eigen::Index>(std::max(a.order(), b.order()));
  const Complex s = pad_to(a.coeffs(), n).cwiseProduct(pad_to(b.coeffs(), n).conjugate()).sum();
  return 2.0 * std::numbers::pi * a.theta() * std::conj(s);
}

double gst_norm(const MoyalElement& a, double s, double t) {
  const double scale = std::pow(a.theta(), s + t);
  double acc = 0.0;
  for (Eigen::Index m = 0; m < a.coeffs().rows(); ++m) {
    const double wm = std::pow(static_cast<double>(m) + 0.5, s);
    for (Eigen::Index n = 0; n < a.coeffs().cols(); ++n) {
      acc += wm * std::pow(static_cast<double>(n) + 0.5, t) * std::norm(a.coeffs()(m, n));
    }
  }
  return std::sqrt(scale * acc);
}

double seminorm_rho(const MoyalElement& a, unsigned k) {
  return gst_norm(a, static_cast<double>(k), static_cast<double>(k));
}

}  // namespace ncdist
