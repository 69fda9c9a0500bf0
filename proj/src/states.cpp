#include "ncdist/states.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ncdist/errors.hpp"

namespace ncdist {

namespace {

constexpr std::size_t kDirectSumLimit = 1u << 16;
constexpr std::size_t kEulerMaclaurinStart = 64;

// sum_{k >= start} k^{-s} by Euler-Maclaurin with Bernoulli terms up to B_10.
double zeta_tail(double s, double start) {
  constexpr std::array<double, 5> bernoulli = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  double acc = std::pow(start, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(start, -s);
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double factorial = 2.0;
  for (std::size_t j = 1; j <= bernoulli.size(); ++j) {
    acc += bernoulli[j - 1] / factorial * rising * std::pow(start, -s - 2.0 * static_cast<double>(j) + 1.0);
    rising *= (s + 2.0 * static_cast<double>(j) - 1.0) * (s + 2.0 * static_cast<double>(j));
    factorial *= (2.0 * static_cast<double>(j) + 1.0) * (2.0 * static_cast<double>(j) + 2.0);
  }
  return acc;
}

double direct_sum(double s, std::size_t count) {
  double acc = 0.0;
  for (std::size_t k = count; k >= 1; --k) acc += std::pow(static_cast<double>(k), -s);
  return acc;
}

void require_zeta_domain(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw ParameterError("zeta-state exponent must satisfy s > 1, got " + std::to_string(s));
  }
}

}  // namespace

double riemann_zeta(double s) {
  require_zeta_domain(s);
  return direct_sum(s, kEulerMaclaurinStart - 1) + zeta_tail(s, static_cast<double>(kEulerMaclaurinStart));
}

double zeta_partial_sum(double s, std::size_t count) {
  require_zeta_domain(s);
  if (count <= kDirectSumLimit) return direct_sum(s, count);
  return riemann_zeta(s) - zeta_tail(s, static_cast<double>(count) + 1.0);
}

MoyalPureState::MoyalPureState(double theta, StateKind kind) : theta_(theta), kind_(kind) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ParameterError("state theta must be positive");
}

MoyalPureState MoyalPureState::basis(std::size_t m, double theta) {
  MoyalPureState st(theta, StateKind::Basis);
  st.explicit_ = CVector::Zero(static_cast<Eigen::Index>(m + 1));
  st.explicit_(static_cast<Eigen::Index>(m)) = 1.0;
  st.basis_index_ = m;
  return st;
}

MoyalPureState MoyalPureState::zeta(double s, std::size_t cutoff, double theta) {
  require_zeta_domain(s);
  if (cutoff < 1) throw ParameterError("zeta-state cutoff must be at least 1");
  MoyalPureState st(theta, StateKind::Zeta);
  st.zeta_ = ZetaProfile{s, cutoff, riemann_zeta(s), zeta_partial_sum(s, cutoff)};
  return st;
}

MoyalPureState MoyalPureState::finite(std::span<const Complex> weights, double theta) {
  MoyalPureState st(theta, StateKind::Finite);
  double norm2 = 0.0;
  for (const auto& w : weights) norm2 += std::norm(w);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw ParameterError("finite state needs a nonzero weight vector");
  std::size_t last = weights.size();
  while (last > 0 && weights[last - 1] == Complex{}) --last;
  st.normalization_ = 1.0 / std::sqrt(norm2);
  st.explicit_ = CVector(static_cast<Eigen::Index>(last));
  for (std::size_t i = 0; i < last; ++i) st.explicit_(static_cast<Eigen::Index>(i)) = weights[i] * st.normalization_;
  return st;
}

std::size_t MoyalPureState::support() const noexcept {
  if (zeta_) return zeta_->cutoff;
  return static_cast<std::size_t>(explicit_.size());
}

Complex MoyalPureState::coefficient(std::size_t m) const {
  if (m >= support()) return {};
  if (zeta_) return phase_ * std::sqrt(weight(m));
  return phase_ * explicit_(static_cast<Eigen::Index>(m));
}

double MoyalPureState::weight(std::size_t m) const {
  if (m >= support()) return 0.0;
  if (zeta_) return std::pow(static_cast<double>(m + 1), -zeta_->s) / zeta_->partial_sum;
  return std::norm(explicit_(static_cast<Eigen::Index>(m)));
}

CVector MoyalPureState::coefficients(std::size_t count) const {
  CVector out = CVector::Zero(static_cast<Eigen::Index>(count));
  const std::size_t n = std::min(count, support());
  for (std::size_t m = 0; m < n; ++m) out(static_cast<Eigen::Index>(m)) = coefficient(m);
  return out;
}

std::string MoyalPureState::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case StateKind::Basis:
      os << "basis:" << *basis_index_;
      break;
    case StateKind::Zeta:
      os << "zeta:" << zeta_->s << ':' << zeta_->cutoff;
      break;
    case StateKind::Finite: {
      os << "finite:";
      for (Eigen::Index i = 0; i < explicit_.size(); ++i) {
        if (i) os << ',';
        const Complex c = explicit_(i);
        os << c.real();
        if (c.imag() != 0.0) os << (c.imag() < 0 ? "" : "+") << c.imag() << 'i';
      }
      break;
    }
  }
  return os.str();
}

MoyalPureState MoyalPureState::with_phase(double phase) const {
  MoyalPureState st = *this;
  st.phase_ *= std::polar(1.0, phase);
  return st;
}

MoyalPureState basis_state(std::size_t m, double theta) { return MoyalPureState::basis(m, theta); }

MoyalPureState zeta_state(double s, std::size_t cutoff, double theta) {
  return MoyalPureState::zeta(s, cutoff, theta);
}

MoyalPureState finite_state(std::span<const Complex> weights, double theta) {
  return MoyalPureState::finite(weights, theta);
}

Complex eval(const MoyalPureState& state, const MoyalElement& a) {
  require_same_theta(state.theta(), a.theta(), "eval");
  const std::size_t n = std::min(state.support(), a.order());
  if (n == 0) return {};
  const CVector c = state.coefficients(n);
  const auto block = a.coeffs().topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return c.dot(block * c);
}

std::vector<double> diagonal_difference(const MoyalPureState& s1, const MoyalPureState& s2,
                                        std::optional<std::size_t> length) {
  require_same_theta(s1.theta(), s2.theta(), "diagonal_difference");
  const std::size_t n = length.value_or(std::max(s1.support(), s2.support()));
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) out[m] = s1.weight(m) - s2.weight(m);
  return out;
}

CMatrix state_difference_matrix(const MoyalPureState& s1, const MoyalPureState& s2, std::size_t order) {
  require_same_theta(s1.theta(), s2.theta(), "state_difference_matrix");
  const CVector c1 = s1.coefficients(order);
  const CVector c2 = s2.coefficients(order);
  return c1.conjugate() * c1.transpose() - c2.conjugate() * c2.transpose();
}

}  // namespace ncdist
