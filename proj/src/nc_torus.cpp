#include "ncdist/nc_torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "ncdist/errors.hpp"
#include "ncdist/lipschitz.hpp"

namespace ncdist {

namespace {

constexpr double kPi = std::numbers::pi;
// Box compressions with at most this many input modes use a dense Gram eigensolve.
constexpr Eigen::Index kDenseBoxLimit = 289;

void require_same_theta(const TorusElement& a, const TorusElement& b, const char* where) {
  if (a.theta() != b.theta()) {
    std::ostringstream os;
    os << where << ": theta mismatch (" << a.theta() << " vs " << b.theta() << ")";
    throw ParameterError(os.str());
  }
}

Complex mode_factor(Lattice N, bool conjugate) {
  const double n2 = static_cast<double>(N.m2);
  return Complex(0.0, 2.0 * kPi) * Complex(static_cast<double>(N.m1), conjugate ? -n2 : n2);
}

TorusElement apply_derivation(const TorusElement& a, bool conjugate) {
  TorusElement out(a.theta());
  for (const auto& [N, c] : a.terms()) out.set(N, mode_factor(N, conjugate) * c);
  return out;
}

// Index of N in the box [-R, R]^2, row-major in (m1, m2).
Eigen::Index box_index(Lattice N, std::int64_t R) {
  return static_cast<Eigen::Index>((N.m1 + R) * (2 * R + 1) + (N.m2 + R));
}

Lattice box_point(Eigen::Index i, std::int64_t R) {
  const std::int64_t w = 2 * R + 1;
  return {static_cast<std::int64_t>(i) / w - R, static_cast<std::int64_t>(i) % w - R};
}

// Returns n with P = n M, if any.
std::optional<std::int64_t> multiple_of(Lattice P, Lattice M) {
  if (M.is_zero()) return std::nullopt;
  if (P.m1 * M.m2 != P.m2 * M.m1) return std::nullopt;
  if (M.m1 != 0) {
    if (P.m1 % M.m1 != 0) return std::nullopt;
    return P.m1 / M.m1;
  }
  if (P.m2 % M.m2 != 0) return std::nullopt;
  return P.m2 / M.m2;
}

}  // namespace

double Lattice::modulus() const { return std::hypot(static_cast<double>(m1), static_cast<double>(m2)); }

std::string Lattice::str() const { return std::to_string(m1) + "," + std::to_string(m2); }

Complex sigma(Lattice M, Lattice N, double theta) {
  // theta * wedge reduced mod 2 in extended precision; large wedges would otherwise lose the phase.
  const auto wedge = static_cast<long double>(M.m1 * N.m2 - M.m2 * N.m1);
  const auto turns = static_cast<double>(std::fmod(static_cast<long double>(theta) * wedge, 2.0L));
  return std::polar(1.0, kPi * turns);
}

TorusElement::TorusElement(double theta) : theta_(theta) {
  if (!std::isfinite(theta)) throw ParameterError("torus theta must be finite");
}

TorusElement::TorusElement(double theta, Terms terms) : TorusElement(theta) {
  for (const auto& [M, c] : terms) set(M, c);
}

TorusElement TorusElement::unit(double theta) { return weyl(theta, {0, 0}, 1.0); }

TorusElement TorusElement::weyl(double theta, Lattice M, Complex c) {
  TorusElement out(theta);
  out.set(M, c);
  return out;
}

Complex TorusElement::coeff(Lattice M) const {
  const auto it = terms_.find(M);
  return it == terms_.end() ? Complex{} : it->second;
}

void TorusElement::set(Lattice M, Complex c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw ParameterError("non-finite torus coefficient");
  if (c == Complex{}) {
    terms_.erase(M);
  } else {
    terms_[M] = c;
  }
}

std::int64_t TorusElement::support_radius() const {
  std::int64_t r = 0;
  for (const auto& [M, c] : terms_) r = std::max({r, std::abs(M.m1), std::abs(M.m2)});
  return r;
}

bool TorusElement::is_self_adjoint(double tol) const { return max_abs_diff(*this, torus_involution(*this)) <= tol; }

TorusElement TorusElement::operator+(const TorusElement& rhs) const {
  require_same_theta(*this, rhs, "torus +");
  TorusElement out = *this;
  for (const auto& [M, c] : rhs.terms_) out.set(M, out.coeff(M) + c);
  return out;
}

TorusElement TorusElement::operator-(const TorusElement& rhs) const { return *this + rhs * Complex(-1.0); }

TorusElement TorusElement::operator*(Complex s) const {
  TorusElement out(theta_);
  for (const auto& [M, c] : terms_) out.set(M, c * s);
  return out;
}

double max_abs_diff(const TorusElement& a, const TorusElement& b) {
  double worst = 0.0;
  for (const auto& [M, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coeff(M)));
  for (const auto& [M, c] : b.terms()) worst = std::max(worst, std::abs(c - a.coeff(M)));
  return worst;
}

TorusElement weyl_product(const TorusElement& a, const TorusElement& b) {
  require_same_theta(a, b, "weyl_product");
  TorusElement::Terms acc;
  for (const auto& [M, x] : a.terms()) {
    for (const auto& [N, y] : b.terms()) acc[M + N] += x * y * sigma(M, N, a.theta());
  }
  return TorusElement(a.theta(), std::move(acc));
}

TorusElement torus_involution(const TorusElement& a) {
  TorusElement out(a.theta());
  for (const auto& [M, c] : a.terms()) out.set(-M, std::conj(c));
  return out;
}

TorusElement torus_del(const TorusElement& a) { return apply_derivation(a, false); }

TorusElement torus_delbar(const TorusElement& a) { return apply_derivation(a, true); }

Complex tau(const TorusElement& a) { return a.coeff({0, 0}); }

Complex phi_state_eval(Lattice M, const TorusElement& a) {
  if (M.is_zero()) throw ParameterError("Phi_M requires M != (0,0)");
  return tau(a) + 0.5 * (a.coeff(M) + a.coeff(-M));
}

TorusState TorusState::phi(Lattice M) {
  if (M.is_zero()) throw ParameterError("Phi_M requires M != (0,0)");
  return TorusState(Kind::Phi, M);
}

Complex TorusState::operator()(const TorusElement& a) const {
  return kind_ == Kind::Tracial ? tau(a) : phi_state_eval(mode_, a);
}

std::string TorusState::describe() const { return kind_ == Kind::Tracial ? "tau" : "phi:" + mode_.str(); }

double torus_op_norm(const TorusElement& a, std::int64_t box_radius) {
  const std::int64_t r = a.support_radius();
  if (box_radius < r + 1) {
    throw ParameterError("torus box radius " + std::to_string(box_radius) + " too small; need at least " +
                         std::to_string(r + 1));
  }
  if (a.empty()) return 0.0;
  const std::int64_t R = box_radius;
  const std::int64_t R_out = R + r;
  const Eigen::Index cols = (2 * R + 1) * (2 * R + 1);
  const Eigen::Index rows = (2 * R_out + 1) * (2 * R_out + 1);

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(cols) * a.terms().size());
  for (Eigen::Index k = 0; k < cols; ++k) {
    const Lattice K = box_point(k, R);
    for (const auto& [P, c] : a.terms()) {
      const Lattice N = P + K;
      triplets.emplace_back(box_index(N, R_out), k, c * sigma(P, N, a.theta()));
    }
  }
  Eigen::SparseMatrix<Complex> L(rows, cols);
  L.setFromTriplets(triplets.begin(), triplets.end());

  if (cols <= kDenseBoxLimit) {
    const CMatrix gram = CMatrix(L.adjoint() * L);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  }
  return op_norm_lanczos([&](const CVector& x) -> CVector { return L * x; },
                         [&](const CVector& y) -> CVector { return L.adjoint() * y; }, cols);
}

double torus_commutator_norm(const TorusElement& a, std::int64_t box_radius) {
  return std::max(torus_op_norm(torus_del(a), box_radius), torus_op_norm(torus_delbar(a), box_radius));
}

BoxConvergence torus_commutator_norm_converged(const TorusElement& a, std::int64_t max_radius, double tol) {
  BoxConvergence out;
  std::int64_t R = a.support_radius() + 1;
  if (max_radius < R) throw ParameterError("max box radius below the support radius of the element");
  out.value = torus_commutator_norm(a, R);
  out.box_radius = R;
  while (2 * R <= max_radius) {
    R *= 2;
    const double next = torus_commutator_norm(a, R);
    const bool settled = std::abs(next - out.value) < tol;
    out.value = next;
    out.box_radius = R;
    if (settled) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

TorusElement torus_ahat(Lattice M, double theta) {
  if (M.is_zero()) throw ParameterError("ahat^M requires M != (0,0)");
  const Complex z(static_cast<double>(M.m1), static_cast<double>(M.m2));
  return TorusElement::weyl(theta, M, 1.0 / (2.0 * kPi * z));
}

double torus_single_mode_norm_bound(const TorusElement& a, Lattice M) {
  if (M.is_zero()) throw ParameterError("single-mode bound requires M != (0,0)");
  std::vector<std::pair<std::int64_t, Complex>> modes;
  std::int64_t degree = 0;
  for (const auto& [P, c] : a.terms()) {
    const auto n = multiple_of(P, M);
    if (!n) throw ParameterError("element has a term off the line spanned by M: " + P.str());
    modes.emplace_back(*n, c);
    degree = std::max(degree, std::abs(*n));
  }
  if (degree == 0) return 0.0;
  // h'(phi) = sum i n c_n e^{i n phi} has degree K; with G grid points Bernstein's
  // inequality gives sup |h'| <= max_grid |h'| / (1 - pi K / G).
  const std::int64_t G = 64 * degree;
  double grid_max = 0.0;
  for (std::int64_t j = 0; j < G; ++j) {
    const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(G);
    Complex v{};
    for (const auto& [n, c] : modes) v += Complex(0.0, static_cast<double>(n)) * c * std::polar(1.0, phi * static_cast<double>(n));
    grid_max = std::max(grid_max, std::abs(v));
  }
  const double sup = grid_max / (1.0 - kPi * static_cast<double>(degree) / static_cast<double>(G));
  // delta(U^{nM}) = i 2 pi n (m1 + i m2) U^{nM}, and U^{nM} = (U^M)^n, so
  // delta(a) = 2 pi (m1 + i m2) h'(U^M); same modulus for delbar.
  return 2.0 * kPi * M.modulus() * sup;
}

RefinedCertificate torus_refined_certificate(Lattice M, double theta, std::size_t terms) {
  if (M.is_zero()) throw ParameterError("refined certificate requires M != (0,0)");
  if (terms < 1) throw ParameterError("refined certificate needs at least one term");
  RefinedCertificate out{TorusElement(theta), 0.0};
  const double K1 = static_cast<double>(terms + 1);
  for (std::size_t n = 1; n <= terms; n += 2) {
    const double nd = static_cast<double>(n);
    const double c = 2.0 / (kPi * nd * nd) * (1.0 - nd / K1);
    const auto k = static_cast<std::int64_t>(n);
    out.element.set({k * M.m1, k * M.m2}, c);
    out.element.set({-k * M.m1, -k * M.m2}, c);
  }
  // h' is the Fejer mean of a square wave of height 1 and the Fejer kernel is a
  // probability density, so sup |h'| <= 1.
  out.norm_bound = 2.0 * kPi * M.modulus();
  return out;
}

DistanceReport torus_distance(const TorusState& s1, const TorusState& s2, double theta,
                              const TorusDistanceParams& params) {
  DistanceReport report;
  report.theta = theta;
  report.state_a = s1.describe();
  report.state_b = s2.describe();

  auto same_functional = [](const TorusState& x, const TorusState& y) {
    if (x.kind() != y.kind()) return false;
    return x.kind() == TorusState::Kind::Tracial || x.mode() == y.mode() || x.mode() == -y.mode();
  };
  if (same_functional(s1, s2)) {
    report.closed_form = 0.0;
    report.analytic_upper = 0.0;
    report.bracket_width = 0.0;
    return report;
  }

  // Modes where the two functionals differ.
  std::vector<Lattice> modes;
  double upper = 0.0;
  for (const TorusState* s : {&s1, &s2}) {
    if (s->kind() != TorusState::Kind::Phi) continue;
    modes.push_back(s->mode());
    // |a_M|, |a_{-M}| <= 1/(2 pi |M|) on the ball.
    upper += 1.0 / (2.0 * kPi * s->mode().modulus());
  }
  report.analytic_upper = upper;
  if (s1.kind() != s2.kind()) report.reference_value = upper;

  auto gap = [&](const TorusElement& a) { return std::abs(s1(a) - s2(a)); };

  std::int64_t box_used = 0;
  for (Lattice M : modes) {
    for (Lattice mode : {M, -M}) {
      const TorusElement cand = torus_ahat(mode, theta);
      double norm = 0.0;
      if (params.box_radius) {
        norm = torus_commutator_norm(cand, *params.box_radius);
        box_used = std::max(box_used, *params.box_radius);
      } else {
        const BoxConvergence conv = torus_commutator_norm_converged(cand, params.max_box_radius);
        norm = conv.value;
        box_used = std::max(box_used, conv.box_radius);
      }
      // A single Weyl term is a weighted shift, so the box value is already exact.
      const double value = gap(cand) / norm;
      if (value > report.certificate_lower) {
        report.certificate_lower = value;
        report.certificate_id = "ahat^(" + mode.str() + ")";
      }
    }
    if (params.refine) {
      const RefinedCertificate ref = torus_refined_certificate(M, theta, params.refined_terms);
      const double value = gap(ref.element) / ref.norm_bound;
      if (!report.refined_lower || value > *report.refined_lower) {
        report.refined_lower = value;
        report.refined_id = "fejer-triangle^(" + M.str() + "):" + std::to_string(params.refined_terms);
      }
    }
  }
  report.truncation_order = static_cast<std::size_t>(box_used);
  const double best_lower = std::max(report.certificate_lower, report.refined_lower.value_or(0.0));
  report.bracket_width = upper - best_lower;
  return report;
}

}  // namespace ncdist
