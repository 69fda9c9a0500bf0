#pragma once

// Noncommutative torus in the Weyl basis:
//   U^M U^N = sigma(M, N) U^{M+N},  (U^M)* = U^{-M},  tau(a) = a_{(0,0)},
//   sigma(M, N) = exp(i pi theta (m1 n2 - m2 n1)).
// Left multiplication acts on GNS coefficients as a twisted convolution,
//   (L(a) psi)_N = sum_P a_P psi_{N-P} sigma(P, N),
// whose norm is approximated from below on boxes [-R, R]^2.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "ncdist/distance_engine.hpp"
#include "ncdist/moyal_algebra.hpp"

namespace ncdist {

struct Lattice {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;

  friend auto operator<=>(const Lattice&, const Lattice&) = default;
  friend Lattice operator+(Lattice a, Lattice b) { return {a.m1 + b.m1, a.m2 + b.m2}; }
  friend Lattice operator-(Lattice a, Lattice b) { return {a.m1 - b.m1, a.m2 - b.m2}; }
  friend Lattice operator-(Lattice a) { return {-a.m1, -a.m2}; }
  bool is_zero() const { return m1 == 0 && m2 == 0; }
  /// |m1 + i m2|
  double modulus() const;
  std::string str() const;
};

Complex sigma(Lattice M, Lattice N, double theta);

class TorusElement {
 public:
  using Terms = std::map<Lattice, Complex>;

  explicit TorusElement(double theta = 0.0);
  TorusElement(double theta, Terms terms);

  static TorusElement unit(double theta);
  static TorusElement weyl(double theta, Lattice M, Complex c = 1.0);

  double theta() const noexcept { return theta_; }
  const Terms& terms() const noexcept { return terms_; }
  Complex coeff(Lattice M) const;
  /// Sets a_M; a zero value removes the term.
  void set(Lattice M, Complex c);
  bool empty() const noexcept { return terms_.empty(); }
  /// max(|m1|, |m2|) over the support; 0 for the empty element.
  std::int64_t support_radius() const;
  bool is_self_adjoint(double tol = 1e-12) const;

  TorusElement operator+(const TorusElement& rhs) const;
  TorusElement operator-(const TorusElement& rhs) const;
  TorusElement operator*(Complex s) const;

 private:
  double theta_;
  Terms terms_;
};

double max_abs_diff(const TorusElement& a, const TorusElement& b);

TorusElement weyl_product(const TorusElement& a, const TorusElement& b);
TorusElement torus_involution(const TorusElement& a);
/// alpha_N = i 2 pi (n1 + i n2) a_N
TorusElement torus_del(const TorusElement& a);
/// i 2 pi (n1 - i n2) a_N
TorusElement torus_delbar(const TorusElement& a);

Complex tau(const TorusElement& a);
/// tau(a) + (a_M + a_{-M})/2; M must be nonzero.
Complex phi_state_eval(Lattice M, const TorusElement& a);

class TorusState {
 public:
  enum class Kind { Tracial, Phi };

  static TorusState tracial() { return TorusState(Kind::Tracial, {}); }
  static TorusState phi(Lattice M);

  Kind kind() const noexcept { return kind_; }
  Lattice mode() const noexcept { return mode_; }
  Complex operator()(const TorusElement& a) const;
  std::string describe() const;
  friend bool operator==(const TorusState&, const TorusState&) = default;

 private:
  TorusState(Kind kind, Lattice mode) : kind_(kind), mode_(mode) {}
  Kind kind_;
  Lattice mode_;
};

/// Norm of the box compression: inputs restricted to [-R, R]^2, outputs kept
/// in full. Requires box_radius >= support_radius(a) + 1.
double torus_op_norm(const TorusElement& a, std::int64_t box_radius);

/// max(||L(delta a)||, ||L(delbar a)||) on the box.
double torus_commutator_norm(const TorusElement& a, std::int64_t box_radius);

struct BoxConvergence {
  double value = 0.0;
  std::int64_t box_radius = 0;
  bool converged = false;
};

inline constexpr double kBoxTolerance = 1e-9;

/// Doubles R from support_radius + 1 until successive values differ by less
/// than tol, or max_radius is reached.
BoxConvergence torus_commutator_norm_converged(const TorusElement& a, std::int64_t max_radius = 32,
                                               double tol = kBoxTolerance);

/// U^M / (2 pi (m1 + i m2))
TorusElement torus_ahat(Lattice M, double theta);

/// Fejer-smoothed triangle wave in U^M, normalized so that its commutator norm
/// is at most one: a = sum_n c_n U^{nM} with c_{+-n} from 4/(pi n^2), n odd <= terms.
/// The norm bound is 2 pi |M| sup |h'| for h(phi) = sum c_n e^{i n phi}.
struct RefinedCertificate {
  TorusElement element;
  double norm_bound = 0.0;  // bound on the commutator norm before normalization
};
RefinedCertificate torus_refined_certificate(Lattice M, double theta, std::size_t terms = 401);

/// 2 pi |z| sup_phi |sum_n i n c_n e^{i n phi}| bounded from above for an element
/// supported on multiples of M. Throws ParameterError otherwise.
double torus_single_mode_norm_bound(const TorusElement& a, Lattice M);

struct TorusDistanceParams {
  std::optional<std::int64_t> box_radius;  // default: converged doubling
  std::int64_t max_box_radius = 32;
  bool refine = true;
  std::size_t refined_terms = 401;
};

/// Bracket for a pair of torus states. (Phi_M, tau) gets the certificate
/// ahat^M, the refined certificate and the entrywise upper bound 1/(2 pi |M|).
DistanceReport torus_distance(const TorusState& s1, const TorusState& s2, double theta,
                              const TorusDistanceParams& params = {});

}  // namespace ncdist
