#pragma once

// Derivations on the Moyal plane in matrix-base coordinates.
//
// With d = (d_1 - i d_2)/sqrt(2) and dbar = (d_1 + i d_2)/sqrt(2):
//   d f_{mn}    = sqrt(n/theta) f_{m,n-1} - sqrt((m+1)/theta) f_{m+1,n}
//   dbar f_{mn} = sqrt(m/theta) f_{m-1,n} - sqrt((n+1)/theta) f_{m,n+1}
// Derivatives raise the order by one, so they are exact on finite elements.

#include <cstddef>

#include "ncdist/moyal_algebra.hpp"

namespace ncdist {

enum class Derivation { Del, Delbar };

const char* to_string(Derivation kind) noexcept;

/// Coefficients alpha_{mn} of d(a) or beta_{mn} of dbar(a). Kept distinct from
/// MoyalElement so the 1/sqrt(2) in the derivation is never applied twice.
class DerivativeCoefficients {
 public:
  DerivativeCoefficients(Derivation kind, double theta, CMatrix coeffs);

  Derivation kind() const noexcept { return kind_; }
  double theta() const noexcept { return theta_; }
  std::size_t order() const noexcept { return static_cast<std::size_t>(coeffs_.rows()); }
  const CMatrix& coeffs() const noexcept { return coeffs_; }
  Complex operator()(std::size_t m, std::size_t n) const noexcept;

  /// Reinterprets the coefficients as the element d(a) (resp. dbar(a)).
  MoyalElement as_element() const { return MoyalElement(theta_, coeffs_); }

 private:
  Derivation kind_;
  double theta_;
  CMatrix coeffs_;
};

DerivativeCoefficients del(const MoyalElement& a);
DerivativeCoefficients delbar(const MoyalElement& a);

/// Rebuilds a from a_{00} and its two derivatives:
///   a_{pq} = delta_{pq} a_00
///          + sqrt(theta) sum_{k=0}^{min(p,q)} (alpha_{p-k,q-k-1} + beta_{p-k-1,q-k}) / (sqrt(p-k) + sqrt(q-k))
/// Terms with a negative index vanish; the 0/0 term at p = q = k is dropped.
/// The result has the order of the derivative inputs.
MoyalElement reconstruct(Complex a00, const DerivativeCoefficients& alpha, const DerivativeCoefficients& beta);

/// Certificate element ahat(m0): diagonal, ahat_{pp} = sqrt(theta/2) sum_{k=p}^{m0} 1/sqrt(k+1).
MoyalElement ahat(std::size_t m0, double theta);

/// Single-step element a(n) = sqrt(theta/2) / sqrt(n+1) f_{nn}.
MoyalElement a_step(std::size_t n, double theta);

}  // namespace ncdist
