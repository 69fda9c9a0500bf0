#pragma once

// Pure states of the Moyal algebra.
//
// Every pure state is a vector state of a unit vector psi = sum psi_m f_{m0}.
// We store the normalized coefficients c_m = sqrt(2 pi theta) psi_m, so that
// sum |c_m|^2 = 1 and omega(a) = sum_{m,n} conj(c_m) c_n a_{mn}.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncdist/moyal_algebra.hpp"

namespace ncdist {

/// Riemann zeta for s > 1 by Euler-Maclaurin summation (relative error ~1e-15).
double riemann_zeta(double s);

/// sum_{k=1}^{count} k^{-s}, for s > 1. Large counts use zeta minus an
/// Euler-Maclaurin tail, so the cost is O(1) beyond a fixed direct-sum limit.
double zeta_partial_sum(double s, std::size_t count);

enum class StateKind { Basis, Zeta, Finite };

struct ZetaProfile {
  double s = 0.0;
  std::size_t cutoff = 0;    // number of retained coefficients c_0..c_{cutoff-1}
  double zeta = 0.0;         // zeta(s), for reporting
  double partial_sum = 0.0;  // sum_{m<cutoff} (m+1)^{-s}, the normalization actually used
};

class MoyalPureState {
 public:
  static MoyalPureState basis(std::size_t m, double theta);
  static MoyalPureState zeta(double s, std::size_t cutoff, double theta);
  /// Normalizes the weights; the applied factor is kept as metadata.
  static MoyalPureState finite(std::span<const Complex> weights, double theta);

  double theta() const noexcept { return theta_; }
  StateKind kind() const noexcept { return kind_; }

  /// Number of stored coefficients (the cutoff for zeta states).
  std::size_t support() const noexcept;
  /// True unless the state stands for an infinite-support vector (zeta states).
  bool finitely_supported() const noexcept { return kind_ != StateKind::Zeta; }

  Complex coefficient(std::size_t m) const;
  /// |c_m|^2.
  double weight(std::size_t m) const;
  /// c_0 .. c_{count-1}, zero beyond the support.
  CVector coefficients(std::size_t count) const;

  std::optional<std::size_t> basis_index() const noexcept { return basis_index_; }
  const std::optional<ZetaProfile>& zeta_profile() const noexcept { return zeta_; }
  /// 1/sqrt(sum |w|^2) applied to the raw weights of a finite state.
  double normalization_factor() const noexcept { return normalization_; }

  /// Short spec string, e.g. "basis:3", "zeta:1.2:100000", "finite:1,0.5+0.5i".
  std::string describe() const;

  /// Same state with every coefficient multiplied by a unit phase.
  MoyalPureState with_phase(double phase) const;

 private:
  MoyalPureState(double theta, StateKind kind);

  double theta_;
  StateKind kind_;
  CVector explicit_;  // basis and finite states
  std::optional<std::size_t> basis_index_;
  std::optional<ZetaProfile> zeta_;
  double normalization_ = 1.0;
  Complex phase_{1.0, 0.0};
};

MoyalPureState basis_state(std::size_t m, double theta);
MoyalPureState zeta_state(double s, std::size_t cutoff, double theta);
MoyalPureState finite_state(std::span<const Complex> weights, double theta);

/// omega(a) = sum conj(c_m) c_n a_{mn}.
Complex eval(const MoyalPureState& state, const MoyalElement& a);

/// |c1_m|^2 - |c2_m|^2 for m < length (default: the larger support).
std::vector<double> diagonal_difference(const MoyalPureState& s1, const MoyalPureState& s2,
                                        std::optional<std::size_t> length = std::nullopt);

/// Coefficient matrix w_{mn} = conj(c1_m) c1_n - conj(c2_m) c2_n of omega_1 - omega_2,
/// so that omega_1(a) - omega_2(a) = sum w_{mn} a_{mn}. Hermitian; trace zero.
CMatrix state_difference_matrix(const MoyalPureState& s1, const MoyalPureState& s2, std::size_t order);

}  // namespace ncdist
