#pragma once

// Lower bounds B(m0; psi, psi') = |w_psi'(ahat(m0)) - w_psi(ahat(m0))| and the
// machinery used to show they grow without bound for zeta states:
//
//   B(m0) = sqrt(theta/2) | sum_{m=0}^{m0} u(m, m0) (|c'_m|^2 - |c_m|^2) |,
//   u(m, m0) = sum_{k=m}^{m0} 1/sqrt(k+1),
//   G_{s1,s2}(m) = 1/(zeta(s1)(m+1)^s1) - 1/(zeta(s2)(m+1)^s2).
//
// For (psi_0, psi(s)) and for (psi(s1), psi(s2)) with s1 < s2 the leading
// growth is m0^{3/2 - s1}.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncdist/moyal_algebra.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

/// sqrt(theta/2) |sum_{m<=m0} u(m, m0) (w2_m - w1_m)|, O(m0) via suffix sums.
double bound_B(std::size_t m0, const MoyalPureState& s1, const MoyalPureState& s2);

/// u(m, m0); requires m <= m0.
double u_seq(std::size_t m, std::size_t m0);

/// G_{s1,s2}(m); requires 1 < s1 < s2 <= 3/2.
double G_seq(std::size_t m, double s1, double s2);

/// Largest M with G <= 0 on [0, M] and G > 0 after.
std::size_t crossover_index(double s1, double s2);

/// alpha = -sum_{m <= M} G(m) = sum_{m > M} G(m).
double crossover_mass(double s1, double s2);

struct EstimateGrid {
  std::size_t max_m0 = 10000;
  std::size_t points_per_decade = 12;
  std::vector<double> s_values = {1.01, 1.1, 1.25, 1.5};
  std::vector<double> exponents = {0.25, 0.5, 0.75, 1.0};  // for the alpha in (0,1] inequality
  std::size_t max_k = 10000;
};

struct EstimateViolation {
  std::string inequality;  // "estim-1", "estim-2", "mino-1", "mino-2"
  std::string where;
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
};

struct EstimateSummary {
  std::size_t checks = 0;
  std::vector<EstimateViolation> violations;
};

/// Checks the four elementary estimates on the grid:
///   sqrt(m0+2) - sqrt(m+1) <= (1/2) sum_{k=m}^{m0} 1/sqrt(k+1) <= sqrt(m0+1) - sqrt(m)       (m < m0)
///   (A+1)^{1-s} - (m0+2)^{1-s} <= (s-1) sum_{m=A}^{m0} (m+1)^{-s} <= A^{1-s} - (m0+1)^{1-s}  (1 <= A < m0)
///   a k^{a-1} >= (k+1)^a - k^a >= a (k+1)^{a-1}   for a in (0,1]
///   a k^{a-1} <= (k+1)^a - k^a <= a (k+1)^{a-1}   for a = 1 - s < 0
EstimateSummary estimate_checks(const EstimateGrid& grid = {});

/// Unique integers, geometrically spaced from lo to hi inclusive.
std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t points_per_decade);

/// A state family parameterized by m0, so zeta cutoffs can follow the grid.
struct ProbeStateSpec {
  enum class Kind { Basis, Zeta, Finite };
  Kind kind = Kind::Basis;
  std::size_t index = 0;
  double s = 0.0;
  std::vector<Complex> weights;

  static ProbeStateSpec basis(std::size_t m) { return {Kind::Basis, m, 0.0, {}}; }
  static ProbeStateSpec zeta(double s) { return {Kind::Zeta, 0, s, {}}; }
  static ProbeStateSpec finite(std::vector<Complex> w) { return {Kind::Finite, 0, 0.0, std::move(w)}; }

  /// Zeta cutoff = cutoff_factor * m0.
  MoyalPureState realize(std::size_t m0, double theta, std::size_t cutoff_factor) const;
  std::string describe() const;
};

inline constexpr std::size_t kProbeCutoffFactor = 100;

struct DivergenceClaim {
  bool divergent = false;
  std::optional<double> theory_slope;
  std::string reason;
};

/// What is known for the pair: infinite distance between a basis state and
/// psi(s), s in (1, 3/2]; between psi(s1) and psi(s2) for distinct exponents in
/// (1, 5/4) u (5/4, 3/2]. Nothing is claimed when min(s1, s2) = 5/4.
DivergenceClaim divergence_claim(const ProbeStateSpec& a, const ProbeStateSpec& b);

struct ProbeSeries {
  std::string state_a;
  std::string state_b;
  double theta = 1.0;
  std::vector<std::size_t> m0_grid;
  std::vector<double> B_values;
  std::pair<std::size_t, std::size_t> fit_window{0, 0};
  std::size_t fit_points = 0;
  double fitted_slope = 0.0;
  std::optional<double> theory_slope;
  std::optional<double> gap;  // fitted - theory
  DivergenceClaim claim;
};

/// Evaluates B over the grid and fits log B against log m0 on the window.
/// Without a window, the top 1.5 decades of the grid are used. Throws
/// ParameterError if any B on the window is not positive.
ProbeSeries asymptotic_fit(const ProbeStateSpec& a, const ProbeStateSpec& b, const std::vector<std::size_t>& m0_grid,
                           std::optional<std::pair<std::size_t, std::size_t>> fit_window = std::nullopt,
                           double theta = 1.0, std::size_t cutoff_factor = kProbeCutoffFactor);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ncdist
