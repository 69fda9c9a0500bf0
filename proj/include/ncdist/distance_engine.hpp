#pragma once

// Spectral distance d(w1, w2) = sup { |w1(a) - w2(a)| : ||[D, pi(a)]||_op <= 1 }
// on the Moyal plane, estimated from several independent directions:
//   * closed form between basis states,
//   * certificate lower bounds from explicit ball elements,
//   * analytic upper bounds from the entrywise necessary conditions,
//   * a convex optimizer over truncated self-adjoint elements.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncdist/errors.hpp"
#include "ncdist/lipschitz.hpp"
#include "ncdist/moyal_algebra.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

/// sqrt(theta/2) sum_{k=n+1}^{m} 1/sqrt(k) for n < m; symmetric; zero on the diagonal.
double closed_form_distance(std::size_t m, std::size_t n, double theta);

/// d(m,n) - d(m,p) - d(p,n). Requires m <= p <= n.
double triangular_check(std::size_t m, std::size_t p, std::size_t n, double theta);

/// A candidate failed the ball test; carries the evidence.
class CertificateRejected : public ParameterError {
 public:
  CertificateRejected(std::size_t index, BallReport report);
  std::size_t index() const noexcept { return index_; }
  const BallReport& report() const noexcept { return report_; }

 private:
  std::size_t index_;
  BallReport report_;
};

struct Certificate {
  MoyalElement element;
  std::string id;
};

struct CertificateBound {
  double value = 0.0;
  std::string id;
  std::size_t index = 0;
};

/// max over candidates of |w1(a) - w2(a)|. Every candidate must lie in B_1
/// (within kBallTolerance) or CertificateRejected is thrown.
CertificateBound certificate_lower_bound(const MoyalPureState& s1, const MoyalPureState& s2,
                                         std::span<const Certificate> candidates);

/// ahat(k) for k <= max_index and a_step(k) for k <= max_index.
std::vector<Certificate> standard_certificates(std::size_t max_index, double theta);

/// Largest index that can matter for a pair of states: the larger support,
/// capped for infinite-support states.
std::size_t certificate_range(const MoyalPureState& s1, const MoyalPureState& s2, std::size_t cap = 4096);

/// Upper bound valid for every a in B_1. The diagonal part of w1 - w2 is bounded by
/// telescoping along alpha_{k+1,k}; off-diagonal entries by
///   |a_{pq}| <= K_{pq} = sqrt(2 theta) sum_{k=0}^{min(p,q)} 1/(sqrt(p-k) + sqrt(q-k)).
/// Throws NotApplicableError for states of unbounded support.
double analytic_upper_bound(const MoyalPureState& s1, const MoyalPureState& s2);

/// K_{pq} above.
double offdiagonal_bound(std::size_t p, std::size_t q, double theta);

struct OptimizerParams {
  std::size_t max_iterations = 100000;
  std::size_t check_every = 50;
  double relative_tolerance = 1e-8;
  /// Primal residual ||T a - X||_F / ||X||_F required before stopping.
  double residual_tolerance = 1e-9;
  /// ADMM penalty relative to sqrt(theta) * ||objective||; 0 picks the default.
  double penalty_scale = 0.0;
};

struct OptimizerResult {
  double value = 0.0;  // feasible lower bound
  MoyalElement certificate{1.0, 0};
  std::size_t iterations = 0;
  double feasibility_residual = 0.0;  // commutator_norm(certificate) - 1
  bool converged = false;
};

/// Maximizes w1(a) - w2(a) over self-adjoint a of the given order with
/// ||[D, pi(a)]||_op <= 1, by ADMM on the splitting X = d(a), ||X||_op <= 1/sqrt(2).
/// The best iterate is rescaled to commutator norm exactly 1 before evaluation,
/// so the returned value is always a feasible lower bound.
OptimizerResult optimize_distance(const MoyalPureState& s1, const MoyalPureState& s2, std::size_t order,
                                  const OptimizerParams& params = {});

struct DistanceReport {
  double theta = 0.0;
  std::size_t truncation_order = 0;
  std::string state_a;
  std::string state_b;
  std::optional<double> closed_form;
  double certificate_lower = 0.0;
  std::string certificate_id;
  std::optional<double> analytic_upper;
  std::optional<double> optimizer_lower;
  std::optional<std::size_t> iterations;
  std::optional<double> feasibility_residual;
  std::optional<bool> converged;
  /// analytic_upper - best lower bound, when an upper bound exists.
  std::optional<double> bracket_width;
  /// Set when the pair is known to sit at infinite distance.
  bool divergent = false;
  std::optional<double> divergence_slope;
  /// Extra lower bound from a refined certificate family (torus only).
  std::optional<double> refined_lower;
  std::string refined_id;
  /// Published value for the pair, when one exists and is not attained.
  std::optional<double> reference_value;
};

struct DistanceOptions {
  std::size_t order = 16;
  bool run_optimizer = true;
  OptimizerParams optimizer;
};

/// Full bracket for a pair of Moyal pure states. For infinite-support states
/// only certificate bounds are produced; the caller attaches divergence data.
DistanceReport moyal_distance(const MoyalPureState& s1, const MoyalPureState& s2, const DistanceOptions& options);

}  // namespace ncdist
