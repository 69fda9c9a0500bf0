#pragma once

// Operator norms and the Lipschitz ball B_1 = { a : ||[D, pi(a)]||_op <= 1 }.
//
// Left multiplication by a finitely supported a acts on the orthogonal basis
// {f_{pq}} by multiplying the coefficient matrix from the left, so ||L(a)||_op
// is the largest singular value of that matrix. No discretization is involved.

#include <cstddef>
#include <functional>
#include <vector>

#include "ncdist/moyal_algebra.hpp"
#include "ncdist/moyal_calculus.hpp"

namespace ncdist {

inline constexpr double kBallTolerance = 1e-9;
/// Dimensions up to this size use a full SVD; larger ones use power iteration.
inline constexpr Eigen::Index kDenseSvdLimit = 64;

struct PowerIterationOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 200000;
};

/// Largest singular value of a (possibly rectangular) matrix; 0 for an empty one.
double op_norm(const CMatrix& coeffs);

/// Power iteration on the Gram matrix A^H A from a fixed start vector.
double op_norm_power(const CMatrix& coeffs, PowerIterationOptions options = {});

/// Matrix-free variant: `apply` maps C^cols -> C^rows, `apply_adjoint` the reverse.
double op_norm_power(const std::function<CVector(const CVector&)>& apply,
                     const std::function<CVector(const CVector&)>& apply_adjoint, Eigen::Index cols,
                     PowerIterationOptions options = {});

struct LanczosOptions {
  /// Stop once the Ritz residual of the top pair is below tolerance * eigenvalue.
  double tolerance = 1e-11;
  /// Or once the top Ritz value grows by less than this (relative) between checks.
  double stall_tolerance = 1e-15;
  std::size_t max_steps = 400;
};

/// Largest singular value by Lanczos on A^H A with full reorthogonalization.
/// The Ritz value never exceeds the true value. Converges where power iteration
/// stalls on a clustered top spectrum.
double op_norm_lanczos(const std::function<CVector(const CVector&)>& apply,
                       const std::function<CVector(const CVector&)>& apply_adjoint, Eigen::Index cols,
                       LanczosOptions options = {});

/// ||[D, pi(a)]||_op = sqrt(2) max(||L(d a)||_op, ||L(dbar a)||_op).
double commutator_norm(const MoyalElement& a);

struct BallViolation {
  Derivation kind;
  std::size_t m;
  std::size_t n;
  double magnitude;
};

struct BallReport {
  double commutator_norm = 0.0;
  double slack = 1.0;
  bool member = true;
  /// Entries with |alpha_{mn}| or |beta_{mn}| above 1/sqrt(2) + tol. Each one
  /// on its own proves a is outside the ball.
  std::vector<BallViolation> necessary_condition_violations;
};

BallReport check_ball(const MoyalElement& a, double tol = kBallTolerance);

/// Exact membership test for radial elements: |alpha|, |beta| <= 1/sqrt(2) entrywise.
/// Throws PreconditionError when a is not radial.
bool radial_ball_check(const MoyalElement& a, double tol = kBallTolerance);

}  // namespace ncdist
