#include "ncdist/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ncdist/errors.hpp"

namespace ncdist {

namespace {

// Deterministic, non-degenerate start vector: entries 1, 1/2, 1/3, ... with a
// slowly rotating phase so that no real or imaginary subspace is missed.
CVector start_vector(Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = std::polar(1.0 / static_cast<double>(i + 1), 0.37 * static_cast<double>(i));
  }
  return v / v.norm();
}

}  // namespace

double op_norm(const CMatrix& coeffs) {
  if (coeffs.size() == 0) return 0.0;
  if (std::max(coeffs.rows(), coeffs.cols()) <= kDenseSvdLimit) {
    Eigen::JacobiSVD<CMatrix> svd(coeffs);
    return svd.singularValues()(0);
  }
  return op_norm_power(coeffs);
}

double op_norm_power(const CMatrix& coeffs, PowerIterationOptions options) {
  if (coeffs.size() == 0) return 0.0;
  return op_norm_power([&](const CVector& x) -> CVector { return coeffs * x; },
                       [&](const CVector& y) -> CVector { return coeffs.adjoint() * y; }, coeffs.cols(),
                       options);
}

double op_norm_power(const std::function<CVector(const CVector&)>& apply,
                     const std::function<CVector(const CVector&)>& apply_adjoint, Eigen::Index cols,
                     PowerIterationOptions options) {
  if (cols == 0) return 0.0;
  CVector v = start_vector(cols);
  double lambda = 0.0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    CVector w = apply_adjoint(apply(v));
    // Rayleigh quotient of the Gram matrix at the unit vector v.
    const double next = std::max(0.0, v.dot(w).real());
    const double norm_w = w.norm();
    if (norm_w == 0.0) return 0.0;
    v = w / norm_w;
    if (it > 0 && std::abs(next - lambda) <= options.tolerance * std::max(next, 1e-300)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // One more Rayleigh quotient at the final iterate; it is the better estimate.
  const CVector av = apply(v);
  return std::max(std::sqrt(lambda), av.norm());
}

double op_norm_lanczos(const std::function<CVector(const CVector&)>& apply,
                       const std::function<CVector(const CVector&)>& apply_adjoint, Eigen::Index cols,
                       LanczosOptions options) {
  if (cols == 0) return 0.0;
  const auto steps = static_cast<Eigen::Index>(std::min<std::size_t>(options.max_steps, static_cast<std::size_t>(cols)));
  CMatrix V(cols, steps);
  std::vector<double> alpha, beta;
  V.col(0) = start_vector(cols);
  double top = 0.0;
  for (Eigen::Index j = 0; j < steps; ++j) {
    CVector w = apply_adjoint(apply(V.col(j)));
    alpha.push_back(V.col(j).dot(w).real());
    // Classical Gram-Schmidt against the whole basis, repeated when it cancels heavily.
    double before = w.norm();
    double b = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
      b = w.norm();
      if (b > 0.7 * before) break;
      before = b;
    }
    // Breakdown: the Krylov space is invariant and T_k already holds the answer.
    const bool breakdown = b <= 1e-12 * std::max(top, std::abs(alpha.back()));
    const bool last = j + 1 == steps || breakdown;
    // The tridiagonal solve is O(k^2); checking every few steps keeps it off the critical path.
    if (!last && j % 8 != 7) {
      V.col(j + 1) = w / b;
      beta.push_back(b);
      continue;
    }

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1)) : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double previous = top;
    top = std::max(0.0, tri.eigenvalues()(k - 1));
    const double residual = b * std::abs(tri.eigenvectors()(k - 1, k - 1));
    if (breakdown || top == 0.0 || residual <= options.tolerance * top) break;
    // Ritz values only increase; a stalled top value over a full check interval is final.
    if (top - previous <= options.stall_tolerance * top) break;
    if (j + 1 < steps) {
      V.col(j + 1) = w / b;
      beta.push_back(b);
    }
  }
  return std::sqrt(top);
}

double commutator_norm(const MoyalElement& a) {
  return std::numbers::sqrt2 * std::max(op_norm(del(a).coeffs()), op_norm(delbar(a).coeffs()));
}

BallReport check_ball(const MoyalElement& a, double tol) {
  if (tol < 0.0) throw ParameterError("check_ball: tolerance must be nonnegative");
  BallReport report;
  report.commutator_norm = commutator_norm(a);
  report.slack = 1.0 - report.commutator_norm;
  report.member = report.commutator_norm <= 1.0 + tol;

  const double bound = 1.0 / std::numbers::sqrt2 + tol;
  for (const auto& d : {del(a), delbar(a)}) {
    for (Eigen::Index m = 0; m < d.coeffs().rows(); ++m) {
      for (Eigen::Index n = 0; n < d.coeffs().cols(); ++n) {
        const double mag = std::abs(d.coeffs()(m, n));
        if (mag > bound) {
          report.necessary_condition_violations.push_back(
              {d.kind(), static_cast<std::size_t>(m), static_cast<std::size_t>(n), mag});
        }
      }
    }
  }
  return report;
}

bool radial_ball_check(const MoyalElement& a, double tol) {
  if (!a.is_radial()) throw PreconditionError("radial_ball_check: element is not radial");
  const double bound = 1.0 / std::numbers::sqrt2 + tol;
  return del(a).coeffs().cwiseAbs().maxCoeff() <= bound && delbar(a).coeffs().cwiseAbs().maxCoeff() <= bound;
}

}  // namespace ncdist
