#include "ncdist/distance_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "ncdist/moyal_calculus.hpp"

namespace ncdist {

double closed_form_distance(std::size_t m, std::size_t n, double theta) {
  if (m < n) std::swap(m, n);
  double acc = 0.0;
  for (std::size_t k = m; k > n; --k) acc += 1.0 / std::sqrt(static_cast<double>(k));
  return std::sqrt(theta / 2.0) * acc;
}

double triangular_check(std::size_t m, std::size_t p, std::size_t n, double theta) {
  if (!(m <= p && p <= n)) throw PreconditionError("triangular_check requires m <= p <= n");
  return closed_form_distance(m, n, theta) - closed_form_distance(m, p, theta) - closed_form_distance(p, n, theta);
}

namespace {

std::string rejection_message(std::size_t index, const BallReport& report) {
  std::ostringstream os;
  os << "certificate candidate " << index << " lies outside the Lipschitz ball (commutator norm "
     << report.commutator_norm << ", " << report.necessary_condition_violations.size()
     << " entrywise violations)";
  return os.str();
}

}  // namespace

CertificateRejected::CertificateRejected(std::size_t index, BallReport report)
    : ParameterError(rejection_message(index, report)), index_(index), report_(std::move(report)) {}

CertificateBound certificate_lower_bound(const MoyalPureState& s1, const MoyalPureState& s2,
                                         std::span<const Certificate> candidates) {
  require_same_theta(s1.theta(), s2.theta(), "certificate_lower_bound");
  CertificateBound best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const MoyalElement& a = candidates[i].element;
    // Radial candidates have an exact entrywise test; the full report is only built on rejection.
    if (a.is_radial() ? !radial_ball_check(a) : !check_ball(a).member) throw CertificateRejected(i, check_ball(a));
    const double gap = std::abs(eval(s1, a) - eval(s2, a));
    if (gap > best.value || best.id.empty()) {
      best = {gap, candidates[i].id, i};
    }
  }
  return best;
}

std::vector<Certificate> standard_certificates(std::size_t max_index, double theta) {
  std::vector<Certificate> out;
  out.reserve(2 * (max_index + 1));
  for (std::size_t k = 0; k <= max_index; ++k) out.push_back({ahat(k, theta), "ahat(" + std::to_string(k) + ")"});
  for (std::size_t k = 0; k <= max_index; ++k) out.push_back({a_step(k, theta), "a_step(" + std::to_string(k) + ")"});
  return out;
}

std::size_t certificate_range(const MoyalPureState& s1, const MoyalPureState& s2, std::size_t cap) {
  const std::size_t support = std::max(s1.support(), s2.support());
  return std::min(cap, support == 0 ? std::size_t{0} : support - 1);
}

double offdiagonal_bound(std::size_t p, std::size_t q, double theta) {
  double acc = 0.0;
  for (std::size_t k = 0; k <= std::min(p, q); ++k) {
    const std::size_t pk = p - k;
    const std::size_t qk = q - k;
    if (pk == 0 && qk == 0) continue;
    acc += 1.0 / (std::sqrt(static_cast<double>(pk)) + std::sqrt(static_cast<double>(qk)));
  }
  return std::sqrt(2.0 * theta) * acc;
}

double analytic_upper_bound(const MoyalPureState& s1, const MoyalPureState& s2) {
  require_same_theta(s1.theta(), s2.theta(), "analytic_upper_bound");
  if (!s1.finitely_supported() || !s2.finitely_supported()) {
    throw NotApplicableError("analytic upper bound needs finitely supported states (got " + s1.describe() + ", " +
                             s2.describe() + ")");
  }
  const std::size_t n = std::max(s1.support(), s2.support());
  const CMatrix w = state_difference_matrix(s1, s2, n);
  const double theta = s1.theta();

  // Diagonal: sum_m d_m a_mm = sum_k (a_{k+1,k+1} - a_kk) * sum_{m>k} d_m, and each
  // step is bounded through alpha_{k+1,k} = sqrt((k+1)/theta) (a_{k+1,k+1} - a_kk).
  double diag = 0.0;
  double tail = 0.0;
  for (std::size_t k = n; k-- > 1;) {
    tail += w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real();
    diag += std::abs(tail) / std::sqrt(static_cast<double>(k));
  }
  diag *= std::sqrt(theta / 2.0);

  double off = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      const double mag = std::abs(w(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)));
      if (mag != 0.0) off += mag * offdiagonal_bound(p, q, theta);
    }
  }
  return diag + off;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Real coordinates for self-adjoint N x N matrices: x[i] = a_ii for i < N, then
// for each i < j the pair (Re a_ij, Im a_ij).
struct HermitianCoordinates {
  explicit HermitianCoordinates(Eigen::Index n) : n(n) {}
  Eigen::Index n;

  Eigen::Index size() const { return n * n; }
  Eigen::Index pair_index(Eigen::Index i, Eigen::Index j) const {
    // offset of the pair for i < j in row-major upper-triangular order
    return n + 2 * (i * n - i * (i + 1) / 2 + (j - i - 1));
  }

  CMatrix to_matrix(const Eigen::VectorXd& x) const {
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = x(i);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const Eigen::Index k = pair_index(i, j);
        a(i, j) = Complex(x(k), x(k + 1));
        a(j, i) = Complex(x(k), -x(k + 1));
      }
    }
    return a;
  }
};

// Real form of a -> d(a) restricted to self-adjoint a of order N. Output
// coordinates are (Re, Im) pairs of the (N+1) x (N+1) alpha matrix, row-major.
SparseMatrix build_del_operator(const HermitianCoordinates& coords, double theta) {
  const Eigen::Index n = coords.n;
  const Eigen::Index out_dim = n + 1;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(8 * n * n));
  auto out_index = [&](Eigen::Index p, Eigen::Index q, int part) { return 2 * (p * out_dim + q) + part; };

  // Entry a_ij = value contributes +sqrt(j/theta) value to alpha_{i,j-1}
  // and -sqrt((i+1)/theta) value to alpha_{i+1,j}.
  auto scatter = [&](Eigen::Index i, Eigen::Index j, Complex value, Eigen::Index column) {
    auto add = [&](Eigen::Index p, Eigen::Index q, Complex v) {
      if (v.real() != 0.0) triplets.emplace_back(out_index(p, q, 0), column, v.real());
      if (v.imag() != 0.0) triplets.emplace_back(out_index(p, q, 1), column, v.imag());
    };
    if (j >= 1) add(i, j - 1, std::sqrt(static_cast<double>(j) / theta) * value);
    add(i + 1, j, -std::sqrt(static_cast<double>(i + 1) / theta) * value);
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    scatter(i, i, 1.0, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::Index k = coords.pair_index(i, j);
      scatter(i, j, 1.0, k);
      scatter(j, i, 1.0, k);
      scatter(i, j, Complex(0.0, 1.0), k + 1);
      scatter(j, i, Complex(0.0, -1.0), k + 1);
    }
  }
  SparseMatrix t(2 * out_dim * out_dim, coords.size());
  t.setFromTriplets(triplets.begin(), triplets.end());
  return t;
}

CMatrix real_to_complex(const Eigen::VectorXd& v, Eigen::Index dim) {
  CMatrix m(dim, dim);
  for (Eigen::Index p = 0; p < dim; ++p)
    for (Eigen::Index q = 0; q < dim; ++q) m(p, q) = Complex(v(2 * (p * dim + q)), v(2 * (p * dim + q) + 1));
  return m;
}

Eigen::VectorXd complex_to_real(const CMatrix& m) {
  const Eigen::Index dim = m.rows();
  Eigen::VectorXd v(2 * dim * dim);
  for (Eigen::Index p = 0; p < dim; ++p)
    for (Eigen::Index q = 0; q < dim; ++q) {
      v(2 * (p * dim + q)) = m(p, q).real();
      v(2 * (p * dim + q) + 1) = m(p, q).imag();
    }
  return v;
}

// Gradient of a -> sum w_pq a_pq (real for self-adjoint a, Hermitian w) in the
// Hermitian coordinates.
Eigen::VectorXd objective_vector(const HermitianCoordinates& coords, const CMatrix& w) {
  Eigen::VectorXd c(coords.size());
  for (Eigen::Index i = 0; i < coords.n; ++i) {
    c(i) = w(i, i).real();
    for (Eigen::Index j = i + 1; j < coords.n; ++j) {
      const Eigen::Index k = coords.pair_index(i, j);
      c(k) = 2.0 * w(i, j).real();
      c(k + 1) = -2.0 * w(i, j).imag();
    }
  }
  return c;
}

CMatrix project_to_spectral_ball(const CMatrix& v, double radius) {
  Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  if (s.size() == 0 || s(0) <= radius) return v;
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(s(i), radius);
  return svd.matrixU() * s.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
}

double spectral_norm(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace

OptimizerResult optimize_distance(const MoyalPureState& s1, const MoyalPureState& s2, std::size_t order,
                                  const OptimizerParams& params) {
  require_same_theta(s1.theta(), s2.theta(), "optimize_distance");
  const double theta = s1.theta();
  if (!s1.finitely_supported() || !s2.finitely_supported()) {
    throw NotApplicableError("optimizer needs finitely supported states");
  }
  const std::size_t support = std::max(s1.support(), s2.support());
  if (order < support + 2) {
    throw PreconditionError("optimize_distance: order " + std::to_string(order) + " must be at least support + 2 = " +
                            std::to_string(support + 2));
  }
  if (params.check_every == 0) throw ParameterError("optimize_distance: check_every must be positive");

  const auto n = static_cast<Eigen::Index>(order);
  const HermitianCoordinates coords(n);
  const CMatrix w = state_difference_matrix(s1, s2, order);
  const Eigen::VectorXd c = objective_vector(coords, w);

  OptimizerResult result;
  if (c.norm() == 0.0) {
    result.certificate = ahat(0, theta);
    result.value = std::abs(eval(s1, result.certificate) - eval(s2, result.certificate));
    result.feasibility_residual = commutator_norm(result.certificate) - 1.0;
    result.converged = true;
    return result;
  }

  const SparseMatrix t = build_del_operator(coords, theta);
  const SparseMatrix gram = SparseMatrix(t.transpose() * t);
  Eigen::SimplicialLDLT<SparseMatrix> solver(gram);
  if (solver.info() != Eigen::Success) throw std::runtime_error("optimize_distance: factorization failed");

  const double radius = 1.0 / std::numbers::sqrt2;
  const double scale = params.penalty_scale > 0.0 ? params.penalty_scale : 1.0 / std::numbers::sqrt2;
  const double rho = scale * std::sqrt(theta) * c.norm();
  const Eigen::Index out_dim = n + 1;

  CMatrix x_split = CMatrix::Zero(out_dim, out_dim);
  CMatrix dual = CMatrix::Zero(out_dim, out_dim);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(coords.size());
  Eigen::VectorXd best_x = x;
  double best_value = -1.0;
  double previous_value = 0.0;
  bool have_previous = false;

  std::size_t it = 0;
  for (; it < params.max_iterations;) {
    const Eigen::VectorXd rhs = t.transpose() * complex_to_real(x_split - dual) + c / rho;
    x = solver.solve(rhs);
    const CMatrix tx = real_to_complex(t * x, out_dim);
    const CMatrix next_split = project_to_spectral_ball(tx + dual, radius);
    x_split = next_split;
    dual += tx - x_split;
    ++it;

    if (it % params.check_every != 0) continue;
    const double norm_tx = spectral_norm(tx);
    if (norm_tx == 0.0) continue;
    // Feasible value after rescaling to ||d(a)||_op = 1/sqrt(2), i.e. commutator norm 1.
    const double value = std::abs(c.dot(x)) * radius / norm_tx;
    if (value > best_value) {
      best_value = value;
      best_x = (c.dot(x) < 0.0 ? -1.0 : 1.0) * x * (radius / norm_tx);
    }
    const double residual = (tx - x_split).norm() / std::max(x_split.norm(), 1e-300);
    const bool stalled =
        have_previous && std::abs(value - previous_value) <= params.relative_tolerance * std::max(value, 1e-300);
    previous_value = value;
    have_previous = true;
    if (stalled && residual <= params.residual_tolerance) {
      result.converged = true;
      break;
    }
  }

  if (best_value < 0.0) {
    // No checkpoint reached; fall back to the last iterate.
    const double norm_tx = spectral_norm(real_to_complex(t * x, out_dim));
    best_x = norm_tx > 0.0 ? Eigen::VectorXd(x * (radius / norm_tx)) : x;
  }

  MoyalElement cert(theta, coords.to_matrix(best_x));
  // Final exact rescale through the independent commutator-norm path.
  const double cn = commutator_norm(cert);
  if (cn > 0.0) cert = cert * Complex(1.0 / cn);
  result.certificate = cert;
  result.feasibility_residual = commutator_norm(cert) - 1.0;
  result.value = std::abs(eval(s1, cert) - eval(s2, cert));
  result.iterations = it;
  return result;
}

DistanceReport moyal_distance(const MoyalPureState& s1, const MoyalPureState& s2, const DistanceOptions& options) {
  require_same_theta(s1.theta(), s2.theta(), "moyal_distance");
  DistanceReport report;
  report.theta = s1.theta();
  report.truncation_order = options.order;
  report.state_a = s1.describe();
  report.state_b = s2.describe();

  if (s1.basis_index() && s2.basis_index()) {
    report.closed_form = closed_form_distance(*s1.basis_index(), *s2.basis_index(), s1.theta());
  }

  constexpr std::size_t kDenseCertificateCap = 256;
  const auto candidates = standard_certificates(certificate_range(s1, s2, kDenseCertificateCap), s1.theta());
  const CertificateBound cert = certificate_lower_bound(s1, s2, candidates);
  report.certificate_lower = cert.value;
  report.certificate_id = cert.id;

  const bool finite = s1.finitely_supported() && s2.finitely_supported();
  if (finite) {
    report.analytic_upper = analytic_upper_bound(s1, s2);
    if (options.run_optimizer) {
      const OptimizerResult opt = optimize_distance(s1, s2, options.order, options.optimizer);
      report.optimizer_lower = opt.value;
      report.iterations = opt.iterations;
      report.feasibility_residual = opt.feasibility_residual;
      report.converged = opt.converged;
    }
    const double lower = std::max(report.certificate_lower, report.optimizer_lower.value_or(0.0));
    report.bracket_width = *report.analytic_upper - lower;
  }
  return report;
}

}  // namespace ncdist
