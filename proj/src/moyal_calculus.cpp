#include "ncdist/moyal_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ncdist/errors.hpp"

namespace ncdist {

const char* to_string(Derivation kind) noexcept { return kind == Derivation::Del ? "del" : "delbar"; }

DerivativeCoefficients::DerivativeCoefficients(Derivation kind, double theta, CMatrix coeffs)
    : kind_(kind), theta_(theta), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != coeffs_.cols()) throw ParameterError("derivative coefficients must be square");
}

Complex DerivativeCoefficients::operator()(std::size_t m, std::size_t n) const noexcept {
  if (m >= order() || n >= order()) return {};
  return coeffs_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
}

DerivativeCoefficients del(const MoyalElement& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.order());
  const double inv_theta = 1.0 / a.theta();
  CMatrix alpha = CMatrix::Zero(n + 1, n + 1);
  // alpha_{pq} = sqrt((q+1)/theta) a_{p,q+1} - sqrt(p/theta) a_{p-1,q}
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q + 1 < n; ++q) {
      alpha(p, q) += std::sqrt(static_cast<double>(q + 1) * inv_theta) * a.coeffs()(p, q + 1);
    }
  }
  for (Eigen::Index p = 1; p <= n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      alpha(p, q) -= std::sqrt(static_cast<double>(p) * inv_theta) * a.coeffs()(p - 1, q);
    }
  }
  return {Derivation::Del, a.theta(), std::move(alpha)};
}

DerivativeCoefficients delbar(const MoyalElement& a) {
  const Eigen::Index n = static_cast<Eigen::Index>(a.order());
  const double inv_theta = 1.0 / a.theta();
  CMatrix beta = CMatrix::Zero(n + 1, n + 1);
  // beta_{pq} = sqrt((p+1)/theta) a_{p+1,q} - sqrt(q/theta) a_{p,q-1}
  for (Eigen::Index p = 0; p + 1 < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      beta(p, q) += std::sqrt(static_cast<double>(p + 1) * inv_theta) * a.coeffs()(p + 1, q);
    }
  }
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 1; q <= n; ++q) {
      beta(p, q) -= std::sqrt(static_cast<double>(q) * inv_theta) * a.coeffs()(p, q - 1);
    }
  }
  return {Derivation::Delbar, a.theta(), std::move(beta)};
}

MoyalElement reconstruct(Complex a00, const DerivativeCoefficients& alpha, const DerivativeCoefficients& beta) {
  if (alpha.kind() != Derivation::Del || beta.kind() != Derivation::Delbar) {
    throw ParameterError("reconstruct expects (del, delbar) coefficients");
  }
  require_same_theta(alpha.theta(), beta.theta(), "reconstruct");
  if (alpha.order() != beta.order()) throw ParameterError("reconstruct: alpha and beta orders differ");

  const std::size_t n = std::max<std::size_t>(alpha.order(), 1);
  const double sqrt_theta = std::sqrt(alpha.theta());
  std::vector<double> root(n + 1);
  for (std::size_t i = 0; i <= n; ++i) root[i] = std::sqrt(static_cast<double>(i));

  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      Complex acc{};
      for (std::size_t k = 0; k <= std::min(p, q); ++k) {
        const std::size_t pk = p - k;
        const std::size_t qk = q - k;
        if (pk == 0 && qk == 0) continue;
        Complex num{};
        if (qk >= 1) num += alpha(pk, qk - 1);
        if (pk >= 1) num += beta(pk - 1, qk);
        acc += num / (root[pk] + root[qk]);
      }
      out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = sqrt_theta * acc;
    }
  }
  for (std::size_t p = 0; p < n; ++p) out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) += a00;
  return MoyalElement(alpha.theta(), std::move(out));
}

MoyalElement ahat(std::size_t m0, double theta) {
  std::vector<double> diag(m0 + 1);
  const double scale = std::sqrt(theta / 2.0);
  double suffix = 0.0;
  for (std::size_t p = m0 + 1; p-- > 0;) {
    suffix += 1.0 / std::sqrt(static_cast<double>(p + 1));
    diag[p] = scale * suffix;
  }
  return MoyalElement::radial(theta, diag);
}

MoyalElement a_step(std::size_t n, double theta) {
  std::vector<double> diag(n + 1, 0.0);
  diag[n] = std::sqrt(theta / 2.0) / std::sqrt(static_cast<double>(n + 1));
  return MoyalElement::radial(theta, diag);
}

}  // namespace ncdist
