#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ncdist/errors.hpp"
#include "ncdist/lipschitz.hpp"
#include "ncdist/moyal_calculus.hpp"
#include "test_support.hpp"

using namespace ncdist;
using ncdist::testing::random_element;
using ncdist::testing::random_order;

namespace {

// Derivatives built directly from the action on basis elements:
//   d f_{mn} = sqrt(n/theta) f_{m,n-1} - sqrt((m+1)/theta) f_{m+1,n}
CMatrix del_from_basis_action(const MoyalElement& a) {
  const auto N = static_cast<Eigen::Index>(a.order());
  const double th = a.theta();
  CMatrix out = CMatrix::Zero(N + 1, N + 1);
  for (Eigen::Index m = 0; m < N; ++m)
    for (Eigen::Index n = 0; n < N; ++n) {
      const Complex c = a.coeffs()(m, n);
      if (n > 0) out(m, n - 1) += std::sqrt(double(n) / th) * c;
      out(m + 1, n) -= std::sqrt(double(m + 1) / th) * c;
    }
  return out;
}

CMatrix delbar_from_basis_action(const MoyalElement& a) {
  const auto N = static_cast<Eigen::Index>(a.order());
  const double th = a.theta();
  CMatrix out = CMatrix::Zero(N + 1, N + 1);
  for (Eigen::Index m = 0; m < N; ++m)
    for (Eigen::Index n = 0; n < N; ++n) {
      const Complex c = a.coeffs()(m, n);
      if (m > 0) out(m - 1, n) += std::sqrt(double(m) / th) * c;
      out(m, n + 1) -= std::sqrt(double(n + 1) / th) * c;
    }
  return out;
}

}  // namespace

TEST(Del, OfGroundState) {
  const auto d = del(MoyalElement::basis(1.0, 0, 0));
  EXPECT_EQ(d.order(), 2u);
  EXPECT_EQ(d(1, 0), Complex(-1.0));
  EXPECT_EQ(d.coeffs().cwiseAbs().sum(), 1.0);
  const auto db = delbar(MoyalElement::basis(1.0, 0, 0));
  EXPECT_EQ(db(0, 1), Complex(-1.0));
  EXPECT_EQ(db.coeffs().cwiseAbs().sum(), 1.0);
}

TEST(Del, ZeroMapsToZero) {
  EXPECT_EQ(del(MoyalElement(1.0, 4)).coeffs().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(delbar(MoyalElement(1.0, 4)).coeffs().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Del, MatchesBasisAction) {
  for (int i = 0; i < 100; ++i) {
    const double theta = 0.5 + i % 3;
    const auto a = random_element(theta, random_order(1, 12));
    EXPECT_LT((del(a).coeffs() - del_from_basis_action(a)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((delbar(a).coeffs() - delbar_from_basis_action(a)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Del, AdjointRelation) {
  for (int i = 0; i < 100; ++i) {
    const auto a = random_element(1.3, random_order(1, 12));
    const CMatrix lhs = del(a).coeffs().adjoint();
    EXPECT_LT((lhs - delbar(involution(a)).coeffs()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Del, RadialElementsHaveOneBand) {
  const std::vector<double> diag = {1.0, -0.5, 0.25, 2.0};
  const auto d = del(MoyalElement::radial(1.0, diag));
  for (std::size_t m = 0; m < d.order(); ++m)
    for (std::size_t n = 0; n < d.order(); ++n)
      if (m != n + 1) EXPECT_EQ(d(m, n), Complex{});
}

TEST(Del, AhatHasConstantSubdiagonal) {
  for (double theta : {0.5, 1.0, 2.0}) {
    const std::size_t m0 = 7;
    const auto d = del(ahat(m0, theta));
    for (std::size_t m = 0; m < d.order(); ++m)
      for (std::size_t n = 0; n < d.order(); ++n) {
        const double expected = (m == n + 1 && n <= m0) ? -1.0 / std::numbers::sqrt2 : 0.0;
        EXPECT_NEAR(std::abs(d(m, n) - expected), 0.0, 1e-14) << m << "," << n;
      }
  }
}

TEST(Leibniz, BothDerivations) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_element(1.0, random_order(1, 16));
    const auto b = random_element(1.0, random_order(1, 16));
    const auto ab = star(a, b);
    worst = std::max(worst, max_abs_diff(del(ab).as_element(), star(del(a).as_element(), b) + star(a, del(b).as_element())));
    worst = std::max(worst, max_abs_diff(delbar(ab).as_element(),
                                         star(delbar(a).as_element(), b) + star(a, delbar(b).as_element())));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Reconstruct, GroundStateExample) {
  const auto f = MoyalElement::basis(1.0, 0, 0);
  const auto back = reconstruct(1.0, del(f), delbar(f));
  EXPECT_NEAR(std::abs(back(1, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(back(0, 0) - 1.0), 0.0, 1e-15);
}

TEST(Reconstruct, ZeroInputs) {
  const auto z = MoyalElement(1.0, 3);
  EXPECT_EQ(reconstruct(0.0, del(z), delbar(z)).coeffs().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Reconstruct, Roundtrip) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double theta = i % 2 ? 0.5 : 2.0;
    const auto a = random_element(theta, random_order(1, 16));
    const auto back = reconstruct(a(0, 0), del(a), delbar(a));
    worst = std::max(worst, max_abs_diff(back, a));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Reconstruct, RejectsMismatchedInputs) {
  const auto a = random_element(1.0, 4);
  const auto b = random_element(2.0, 4);
  EXPECT_THROW(reconstruct(0.0, del(a), delbar(b)), ParameterError);
  EXPECT_THROW(reconstruct(0.0, del(a), delbar(random_element(1.0, 5))), ParameterError);
  EXPECT_THROW(reconstruct(0.0, delbar(a), delbar(a)), ParameterError);
}

TEST(Ahat, Values) {
  const auto a0 = ahat(0, 2.0);
  EXPECT_DOUBLE_EQ(a0(0, 0).real(), 1.0);
  EXPECT_EQ(a0(1, 1), Complex{});
  const auto a1 = ahat(1, 2.0);
  EXPECT_NEAR(a1(0, 0).real(), 1.0 + 1.0 / std::numbers::sqrt2, 1e-15);
  EXPECT_NEAR(a1(1, 1).real(), 1.0 / std::numbers::sqrt2, 1e-15);
}

TEST(Ahat, DiagonalNonnegativeNonincreasing) {
  for (std::size_t m0 = 0; m0 <= 100; m0 += 7) {
    const auto a = ahat(m0, 1.0);
    EXPECT_TRUE(a.is_radial());
    EXPECT_TRUE(a.is_self_adjoint());
    for (std::size_t p = 0; p + 1 < a.order(); ++p) {
      EXPECT_GE(a(p, p).real(), a(p + 1, p + 1).real());
      EXPECT_GE(a(p + 1, p + 1).real(), 0.0);
    }
  }
}

TEST(AStep, ValuesAndNorm) {
  EXPECT_DOUBLE_EQ(a_step(0, 2.0)(0, 0).real(), 1.0);
  for (std::size_t n = 0; n <= 20; ++n) {
    const auto a = a_step(n, 0.8);
    EXPECT_NEAR(a(n, n).real(), std::sqrt(0.4) / std::sqrt(double(n + 1)), 1e-15);
    EXPECT_NEAR(commutator_norm(a), 1.0, 1e-12);
  }
}
