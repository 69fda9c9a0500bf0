#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ncdist/errors.hpp"
#include "ncdist/nc_torus.hpp"
#include "test_support.hpp"

using namespace ncdist;

namespace {

constexpr double kPi = std::numbers::pi;

Lattice random_lattice(int r) {
  std::uniform_int_distribution<int> d(-r, r);
  return {d(ncdist::testing::rng()), d(ncdist::testing::rng())};
}

TorusElement random_torus(double theta, int radius, int terms) {
  std::normal_distribution<double> g;
  TorusElement a(theta);
  for (int i = 0; i < terms; ++i) a.set(random_lattice(radius), Complex(g(ncdist::testing::rng()), g(ncdist::testing::rng())));
  return a;
}

// Clock and shift at theta = p/q: u1 = C, u2 = S with C S = e^{2 pi i theta} S C.
struct ClockShift {
  int q;
  double theta;
  CMatrix C, S;
  ClockShift(int p, int q_) : q(q_), theta(double(p) / q_), C(CMatrix::Zero(q_, q_)), S(CMatrix::Zero(q_, q_)) {
    for (int k = 0; k < q; ++k) {
      C(k, k) = std::polar(1.0, 2 * kPi * theta * k);
      S((k + 1) % q, k) = 1.0;
    }
  }
  CMatrix power(const CMatrix& m, std::int64_t n) const {
    CMatrix base = n < 0 ? CMatrix(m.adjoint()) : m;
    CMatrix out = CMatrix::Identity(q, q);
    for (std::int64_t i = 0; i < std::abs(n); ++i) out = out * base;
    return out;
  }
  // U^M = e^{-i pi m1 theta m2} u1^{m1} u2^{m2}
  CMatrix weyl(Lattice M) const {
    return std::polar(1.0, -kPi * theta * double(M.m1 * M.m2)) * power(C, M.m1) * power(S, M.m2);
  }
};

}  // namespace

TEST(Sigma, Examples) {
  EXPECT_NEAR(std::abs(sigma({1, 0}, {0, 1}, 0.25) - std::polar(1.0, kPi / 4)), 0.0, 1e-15);
  for (int i = 0; i < 100; ++i) {
    const Lattice M = random_lattice(50);
    EXPECT_NEAR(std::abs(sigma(M, M, 0.37) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(sigma(M, -M, 0.37) - 1.0), 0.0, 1e-12);
  }
}

TEST(Sigma, BicharacterIdentities) {
  double worst = 0.0;
  for (double theta : {0.0, 0.1, 0.37, 0.6180339887498949, 0.99}) {
    for (int i = 0; i < 1000; ++i) {
      const Lattice M = random_lattice(40), N = random_lattice(40), P = random_lattice(40);
      worst = std::max(worst, std::abs(sigma(M + N, P, theta) - sigma(M, P, theta) * sigma(N, P, theta)));
      worst = std::max(worst, std::abs(sigma(M, N + P, theta) - sigma(M, N, theta) * sigma(M, P, theta)));
      worst = std::max(worst, std::abs(sigma(M, N, theta) * sigma(N, M, theta) - 1.0));
      worst = std::max(worst, std::abs(std::abs(sigma(M, N, theta)) - 1.0));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Sigma, MatchesClockShiftRepresentation) {
  for (auto [p, q] : {std::pair{1, 4}, {2, 5}, {3, 7}}) {
    const ClockShift cs(p, q);
    for (int i = 0; i < 50; ++i) {
      const Lattice M = random_lattice(4), N = random_lattice(4);
      const CMatrix lhs = cs.weyl(M) * cs.weyl(N);
      const CMatrix rhs = sigma(M, N, cs.theta) * cs.weyl(M + N);
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((cs.weyl(M).adjoint() - cs.weyl(-M)).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(WeylProduct, Examples) {
  const double theta = 0.25;
  const auto p = weyl_product(TorusElement::weyl(theta, {1, 0}), TorusElement::weyl(theta, {0, 1}));
  EXPECT_EQ(p.terms().size(), 1u);
  EXPECT_NEAR(std::abs(p.coeff({1, 1}) - std::polar(1.0, kPi / 4)), 0.0, 1e-15);
  const auto unit = weyl_product(TorusElement::weyl(theta, {2, -3}), TorusElement::weyl(theta, {-2, 3}));
  EXPECT_LT(max_abs_diff(unit, TorusElement::unit(theta)), 1e-15);
  const auto a = random_torus(theta, 3, 6);
  EXPECT_LT(max_abs_diff(weyl_product(a, TorusElement::unit(theta)), a), 1e-15);
  EXPECT_THROW(weyl_product(a, TorusElement::unit(0.5)), ParameterError);
}

TEST(WeylProduct, AssociativeAndInvolutive) {
  for (int i = 0; i < 100; ++i) {
    const auto a = random_torus(0.37, 3, 5), b = random_torus(0.37, 3, 5), c = random_torus(0.37, 3, 5);
    EXPECT_LT(max_abs_diff(weyl_product(weyl_product(a, b), c), weyl_product(a, weyl_product(b, c))), 1e-12);
    EXPECT_LT(max_abs_diff(torus_involution(weyl_product(a, b)), weyl_product(torus_involution(b), torus_involution(a))),
              1e-12);
    EXPECT_EQ(max_abs_diff(torus_involution(torus_involution(a)), a), 0.0);
  }
  const auto x = torus_involution(TorusElement::weyl(0.37, {2, -1}));
  EXPECT_EQ(x.coeff({-2, 1}), Complex(1.0));
}

TEST(WeylProduct, GnsOrthonormality) {
  for (int i = 0; i < 200; ++i) {
    const Lattice M = random_lattice(5), N = random_lattice(5);
    const Complex ip = tau(weyl_product(torus_involution(TorusElement::weyl(0.37, M)), TorusElement::weyl(0.37, N)));
    EXPECT_NEAR(std::abs(ip - (M == N ? 1.0 : 0.0)), 0.0, 1e-14);
  }
}

TEST(TorusElementTest, CanonicalZeros) {
  TorusElement a(0.3);
  a.set({1, 2}, 2.0);
  a.set({1, 2}, 0.0);
  EXPECT_TRUE(a.empty());
  EXPECT_TRUE((TorusElement::weyl(0.3, {1, 1}) - TorusElement::weyl(0.3, {1, 1})).empty());
  EXPECT_EQ(TorusElement::weyl(0.3, {-4, 2}).support_radius(), 4);
  EXPECT_TRUE((TorusElement::weyl(0.3, {1, 0}) + TorusElement::weyl(0.3, {-1, 0})).is_self_adjoint());
}

TEST(Derivations, Values) {
  const auto d = torus_del(TorusElement::weyl(0.3, {1, 0}));
  EXPECT_NEAR(std::abs(d.coeff({1, 0}) - Complex(0, 2 * kPi)), 0.0, 1e-14);
  const auto db = torus_delbar(TorusElement::weyl(0.3, {0, 1}));
  // i 2 pi (0 - i) = 2 pi
  EXPECT_NEAR(std::abs(db.coeff({0, 1}) - Complex(2 * kPi, 0)), 0.0, 1e-14);
  EXPECT_TRUE(torus_del(TorusElement::unit(0.3)).empty());
  for (int i = 0; i < 50; ++i) {
    const auto a = random_torus(0.3, 4, 8);
    EXPECT_EQ(tau(torus_del(a)), Complex{});
    EXPECT_EQ(tau(torus_delbar(a)), Complex{});
    const auto b = random_torus(0.3, 4, 8);
    const auto lhs = torus_del(weyl_product(a, b));
    const auto rhs = weyl_product(torus_del(a), b) + weyl_product(a, torus_del(b));
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-9);
  }
}

TEST(TorusStates, TauAndPhi) {
  EXPECT_EQ(tau(TorusElement::unit(0.3)), Complex(1.0));
  EXPECT_NEAR(std::abs(phi_state_eval({2, 1}, TorusElement::weyl(0.3, {2, 1})) - 0.5), 0.0, 1e-15);
  EXPECT_EQ(phi_state_eval({2, 1}, TorusElement::unit(0.3)), Complex(1.0));
  for (int i = 0; i < 50; ++i) {
    const auto a = random_torus(0.3, 3, 8);
    const Lattice M = {1, -2};
    EXPECT_NEAR(std::abs(phi_state_eval(M, a) - tau(a) - 0.5 * (a.coeff(M) + a.coeff(-M))), 0.0, 1e-14);
  }
  EXPECT_THROW(phi_state_eval({0, 0}, TorusElement::unit(0.3)), ParameterError);
  EXPECT_THROW(TorusState::phi({0, 0}), ParameterError);
  EXPECT_EQ(TorusState::phi({3, -1}).describe(), "phi:3,-1");
  EXPECT_EQ(TorusState::tracial().describe(), "tau");
}

TEST(TorusOpNorm, SingleTermsAndZero) {
  for (int i = 0; i < 10; ++i) {
    const Lattice M = random_lattice(3);
    EXPECT_NEAR(torus_op_norm(TorusElement::weyl(0.37, M, Complex(0, -2.5)), std::max<std::int64_t>(1, 2 * 3)), 2.5, 1e-12);
  }
  EXPECT_EQ(torus_op_norm(TorusElement(0.37), 3), 0.0);
  EXPECT_THROW(torus_op_norm(TorusElement::weyl(0.37, {4, 0}), 4), ParameterError);
}

TEST(TorusOpNorm, NondecreasingInBox) {
  for (int i = 0; i < 3; ++i) {
    const auto a = random_torus(0.37, 2, 5);
    double prev = 0.0;
    for (std::int64_t R : {4, 8, 16, 32}) {
      const double v = torus_op_norm(a, R);
      EXPECT_GE(v, prev * (1 - 1e-9));
      prev = v;
    }
    // Triangle inequality against the coefficient l1 norm.
    double l1 = 0.0;
    for (const auto& [M, c] : a.terms()) l1 += std::abs(c);
    EXPECT_LE(prev, l1 * (1 + 1e-12));
  }
}

TEST(TorusCommutatorNorm, AhatAndHomogeneity) {
  for (std::int64_t m1 = -3; m1 <= 3; ++m1)
    for (std::int64_t m2 = -3; m2 <= 3; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      const auto conv = torus_commutator_norm_converged(torus_ahat({m1, m2}, 0.37));
      EXPECT_TRUE(conv.converged);
      EXPECT_NEAR(conv.value, 1.0, 1e-9);
    }
  EXPECT_NEAR(torus_commutator_norm(torus_ahat({1, 2}, 0.37) * Complex(-3.0), 8), 3.0, 1e-12);
  EXPECT_EQ(torus_commutator_norm(TorusElement::unit(0.37), 4), 0.0);
}

TEST(TorusCommutatorNorm, EntrywiseBoundOnTheSphere) {
  for (int i = 0; i < 10; ++i) {
    auto a = random_torus(0.37, 2, 4);
    a = a + torus_involution(a);
    const auto conv = torus_commutator_norm_converged(a, 16, 1e-6);
    a = a * Complex(1.0 / conv.value);
    const auto alpha = torus_del(a);
    for (const auto& [N, c] : alpha.terms()) EXPECT_LE(std::abs(c), 1.0 + 1e-6);
  }
}

TEST(Refined, CertificateIsFeasibleAndBeatsAhat) {
  const Lattice M{1, 1};
  const auto ref = torus_refined_certificate(M, 0.37, 41);
  EXPECT_NEAR(ref.norm_bound, 2 * kPi * M.modulus(), 1e-12);
  const double boxed = torus_commutator_norm(ref.element, 48);
  EXPECT_LE(boxed, ref.norm_bound * (1 + 1e-9));
  EXPECT_GE(torus_single_mode_norm_bound(ref.element, M), boxed * (1 - 1e-9));
  EXPECT_TRUE(ref.element.is_self_adjoint());
  EXPECT_THROW(torus_refined_certificate({0, 0}, 0.37), ParameterError);
}

TEST(TorusDistance, PhiAgainstTau) {
  for (auto [M, expected] : {std::pair{Lattice{1, 0}, 1 / (2 * kPi)}, {Lattice{3, 4}, 1 / (10 * kPi)}}) {
    const auto rep = torus_distance(TorusState::phi(M), TorusState::tracial(), 0.37);
    EXPECT_NEAR(*rep.analytic_upper, expected, 1e-12);
    EXPECT_NEAR(*rep.reference_value, expected, 1e-12);
    // ahat^M closes half the gap; the smoothed triangle wave reaches about 2/pi of the bound.
    EXPECT_NEAR(rep.certificate_lower, expected / 2, 1e-12);
    ASSERT_TRUE(rep.refined_lower);
    EXPECT_GT(*rep.refined_lower, rep.certificate_lower);
    EXPECT_LE(*rep.refined_lower, *rep.analytic_upper);
    EXPECT_NEAR(*rep.refined_lower, 2 / kPi * expected, 3e-3 * expected);
  }
}

TEST(TorusDistance, DegenerateAndSymmetricPairs) {
  const auto tt = torus_distance(TorusState::tracial(), TorusState::tracial(), 0.37);
  EXPECT_EQ(*tt.closed_form, 0.0);
  EXPECT_EQ(*tt.analytic_upper, 0.0);
  const auto pm = torus_distance(TorusState::phi({1, 2}), TorusState::phi({-1, -2}), 0.37);
  EXPECT_EQ(*pm.closed_form, 0.0);
  const auto ab = torus_distance(TorusState::phi({1, 0}), TorusState::phi({0, 2}), 0.37);
  const auto ba = torus_distance(TorusState::phi({0, 2}), TorusState::phi({1, 0}), 0.37);
  EXPECT_NEAR(ab.certificate_lower, ba.certificate_lower, 1e-14);
  EXPECT_NEAR(*ab.analytic_upper, 1 / (2 * kPi) + 1 / (4 * kPi), 1e-14);
  EXPECT_FALSE(ab.reference_value);
}
