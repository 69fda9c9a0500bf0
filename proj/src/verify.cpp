#include "ncdist/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "ncdist/distance_engine.hpp"
#include "ncdist/divergence_probes.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/lipschitz.hpp"
#include "ncdist/moyal_algebra.hpp"
#include "ncdist/moyal_calculus.hpp"
#include "ncdist/nc_torus.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

namespace {

using Rng = std::mt19937_64;

CMatrix random_matrix(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

MoyalElement random_element(Rng& rng, double theta, std::size_t max_order) {
  std::uniform_int_distribution<std::size_t> order(1, max_order);
  return MoyalElement(theta, random_matrix(rng, static_cast<Eigen::Index>(order(rng))));
}

double pick_theta(Rng& rng) {
  static constexpr double thetas[] = {0.5, 1.0, 2.0};
  return thetas[std::uniform_int_distribution<int>(0, 2)(rng)];
}

MoyalPureState random_finite_state(Rng& rng, double theta, std::size_t max_support) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<std::size_t> len(1, max_support);
  std::vector<Complex> w(len(rng));
  for (auto& x : w) x = Complex(g(rng), g(rng));
  return finite_state(w, theta);
}

struct Check {
  SuiteCheck out;
  Check(std::string name, double tol) {
    out.name = std::move(name);
    out.tolerance = tol;
  }
  void deviation(double d) {
    ++out.instances;
    out.max_deviation = std::max(out.max_deviation, std::isfinite(d) ? d : INFINITY);
    if (!(d <= out.tolerance)) out.passed = false;
  }
  void truth(bool ok) { deviation(ok ? 0.0 : INFINITY); }
};

SuiteResult algebra_suite(Rng& rng) {
  SuiteResult r{"algebra", {}};
  constexpr int kInstances = 300;
  constexpr std::size_t kOrder = 12;

  Check assoc("star associativity", 1e-12), cyc("trace cyclicity", 1e-12), anti("involution anti-homomorphism", 1e-12),
      leib_d("Leibniz rule (del)", 1e-12), leib_db("Leibniz rule (delbar)", 1e-12), recon("reconstruction roundtrip", 1e-12),
      inner("inner product = trace of a* b", 1e-12);
  for (int i = 0; i < kInstances; ++i) {
    const double th = pick_theta(rng);
    const auto a = random_element(rng, th, kOrder);
    const auto b = random_element(rng, th, kOrder);
    const auto c = random_element(rng, th, kOrder);
    // Random Gaussian entries make products O(order); compare relative to that scale.
    const double scale = static_cast<double>(kOrder) * static_cast<double>(kOrder);
    assoc.deviation(max_abs_diff(star(star(a, b), c), star(a, star(b, c))) / scale);
    cyc.deviation(std::abs(trace_integral(star(a, b)) - trace_integral(star(b, a))) / scale);
    anti.deviation(max_abs_diff(involution(star(a, b)), star(involution(b), involution(a))) / scale);
    inner.deviation(std::abs(l2_inner(a, b) - trace_integral(star(involution(a), b))) / scale);

    const auto ab = star(a, b);
    leib_d.deviation(max_abs_diff(del(ab).as_element(),
                                  star(del(a).as_element(), b) + star(a, del(b).as_element())) / scale);
    leib_db.deviation(max_abs_diff(delbar(ab).as_element(),
                                   star(delbar(a).as_element(), b) + star(a, delbar(b).as_element())) / scale);
    const auto back = reconstruct(a(0, 0), del(a), delbar(a));
    recon.deviation(max_abs_diff(back, a.padded(back.order())));
  }
  for (Check* c : {&assoc, &cyc, &anti, &inner, &leib_d, &leib_db, &recon}) r.checks.push_back(c->out);
  return r;
}

SuiteResult ball_suite(Rng& rng) {
  SuiteResult r{"ball", {}};
  Check ahat_norm("commutator_norm(ahat(m0)) = 1", 1e-10);
  for (double th : {0.5, 1.0, 2.0})
    for (std::size_t m0 = 0; m0 <= 30; ++m0) ahat_norm.deviation(std::abs(commutator_norm(ahat(m0, th)) - 1.0));

  Check necessary("|alpha|, |beta| <= 1/sqrt2 on the unit sphere", 1e-9);
  Check offdiag("|a_pq| <= K_pq on the unit sphere", 1e-9);
  Check membership("check_ball agrees with the norm", 0.0);
  Check radial("radial test agrees with the norm", 0.0);
  const double bound = 1.0 / std::numbers::sqrt2;
  for (int i = 0; i < 200; ++i) {
    const double th = pick_theta(rng);
    auto a = random_element(rng, th, 10);
    const double n = commutator_norm(a);
    if (n == 0.0) continue;
    a = a * Complex(1.0 / n);
    const auto d = del(a);
    const auto db = delbar(a);
    necessary.deviation(std::max(d.coeffs().cwiseAbs().maxCoeff(), db.coeffs().cwiseAbs().maxCoeff()) - bound);
    double worst = -INFINITY;
    for (std::size_t p = 0; p < a.order(); ++p)
      for (std::size_t q = 0; q < a.order(); ++q)
        if (p != q) worst = std::max(worst, std::abs(a(p, q)) - offdiagonal_bound(p, q, th));
    if (a.order() > 1) offdiag.deviation(worst);

    auto scaled = a * Complex(i % 2 ? 1.01 : 0.99);
    const BallReport rep = check_ball(scaled);
    membership.truth(rep.member == (i % 2 == 0));

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> diag(1 + static_cast<std::size_t>(i % 9));
    for (auto& x : diag) x = u(rng);
    const auto rad = MoyalElement::radial(th, diag);
    radial.truth(radial_ball_check(rad) == (commutator_norm(rad) <= 1.0 + kBallTolerance));
  }
  for (Check* c : {&ahat_norm, &necessary, &offdiag, &membership, &radial}) r.checks.push_back(c->out);
  return r;
}

SuiteResult distance_suite(Rng& rng) {
  SuiteResult r{"distance", {}};
  Check tri("triangular equality, m <= p <= n <= 20", 1e-12);
  for (double th : {0.5, 1.0, 2.0})
    for (std::size_t m = 0; m <= 20; ++m)
      for (std::size_t p = m; p <= 20; ++p)
        for (std::size_t n = p; n <= 20; ++n) tri.deviation(std::abs(triangular_check(m, p, n, th)));

  Check cert("ahat certificates reach the closed form", 1e-12);
  Check upper("analytic upper bound equals the closed form", 1e-12);
  for (double th : {0.5, 1.0, 2.0}) {
    for (std::size_t m = 1; m <= 6; ++m) {
      std::vector<Certificate> cands;
      for (std::size_t k = 0; k <= m; ++k) cands.push_back({ahat(k, th), "ahat(" + std::to_string(k) + ")"});
      for (std::size_t n = 0; n < m; ++n) {
        const double exact = closed_form_distance(m, n, th);
        const auto sm = basis_state(m, th);
        const auto sn = basis_state(n, th);
        cert.deviation(std::abs(certificate_lower_bound(sm, sn, cands).value - exact));
        upper.deviation(std::abs(analytic_upper_bound(sm, sn) - exact));
      }
    }
  }

  Check bracket("certificate <= optimizer <= upper", 1e-9);
  Check feasible("optimizer certificate feasible", 1e-9);
  Check phase("unit phases leave the bracket unchanged", 1e-12);
  OptimizerParams params;
  params.max_iterations = 4000;
  for (int i = 0; i < 6; ++i) {
    const double th = pick_theta(rng);
    const auto s1 = random_finite_state(rng, th, 3);
    const auto s2 = random_finite_state(rng, th, 3);
    DistanceOptions opts;
    opts.order = 8;
    opts.optimizer = params;
    const auto rep = moyal_distance(s1, s2, opts);
    bracket.deviation(std::max(rep.certificate_lower - *rep.optimizer_lower, *rep.optimizer_lower - *rep.analytic_upper));
    feasible.deviation(*rep.feasibility_residual);

    DistanceOptions quick = opts;
    quick.run_optimizer = false;
    const auto base = moyal_distance(s1, s2, quick);
    const auto rot = moyal_distance(s1.with_phase(0.7), s2.with_phase(-2.1), quick);
    phase.deviation(std::max(std::abs(base.certificate_lower - rot.certificate_lower),
                             std::abs(*base.analytic_upper - *rot.analytic_upper)));
  }

  Check sym("phase-rotated symmetrization keeps the objective", 1e-12);
  for (int i = 0; i < 100; ++i) {
    const double th = pick_theta(rng);
    const auto s1 = random_finite_state(rng, th, 4);
    const auto s2 = random_finite_state(rng, th, 4);
    auto a = random_element(rng, th, 6);
    a = a * Complex(1.0 / commutator_norm(a));
    const Complex gap = eval(s1, a) - eval(s2, a);
    const Complex rot = std::polar(1.0, -std::arg(gap));
    const auto h = (a * rot + involution(a) * std::conj(rot)) * Complex(0.5);
    const double hgap = std::abs(eval(s1, h) - eval(s2, h));
    sym.deviation(std::max(std::abs(hgap - std::abs(gap)), commutator_norm(h) - 1.0));
  }
  for (Check* c : {&tri, &cert, &upper, &bracket, &feasible, &phase, &sym}) r.checks.push_back(c->out);
  return r;
}

SuiteResult probes_suite(Rng& rng) {
  SuiteResult r{"probes", {}};
  Check est("estimate inequalities", 0.0);
  const auto summary = estimate_checks();
  est.out.instances = summary.checks;
  est.out.max_deviation = static_cast<double>(summary.violations.size());
  est.out.passed = summary.violations.empty();
  est.out.note = std::to_string(summary.violations.size()) + " violations";

  Check cross("crossover sign change", 0.0);
  Check mass("tail mass equals head deficit", 1e-10);
  for (double s1 : {1.05, 1.1, 1.2, 1.3, 1.4}) {
    for (double s2 : {1.15, 1.25, 1.35, 1.45, 1.5}) {
      if (!(s1 < s2)) continue;
      const std::size_t M = crossover_index(s1, s2);
      cross.truth(G_seq(M, s1, s2) <= 0.0 && G_seq(M + 1, s1, s2) > 0.0);
      const double head = crossover_mass(s1, s2);
      // sum_{m > M} G = H_{M+1}-tails of both zeta normalizations.
      const double tail = (1.0 - zeta_partial_sum(s1, M + 1) / riemann_zeta(s1)) -
                          (1.0 - zeta_partial_sum(s2, M + 1) / riemann_zeta(s2));
      mass.deviation(std::abs(tail - head) / std::max(1.0, head));
      mass.truth(head > 0.0);
    }
  }

  Check consist("bound_B equals |delta eval(ahat)|", 1e-10);
  std::uniform_int_distribution<int> coin(0, 2);
  for (int i = 0; i < 20; ++i) {
    auto make = [&]() {
      if (coin(rng) == 0) return zeta_state(1.05 + 0.4 * std::uniform_real_distribution<double>()(rng), 400, 1.0);
      return random_finite_state(rng, 1.0, 60);
    };
    const auto s1 = make();
    const auto s2 = make();
    for (std::size_t m0 : {0, 1, 7, 50, 200}) {
      const auto a = ahat(m0, 1.0);
      consist.deviation(std::abs(bound_B(m0, s1, s2) - std::abs(eval(s2, a) - eval(s1, a))));
    }
  }

  Check honesty("no claim for (5/4, 3/2)", 0.0);
  honesty.truth(!divergence_claim(ProbeStateSpec::zeta(1.25), ProbeStateSpec::zeta(1.5)).divergent);
  honesty.truth(divergence_claim(ProbeStateSpec::zeta(1.1), ProbeStateSpec::zeta(1.3)).divergent);
  honesty.truth(divergence_claim(ProbeStateSpec::basis(0), ProbeStateSpec::zeta(1.2)).divergent);
  honesty.truth(!divergence_claim(ProbeStateSpec::basis(0), ProbeStateSpec::zeta(1.6)).divergent);

  Check grows("B(psi_0, psi(s)) eventually increasing", 0.0);
  for (double s : {1.1, 1.3, 1.5}) {
    const auto grid = geometric_grid(1000, 100000, 5);
    double prev = 0.0;
    for (std::size_t m0 : grid) {
      const auto z = ProbeStateSpec::zeta(s).realize(m0, 1.0, kProbeCutoffFactor);
      const double B = bound_B(m0, basis_state(0, 1.0), z);
      grows.truth(B > prev);
      prev = B;
    }
  }
  for (Check* c : {&est, &cross, &mass, &consist, &honesty, &grows}) r.checks.push_back(c->out);
  return r;
}

SuiteResult torus_suite(Rng& rng) {
  SuiteResult r{"torus", {}};
  std::uniform_int_distribution<std::int64_t> idx(-6, 6);
  std::uniform_real_distribution<double> th(0.0, 1.0);
  auto lat = [&] { return Lattice{idx(rng), idx(rng)}; };

  Check bich("bicharacter identities", 1e-12);
  for (int i = 0; i < 1000; ++i) {
    const double t = th(rng);
    const Lattice M = lat(), N = lat(), P = lat();
    bich.deviation(std::abs(sigma(M + N, P, t) - sigma(M, P, t) * sigma(N, P, t)));
    bich.deviation(std::abs(sigma(M, N + P, t) - sigma(M, N, t) * sigma(M, P, t)));
    bich.deviation(std::abs(sigma(M, M, t) - 1.0));
    bich.deviation(std::abs(sigma(M, -M, t) - 1.0));
  }

  auto random_torus = [&](double t, int terms, std::int64_t radius) {
    std::uniform_int_distribution<std::int64_t> k(-radius, radius);
    std::normal_distribution<double> g;
    TorusElement a(t);
    for (int i = 0; i < terms; ++i) a.set({k(rng), k(rng)}, Complex(g(rng), g(rng)));
    return a;
  };

  Check assoc("Weyl product associativity", 1e-12), anti("involution anti-homomorphism", 1e-12),
      gns("tau(U^M* U^N) = delta_MN", 1e-12), trace("tau(delta a) = 0", 0.0);
  for (int i = 0; i < 200; ++i) {
    const double t = th(rng);
    const auto a = random_torus(t, 4, 3), b = random_torus(t, 4, 3), c = random_torus(t, 4, 3);
    assoc.deviation(max_abs_diff(weyl_product(weyl_product(a, b), c), weyl_product(a, weyl_product(b, c))) / 64.0);
    anti.deviation(max_abs_diff(torus_involution(weyl_product(a, b)),
                                weyl_product(torus_involution(b), torus_involution(a))) / 16.0);
    const Lattice M = lat(), N = lat();
    const Complex ip = tau(weyl_product(torus_involution(TorusElement::weyl(t, M)), TorusElement::weyl(t, N)));
    gns.deviation(std::abs(ip - (M == N ? 1.0 : 0.0)));
    trace.deviation(std::abs(tau(torus_del(a))) + std::abs(tau(torus_delbar(a))));
  }

  Check entry_bound("|alpha_N| <= 1 after rescaling", 1e-9);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_torus(th(rng), 3, 1);
    const double n = torus_commutator_norm(a, 6);
    if (n == 0.0) continue;
    const auto unit = a * Complex(1.0 / n);
    double worst = 0.0;
    for (const TorusElement& d : {torus_del(unit), torus_delbar(unit)})
      for (const auto& [N, c] : d.terms()) worst = std::max(worst, std::abs(c));
    entry_bound.deviation(worst - 1.0);
  }

  Check ahat_norm("commutator_norm(ahat^M) = 1", 1e-9);
  Check bracket("certificate <= refined <= upper", 1e-12);
  Check half("ahat^M reaches half the entrywise bound", 1e-12);
  for (std::int64_t m1 = -3; m1 <= 3; ++m1) {
    for (std::int64_t m2 = -3; m2 <= 3; ++m2) {
      const Lattice M{m1, m2};
      if (M.is_zero()) continue;
      const double t = 0.37;
      ahat_norm.deviation(std::abs(torus_commutator_norm_converged(torus_ahat(M, t)).value - 1.0));
      const auto rep = torus_distance(TorusState::phi(M), TorusState::tracial(), t);
      bracket.deviation(std::max(rep.certificate_lower - *rep.refined_lower, *rep.refined_lower - *rep.analytic_upper));
      half.deviation(std::abs(rep.certificate_lower - 0.5 * *rep.analytic_upper));
    }
  }
  half.out.note = "the entrywise bound is not attained by ahat^M";
  for (Check* c : {&bich, &assoc, &anti, &gns, &trace, &entry_bound, &ahat_norm, &bracket, &half}) r.checks.push_back(c->out);
  return r;
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"algebra", "ball", "distance", "probes", "torus"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  Rng rng(seed);
  if (name == "algebra") return algebra_suite(rng);
  if (name == "ball") return ball_suite(rng);
  if (name == "distance") return distance_suite(rng);
  if (name == "probes") return probes_suite(rng);
  if (name == "torus") return torus_suite(rng);
  throw ParameterError("unknown suite '" + name + "'");
}

}  // namespace ncdist
