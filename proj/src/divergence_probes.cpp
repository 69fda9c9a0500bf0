#include "ncdist/divergence_probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncdist/errors.hpp"

namespace ncdist {

namespace {

void require_probe_exponents(double s1, double s2) {
  if (!(s1 > 1.0 && s1 < s2 && s2 <= 1.5)) {
    std::ostringstream os;
    os << "exponents must satisfy 1 < s1 < s2 <= 3/2, got (" << s1 << ", " << s2 << ")";
    throw ParameterError(os.str());
  }
}

// (k+1)^a - k^a without cancellation.
double power_step(double k, double a) { return std::pow(k, a) * std::expm1(a * std::log1p(1.0 / k)); }

std::string join(const char* name, std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream os;
  os.precision(10);
  os << name;
  for (const auto& [key, value] : fields) os << ' ' << key << '=' << value;
  return os.str();
}

}  // namespace

double bound_B(std::size_t m0, const MoyalPureState& s1, const MoyalPureState& s2) {
  require_same_theta(s1.theta(), s2.theta(), "bound_B");
  double suffix = 0.0;
  double acc = 0.0;
  for (std::size_t m = m0 + 1; m-- > 0;) {
    suffix += 1.0 / std::sqrt(static_cast<double>(m + 1));
    const double delta = s2.weight(m) - s1.weight(m);
    if (delta != 0.0) acc += suffix * delta;
  }
  return std::sqrt(s1.theta() / 2.0) * std::abs(acc);
}

double u_seq(std::size_t m, std::size_t m0) {
  if (m > m0) throw PreconditionError("u_seq requires m <= m0");
  double acc = 0.0;
  for (std::size_t k = m0 + 1; k-- > m;) acc += 1.0 / std::sqrt(static_cast<double>(k + 1));
  return acc;
}

double G_seq(std::size_t m, double s1, double s2) {
  require_probe_exponents(s1, s2);
  const double x = static_cast<double>(m + 1);
  return std::pow(x, -s1) / riemann_zeta(s1) - std::pow(x, -s2) / riemann_zeta(s2);
}

std::size_t crossover_index(double s1, double s2) {
  require_probe_exponents(s1, s2);
  // G(m) <= 0  <=>  (m+1)^{s2-s1} <= zeta(s1)/zeta(s2).
  const double root = std::pow(riemann_zeta(s1) / riemann_zeta(s2), 1.0 / (s2 - s1));
  if (!(root < 1e15)) throw ParameterError("crossover index out of range for these exponents");
  auto m = static_cast<std::size_t>(std::max(0.0, std::floor(root) - 1.0));
  // The root estimate is within one step; settle the boundary on G itself.
  while (m > 0 && G_seq(m, s1, s2) > 0.0) --m;
  while (G_seq(m + 1, s1, s2) <= 0.0) ++m;
  return m;
}

double crossover_mass(double s1, double s2) {
  const std::size_t M = crossover_index(s1, s2);
  double acc = 0.0;
  for (std::size_t m = 0; m <= M; ++m) acc -= G_seq(m, s1, s2);
  return acc;
}

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t points_per_decade) {
  if (lo == 0 || hi < lo || points_per_decade == 0) throw ParameterError("geometric_grid: need 0 < lo <= hi");
  std::vector<std::size_t> out;
  const double decades = std::log10(static_cast<double>(hi) / static_cast<double>(lo));
  const auto steps = static_cast<std::size_t>(std::ceil(decades * static_cast<double>(points_per_decade)));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = steps == 0 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps);
    const auto v = static_cast<std::size_t>(std::llround(static_cast<double>(lo) * std::pow(10.0, t * decades)));
    out.push_back(std::clamp(v, lo, hi));
  }
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EstimateSummary estimate_checks(const EstimateGrid& grid) {
  EstimateSummary summary;
  // Rounding slack for inequalities that are equalities at the boundary (a = 1).
  auto holds = [](double lo, double mid, double hi) {
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(mid), std::abs(hi)});
    return lo <= mid + slack && mid <= hi + slack;
  };
  auto record = [&](bool ok, EstimateViolation v) {
    ++summary.checks;
    if (!ok) summary.violations.push_back(std::move(v));
  };

  // prefix[i] = sum_{k<i} 1/sqrt(k+1)
  std::vector<double> prefix(grid.max_m0 + 2, 0.0);
  for (std::size_t k = 0; k <= grid.max_m0; ++k) prefix[k + 1] = prefix[k] + 1.0 / std::sqrt(static_cast<double>(k + 1));

  const auto m0_values = geometric_grid(1, grid.max_m0, grid.points_per_decade);
  for (std::size_t m0 : m0_values) {
    std::vector<std::size_t> m_values = {0};
    if (m0 > 1) {
      for (std::size_t m : geometric_grid(1, m0 - 1, grid.points_per_decade)) m_values.push_back(m);
    }
    for (std::size_t m : m_values) {
      const double mid = 0.5 * (prefix[m0 + 1] - prefix[m]);
      const double lo = std::sqrt(static_cast<double>(m0 + 2)) - std::sqrt(static_cast<double>(m + 1));
      const double hi = std::sqrt(static_cast<double>(m0 + 1)) - std::sqrt(static_cast<double>(m));
      record(holds(lo, mid, hi),
             {"estim-1", join("estim-1", {{"m", double(m)}, {"m0", double(m0)}}), lo, mid, hi});
    }

    for (double s : grid.s_values) {
      if (!(s > 1.0 && s <= 1.5)) throw ParameterError("estimate_checks: s must lie in (1, 3/2]");
      // suffix sums of (m+1)^{-s} down to m = 1
      std::vector<double> tail(m0 + 2, 0.0);
      for (std::size_t m = m0 + 1; m-- > 0;) tail[m] = tail[m + 1] + std::pow(static_cast<double>(m + 1), -s);
      if (m0 < 2) continue;
      for (std::size_t A : geometric_grid(1, m0 - 1, grid.points_per_decade)) {
        const double mid = (s - 1.0) * tail[A];
        const double lo = std::pow(static_cast<double>(A + 1), 1.0 - s) - std::pow(static_cast<double>(m0 + 2), 1.0 - s);
        const double hi = std::pow(static_cast<double>(A), 1.0 - s) - std::pow(static_cast<double>(m0 + 1), 1.0 - s);
        record(holds(lo, mid, hi),
               {"estim-2", join("estim-2", {{"s", s}, {"A", double(A)}, {"m0", double(m0)}}), lo, mid, hi});
      }
    }
  }

  for (std::size_t k : geometric_grid(1, grid.max_k, grid.points_per_decade)) {
    const double kd = static_cast<double>(k);
    for (double a : grid.exponents) {
      if (!(a > 0.0 && a <= 1.0)) throw ParameterError("estimate_checks: mino-1 exponents must lie in (0, 1]");
      const double step = power_step(kd, a);
      const double hi = a * std::pow(kd, a - 1.0);
      const double lo = a * std::pow(kd + 1.0, a - 1.0);
      record(holds(lo, step, hi), {"mino-1", join("mino-1", {{"alpha", a}, {"k", kd}}), lo, step, hi});
    }
    for (double s : grid.s_values) {
      const double a = 1.0 - s;
      const double step = power_step(kd, a);
      const double lo = a * std::pow(kd, a - 1.0);
      const double hi = a * std::pow(kd + 1.0, a - 1.0);
      record(holds(lo, step, hi), {"mino-2", join("mino-2", {{"alpha", a}, {"k", kd}}), lo, step, hi});
    }
  }
  return summary;
}

MoyalPureState ProbeStateSpec::realize(std::size_t m0, double theta, std::size_t cutoff_factor) const {
  switch (kind) {
    case Kind::Basis:
      return basis_state(index, theta);
    case Kind::Zeta:
      return zeta_state(s, std::max<std::size_t>(1, cutoff_factor * std::max<std::size_t>(m0, 1)), theta);
    case Kind::Finite:
      return finite_state(weights, theta);
  }
  throw ParameterError("unknown probe state kind");
}

std::string ProbeStateSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Basis:
      os << "basis:" << index;
      break;
    case Kind::Zeta:
      os << "zeta:" << s;
      break;
    case Kind::Finite:
      os << finite_state(weights, 1.0).describe();
      break;
  }
  return os.str();
}

DivergenceClaim divergence_claim(const ProbeStateSpec& a, const ProbeStateSpec& b) {
  using Kind = ProbeStateSpec::Kind;
  auto in_range = [](double s) { return s > 1.0 && s <= 1.5; };
  DivergenceClaim claim;
  const bool za = a.kind == Kind::Zeta;
  const bool zb = b.kind == Kind::Zeta;
  if (za && zb) {
    const double lo = std::min(a.s, b.s);
    const double hi = std::max(a.s, b.s);
    if (lo == hi) {
      claim.reason = "identical zeta states";
    } else if (!in_range(lo) || !in_range(hi)) {
      claim.reason = "exponent outside (1, 3/2]";
    } else if (lo == 1.25) {
      claim.reason = "leading coefficient vanishes at s1 = 5/4; no conclusion";
    } else {
      claim.divergent = true;
      claim.theory_slope = 1.5 - lo;
      claim.reason = "zeta pair with distinct exponents";
    }
  } else if (za || zb) {
    const ProbeStateSpec& z = za ? a : b;
    const ProbeStateSpec& other = za ? b : a;
    if (!in_range(z.s)) {
      claim.reason = "exponent outside (1, 3/2]";
    } else if (other.kind == Kind::Basis) {
      claim.divergent = true;
      claim.theory_slope = 1.5 - z.s;
      claim.reason = "basis state against zeta state";
    } else {
      // A finite combination sits at finite distance from every basis state, so
      // the basis-state result transfers by the triangle inequality.
      claim.divergent = true;
      claim.theory_slope = 1.5 - z.s;
      claim.reason = "finite state against zeta state";
    }
  } else {
    claim.reason = "both states finitely supported; distance is finite";
  }
  return claim;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("loglog_slope needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ParameterError("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

ProbeSeries asymptotic_fit(const ProbeStateSpec& a, const ProbeStateSpec& b, const std::vector<std::size_t>& m0_grid,
                           std::optional<std::pair<std::size_t, std::size_t>> fit_window, double theta,
                           std::size_t cutoff_factor) {
  if (m0_grid.empty()) throw ParameterError("asymptotic_fit: empty grid");
  ProbeSeries series;
  series.state_a = a.describe();
  series.state_b = b.describe();
  series.theta = theta;
  series.m0_grid = m0_grid;
  series.claim = divergence_claim(a, b);
  series.theory_slope = series.claim.theory_slope;

  series.B_values.reserve(m0_grid.size());
  for (std::size_t m0 : m0_grid) {
    series.B_values.push_back(bound_B(m0, a.realize(m0, theta, cutoff_factor), b.realize(m0, theta, cutoff_factor)));
  }

  const std::size_t top = *std::max_element(m0_grid.begin(), m0_grid.end());
  series.fit_window = fit_window.value_or(std::pair<std::size_t, std::size_t>{
      static_cast<std::size_t>(std::ceil(static_cast<double>(top) / std::pow(10.0, 1.5))), top});

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < m0_grid.size(); ++i) {
    if (m0_grid[i] < series.fit_window.first || m0_grid[i] > series.fit_window.second) continue;
    if (!(series.B_values[i] > 0.0)) {
      throw ParameterError("asymptotic_fit: B vanishes at m0 = " + std::to_string(m0_grid[i]) +
                           "; widen the fit window or check that the states differ");
    }
    xs.push_back(static_cast<double>(m0_grid[i]));
    ys.push_back(series.B_values[i]);
  }
  if (xs.size() < 2) throw ParameterError("asymptotic_fit: fewer than two grid points in the fit window; widen it");
  series.fit_points = xs.size();
  series.fitted_slope = loglog_slope(xs, ys);
  if (series.theory_slope) series.gap = series.fitted_slope - *series.theory_slope;
  return series;
}

}  // namespace ncdist
