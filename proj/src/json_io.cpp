#include "ncdist/json_io.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <vector>

#include "ncdist/errors.hpp"

namespace ncdist {

namespace {

Json matrix_parts(const CMatrix& m, bool imaginary) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imaginary ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_parts(const Json& j) {
  if (!j.contains("re") || !j.contains("order")) throw ParameterError("element JSON needs \"order\" and \"re\"");
  const auto n = j.at("order").get<Eigen::Index>();
  CMatrix out = CMatrix::Zero(n, n);
  const Json& re = j.at("re");
  const Json im = j.contains("im") ? j.at("im") : Json::array();
  if (static_cast<Eigen::Index>(re.size()) != n) throw ParameterError("element JSON: \"re\" has wrong row count");
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(re.at(r).size()) != n) throw ParameterError("element JSON: ragged \"re\"");
    for (Eigen::Index c = 0; c < n; ++c) {
      const double x = re.at(r).at(c).get<double>();
      const double y = im.empty() ? 0.0 : im.at(r).at(c).get<double>();
      out(r, c) = Complex(x, y);
    }
  }
  return out;
}

template <class T>
Json optional_value(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParameterError("malformed " + what + ": '" + text + "'");
  }
  if (used != text.size()) throw ParameterError("malformed " + what + ": '" + text + "'");
  return v;
}

std::size_t parse_index(const std::string& text, const std::string& what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParameterError("malformed " + what + ": '" + text + "'");
  }
  return static_cast<std::size_t>(std::stoull(text));
}

// "0.5", "-1", "0.3+0.4i", "0.3-0.4i", "2i"
Complex parse_weight(const std::string& text) {
  if (text.empty()) throw ParameterError("empty weight in finite state");
  if (text.back() != 'i') return parse_double(text, "weight");
  const std::string body = text.substr(0, text.size() - 1);
  const auto split = body.find_last_of("+-");
  if (split == std::string::npos || split == 0) return {0.0, body.empty() ? 1.0 : parse_double(body, "weight")};
  const std::string imag = body.substr(split);
  return {parse_double(body.substr(0, split), "weight"),
          imag.size() == 1 ? (imag == "-" ? -1.0 : 1.0) : parse_double(imag, "weight")};
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::vector<Complex> parse_weights(const std::string& text) {
  std::vector<Complex> out;
  for (const auto& w : split(text, ',')) out.push_back(parse_weight(w));
  return out;
}

}  // namespace

Json to_json(const MoyalElement& a) {
  Json j;
  j["theta"] = a.theta();
  j["order"] = a.order();
  j["re"] = matrix_parts(a.coeffs(), false);
  j["im"] = matrix_parts(a.coeffs(), true);
  return j;
}

Json to_json(const DerivativeCoefficients& d) {
  Json j;
  j["kind"] = to_string(d.kind());
  j["theta"] = d.theta();
  j["order"] = d.order();
  j["re"] = matrix_parts(d.coeffs(), false);
  j["im"] = matrix_parts(d.coeffs(), true);
  return j;
}

Json to_json(const BallReport& report) {
  Json j;
  j["commutator_norm"] = report.commutator_norm;
  j["member"] = report.member;
  j["slack"] = report.slack;
  Json v = Json::array();
  for (const auto& x : report.necessary_condition_violations) {
    v.push_back(Json::array({x.m, x.n, x.magnitude}));
  }
  j["violations"] = std::move(v);
  Json kinds = Json::array();
  for (const auto& x : report.necessary_condition_violations) kinds.push_back(to_string(x.kind));
  j["violation_kinds"] = std::move(kinds);
  return j;
}

Json to_json(const MoyalPureState& state) {
  Json j;
  j["spec"] = state.describe();
  j["theta"] = state.theta();
  switch (state.kind()) {
    case StateKind::Basis:
      j["kind"] = "basis";
      j["index"] = *state.basis_index();
      break;
    case StateKind::Zeta: {
      const ZetaProfile& z = *state.zeta_profile();
      j["kind"] = "zeta";
      j["s"] = z.s;
      j["cutoff"] = z.cutoff;
      j["zeta"] = z.zeta;
      j["partial_sum"] = z.partial_sum;
      break;
    }
    case StateKind::Finite: {
      j["kind"] = "finite";
      j["normalization"] = state.normalization_factor();
      Json re = Json::array(), im = Json::array();
      for (std::size_t m = 0; m < state.support(); ++m) {
        re.push_back(state.coefficient(m).real());
        im.push_back(state.coefficient(m).imag());
      }
      j["re"] = std::move(re);
      j["im"] = std::move(im);
      break;
    }
  }
  return j;
}

Json to_json(const DistanceReport& r) {
  Json j;
  j["theta"] = r.theta;
  j["order"] = r.truncation_order;
  j["state_a"] = r.state_a;
  j["state_b"] = r.state_b;
  j["closed_form"] = optional_value(r.closed_form);
  j["certificate_lower"] = r.certificate_lower;
  j["certificate_id"] = r.certificate_id;
  j["analytic_upper"] = optional_value(r.analytic_upper);
  j["optimizer_lower"] = optional_value(r.optimizer_lower);
  j["feasibility_residual"] = optional_value(r.feasibility_residual);
  j["iterations"] = optional_value(r.iterations);
  j["converged"] = optional_value(r.converged);
  j["bracket_width"] = optional_value(r.bracket_width);
  j["divergent"] = r.divergent;
  j["divergence_slope"] = optional_value(r.divergence_slope);
  if (r.refined_lower) {
    j["refined_lower"] = *r.refined_lower;
    j["refined_id"] = r.refined_id;
  }
  if (r.reference_value) j["reference_value"] = *r.reference_value;
  return j;
}

Json to_json(const TorusElement& a) {
  Json j;
  j["theta"] = a.theta();
  Json terms = Json::array();
  for (const auto& [M, c] : a.terms()) {
    Json t;
    t["m"] = Json::array({M.m1, M.m2});
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

Json to_json(const EstimateSummary& summary) {
  Json j;
  j["checks"] = summary.checks;
  j["violation_count"] = summary.violations.size();
  Json v = Json::array();
  for (const auto& x : summary.violations) {
    Json e;
    e["inequality"] = x.inequality;
    e["where"] = x.where;
    e["lower"] = x.lower;
    e["middle"] = x.middle;
    e["upper"] = x.upper;
    v.push_back(std::move(e));
  }
  j["violations"] = std::move(v);
  return j;
}

Json to_json(const ProbeSeries& s) {
  Json j;
  j["state_a"] = s.state_a;
  j["state_b"] = s.state_b;
  j["theta"] = s.theta;
  j["grid_points"] = s.m0_grid.size();
  j["fit_window"] = Json::array({s.fit_window.first, s.fit_window.second});
  j["fit_points"] = s.fit_points;
  j["fitted_slope"] = s.fitted_slope;
  j["theory_slope"] = optional_value(s.theory_slope);
  j["gap"] = optional_value(s.gap);
  j["divergent"] = s.claim.divergent;
  j["claim"] = s.claim.reason;
  return j;
}

MoyalElement moyal_element_from_json(const Json& j) {
  if (!j.contains("theta")) throw ParameterError("element JSON needs \"theta\"");
  return MoyalElement(j.at("theta").get<double>(), matrix_from_parts(j));
}

DerivativeCoefficients derivative_from_json(const Json& j) {
  if (!j.contains("kind")) throw ParameterError("derivative JSON needs \"kind\"");
  const auto kind = j.at("kind").get<std::string>();
  Derivation d;
  if (kind == "del") {
    d = Derivation::Del;
  } else if (kind == "delbar") {
    d = Derivation::Delbar;
  } else {
    throw ParameterError("derivative kind must be del or delbar, got " + kind);
  }
  return DerivativeCoefficients(d, j.at("theta").get<double>(), matrix_from_parts(j));
}

TorusElement torus_element_from_json(const Json& j) {
  if (!j.contains("theta") || !j.contains("terms")) throw ParameterError("torus JSON needs \"theta\" and \"terms\"");
  TorusElement a(j.at("theta").get<double>());
  for (const auto& t : j.at("terms")) {
    const auto& m = t.at("m");
    if (m.size() != 2) throw ParameterError("torus term index must be [m1, m2]");
    const Lattice M{m.at(0).get<std::int64_t>(), m.at(1).get<std::int64_t>()};
    const double im = t.contains("im") ? t.at("im").get<double>() : 0.0;
    a.set(M, a.coeff(M) + Complex(t.at("re").get<double>(), im));
  }
  return a;
}

void write_probe_csv(std::ostream& os, const ProbeSeries& series) {
  const auto old = os.precision(17);
  os << "m0,B,log_m0,log_B\n";
  for (std::size_t i = 0; i < series.m0_grid.size(); ++i) {
    const double m0 = static_cast<double>(series.m0_grid[i]);
    const double B = series.B_values[i];
    os << series.m0_grid[i] << ',' << B << ',' << std::log(m0) << ',';
    if (B > 0.0) os << std::log(B);
    os << '\n';
  }
  os.precision(old);
}

MoyalPureState parse_state_spec(const std::string& spec, double theta) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParameterError("state spec needs kind:args, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "basis") return basis_state(parse_index(rest, "basis index"), theta);
  if (kind == "zeta") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) throw ParameterError("zeta spec is zeta:s:Mcut, got '" + spec + "'");
    return zeta_state(parse_double(parts[0], "zeta exponent"), parse_index(parts[1], "zeta cutoff"), theta);
  }
  if (kind == "finite") {
    const auto w = parse_weights(rest);
    return finite_state(w, theta);
  }
  throw ParameterError("unknown state kind '" + kind + "'");
}

ProbeStateSpec parse_probe_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParameterError("state spec needs kind:args, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "basis") return ProbeStateSpec::basis(parse_index(rest, "basis index"));
  if (kind == "zeta") {
    const auto parts = split(rest, ':');
    if (parts.empty() || parts.size() > 2) throw ParameterError("zeta spec is zeta:s[:Mcut], got '" + spec + "'");
    const double s = parse_double(parts[0], "zeta exponent");
    if (!(s > 1.0)) throw ParameterError("zeta-state exponent must satisfy s > 1");
    return ProbeStateSpec::zeta(s);
  }
  if (kind == "finite") {
    auto w = parse_weights(rest);
    finite_state(w, 1.0);  // validates
    return ProbeStateSpec::finite(std::move(w));
  }
  throw ParameterError("unknown state kind '" + kind + "'");
}

Lattice parse_lattice(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ParameterError("lattice point must be m1,m2, got '" + text + "'");
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw ParameterError("malformed lattice point '" + text + "'");
    }
    if (used != s.size()) throw ParameterError("malformed lattice point '" + text + "'");
    return static_cast<std::int64_t>(v);
  };
  return {to_int(parts[0]), to_int(parts[1])};
}

}  // namespace ncdist
