#include "ncdist/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "ncdist/distance_engine.hpp"
#include "ncdist/divergence_probes.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/json_io.hpp"
#include "ncdist/nc_torus.hpp"
#include "ncdist/verify.hpp"

namespace ncdist {

namespace {

struct Common {
  double theta = 1.0;
  std::string format = "json";
  std::string out_path;
  std::string spec_file;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c, double default_theta) {
  c.theta = default_theta;
  cmd->add_option("--theta", c.theta, "deformation parameter")->capture_default_str();
  cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd->add_option("--out", c.out_path, "write the report here instead of stdout");
  cmd->add_option("--spec-file", c.spec_file, "JSON object whose keys are long option names");
  cmd->add_flag("--timing", c.timing, "add wall-clock timing to the report");
}

// Spec-file keys become options placed before the command-line ones, so explicit
// flags win (options take their last value).
std::vector<std::string> expand_spec_file(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--spec-file" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--spec-file=", 0) == 0) {
      path = args[i].substr(12);
    }
  }
  if (!path || args.empty()) return args;
  std::ifstream in(*path);
  if (!in) throw ParameterError("cannot open spec file " + *path);
  Json spec;
  try {
    spec = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParameterError(std::string("spec file is not valid JSON: ") + e.what());
  }
  if (!spec.is_object()) throw ParameterError("spec file must hold a JSON object");
  out.push_back(args.front());  // subcommand
  for (const auto& [key, value] : spec.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_string()) {
      out.push_back(flag);
      out.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      out.push_back(flag);
      out.push_back(value.dump());
    } else {
      throw ParameterError("spec file key '" + key + "' must be a string, number or boolean");
    }
  }
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return v.dump();
}

// One-row CSV with the top-level scalar fields of a report.
void write_flat_csv(std::ostream& os, const Json& j) {
  std::string header, row;
  bool first = true;
  for (const auto& [key, value] : j.items()) {
    if (value.is_structured()) continue;
    if (!first) {
      header += ',';
      row += ',';
    }
    first = false;
    header += key;
    row += csv_cell(value);
  }
  os << header << '\n' << row << '\n';
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ParameterError("cannot open output file " + path);
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void emit(const Common& c, Json j, std::ostream& out, double elapsed_ms) {
  if (c.timing) j["timing_ms"] = elapsed_ms;
  Sink sink(c.out_path, out);
  if (c.format == "csv") {
    write_flat_csv(sink.stream(), j);
  } else {
    sink.stream() << j.dump(2) << '\n';
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void require_moyal_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ParameterError("--theta must be positive");
}

void require_torus_theta(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ParameterError("torus --theta must lie in [0, 1)");
}

// "zeta:1.2,basis:0" -> the two specs; the split point is the comma that starts a new kind.
std::pair<std::string, std::string> split_pair(const std::string& text) {
  for (const char* kind : {",basis:", ",zeta:", ",finite:"}) {
    const auto pos = text.find(kind);
    if (pos != std::string::npos) return {text.substr(0, pos), text.substr(pos + 1)};
  }
  throw ParameterError("--pair needs two state specs separated by a comma, got '" + text + "'");
}

std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParameterError(std::string(what) + " must be lo:hi");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ParameterError(std::string("malformed ") + what + " '" + text + "'");
  }
}

TorusState parse_torus_state(const std::string& text) {
  if (text == "tau") return TorusState::tracial();
  if (text.rfind("phi:", 0) == 0) return TorusState::phi(parse_lattice(text.substr(4)));
  throw ParameterError("torus state must be tau or phi:m1,m2, got '" + text + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral distances on the truncated Moyal plane and the noncommutative torus", "ncdist"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  // moyal-distance
  Common md_common;
  std::string md_a, md_b;
  std::size_t md_order = 16;
  std::size_t md_max_iter = 100000;
  double md_tol = 1e-8;
  bool md_probe = false, md_no_opt = false;
  auto* md = app.add_subcommand("moyal-distance", "distance bracket between two Moyal pure states");
  add_common(md, md_common, 1.0);
  md->add_option("--a", md_a, "state spec: basis:m | zeta:s:Mcut | finite:w0,w1,...")->required();
  md->add_option("--b", md_b, "state spec")->required();
  md->add_option("--order", md_order, "truncation order")->capture_default_str();
  md->add_option("--max-iter", md_max_iter, "optimizer iteration cap")->capture_default_str();
  md->add_option("--tol", md_tol, "relative objective change for stopping")->capture_default_str();
  md->add_flag("--probe", md_probe, "attach divergence data for infinite-support states");
  md->add_flag("--no-optimizer", md_no_opt, "skip the optimizer");

  // torus-distance
  Common td_common;
  std::string td_m, td_a, td_b;
  std::optional<std::int64_t> td_box;
  std::int64_t td_max_box = 32;
  std::size_t td_terms = 401;
  auto* td = app.add_subcommand("torus-distance", "distance bracket between torus states");
  add_common(td, td_common, 0.5 * (std::sqrt(5.0) - 1.0));
  td->add_option("--m", td_m, "shorthand for --a phi:m1,m2 --b tau");
  td->add_option("--a", td_a, "tau | phi:m1,m2");
  td->add_option("--b", td_b, "tau | phi:m1,m2");
  td->add_option("--box", td_box, "fixed GNS box radius (default: doubling until converged)");
  td->add_option("--max-box", td_max_box, "largest box radius for doubling")->capture_default_str();
  td->add_option("--terms", td_terms, "terms in the refined certificate")->capture_default_str();

  // probe
  Common pr_common;
  pr_common.format = "csv";
  std::string pr_pair, pr_grid = "1e3:1e6", pr_fit_top = "1.5dec", pr_window;
  std::size_t pr_ppd = 10, pr_cutoff = kProbeCutoffFactor;
  bool pr_estimates = false;
  auto* pr = app.add_subcommand("probe", "lower-bound series B(m0) and slope fit");
  add_common(pr, pr_common, 1.0);
  pr->get_option("--format")->default_str("csv");
  pr->add_option("--pair", pr_pair, "two state specs, e.g. zeta:1.2,basis:0");
  pr->add_option("--grid", pr_grid, "m0 range lo:hi")->capture_default_str();
  pr->add_option("--points-per-decade", pr_ppd, "grid density")->capture_default_str();
  pr->add_option("--fit-top", pr_fit_top, "fit window as the top N decades, e.g. 1.5dec")->capture_default_str();
  pr->add_option("--window", pr_window, "explicit fit window lo:hi (overrides --fit-top)");
  pr->add_option("--cutoff-factor", pr_cutoff, "zeta cutoff per m0")->capture_default_str();
  pr->add_flag("--estimates", pr_estimates, "check the elementary estimates instead of fitting");

  // verify
  Common vf_common;
  vf_common.format = "text";
  std::string vf_suite = "all";
  std::uint64_t vf_seed = 20240607;
  auto* vf = app.add_subcommand("verify", "run property suites");
  vf->add_option("--suite", vf_suite, "algebra | ball | distance | probes | torus | all")->capture_default_str();
  vf->add_option("--seed", vf_seed, "random seed")->capture_default_str();
  vf->add_option("--format", vf_common.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  vf->add_option("--out", vf_common.out_path, "write the summary here instead of stdout");
  vf->add_option("--spec-file", vf_common.spec_file, "JSON object whose keys are long option names");
  vf->add_flag("--timing", vf_common.timing, "add per-suite timing");

  // ball-check
  Common bc_common;
  std::string bc_element;
  std::optional<std::size_t> bc_ahat, bc_astep;
  double bc_tol = kBallTolerance;
  auto* bc = app.add_subcommand("ball-check", "Lipschitz ball membership of an element");
  add_common(bc, bc_common, 1.0);
  bc->add_option("--element", bc_element, "path to element JSON");
  bc->add_option("--ahat", bc_ahat, "use ahat(m0)");
  bc->add_option("--astep", bc_astep, "use a_step(n)");
  bc->add_option("--tol", bc_tol, "membership tolerance")->capture_default_str();

  std::vector<std::string> args;
  try {
    args = expand_spec_file(raw_args);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameterError;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitParameterError;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*md) {
      require_moyal_theta(md_common.theta);
      if (md_order < 2) throw ParameterError("--order must be at least 2");
      const auto s1 = parse_state_spec(md_a, md_common.theta);
      const auto s2 = parse_state_spec(md_b, md_common.theta);
      DistanceOptions opts;
      opts.order = md_order;
      opts.run_optimizer = !md_no_opt;
      opts.optimizer.max_iterations = md_max_iter;
      opts.optimizer.relative_tolerance = md_tol;
      DistanceReport rep = moyal_distance(s1, s2, opts);
      if (md_probe && !(s1.finitely_supported() && s2.finitely_supported())) {
        const auto pa = parse_probe_spec(md_a);
        const auto pb = parse_probe_spec(md_b);
        const DivergenceClaim claim = divergence_claim(pa, pb);
        rep.divergent = claim.divergent;
        if (claim.divergent) {
          const auto series = asymptotic_fit(pa, pb, geometric_grid(1000, 100000, 10), std::nullopt, md_common.theta);
          rep.divergence_slope = series.fitted_slope;
        }
      }
      emit(md_common, to_json(rep), out, elapsed_ms(t0));
      if (rep.converged && !*rep.converged) {
        err << "warning: optimizer stopped at the iteration cap\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }

    if (*td) {
      require_torus_theta(td_common.theta);
      TorusState a = TorusState::tracial(), b = TorusState::tracial();
      if (!td_m.empty()) {
        if (!td_a.empty() || !td_b.empty()) throw ParameterError("use either --m or --a/--b");
        a = TorusState::phi(parse_lattice(td_m));
      } else {
        if (td_a.empty() || td_b.empty()) throw ParameterError("torus-distance needs --m or both --a and --b");
        a = parse_torus_state(td_a);
        b = parse_torus_state(td_b);
      }
      TorusDistanceParams params;
      params.box_radius = td_box;
      params.max_box_radius = td_max_box;
      params.refined_terms = td_terms;
      emit(td_common, to_json(torus_distance(a, b, td_common.theta, params)), out, elapsed_ms(t0));
      return kExitOk;
    }

    if (*pr) {
      require_moyal_theta(pr_common.theta);
      if (pr_estimates) {
        Json j = to_json(estimate_checks());
        if (pr_common.timing) j["timing_ms"] = elapsed_ms(t0);
        Sink sink(pr_common.out_path, out);
        sink.stream() << j.dump(2) << '\n';
        return j["violation_count"].get<std::size_t>() == 0 ? kExitOk : kExitSuiteFailure;
      }
      if (pr_pair.empty()) throw ParameterError("probe needs --pair (or --estimates)");
      const auto [sa, sb] = split_pair(pr_pair);
      const auto pa = parse_probe_spec(sa);
      const auto pb = parse_probe_spec(sb);
      const auto [lo, hi] = parse_range(pr_grid, "--grid");
      if (!(lo >= 1.0 && hi >= lo)) throw ParameterError("--grid needs 1 <= lo <= hi");
      const auto grid = geometric_grid(static_cast<std::size_t>(std::llround(lo)), static_cast<std::size_t>(std::llround(hi)), pr_ppd);
      std::optional<std::pair<std::size_t, std::size_t>> window;
      if (!pr_window.empty()) {
        const auto [wl, wh] = parse_range(pr_window, "--window");
        window = {static_cast<std::size_t>(std::llround(wl)), static_cast<std::size_t>(std::llround(wh))};
      } else {
        const auto suffix = pr_fit_top.rfind("dec");
        const std::string num = suffix == std::string::npos ? pr_fit_top : pr_fit_top.substr(0, suffix);
        double decades = 0.0;
        try {
          decades = std::stod(num);
        } catch (const std::exception&) {
          throw ParameterError("malformed --fit-top '" + pr_fit_top + "'");
        }
        if (!(decades > 0.0)) throw ParameterError("--fit-top must be positive");
        window = {static_cast<std::size_t>(std::ceil(static_cast<double>(grid.back()) / std::pow(10.0, decades))), grid.back()};
      }
      const auto series = asymptotic_fit(pa, pb, grid, window, pr_common.theta, pr_cutoff);
      Json summary = to_json(series);
      if (pr_common.timing) summary["timing_ms"] = elapsed_ms(t0);
      Sink sink(pr_common.out_path, out);
      if (pr_common.format == "csv") {
        write_probe_csv(sink.stream(), series);
        err << summary.dump() << '\n';
      } else {
        summary["m0"] = series.m0_grid;
        summary["B"] = series.B_values;
        sink.stream() << summary.dump(2) << '\n';
      }
      return kExitOk;
    }

    if (*vf) {
      std::vector<std::string> names;
      if (vf_suite == "all") {
        names = suite_names();
      } else {
        names.push_back(vf_suite);
      }
      Json all = Json::array();
      bool ok = true;
      std::ostringstream text;
      for (const auto& name : names) {
        const auto t_suite = std::chrono::steady_clock::now();
        const SuiteResult res = run_suite(name, vf_seed);
        const double ms = elapsed_ms(t_suite);
        ok = ok && res.passed();
        Json js;
        js["suite"] = res.suite;
        js["passed"] = res.passed();
        if (vf_common.timing) js["timing_ms"] = ms;
        Json checks = Json::array();
        text << (res.passed() ? "PASS " : "FAIL ") << res.suite;
        if (vf_common.timing) text << " (" << ms << " ms)";
        text << '\n';
        for (const auto& c : res.checks) {
          Json jc;
          jc["name"] = c.name;
          jc["passed"] = c.passed;
          jc["instances"] = c.instances;
          jc["max_deviation"] = c.max_deviation;
          jc["tolerance"] = c.tolerance;
          if (!c.note.empty()) jc["note"] = c.note;
          checks.push_back(std::move(jc));
          text << "  " << (c.passed ? "ok   " : "FAIL ") << c.name << "  n=" << c.instances
               << " max_dev=" << c.max_deviation << " tol=" << c.tolerance;
          if (!c.note.empty()) text << "  [" << c.note << "]";
          text << '\n';
        }
        js["checks"] = std::move(checks);
        all.push_back(std::move(js));
      }
      Sink sink(vf_common.out_path, out);
      if (vf_common.format == "json") {
        sink.stream() << all.dump(2) << '\n';
      } else {
        sink.stream() << text.str();
      }
      return ok ? kExitOk : kExitSuiteFailure;
    }

    if (*bc) {
      const int sources = (!bc_element.empty()) + bc_ahat.has_value() + bc_astep.has_value();
      if (sources != 1) throw ParameterError("ball-check needs exactly one of --element, --ahat, --astep");
      std::optional<MoyalElement> a;
      if (!bc_element.empty()) {
        std::ifstream in(bc_element);
        if (!in) throw ParameterError("cannot open element file " + bc_element);
        try {
          a = moyal_element_from_json(Json::parse(in));
        } catch (const Json::exception& e) {
          throw ParameterError(std::string("malformed element JSON: ") + e.what());
        }
      } else {
        require_moyal_theta(bc_common.theta);
        a = bc_ahat ? ahat(*bc_ahat, bc_common.theta) : a_step(*bc_astep, bc_common.theta);
      }
      emit(bc_common, to_json(check_ball(*a, bc_tol)), out, elapsed_ms(t0));
      return kExitOk;
    }
  } catch (const NotApplicableError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameterError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameterError;
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameterError;
  }
  return kExitParameterError;
}

}  // namespace ncdist
