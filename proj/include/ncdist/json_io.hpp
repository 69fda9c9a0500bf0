#pragma once

// JSON and CSV forms of the library types. Key order is fixed, so identical
// inputs give byte-identical output.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ncdist/distance_engine.hpp"
#include "ncdist/divergence_probes.hpp"
#include "ncdist/lipschitz.hpp"
#include "ncdist/moyal_algebra.hpp"
#include "ncdist/moyal_calculus.hpp"
#include "ncdist/nc_torus.hpp"
#include "ncdist/states.hpp"

namespace ncdist {

using Json = nlohmann::ordered_json;

Json to_json(const MoyalElement& a);
Json to_json(const DerivativeCoefficients& d);
Json to_json(const BallReport& report);
Json to_json(const MoyalPureState& state);
Json to_json(const DistanceReport& report);
Json to_json(const TorusElement& a);
Json to_json(const EstimateSummary& summary);
/// Summary only: fitted_slope, theory_slope, gap and the claim.
Json to_json(const ProbeSeries& series);

MoyalElement moyal_element_from_json(const Json& j);
DerivativeCoefficients derivative_from_json(const Json& j);
TorusElement torus_element_from_json(const Json& j);

/// Columns m0, B, log_m0, log_B.
void write_probe_csv(std::ostream& os, const ProbeSeries& series);

/// basis:m | zeta:s:Mcut | finite:w0,w1,... (weights real, or a+bi / a-bi).
MoyalPureState parse_state_spec(const std::string& spec, double theta);
/// Same grammar; the zeta cutoff is optional and ignored (probes pick their own).
ProbeStateSpec parse_probe_spec(const std::string& spec);
/// "m1,m2"
Lattice parse_lattice(const std::string& text);

}  // namespace ncdist
