#pragma once

#include <string>

#include <json.hpp>

#include "contagion/coupling.hpp"
#include "contagion/dynamics.hpp"
#include "contagion/equilibrium.hpp"
#include "contagion/gadgets.hpp"
#include "contagion/game.hpp"
#include "contagion/graph.hpp"
#include "contagion/schedule.hpp"

namespace contagion {

using Json = nlohmann::ordered_json;

// Parsers throw ValidationError naming the offending field; `where` prefixes
// field names (e.g. "dynamics").
Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j, const std::string& where = "graph");

AdoptionFunction dynamics_from_json(const Json& j, const std::string& where = "dynamics");
Json dynamics_to_json(const AdoptionFunction& h);

UpdateSchedule schedule_from_json(const Json& j, const std::string& where = "schedule");
Json schedule_to_json(const UpdateSchedule& s);

// {"counts": [...]} or {"seeds": [...]} for a pure strategy; a list of
// {"p": ..., "counts" | "seeds": ...} for a mixed one.
MixedStrategy strategy_from_json(const Json& j, int n, const std::string& where);
Json strategy_to_json(const MixedStrategy& s);
Json allocation_to_json(const Allocation& a);
StrategyProfile profile_from_json(const Json& j, int n, const std::string& where = "profile");
Json profile_to_json(const StrategyProfile& p);

Json payoff_to_json(const PayoffEstimate& e);
std::string payoff_csv_header();
std::string payoff_csv_row(const PayoffEstimate& e);

Json nash_to_json(const NashReport& r);
Json efficiency_to_json(const EfficiencyReport& r);
// One row per equilibrium: profile, pi_R, pi_B, joint, is_worst, is_best.
std::string equilibria_csv(const NashReport& r, std::size_t worst = SIZE_MAX, std::size_t best = SIZE_MAX);

Json predictions_to_json(const GadgetSpec& g);
Json verification_to_json(const VerificationReport& r);
std::string verification_csv(const VerificationReport& r);

Json couple_report_to_json(const CoupleTestReport& r);
std::string couple_report_csv(const CoupleTestReport& r);

// Shortest decimal that reads back to the same double, so reports are
// byte-stable.
std::string format_double(double x);

}  // namespace contagion
