#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "exosc/charts.hpp"
#include "exosc/cycles.hpp"
#include "exosc/models.hpp"
#include "exosc/ode.hpp"
#include "exosc/singular.hpp"

namespace exosc {

using Json = nlohmann::json;

// Every from_json throws DomainError on missing keys or wrong types.
Json to_json(const SystemParams& p);
SystemParams system_params_from_json(const Json& j);

Json to_json(const SingularCycle& c);
SingularCycle singular_cycle_from_json(const Json& j);

Json to_json(const LimitCycle& c);
LimitCycle limit_cycle_from_json(const Json& j);

Json to_json(const ConvergenceReport& r);
ConvergenceReport convergence_report_from_json(const Json& j);

// Grouped by chart name: {chart: [{label, point, analytic_eigs, ...}]}.
Json catalog_to_json(const std::vector<EquilibriumRecord>& recs);
std::vector<EquilibriumRecord> catalog_from_json(const Json& j);

Json to_json(const CheckResult& r);
CheckResult check_result_from_json(const Json& j);

// Summary of a simulate run: equilibrium, final state and events.
Json trajectory_summary(const SystemParams& p, double eps, const Trajectory& tr);

// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace exosc
