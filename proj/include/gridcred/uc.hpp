#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridcred/branch_bound.hpp"
#include "gridcred/climate.hpp"
#include "gridcred/grid.hpp"
#include "gridcred/milp.hpp"

namespace gridcred {

struct UcCosts {
    double voll = 10000.0;               // $/MWh on involuntary shed
    double curtailment_multiplier = 10.0;  // curtailment price = multiplier x LCOE
};

// Exogenous hourly inputs for one scenario month, derived once and shared
// by every window and load-adjustment probe on that scenario.
struct ScenarioInputs {
    int hours = 0;
    std::vector<double> demand_sys;                  // MW
    std::vector<std::vector<double>> line_rating;    // [line][hour]
    std::vector<std::vector<double>> thermal_avail;  // [thermal][hour]
    std::vector<std::vector<double>> pv_max;         // [solar][hour]
    std::vector<std::vector<double>> wind_max;       // [wind][hour], speed curve only
    std::vector<std::uint8_t> hurricane;             // [hour]
};

ScenarioInputs make_scenario_inputs(const PowerSystem& system, const ScenarioProfile& profile);

// One rolling-horizon window with its initial conditions.
struct UcWindow {
    int t0 = 0;     // absolute hour of the window start within the month
    int hours = 0;  // 168 except possibly the final window
    double load_adjustment = 0.0;
    std::vector<std::vector<double>> nodal_demand;   // [bus][hour]
    std::vector<std::vector<double>> line_rating;    // [line][hour]
    std::vector<std::vector<double>> thermal_avail;  // [thermal][hour]
    std::vector<std::vector<double>> pv_max;         // [solar][hour]
    std::vector<std::vector<double>> wind_max;       // [wind][hour]
    std::vector<std::uint8_t> hurricane;             // [hour]
    std::vector<std::vector<int>> commit_history;    // [thermal][>=max(UT,DT) hours]
    std::vector<double> initial_soc;                 // [storage], fraction
};

UcWindow make_uc_window(const PowerSystem& system, const ScenarioInputs& inputs,
                        double load_adjustment, int t0, int hours,
                        const std::vector<std::vector<int>>& commit_history,
                        const std::vector<double>& initial_soc);

// Variable indices assigned by build_uc_model, for solution extraction.
struct UcVarMap {
    std::vector<std::vector<int>> u, su, sd, g_th;        // [thermal][hour]
    std::vector<std::vector<std::vector<int>>> blocks;    // [thermal][block][hour]
    std::vector<std::vector<int>> g_s, curt_s;            // [solar][hour]
    std::vector<std::vector<int>> g_w, curt_w;            // [wind][hour]
    std::vector<std::vector<int>> ch, dis, soc, ch_on, dis_on;  // [storage][hour]
    std::vector<int> shed_sys, shed_on;                   // [hour]
    std::vector<std::vector<int>> shed_n;                 // [bus][hour]
};

// Hourly transmission-constrained unit commitment over the window:
// piecewise thermal costs with start/stop, PTDF line limits under hourly
// ratings, FOR-derated capacity with min up/down times against the history,
// must-take RES with priced curtailment and hurricane stall, storage with
// SOC recursion, and VOLL-priced shedding gated per hour and split by load
// weight. Start/stop indicators stay continuous in [0,1]: with binary
// commitment the transition equality pins them, so branching is confined to
// commitment, storage mode, and shed gates.
MilpModel build_uc_model(const PowerSystem& system, const PtdfMatrix& ptdf,
                         const UcWindow& window, const UcCosts& costs, UcVarMap* map);

struct UcSolution {
    int hours = 0;
    std::vector<std::vector<double>> g_thermal;           // [thermal][hour]
    std::vector<std::vector<int>> commit, start, stop;    // [thermal][hour]
    std::vector<std::vector<double>> g_solar, curt_solar; // [solar][hour]
    std::vector<std::vector<double>> g_wind, curt_wind;   // [wind][hour]
    std::vector<std::vector<double>> ch, dis, soc;        // [storage][hour]
    std::vector<std::vector<int>> ch_on, dis_on;          // [storage][hour]
    std::vector<double> shed_sys;                         // [hour]
    std::vector<int> shed_on;                             // [hour]
    std::vector<std::vector<double>> shed_nodal;          // [bus][hour]
    std::vector<std::vector<double>> flow;                // [line][hour]
    double objective = 0.0;
    MilpStatus status = MilpStatus::Optimal;
    double mip_gap = 0.0;
    long nodes = 0;
};

// Warm-start state carried between successive solves of the same scenario
// (load-adjustment probes): per-window root basis plus the previous binary
// pattern, used to seed each window's first incumbent.
struct UcWarmCache {
    std::vector<Basis> basis;
    std::vector<std::vector<double>> hint_x;
};

// Month-long solve as consecutive 168 h windows advancing 144 h; the final
// day of each window is advisory and re-decided by its successor, except in
// the last window. Commitment history and the SOC at the end of the
// committed region carry forward.
UcSolution solve_rolling_horizon(const PowerSystem& system, const PtdfMatrix& ptdf,
                                 const ScenarioInputs& inputs, double load_adjustment,
                                 const UcCosts& costs, const SolverOptions& options,
                                 UcWarmCache* warm_cache = nullptr);

// Re-evaluates every constraint family directly from the data, no solver
// involved. Empty result means feasible within 1e-6 relative tolerance.
std::vector<std::string> check_solution_feasibility(const PowerSystem& system,
                                                    const PtdfMatrix& ptdf,
                                                    const ScenarioInputs& inputs,
                                                    double load_adjustment,
                                                    const UcSolution& solution);

}  // namespace gridcred
