#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gridcred/common.hpp"
#include "gridcred/uc.hpp"

namespace gridcred {

struct LolhResult {
    std::vector<int> shed_hours_per_scenario;
    double mean_lolh = 0.0;  // hours/month
    double shed_tolerance_mw = 1e-3;
};

// A scenario-hour counts as lost load iff system shed exceeds the tolerance
// (strictly), filtering LP noise out of the count.
LolhResult compute_lolh(const std::vector<UcSolution>& solutions, double shed_tolerance_mw);
LolhResult compute_lolh_from_shed(const std::vector<std::vector<double>>& shed_series,
                                  double shed_tolerance_mw);

struct LoadAdjustmentOptions {
    double target_lolh = 0.2;       // hours/month
    double epsilon_la = 1.0;        // MW bracket tolerance
    double peak_demand = 0.0;       // scales the expansion step and abort bounds
    double initial_la = 0.0;
    long max_iterations = 200;
};

struct LaProbe {
    int iteration = 0;
    double la = 0.0;
    double mean_lolh = 0.0;
    double la_min = 0.0;
    double la_max = 0.0;
};

struct LoadAdjustmentResult {
    double la = 0.0;
    double la_min = 0.0;
    double la_max = 0.0;
    int iterations = 0;
    bool converged = false;
    bool exact_hit = false;  // target met exactly at a probe
    std::vector<LaProbe> trace;
};

using LolhEvaluator = std::function<double(double la)>;

// Search-and-bound on the load adjustment: probes expand geometrically from
// +/-1% of peak demand until the target LOLH is straddled, then bisect until
// the target is hit exactly or the bracket closes below epsilon_la. Throws
// NonBracketableError when +/-50% of peak cannot straddle the target.
LoadAdjustmentResult find_load_adjustment(const LolhEvaluator& evaluate,
                                          const LoadAdjustmentOptions& options);

// Audit trace as delimited text: iteration,la_mw,mean_lolh,la_min,la_max.
void write_search_trace(const LoadAdjustmentResult& result, const std::string& path);

}  // namespace gridcred
