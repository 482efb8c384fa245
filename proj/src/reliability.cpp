#include "gridcred/reliability.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace gridcred {

LolhResult compute_lolh_from_shed(const std::vector<std::vector<double>>& shed_series,
                                  double shed_tolerance_mw) {
    if (shed_series.empty()) throw InputError("compute_lolh: no scenarios");
    LolhResult res;
    res.shed_tolerance_mw = shed_tolerance_mw;
    double total = 0.0;
    for (const auto& series : shed_series) {
        int count = 0;
        for (double s : series)
            if (s > shed_tolerance_mw) ++count;
        res.shed_hours_per_scenario.push_back(count);
        total += count;
    }
    res.mean_lolh = total / static_cast<double>(shed_series.size());
    return res;
}

LolhResult compute_lolh(const std::vector<UcSolution>& solutions, double shed_tolerance_mw) {
    std::vector<std::vector<double>> shed;
    shed.reserve(solutions.size());
    for (const auto& s : solutions) shed.push_back(s.shed_sys);
    return compute_lolh_from_shed(shed, shed_tolerance_mw);
}

LoadAdjustmentResult find_load_adjustment(const LolhEvaluator& evaluate,
                                          const LoadAdjustmentOptions& options) {
    if (options.target_lolh <= 0.0)
        throw InputError("find_load_adjustment: target LOLH must be > 0");
    const double target = options.target_lolh;
    const double eps = options.epsilon_la;
    const double peak = std::max(options.peak_demand, 1.0);
    const double clamp = 0.5 * peak;

    LoadAdjustmentResult res;
    res.la_min = -kInf;
    res.la_max = kInf;
    double la = options.initial_la;
    double step = std::max(0.01 * peak, eps);
    double lolh_at_min = 0.0, lolh_at_max = 0.0;

    for (long it = 0; it < options.max_iterations; ++it) {
        double lolh = evaluate(la);
        ++res.iterations;
        res.trace.push_back({res.iterations, la, lolh, res.la_min, res.la_max});

        if (lolh > target && la < res.la_max) {
            res.la_max = la;
            lolh_at_max = lolh;
        } else if (lolh < target && la > res.la_min) {
            res.la_min = la;
            lolh_at_min = lolh;
        }
        if (lolh == target) {
            res.la = la;
            res.la_min = res.la_max = la;
            res.converged = true;
            res.exact_hit = true;
            return res;
        }

        if (std::isinf(res.la_min) || std::isinf(res.la_max)) {
            int dir;
            if (std::isinf(res.la_min) && std::isinf(res.la_max))
                dir = (lolh > target) ? -1 : +1;
            else
                dir = std::isinf(res.la_min) ? -1 : +1;
            double next = la + dir * step;
            step *= 2.0;
            if (next < -clamp) next = -clamp;
            if (next > clamp) next = clamp;
            if (next == la) {
                double lo_la = std::isinf(res.la_min) ? la : res.la_min;
                double lo_lolh = std::isinf(res.la_min) ? lolh : lolh_at_min;
                double hi_la = std::isinf(res.la_max) ? la : res.la_max;
                double hi_lolh = std::isinf(res.la_max) ? lolh : lolh_at_max;
                throw NonBracketableError(
                    "load adjustment target not bracketable within +/-50% of peak demand: "
                    "LOLH(" + std::to_string(lo_la) + ") = " + std::to_string(lo_lolh) +
                    ", LOLH(" + std::to_string(hi_la) + ") = " + std::to_string(hi_lolh) +
                    ", target " + std::to_string(target),
                    lo_la, lo_lolh, hi_la, hi_lolh);
            }
            la = next;
            continue;
        }

        if (res.la_max - res.la_min <= eps) {
            res.la = 0.5 * (res.la_min + res.la_max);
            res.converged = true;
            return res;
        }
        la = 0.5 * (res.la_min + res.la_max);
    }
    throw SolverError("find_load_adjustment: no convergence within " +
                      std::to_string(options.max_iterations) + " probes");
}

void write_search_trace(const LoadAdjustmentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write search trace: " + path);
    out << "iteration,la_mw,mean_lolh,la_min,la_max\n";
    char buf[160];
    for (const auto& p : result.trace) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g,%.10g\n", p.iteration, p.la,
                      p.mean_lolh, p.la_min, p.la_max);
        out << buf;
    }
}

}  // namespace gridcred
