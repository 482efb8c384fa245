#include "gridcred/accreditation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "gridcred/parallel.hpp"

namespace gridcred {

DeltaAllocation delta_allocate(double port, const std::vector<double>& fi,
                               const std::vector<double>& li) {
    if (fi.size() != li.size() || fi.empty())
        throw InputError("delta_allocate: FI and LI must be the same nonzero length");
    const std::size_t n = fi.size();
    DeltaAllocation out;
    double li_sum = std::accumulate(li.begin(), li.end(), 0.0);
    out.pie = port - li_sum;
    out.iie.resize(n);
    double iie_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out.iie[j] = fi[j] - li[j];
        iie_sum += out.iie[j];
    }
    out.elcc.resize(n);
    if (iie_sum == 0.0) {
        out.delta = 0.0;
        if (out.pie == 0.0) {
            for (std::size_t j = 0; j < n; ++j) out.elcc[j] = li[j];
        } else {
            // Allocation ratio is undefined; split PIE in proportion to LI so
            // the portfolio identity still holds, and flag the result.
            out.degenerate = true;
            for (std::size_t j = 0; j < n; ++j) {
                double share = (li_sum != 0.0) ? li[j] / li_sum : 1.0 / static_cast<double>(n);
                out.elcc[j] = li[j] + out.pie * share;
            }
        }
        return out;
    }
    out.delta = out.pie / iie_sum;
    for (std::size_t j = 0; j < n; ++j) out.elcc[j] = li[j] + out.delta * out.iie[j];
    return out;
}

AccreditationEngine::AccreditationEngine(PortfolioSpec spec, const ScenarioSet* scenarios,
                                         StudyOptions options)
    : spec_(std::move(spec)), scenarios_(scenarios), options_(std::move(options)) {
    if (!scenarios_ || scenarios_->scenarios.empty())
        throw InputError("accreditation: scenario set is empty");
    if (spec_.resource_count() == 0)
        throw InputError("accreditation: portfolio has no resources to accredit");
    for (const auto& sc : scenarios_->scenarios)
        for (double d : sc.demand_mw) peak_demand_ = std::max(peak_demand_, d);
}

ResourceAccreditation AccreditationEngine::resource_info(std::size_t j) const {
    ResourceAccreditation r;
    if (j < spec_.solar.size()) {
        const auto& s = spec_.solar[j];
        r.kind = "solar";
        r.id = s.id;
        r.bus = s.bus;
        r.nameplate_mw = s.nominal_power;
        r.label = "s" + std::to_string(s.id);
        return r;
    }
    j -= spec_.solar.size();
    if (j < spec_.wind.size()) {
        const auto& w = spec_.wind[j];
        r.kind = "wind";
        r.id = w.id;
        r.bus = w.bus;
        r.nameplate_mw = w.nominal_power;
        r.label = "w" + std::to_string(w.id);
        return r;
    }
    j -= spec_.wind.size();
    const auto& b = spec_.storage.at(j);
    r.kind = "storage";
    r.id = b.id;
    r.bus = b.bus;
    r.nameplate_mw = b.dis_max;  // power rating; see README on MWh vs MW
    r.label = "b" + std::to_string(b.id);
    return r;
}

PowerSystem AccreditationEngine::assemble_system(const std::vector<std::size_t>& subset) const {
    PowerSystem sys = spec_.base;
    for (std::size_t j : subset) {
        if (j < spec_.solar.size()) {
            sys.solar.push_back(spec_.solar[j]);
            continue;
        }
        std::size_t k = j - spec_.solar.size();
        if (k < spec_.wind.size()) {
            sys.wind.push_back(spec_.wind[k]);
            continue;
        }
        sys.storage.push_back(spec_.storage.at(k - spec_.wind.size()));
    }
    return sys;
}

LoadAdjustmentResult AccreditationEngine::evaluate_variant(const PowerSystem& system) {
    auto issues = validate_system(system);
    if (!issues.empty())
        throw StructureError("accreditation variant system invalid: " + issues.front());
    PtdfMatrix ptdf = build_ptdf(system);

    const auto& scs = scenarios_->scenarios;
    std::vector<ScenarioInputs> inputs(scs.size());
    for (std::size_t i = 0; i < scs.size(); ++i) inputs[i] = make_scenario_inputs(system, scs[i]);

    std::vector<UcWarmCache> warm_cache(scs.size());

    LoadAdjustmentOptions la_opts;
    la_opts.target_lolh = options_.target_lolh;
    la_opts.epsilon_la = options_.epsilon_la;
    la_opts.peak_demand = peak_demand_;

    if (options_.per_scenario_search) {
        // Optional mode: search each scenario to the target independently,
        // then average the per-scenario adjustments.
        double sum = 0.0;
        LoadAdjustmentResult last;
        for (std::size_t i = 0; i < scs.size(); ++i) {
            auto eval_one = [&](double la) {
                UcSolution sol = solve_rolling_horizon(system, ptdf, inputs[i], la,
                                                       options_.costs, options_.solver,
                                                       &warm_cache[i]);
                LolhResult r = compute_lolh_from_shed({sol.shed_sys}, options_.shed_tolerance_mw);
                return r.mean_lolh;
            };
            last = find_load_adjustment(eval_one, la_opts);
            sum += last.la;
        }
        last.la = sum / static_cast<double>(scs.size());
        return last;
    }

    auto eval_mean = [&](double la) {
        std::vector<int> counts(scs.size(), 0);
        parallel_for(scs.size(), options_.threads, [&](std::size_t i) {
            UcSolution sol = solve_rolling_horizon(system, ptdf, inputs[i], la, options_.costs,
                                                   options_.solver, &warm_cache[i]);
            int c = 0;
            for (double s : sol.shed_sys)
                if (s > options_.shed_tolerance_mw) ++c;
            counts[i] = c;
        });
        double total = 0.0;
        for (int c : counts) total += c;
        return total / static_cast<double>(scs.size());
    };
    return find_load_adjustment(eval_mean, la_opts);
}

double AccreditationEngine::variant_la(std::vector<std::size_t> subset) {
    std::sort(subset.begin(), subset.end());
    std::ostringstream key;
    for (std::size_t j : subset) key << resource_info(j).label << '|';
    ++searches_requested_;
    auto it = cache_.find(key.str());
    if (it != cache_.end()) return it->second.la;

    ++searches_performed_;
    PowerSystem system = assemble_system(subset);
    LoadAdjustmentResult la = evaluate_variant(system);
    double value = la.la;
    cache_.emplace(key.str(), std::move(la));
    return value;
}

AccreditationResult AccreditationEngine::run_delta_accreditation() {
    const std::size_t n = spec_.resource_count();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    AccreditationResult res;
    res.scenario_seed = scenarios_->master_seed;
    res.target_lolh = options_.target_lolh;
    res.la_base = variant_la({});
    res.la_port = variant_la(all);
    res.port = res.la_port - res.la_base;

    std::vector<double> fi(n), li(n);
    res.la_fi.resize(n);
    res.la_li.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        res.la_fi[j] = variant_la({j});
        fi[j] = res.la_fi[j] - res.la_base;
        std::vector<std::size_t> without;
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) without.push_back(k);
        res.la_li[j] = variant_la(without);
        li[j] = res.la_port - res.la_li[j];
    }

    DeltaAllocation alloc = delta_allocate(res.port, fi, li);
    res.pie = alloc.pie;
    res.delta = alloc.delta;
    res.degenerate_allocation = alloc.degenerate;
    for (std::size_t j = 0; j < n; ++j) {
        ResourceAccreditation r = resource_info(j);
        r.fi = fi[j];
        r.li = li[j];
        r.iie = alloc.iie[j];
        r.elcc = alloc.elcc[j];
        res.resources.push_back(std::move(r));
    }
    return res;
}

std::vector<double> AccreditationEngine::run_last_in_marginal() {
    const std::size_t n = spec_.resource_count();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    double la_port = variant_la(all);
    std::vector<double> li(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> without;
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) without.push_back(k);
        li[j] = la_port - variant_la(without);
    }
    return li;
}

}  // namespace gridcred
