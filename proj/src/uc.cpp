#include "gridcred/uc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridcred/resource.hpp"

namespace gridcred {

namespace {

std::string nm(const char* family, const std::string& entity, int hour) {
    return std::string(family) + "_" + entity + "_" + std::to_string(hour);
}

// Block widths implied by the convex cost curve, truncated at g_max.
std::vector<std::pair<double, double>> cost_blocks(const ThermalGenerator& g) {
    std::vector<std::pair<double, double>> blocks;  // (width, slope)
    double prev = 0.0;
    for (const auto& blk : g.cost_curve) {
        double hi = std::min(blk.mw_breakpoint, g.g_max);
        if (hi > prev + 1e-12) blocks.emplace_back(hi - prev, blk.usd_per_mwh);
        prev = std::max(prev, hi);
        if (prev >= g.g_max - 1e-12) break;
    }
    if (blocks.empty()) blocks.emplace_back(std::max(g.g_max, 1e-9), g.cost_curve.back().usd_per_mwh);
    return blocks;
}

// Piecewise production cost of output level g on the unit's curve.
double thermal_energy_cost(const ThermalGenerator& gen, double g) {
    double cost = 0.0, prev = 0.0;
    for (const auto& blk : gen.cost_curve) {
        if (g <= prev) break;
        double take = std::min(g, blk.mw_breakpoint) - prev;
        if (take > 0.0) cost += take * blk.usd_per_mwh;
        prev = blk.mw_breakpoint;
    }
    if (g > prev) cost += (g - prev) * gen.cost_curve.back().usd_per_mwh;
    return cost;
}

int history_needed(const PowerSystem& sys) {
    int h = 1;
    for (const auto& g : sys.thermal)
        h = std::max({h, g.min_up_time, g.min_down_time});
    return h;
}

}  // namespace

ScenarioInputs make_scenario_inputs(const PowerSystem& system, const ScenarioProfile& profile) {
    ScenarioInputs in;
    in.hours = static_cast<int>(profile.hours());
    in.demand_sys = profile.demand_mw;
    in.hurricane = profile.hurricane;

    in.line_rating.assign(system.lines.size(), std::vector<double>(in.hours));
    for (std::size_t l = 0; l < system.lines.size(); ++l)
        for (int t = 0; t < in.hours; ++t)
            in.line_rating[l][t] = line_rating(system.lines[l], profile.temp_c[t]);

    in.thermal_avail.assign(system.thermal.size(), std::vector<double>(in.hours));
    for (std::size_t i = 0; i < system.thermal.size(); ++i)
        for (int t = 0; t < in.hours; ++t)
            in.thermal_avail[i][t] = thermal_available_capacity(system.thermal[i], profile.temp_c[t]);

    in.pv_max.assign(system.solar.size(), std::vector<double>(in.hours));
    for (std::size_t s = 0; s < system.solar.size(); ++s)
        for (int t = 0; t < in.hours; ++t)
            in.pv_max[s][t] =
                pv_max_output(system.solar[s], profile.temp_c[t], profile.insolation_wm2[t]);

    in.wind_max.assign(system.wind.size(), std::vector<double>(in.hours));
    for (std::size_t w = 0; w < system.wind.size(); ++w) {
        std::size_t site = static_cast<std::size_t>(system.wind[w].wind_site);
        if (site >= profile.wind_ms.size())
            throw InputError("wind " + std::to_string(system.wind[w].id) + ": wind_site " +
                             std::to_string(site) + " not present in scenario data");
        for (int t = 0; t < in.hours; ++t)
            in.wind_max[w][t] =
                wind_max_output(system.wind[w], profile.wind_ms[site][t], false);
    }
    return in;
}

UcWindow make_uc_window(const PowerSystem& system, const ScenarioInputs& inputs,
                        double load_adjustment, int t0, int hours,
                        const std::vector<std::vector<int>>& commit_history,
                        const std::vector<double>& initial_soc) {
    if (t0 < 0 || t0 + hours > inputs.hours)
        throw InputError("make_uc_window: window [" + std::to_string(t0) + ", " +
                         std::to_string(t0 + hours) + ") outside scenario of " +
                         std::to_string(inputs.hours) + " hours");
    UcWindow w;
    w.t0 = t0;
    w.hours = hours;
    w.load_adjustment = load_adjustment;
    w.nodal_demand.assign(system.buses.size(), std::vector<double>(hours));
    for (std::size_t n = 0; n < system.buses.size(); ++n)
        for (int h = 0; h < hours; ++h)
            w.nodal_demand[n][h] = std::max(
                0.0, system.buses[n].load_weight * (inputs.demand_sys[t0 + h] + load_adjustment));
    auto slice = [&](const std::vector<std::vector<double>>& src) {
        std::vector<std::vector<double>> out(src.size(), std::vector<double>(hours));
        for (std::size_t k = 0; k < src.size(); ++k)
            for (int h = 0; h < hours; ++h) out[k][h] = src[k][t0 + h];
        return out;
    };
    w.line_rating = slice(inputs.line_rating);
    w.thermal_avail = slice(inputs.thermal_avail);
    w.pv_max = slice(inputs.pv_max);
    w.wind_max = slice(inputs.wind_max);
    w.hurricane.assign(inputs.hurricane.begin() + t0, inputs.hurricane.begin() + t0 + hours);
    w.commit_history = commit_history;
    w.initial_soc = initial_soc;
    return w;
}

MilpModel build_uc_model(const PowerSystem& system, const PtdfMatrix& ptdf,
                         const UcWindow& w, const UcCosts& costs, UcVarMap* map) {
    const int H = w.hours;
    const std::size_t nb = system.buses.size();
    const std::size_t nl = system.lines.size();
    const std::size_t ng = system.thermal.size();
    const std::size_t ns = system.solar.size();
    const std::size_t nw = system.wind.size();
    const std::size_t nst = system.storage.size();

    auto need = [&](std::size_t have, std::size_t want, const char* series) {
        if (have != want)
            throw InputError(std::string("build_uc_model: input series '") + series + "' has " +
                             std::to_string(have) + " entries, expected " + std::to_string(want));
    };
    need(w.nodal_demand.size(), nb, "nodal_demand");
    need(w.line_rating.size(), nl, "line_rating");
    need(w.thermal_avail.size(), ng, "thermal_avail");
    need(w.pv_max.size(), ns, "pv_max");
    need(w.wind_max.size(), nw, "wind_max");
    need(w.hurricane.size(), static_cast<std::size_t>(H), "hurricane");
    need(w.commit_history.size(), ng, "commit_history");
    need(w.initial_soc.size(), nst, "initial_soc");
    for (std::size_t n = 0; n < nb; ++n) need(w.nodal_demand[n].size(), H, "nodal_demand hour");
    for (std::size_t l = 0; l < nl; ++l) need(w.line_rating[l].size(), H, "line_rating hour");
    for (std::size_t i = 0; i < ng; ++i) need(w.thermal_avail[i].size(), H, "thermal_avail hour");
    for (std::size_t s = 0; s < ns; ++s) need(w.pv_max[s].size(), H, "pv_max hour");
    for (std::size_t v = 0; v < nw; ++v) need(w.wind_max[v].size(), H, "wind_max hour");
    int hist_need = history_needed(system);
    for (std::size_t i = 0; i < ng; ++i)
        if (static_cast<int>(w.commit_history[i].size()) < hist_need)
            throw InputError("build_uc_model: commit history for thermal " +
                             std::to_string(system.thermal[i].id) + " shorter than max(UT,DT)");

    MilpModel m;
    UcVarMap vm;
    vm.u.assign(ng, std::vector<int>(H));
    vm.su.assign(ng, std::vector<int>(H));
    vm.sd.assign(ng, std::vector<int>(H));
    vm.g_th.assign(ng, std::vector<int>(H));
    vm.blocks.resize(ng);
    vm.g_s.assign(ns, std::vector<int>(H));
    vm.curt_s.assign(ns, std::vector<int>(H));
    vm.g_w.assign(nw, std::vector<int>(H));
    vm.curt_w.assign(nw, std::vector<int>(H));
    vm.ch.assign(nst, std::vector<int>(H));
    vm.dis.assign(nst, std::vector<int>(H));
    vm.soc.assign(nst, std::vector<int>(H));
    vm.ch_on.assign(nst, std::vector<int>(H));
    vm.dis_on.assign(nst, std::vector<int>(H));
    vm.shed_sys.assign(H, 0);
    vm.shed_on.assign(H, 0);
    vm.shed_n.assign(nb, std::vector<int>(H));

    std::vector<std::vector<std::pair<double, double>>> blocks(ng);
    for (std::size_t i = 0; i < ng; ++i) {
        blocks[i] = cost_blocks(system.thermal[i]);
        vm.blocks[i].assign(blocks[i].size(), std::vector<int>(H));
    }

    std::vector<double> total_demand(H, 0.0);
    for (int h = 0; h < H; ++h)
        for (std::size_t n = 0; n < nb; ++n) total_demand[h] += w.nodal_demand[n][h];

    // ---- variables, hour-major for locality across the rolling horizon ----
    for (int h = 0; h < H; ++h) {
        int t = w.t0 + h;
        for (std::size_t i = 0; i < ng; ++i) {
            const auto& g = system.thermal[i];
            std::string e = "g" + std::to_string(g.id);
            vm.u[i][h] = m.add_var(nm("u", e, t), 0.0, 1.0, true, 0.0, 1);
            vm.su[i][h] = m.add_var(nm("su", e, t), 0.0, 1.0, false, g.start_cost);
            vm.sd[i][h] = m.add_var(nm("sd", e, t), 0.0, 1.0, false, g.stop_cost);
            vm.g_th[i][h] = m.add_var(nm("p", e, t), 0.0, g.g_max, false);
            for (std::size_t k = 0; k < blocks[i].size(); ++k)
                vm.blocks[i][k][h] = m.add_var(nm(("pb" + std::to_string(k)).c_str(), e, t), 0.0,
                                               blocks[i][k].first, false, blocks[i][k].second);
        }
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& f = system.solar[s];
            std::string e = "s" + std::to_string(f.id);
            double avail = w.pv_max[s][h];
            vm.g_s[s][h] = m.add_var(nm("p", e, t), 0.0, avail, false, f.cost);
            vm.curt_s[s][h] = m.add_var(nm("curt", e, t), 0.0, avail, false,
                                        f.cost * costs.curtailment_multiplier);
        }
        for (std::size_t v = 0; v < nw; ++v) {
            const auto& f = system.wind[v];
            std::string e = "w" + std::to_string(f.id);
            bool stalled = w.hurricane[h] && f.hurricane_exposed;
            double avail = stalled ? 0.0 : w.wind_max[v][h];
            vm.g_w[v][h] = m.add_var(nm("p", e, t), 0.0, avail, false, f.cost);
            vm.curt_w[v][h] = m.add_var(nm("curt", e, t), 0.0, avail, false,
                                        f.cost * costs.curtailment_multiplier);
        }
        for (std::size_t b = 0; b < nst; ++b) {
            const auto& st = system.storage[b];
            std::string e = "b" + std::to_string(st.id);
            vm.ch[b][h] = m.add_var(nm("ch", e, t), 0.0, st.ch_max, false, st.cost);
            vm.dis[b][h] = m.add_var(nm("dis", e, t), 0.0, st.dis_max, false);
            vm.soc[b][h] = m.add_var(nm("soc", e, t), st.soc_min, st.soc_max, false);
            vm.ch_on[b][h] = m.add_var(nm("chon", e, t), 0.0, 1.0, true);
            vm.dis_on[b][h] = m.add_var(nm("dison", e, t), 0.0, 1.0, true);
        }
        vm.shed_sys[h] = m.add_var(nm("shed", "sys", t), 0.0, total_demand[h], false, costs.voll);
        vm.shed_on[h] = m.add_var(nm("shedon", "sys", t), 0.0, 1.0, true);
        for (std::size_t n = 0; n < nb; ++n)
            vm.shed_n[n][h] = m.add_var(
                nm("shed", "n" + std::to_string(system.buses[n].id), t), 0.0, kInf, false);
    }

    // derived start/stop history for the min up/down windows
    std::vector<std::vector<int>> hist_su(ng), hist_sd(ng);
    for (std::size_t i = 0; i < ng; ++i) {
        const auto& hist = w.commit_history[i];
        hist_su[i].assign(hist.size(), 0);
        hist_sd[i].assign(hist.size(), 0);
        for (std::size_t k = 1; k < hist.size(); ++k) {
            hist_su[i][k] = std::max(0, hist[k] - hist[k - 1]);
            hist_sd[i][k] = std::max(0, hist[k - 1] - hist[k]);
        }
    }

    for (int h = 0; h < H; ++h) {
        int t = w.t0 + h;

        // system balance: all generation + net discharge + shed = demand
        {
            std::vector<std::pair<int, double>> terms;
            for (std::size_t i = 0; i < ng; ++i) terms.emplace_back(vm.g_th[i][h], 1.0);
            for (std::size_t s = 0; s < ns; ++s) terms.emplace_back(vm.g_s[s][h], 1.0);
            for (std::size_t v = 0; v < nw; ++v) terms.emplace_back(vm.g_w[v][h], 1.0);
            for (std::size_t b = 0; b < nst; ++b) {
                terms.emplace_back(vm.dis[b][h], 1.0);
                terms.emplace_back(vm.ch[b][h], -1.0);
            }
            terms.emplace_back(vm.shed_sys[h], 1.0);
            m.add_row(nm("bal", "sys", t), std::move(terms), RowSense::Equal, total_demand[h]);
        }

        // line limits via PTDF, one pair of rows per line
        for (std::size_t l = 0; l < nl; ++l) {
            std::vector<std::pair<int, double>> terms;
            double const_inj = 0.0;
            auto add_at_bus = [&](int var, int bus_id, double sign) {
                std::size_t nidx = system.bus_index(bus_id);
                double f = ptdf.at(l, nidx);
                if (std::fabs(f) > 1e-12) terms.emplace_back(var, sign * f);
            };
            for (std::size_t i = 0; i < ng; ++i)
                add_at_bus(vm.g_th[i][h], system.thermal[i].bus, 1.0);
            for (std::size_t s = 0; s < ns; ++s)
                add_at_bus(vm.g_s[s][h], system.solar[s].bus, 1.0);
            for (std::size_t v = 0; v < nw; ++v)
                add_at_bus(vm.g_w[v][h], system.wind[v].bus, 1.0);
            for (std::size_t b = 0; b < nst; ++b) {
                add_at_bus(vm.dis[b][h], system.storage[b].bus, 1.0);
                add_at_bus(vm.ch[b][h], system.storage[b].bus, -1.0);
            }
            for (std::size_t n = 0; n < nb; ++n) {
                double f = ptdf.at(l, n);
                if (std::fabs(f) <= 1e-12) continue;
                terms.emplace_back(vm.shed_n[n][h], f);
                const_inj += f * w.nodal_demand[n][h];
            }
            double cap = w.line_rating[l][h];
            std::string e = "l" + std::to_string(system.lines[l].id);
            m.add_row(nm("flowpos", e, t), terms, RowSense::LessEqual, cap + const_inj);
            m.add_row(nm("flowneg", e, t), std::move(terms), RowSense::GreaterEqual,
                      -cap + const_inj);
        }

        for (std::size_t i = 0; i < ng; ++i) {
            const auto& g = system.thermal[i];
            std::string e = "g" + std::to_string(g.id);

            {  // dispatch decomposes into cost blocks
                std::vector<std::pair<int, double>> terms{{vm.g_th[i][h], 1.0}};
                for (std::size_t k = 0; k < blocks[i].size(); ++k)
                    terms.emplace_back(vm.blocks[i][k][h], -1.0);
                m.add_row(nm("pdef", e, t), std::move(terms), RowSense::Equal, 0.0);
            }
            if (g.g_min > 0.0)
                m.add_row(nm("pmin", e, t),
                          {{vm.g_th[i][h], 1.0}, {vm.u[i][h], -g.g_min}}, RowSense::GreaterEqual,
                          0.0);
            m.add_row(nm("pmax", e, t),
                      {{vm.g_th[i][h], 1.0}, {vm.u[i][h], -w.thermal_avail[i][h]}},
                      RowSense::LessEqual, 0.0);

            // commitment transition, anchored to history at the window edge
            if (h == 0) {
                double u_prev = w.commit_history[i].back();
                m.add_row(nm("trans", e, t),
                          {{vm.u[i][h], 1.0}, {vm.su[i][h], -1.0}, {vm.sd[i][h], 1.0}},
                          RowSense::Equal, u_prev);
            } else {
                m.add_row(nm("trans", e, t),
                          {{vm.u[i][h], 1.0},
                           {vm.u[i][h - 1], -1.0},
                           {vm.su[i][h], -1.0},
                           {vm.sd[i][h], 1.0}},
                          RowSense::Equal, 0.0);
            }

            {  // min up: starts within the last UT hours keep the unit on
                std::vector<std::pair<int, double>> terms;
                double hist_sum = 0.0;
                for (int tau = h - g.min_up_time + 1; tau <= h; ++tau) {
                    if (tau >= 0) {
                        terms.emplace_back(vm.su[i][tau], 1.0);
                    } else {
                        int k = static_cast<int>(hist_su[i].size()) + tau;
                        if (k >= 0) hist_sum += hist_su[i][k];
                    }
                }
                terms.emplace_back(vm.u[i][h], -1.0);
                m.add_row(nm("minup", e, t), std::move(terms), RowSense::LessEqual, -hist_sum);
            }
            {  // min down: stops within the last DT hours keep the unit off
                std::vector<std::pair<int, double>> terms;
                double hist_sum = 0.0;
                for (int tau = h - g.min_down_time + 1; tau <= h; ++tau) {
                    if (tau >= 0) {
                        terms.emplace_back(vm.sd[i][tau], 1.0);
                    } else {
                        int k = static_cast<int>(hist_sd[i].size()) + tau;
                        if (k >= 0) hist_sum += hist_sd[i][k];
                    }
                }
                terms.emplace_back(vm.u[i][h], 1.0);
                m.add_row(nm("mindn", e, t), std::move(terms), RowSense::LessEqual,
                          1.0 - hist_sum);
            }
        }

        for (std::size_t s = 0; s < ns; ++s) {
            std::string e = "s" + std::to_string(system.solar[s].id);
            m.add_row(nm("avail", e, t), {{vm.g_s[s][h], 1.0}, {vm.curt_s[s][h], 1.0}},
                      RowSense::Equal, w.pv_max[s][h]);
        }
        for (std::size_t v = 0; v < nw; ++v) {
            const auto& f = system.wind[v];
            std::string e = "w" + std::to_string(f.id);
            bool stalled = w.hurricane[h] && f.hurricane_exposed;
            m.add_row(nm("avail", e, t), {{vm.g_w[v][h], 1.0}, {vm.curt_w[v][h], 1.0}},
                      RowSense::Equal, stalled ? 0.0 : w.wind_max[v][h]);
        }

        for (std::size_t b = 0; b < nst; ++b) {
            const auto& st = system.storage[b];
            std::string e = "b" + std::to_string(st.id);
            m.add_row(nm("chcap", e, t), {{vm.ch[b][h], 1.0}, {vm.ch_on[b][h], -st.ch_max}},
                      RowSense::LessEqual, 0.0);
            m.add_row(nm("discap", e, t), {{vm.dis[b][h], 1.0}, {vm.dis_on[b][h], -st.dis_max}},
                      RowSense::LessEqual, 0.0);
            m.add_row(nm("chx", e, t), {{vm.ch_on[b][h], 1.0}, {vm.dis_on[b][h], 1.0}},
                      RowSense::LessEqual, 1.0);
            // implied by the gates for every integral point; tightens the LP
            // against fractional simultaneous charge/discharge
            m.add_row(nm("modecut", e, t),
                      {{vm.ch[b][h], 1.0 / st.ch_max}, {vm.dis[b][h], 1.0 / st.dis_max}},
                      RowSense::LessEqual, 1.0);
            // SOC recursion in energy units
            if (h == 0) {
                m.add_row(nm("socrec", e, t),
                          {{vm.soc[b][h], st.energy_capacity},
                           {vm.ch[b][h], -st.eta_ch},
                           {vm.dis[b][h], 1.0 / st.eta_dis}},
                          RowSense::Equal, w.initial_soc[b] * st.energy_capacity);
            } else {
                m.add_row(nm("socrec", e, t),
                          {{vm.soc[b][h], st.energy_capacity},
                           {vm.soc[b][h - 1], -st.energy_capacity},
                           {vm.ch[b][h], -st.eta_ch},
                           {vm.dis[b][h], 1.0 / st.eta_dis}},
                          RowSense::Equal, 0.0);
            }
        }

        m.add_row(nm("shedcap", "sys", t),
                  {{vm.shed_sys[h], 1.0}, {vm.shed_on[h], -total_demand[h]}},
                  RowSense::LessEqual, 0.0);
        for (std::size_t n = 0; n < nb; ++n)
            m.add_row(nm("shedsplit", "n" + std::to_string(system.buses[n].id), t),
                      {{vm.shed_n[n][h], 1.0}, {vm.shed_sys[h], -system.buses[n].load_weight}},
                      RowSense::Equal, 0.0);
    }

    if (map) *map = std::move(vm);
    return m;
}

namespace {

struct WindowPlan {
    int t0;
    int hours;
    int commit;  // hours committed into the monthly solution
};

std::vector<WindowPlan> plan_windows(int total_hours) {
    std::vector<WindowPlan> plan;
    int t0 = 0;
    for (;;) {
        int hours = std::min(168, total_hours - t0);
        bool final = (t0 + hours >= total_hours);
        plan.push_back({t0, hours, final ? hours : 144});
        if (final) break;
        t0 += 144;
    }
    return plan;
}

}  // namespace

UcSolution solve_rolling_horizon(const PowerSystem& system, const PtdfMatrix& ptdf,
                                 const ScenarioInputs& inputs, double load_adjustment,
                                 const UcCosts& costs, const SolverOptions& options,
                                 UcWarmCache* warm_cache) {
    const int T = inputs.hours;
    const std::size_t ng = system.thermal.size();
    const std::size_t ns = system.solar.size();
    const std::size_t nw = system.wind.size();
    const std::size_t nst = system.storage.size();
    const std::size_t nb = system.buses.size();
    const std::size_t nl = system.lines.size();

    UcSolution sol;
    sol.hours = T;
    sol.g_thermal.assign(ng, std::vector<double>(T, 0.0));
    sol.commit.assign(ng, std::vector<int>(T, 0));
    sol.start.assign(ng, std::vector<int>(T, 0));
    sol.stop.assign(ng, std::vector<int>(T, 0));
    sol.g_solar.assign(ns, std::vector<double>(T, 0.0));
    sol.curt_solar.assign(ns, std::vector<double>(T, 0.0));
    sol.g_wind.assign(nw, std::vector<double>(T, 0.0));
    sol.curt_wind.assign(nw, std::vector<double>(T, 0.0));
    sol.ch.assign(nst, std::vector<double>(T, 0.0));
    sol.dis.assign(nst, std::vector<double>(T, 0.0));
    sol.soc.assign(nst, std::vector<double>(T, 0.0));
    sol.ch_on.assign(nst, std::vector<int>(T, 0));
    sol.dis_on.assign(nst, std::vector<int>(T, 0));
    sol.shed_sys.assign(T, 0.0);
    sol.shed_on.assign(T, 0);
    sol.shed_nodal.assign(nb, std::vector<double>(T, 0.0));
    sol.flow.assign(nl, std::vector<double>(T, 0.0));

    const int hist_len = history_needed(system);
    std::vector<std::vector<int>> history(ng, std::vector<int>(hist_len, 0));
    std::vector<double> soc0(nst);
    for (std::size_t b = 0; b < nst; ++b) soc0[b] = system.storage[b].initial_soc;

    auto plan = plan_windows(T);
    if (warm_cache && warm_cache->basis.size() != plan.size()) {
        warm_cache->basis.assign(plan.size(), {});
        warm_cache->hint_x.assign(plan.size(), {});
    }

    for (std::size_t widx = 0; widx < plan.size(); ++widx) {
        const auto& pw = plan[widx];
        UcWindow window =
            make_uc_window(system, inputs, load_adjustment, pw.t0, pw.hours, history, soc0);
        UcVarMap map;
        MilpModel model = build_uc_model(system, ptdf, window, costs, &map);

        Basis* warm = (warm_cache && !warm_cache->basis[widx].empty())
                          ? &warm_cache->basis[widx]
                          : nullptr;
        SolverOptions wopts = options;
        if (warm_cache && warm_cache->hint_x[widx].size() == model.var_count()) {
            wopts.binary_hint = &warm_cache->hint_x[widx];
            wopts.hint_relax_up = &map.shed_on;
        }
        Basis root_basis;
        MilpResult mres;
        try {
            mres = solve_milp(model, wopts, warm, &root_basis);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (window " + std::to_string(widx) + ")");
        }
        if (mres.status == MilpStatus::Infeasible)
            throw SolverError("rolling horizon window " + std::to_string(widx) +
                              " infeasible; constraint family hint: " + mres.infeasible_hint);
        if (mres.status == MilpStatus::Unbounded)
            throw SolverError("rolling horizon window " + std::to_string(widx) + " unbounded");
        if ((mres.status != MilpStatus::Optimal && mres.status != MilpStatus::NodeLimit) ||
            mres.x.empty())
            throw SolverError("rolling horizon window " + std::to_string(widx) +
                              " failed to solve");
        if (mres.status == MilpStatus::NodeLimit) sol.status = MilpStatus::NodeLimit;
        if (warm_cache) {
            warm_cache->basis[widx] = root_basis;
            warm_cache->hint_x[widx] = mres.x;
        }
        sol.mip_gap = std::max(sol.mip_gap, mres.mip_gap);
        sol.nodes += mres.nodes;

        const auto& x = mres.x;
        for (int h = 0; h < pw.commit; ++h) {
            int t = pw.t0 + h;
            for (std::size_t i = 0; i < ng; ++i) {
                sol.commit[i][t] = static_cast<int>(std::lround(x[map.u[i][h]]));
                sol.g_thermal[i][t] = x[map.g_th[i][h]];
            }
            for (std::size_t s = 0; s < ns; ++s) {
                sol.g_solar[s][t] = x[map.g_s[s][h]];
                sol.curt_solar[s][t] = x[map.curt_s[s][h]];
            }
            for (std::size_t v = 0; v < nw; ++v) {
                sol.g_wind[v][t] = x[map.g_w[v][h]];
                sol.curt_wind[v][t] = x[map.curt_w[v][h]];
            }
            for (std::size_t b = 0; b < nst; ++b) {
                sol.ch[b][t] = x[map.ch[b][h]];
                sol.dis[b][t] = x[map.dis[b][h]];
                sol.soc[b][t] = x[map.soc[b][h]];
                sol.ch_on[b][t] = static_cast<int>(std::lround(x[map.ch_on[b][h]]));
                sol.dis_on[b][t] = static_cast<int>(std::lround(x[map.dis_on[b][h]]));
            }
            sol.shed_sys[t] = x[map.shed_sys[h]];
            sol.shed_on[t] = static_cast<int>(std::lround(x[map.shed_on[h]]));
            for (std::size_t n = 0; n < nb; ++n) sol.shed_nodal[n][t] = x[map.shed_n[n][h]];
        }

        // carry state: history from committed commitments, SOC at commit edge
        for (std::size_t i = 0; i < ng; ++i) {
            auto& hist = history[i];
            for (int h = 0; h < pw.commit; ++h) {
                hist.erase(hist.begin());
                hist.push_back(sol.commit[i][pw.t0 + h]);
            }
        }
        for (std::size_t b = 0; b < nst; ++b) soc0[b] = sol.soc[b][pw.t0 + pw.commit - 1];
    }

    // start/stop derived from the committed series (all-off initial history)
    for (std::size_t i = 0; i < ng; ++i) {
        int prev = 0;
        for (int t = 0; t < T; ++t) {
            sol.start[i][t] = std::max(0, sol.commit[i][t] - prev);
            sol.stop[i][t] = std::max(0, prev - sol.commit[i][t]);
            prev = sol.commit[i][t];
        }
    }

    // line flows recomputed from nodal injections
    for (int t = 0; t < T; ++t) {
        std::vector<double> inj(nb, 0.0);
        for (std::size_t i = 0; i < ng; ++i)
            inj[system.bus_index(system.thermal[i].bus)] += sol.g_thermal[i][t];
        for (std::size_t s = 0; s < ns; ++s)
            inj[system.bus_index(system.solar[s].bus)] += sol.g_solar[s][t];
        for (std::size_t v = 0; v < nw; ++v)
            inj[system.bus_index(system.wind[v].bus)] += sol.g_wind[v][t];
        for (std::size_t b = 0; b < nst; ++b)
            inj[system.bus_index(system.storage[b].bus)] += sol.dis[b][t] - sol.ch[b][t];
        for (std::size_t n = 0; n < nb; ++n) {
            double d = std::max(0.0, system.buses[n].load_weight *
                                         (inputs.demand_sys[t] + load_adjustment));
            inj[n] -= d - sol.shed_nodal[n][t];
        }
        for (std::size_t l = 0; l < nl; ++l) {
            double f = 0.0;
            for (std::size_t n = 0; n < nb; ++n) f += ptdf.at(l, n) * inj[n];
            sol.flow[l][t] = f;
        }
    }

    // objective over the committed month
    double obj = 0.0;
    for (int t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < ng; ++i) {
            const auto& g = system.thermal[i];
            obj += thermal_energy_cost(g, sol.g_thermal[i][t]);
            obj += sol.start[i][t] * g.start_cost + sol.stop[i][t] * g.stop_cost;
        }
        for (std::size_t s = 0; s < ns; ++s)
            obj += sol.g_solar[s][t] * system.solar[s].cost +
                   sol.curt_solar[s][t] * system.solar[s].cost * costs.curtailment_multiplier;
        for (std::size_t v = 0; v < nw; ++v)
            obj += sol.g_wind[v][t] * system.wind[v].cost +
                   sol.curt_wind[v][t] * system.wind[v].cost * costs.curtailment_multiplier;
        for (std::size_t b = 0; b < nst; ++b) obj += sol.ch[b][t] * system.storage[b].cost;
        obj += sol.shed_sys[t] * costs.voll;
    }
    sol.objective = obj;
    return sol;
}

std::vector<std::string> check_solution_feasibility(const PowerSystem& system,
                                                    const PtdfMatrix& ptdf,
                                                    const ScenarioInputs& inputs,
                                                    double load_adjustment,
                                                    const UcSolution& sol) {
    std::vector<std::string> out;
    const int T = sol.hours;
    const std::size_t ng = system.thermal.size();
    const std::size_t ns = system.solar.size();
    const std::size_t nw = system.wind.size();
    const std::size_t nst = system.storage.size();
    const std::size_t nb = system.buses.size();
    const std::size_t nl = system.lines.size();

    if (T != inputs.hours) {
        out.push_back("solution covers " + std::to_string(T) + " hours, scenario has " +
                      std::to_string(inputs.hours));
        return out;
    }

    double peak = 1.0;
    for (int t = 0; t < T; ++t) peak = std::max(peak, inputs.demand_sys[t] + load_adjustment);
    const double bal_tol = 1e-6 * peak;

    auto viol = [&out](const std::string& msg) { out.push_back(msg); };

    for (int t = 0; t < T; ++t) {
        std::vector<double> dem(nb, 0.0);
        double total_demand = 0.0;
        for (std::size_t n = 0; n < nb; ++n) {
            dem[n] = std::max(0.0, system.buses[n].load_weight *
                                       (inputs.demand_sys[t] + load_adjustment));
            total_demand += dem[n];
        }

        double gen = 0.0;
        for (std::size_t i = 0; i < ng; ++i) gen += sol.g_thermal[i][t];
        for (std::size_t s = 0; s < ns; ++s) gen += sol.g_solar[s][t];
        for (std::size_t v = 0; v < nw; ++v) gen += sol.g_wind[v][t];
        for (std::size_t b = 0; b < nst; ++b) gen += sol.dis[b][t] - sol.ch[b][t];
        double resid = gen + sol.shed_sys[t] - total_demand;
        if (std::fabs(resid) > bal_tol)
            viol("balance hour " + std::to_string(t) + ": residual " + std::to_string(resid) +
                 " MW exceeds tolerance");

        // flows
        std::vector<double> inj(nb, 0.0);
        for (std::size_t i = 0; i < ng; ++i)
            inj[system.bus_index(system.thermal[i].bus)] += sol.g_thermal[i][t];
        for (std::size_t s = 0; s < ns; ++s)
            inj[system.bus_index(system.solar[s].bus)] += sol.g_solar[s][t];
        for (std::size_t v = 0; v < nw; ++v)
            inj[system.bus_index(system.wind[v].bus)] += sol.g_wind[v][t];
        for (std::size_t b = 0; b < nst; ++b)
            inj[system.bus_index(system.storage[b].bus)] += sol.dis[b][t] - sol.ch[b][t];
        for (std::size_t n = 0; n < nb; ++n) inj[n] -= dem[n] - sol.shed_nodal[n][t];
        for (std::size_t l = 0; l < nl; ++l) {
            double f = 0.0;
            for (std::size_t n = 0; n < nb; ++n) f += ptdf.at(l, n) * inj[n];
            double cap = inputs.line_rating[l][t];
            if (std::fabs(f) > cap + 1e-6 * std::max(cap, 1.0))
                viol("line " + std::to_string(system.lines[l].id) + " hour " + std::to_string(t) +
                     ": |flow| " + std::to_string(std::fabs(f)) + " MW exceeds derated rating " +
                     std::to_string(cap) + " MW");
        }

        for (std::size_t i = 0; i < ng; ++i) {
            const auto& g = system.thermal[i];
            int u = sol.commit[i][t];
            if (u != 0 && u != 1)
                viol("thermal " + std::to_string(g.id) + " hour " + std::to_string(t) +
                     ": commitment not binary");
            double p = sol.g_thermal[i][t];
            double lo = g.g_min * u, hi = inputs.thermal_avail[i][t] * u;
            double tol = 1e-6 * std::max(1.0, g.g_max);
            if (p < lo - tol || p > hi + tol)
                viol("thermal " + std::to_string(g.id) + " hour " + std::to_string(t) +
                     ": dispatch " + std::to_string(p) + " outside [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
        }

        for (std::size_t s = 0; s < ns; ++s) {
            double avail = inputs.pv_max[s][t];
            double tol = 1e-6 * std::max(1.0, system.solar[s].nominal_power);
            double p = sol.g_solar[s][t], c = sol.curt_solar[s][t];
            if (p < -tol || c < -tol || std::fabs(p + c - avail) > tol)
                viol("solar " + std::to_string(system.solar[s].id) + " hour " +
                     std::to_string(t) + ": dispatch+curtailment != available");
        }
        for (std::size_t v = 0; v < nw; ++v) {
            const auto& f = system.wind[v];
            bool stalled = inputs.hurricane[t] && f.hurricane_exposed;
            double avail = stalled ? 0.0 : inputs.wind_max[v][t];
            double tol = 1e-6 * std::max(1.0, f.nominal_power);
            double p = sol.g_wind[v][t], c = sol.curt_wind[v][t];
            if (p < -tol || c < -tol || std::fabs(p + c - avail) > tol)
                viol("wind " + std::to_string(f.id) + " hour " + std::to_string(t) +
                     ": dispatch+curtailment != available");
        }

        for (std::size_t b = 0; b < nst; ++b) {
            const auto& st = system.storage[b];
            std::string tag = "storage " + std::to_string(st.id) + " hour " + std::to_string(t);
            double tol = 1e-6 * std::max(1.0, st.energy_capacity);
            double prev = (t == 0) ? st.initial_soc : sol.soc[b][t - 1];
            double lhs = sol.soc[b][t] * st.energy_capacity;
            double rhs = prev * st.energy_capacity + sol.ch[b][t] * st.eta_ch -
                         sol.dis[b][t] / st.eta_dis;
            if (std::fabs(lhs - rhs) > tol)
                viol(tag + ": SOC recursion violated by " + std::to_string(lhs - rhs) + " MWh");
            if (sol.soc[b][t] < st.soc_min - 1e-9 || sol.soc[b][t] > st.soc_max + 1e-9)
                viol(tag + ": SOC outside [soc_min, soc_max]");
            if (sol.ch_on[b][t] + sol.dis_on[b][t] > 1)
                viol(tag + ": charging and discharging simultaneously enabled");
            double ptol = 1e-6 * std::max(1.0, std::max(st.ch_max, st.dis_max));
            if (sol.ch[b][t] < -ptol || sol.ch[b][t] > st.ch_max * sol.ch_on[b][t] + ptol)
                viol(tag + ": charge power outside its gated limit");
            if (sol.dis[b][t] < -ptol || sol.dis[b][t] > st.dis_max * sol.dis_on[b][t] + ptol)
                viol(tag + ": discharge power outside its gated limit");
        }

        double stol = 1e-6 * std::max(1.0, total_demand);
        if (sol.shed_sys[t] < -stol ||
            sol.shed_sys[t] > total_demand * sol.shed_on[t] + stol)
            viol("shed hour " + std::to_string(t) + ": system shed outside its gated bound");
        for (std::size_t n = 0; n < nb; ++n)
            if (std::fabs(sol.shed_nodal[n][t] -
                          system.buses[n].load_weight * sol.shed_sys[t]) > stol)
                viol("shed hour " + std::to_string(t) + " bus " +
                     std::to_string(system.buses[n].id) + ": nodal split != load weight share");
    }

    // min up/down over the whole committed series, all-off initial history
    for (std::size_t i = 0; i < ng; ++i) {
        const auto& g = system.thermal[i];
        for (int t = 0; t < T; ++t) {
            int su_sum = 0, sd_sum = 0;
            for (int tau = std::max(0, t - g.min_up_time + 1); tau <= t; ++tau)
                su_sum += sol.start[i][tau];
            for (int tau = std::max(0, t - g.min_down_time + 1); tau <= t; ++tau)
                sd_sum += sol.stop[i][tau];
            if (su_sum > sol.commit[i][t])
                viol("thermal " + std::to_string(g.id) + " hour " + std::to_string(t) +
                     ": min up time violated");
            if (sd_sum > 1 - sol.commit[i][t])
                viol("thermal " + std::to_string(g.id) + " hour " + std::to_string(t) +
                     ": min down time violated");
        }
    }
    return out;
}

}  // namespace gridcred
