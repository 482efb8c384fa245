#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <vector>

#include "doctest.h"
#include "gridcred/fixture.hpp"
#include "gridcred/linalg.hpp"
#include "gridcred/rng.hpp"
#include "gridcred/uc.hpp"

using namespace gridcred;

namespace {

// One-bus test system with a single thermal unit.
PowerSystem one_bus_system(double g_min, double g_max, double slope, double suc, double sdc) {
    PowerSystem sys;
    sys.buses = {{1, 1.0}};
    sys.slack_bus = 1;
    ThermalGenerator g;
    g.id = 1;
    g.bus = 1;
    g.g_min = g_min;
    g.g_max = g_max;
    g.min_up_time = 1;
    g.min_down_time = 1;
    g.start_cost = suc;
    g.stop_cost = sdc;
    g.cost_curve = {{g_max, slope}};
    g.for_poly = {0.0, 0.0, 0.0, 0.0, 0.0};
    sys.thermal.push_back(g);
    return sys;
}

ScenarioInputs flat_inputs(const PowerSystem& sys, std::vector<double> demand) {
    ScenarioInputs in;
    in.hours = static_cast<int>(demand.size());
    in.demand_sys = std::move(demand);
    in.hurricane.assign(in.hours, 0);
    in.line_rating.resize(sys.lines.size());
    for (std::size_t l = 0; l < sys.lines.size(); ++l)
        in.line_rating[l].assign(in.hours, sys.lines[l].capacity);
    in.thermal_avail.resize(sys.thermal.size());
    for (std::size_t i = 0; i < sys.thermal.size(); ++i)
        in.thermal_avail[i].assign(in.hours, sys.thermal[i].g_max);
    in.pv_max.assign(sys.solar.size(), std::vector<double>(in.hours, 0.0));
    in.wind_max.assign(sys.wind.size(), std::vector<double>(in.hours, 0.0));
    return in;
}

UcWindow window_for(const PowerSystem& sys, const ScenarioInputs& in, double la, int t0,
                    int hours) {
    int hist = 1;
    for (const auto& g : sys.thermal) hist = std::max({hist, g.min_up_time, g.min_down_time});
    std::vector<std::vector<int>> history(sys.thermal.size(), std::vector<int>(hist, 0));
    std::vector<double> soc0;
    for (const auto& b : sys.storage) soc0.push_back(b.initial_soc);
    return make_uc_window(sys, in, la, t0, hours, history, soc0);
}

constexpr double kVoll = 10000.0;

}  // namespace

TEST_CASE("single unit, single hour: dispatch follows demand") {
    PowerSystem sys = one_bus_system(0.0, 100.0, 20.0, 0.0, 0.0);
    PtdfMatrix ptdf = build_ptdf(sys);
    UcCosts costs;
    SolverOptions opts;

    SUBCASE("demand below capacity is served exactly") {
        ScenarioInputs in = flat_inputs(sys, {50.0});
        UcWindow w = window_for(sys, in, 0.0, 0, 1);
        UcVarMap map;
        MilpModel m = build_uc_model(sys, ptdf, w, costs, &map);
        MilpResult r = solve_milp(m, opts);
        REQUIRE(r.status == MilpStatus::Optimal);
        // enumeration: off -> shed 50 (500k$), on -> 50*20 = 1000$
        CHECK(r.objective == doctest::Approx(1000.0));
        CHECK(r.x[map.g_th[0][0]] == doctest::Approx(50.0));
        CHECK(r.x[map.shed_sys[0]] == doctest::Approx(0.0));
    }

    SUBCASE("demand above capacity sheds the shortfall at VOLL") {
        ScenarioInputs in = flat_inputs(sys, {150.0});
        UcWindow w = window_for(sys, in, 0.0, 0, 1);
        UcVarMap map;
        MilpModel m = build_uc_model(sys, ptdf, w, costs, &map);
        MilpResult r = solve_milp(m, opts);
        REQUIRE(r.status == MilpStatus::Optimal);
        CHECK(r.x[map.shed_sys[0]] == doctest::Approx(50.0));
        CHECK(r.objective == doctest::Approx(100.0 * 20.0 + 50.0 * kVoll));
    }

    SUBCASE("zero demand keeps everything off at zero cost") {
        ScenarioInputs in = flat_inputs(sys, {0.0, 0.0, 0.0});
        UcWindow w = window_for(sys, in, 0.0, 0, 3);
        UcVarMap map;
        MilpModel m = build_uc_model(sys, ptdf, w, costs, &map);
        MilpResult r = solve_milp(m, opts);
        REQUIRE(r.status == MilpStatus::Optimal);
        CHECK(r.objective == doctest::Approx(0.0));
        for (int t = 0; t < 3; ++t) CHECK(r.x[map.u[0][t]] == doctest::Approx(0.0));
    }
}

TEST_CASE("build_uc_model rejects inconsistent windows") {
    PowerSystem sys = one_bus_system(0.0, 100.0, 20.0, 0.0, 0.0);
    PtdfMatrix ptdf = build_ptdf(sys);
    ScenarioInputs in = flat_inputs(sys, {50.0, 60.0});
    UcWindow w = window_for(sys, in, 0.0, 0, 2);
    w.thermal_avail[0].pop_back();  // hour series too short
    UcCosts costs;
    CHECK_THROWS_WITH_AS(build_uc_model(sys, ptdf, w, costs, nullptr),
                         doctest::Contains("thermal_avail"), InputError);
}

// Two-bus, two-unit, 24 h fixture against an exhaustive commitment oracle.
// UT = DT = 24 restricts each unit to "stay off" or "start once and hold",
// so 25 x 25 commitment patterns cover the space; hourly dispatch under a
// fixed commitment is a 3-variable LP solved by vertex enumeration.
namespace {

struct HourDispatch {
    bool feasible = false;
    double cost = 0.0;
};

HourDispatch dispatch_oracle(double d_total, double w2, double cap, bool on1, bool on2,
                             const PowerSystem& sys) {
    const auto& g1 = sys.thermal[0];
    const auto& g2 = sys.thermal[1];
    double lb1 = on1 ? g1.g_min : 0.0, ub1 = on1 ? g1.g_max : 0.0;
    double lb2 = on2 ? g2.g_min : 0.0, ub2 = on2 ? g2.g_max : 0.0;
    double c1 = g1.cost_curve[0].usd_per_mwh, c2 = g2.cost_curve[0].usd_per_mwh;

    // vars (g1, g2, shed): g1 + g2 + s = d_total;
    // line 1->2 flow is bus 2's net import: w2*(d_total - s) - g2.
    struct Con {
        double a[3];
        double rhs;
    };
    std::vector<Con> ineqs = {
        {{0.0, -1.0, -w2}, cap - w2 * d_total},  //  flow <= cap
        {{0.0, 1.0, w2}, cap + w2 * d_total},    // -flow <= cap
        {{1.0, 0.0, 0.0}, ub1},   {{-1.0, 0.0, 0.0}, -lb1},
        {{0.0, 1.0, 0.0}, ub2},   {{0.0, -1.0, 0.0}, -lb2},
        {{0.0, 0.0, 1.0}, d_total}, {{0.0, 0.0, -1.0}, 0.0}};

    HourDispatch out;
    int n_ineq = static_cast<int>(ineqs.size());
    for (int i = 0; i < n_ineq; ++i) {
        for (int j = i + 1; j < n_ineq; ++j) {
            DenseMatrix a(3, 3);
            std::vector<double> b(3);
            a.at(0, 0) = 1.0;
            a.at(0, 1) = 1.0;
            a.at(0, 2) = 1.0;
            b[0] = d_total;
            for (int c = 0; c < 3; ++c) a.at(1, c) = ineqs[i].a[c];
            b[1] = ineqs[i].rhs;
            for (int c = 0; c < 3; ++c) a.at(2, c) = ineqs[j].a[c];
            b[2] = ineqs[j].rhs;
            std::vector<double> x;
            try {
                DenseLu lu(std::move(a));
                x = lu.solve(b);
            } catch (...) {
                continue;
            }
            if (std::fabs(x[0] + x[1] + x[2] - d_total) > 1e-7) continue;
            bool ok = true;
            for (const auto& con : ineqs) {
                double lhs = con.a[0] * x[0] + con.a[1] * x[1] + con.a[2] * x[2];
                if (lhs > con.rhs + 1e-7) ok = false;
            }
            if (!ok) continue;
            double cost = c1 * x[0] + c2 * x[1] + kVoll * x[2];
            if (!out.feasible || cost < out.cost) {
                out.feasible = true;
                out.cost = cost;
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("24-hour two-unit UC matches the commitment-enumeration oracle") {
    PowerSystem sys;
    sys.buses = {{1, 0.45}, {2, 0.55}};
    sys.slack_bus = 1;
    TransmissionLine ln;
    ln.id = 1;
    ln.from_bus = 1;
    ln.to_bus = 2;
    ln.reactance = 0.1;
    ln.capacity = 70.0;
    ln.aar_table = {{std::numeric_limits<double>::infinity(), 1.0}};
    sys.lines = {ln};
    ThermalGenerator g1;
    g1.id = 1;
    g1.bus = 1;
    g1.g_min = 10.0;
    g1.g_max = 90.0;
    g1.min_up_time = 24;
    g1.min_down_time = 24;
    g1.start_cost = 700.0;
    g1.stop_cost = 200.0;
    g1.cost_curve = {{90.0, 21.0}};
    g1.for_poly = {};
    ThermalGenerator g2 = g1;
    g2.id = 2;
    g2.bus = 2;
    g2.g_min = 8.0;
    g2.g_max = 60.0;
    g2.start_cost = 450.0;
    g2.stop_cost = 120.0;
    g2.cost_curve = {{60.0, 34.0}};
    sys.thermal = {g1, g2};
    PtdfMatrix ptdf = build_ptdf(sys);

    std::vector<double> demand(24);
    for (int t = 0; t < 24; ++t)
        demand[t] = 55.0 + 45.0 * std::exp(-0.5 * std::pow((t - 17.0) / 3.0, 2.0)) +
                    10.0 * std::sin(t * 0.7);

    ScenarioInputs in = flat_inputs(sys, demand);
    UcWindow w = window_for(sys, in, 0.0, 0, 24);
    UcCosts costs;
    UcVarMap map;
    MilpModel model = build_uc_model(sys, ptdf, w, costs, &map);

    SolverOptions opts;
    opts.mip_gap_abs = 1e-7;
    MilpResult milp = solve_milp(model, opts);
    REQUIRE(milp.status == MilpStatus::Optimal);

    double w2 = sys.buses[1].load_weight;
    double best = 1e300;
    for (int s1 = 0; s1 <= 24; ++s1) {
        for (int s2 = 0; s2 <= 24; ++s2) {
            double cost = 0.0;
            bool feasible = true;
            if (s1 < 24) cost += g1.start_cost;
            if (s2 < 24) cost += g2.start_cost;
            for (int t = 0; t < 24 && feasible; ++t) {
                bool on1 = s1 < 24 && t >= s1;
                bool on2 = s2 < 24 && t >= s2;
                HourDispatch hd = dispatch_oracle(demand[t], w2, ln.capacity, on1, on2, sys);
                if (!hd.feasible)
                    feasible = false;
                else
                    cost += hd.cost;
            }
            if (feasible) best = std::min(best, cost);
        }
    }
    REQUIRE(best < 1e300);
    CHECK(milp.objective == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("rolling horizon stitches a feasible month") {
    FixtureSpec spec;
    spec.archive_years = 4;
    spec.thermal_units = 1;
    spec.solar_farms = 1;
    spec.wind_farms = 1;
    spec.storage_units = 1;
    FixtureBundle fb = make_fixture(spec);
    TrendModel trend = fit_trend_model(fb.archive, 12.0);
    ScenarioSet scen = sample_scenarios(fb.archive, trend, 6, 2030, 1, 42);
    PtdfMatrix ptdf = build_ptdf(fb.system);
    ScenarioInputs inputs = make_scenario_inputs(fb.system, scen.scenarios[0]);
    UcCosts costs;
    SolverOptions opts;
    opts.node_limit = 250;

    UcSolution sol = solve_rolling_horizon(fb.system, ptdf, inputs, 0.0, costs, opts);
    CHECK(sol.hours == inputs.hours);
    auto violations = check_solution_feasibility(fb.system, ptdf, inputs, 0.0, sol);
    for (const auto& v : violations) MESSAGE(v);
    CHECK(violations.empty());

    SUBCASE("deterministic: identical inputs give identical solutions") {
        UcSolution again = solve_rolling_horizon(fb.system, ptdf, inputs, 0.0, costs, opts);
        CHECK(again.objective == sol.objective);
        CHECK(again.shed_sys == sol.shed_sys);
        CHECK(again.commit == sol.commit);
        CHECK(again.soc == sol.soc);
    }

    SUBCASE("checker pinpoints a corrupted SOC series") {
        UcSolution bad = sol;
        bad.soc[0][40] += 0.2;
        auto v = check_solution_feasibility(fb.system, ptdf, inputs, 0.0, bad);
        REQUIRE(!v.empty());
        bool found = false;
        for (const auto& s : v)
            found |= s.find("SOC recursion") != std::string::npos &&
                     (s.find("hour 40") != std::string::npos ||
                      s.find("hour 41") != std::string::npos);
        CHECK(found);
    }

    SUBCASE("checker flags a flow pushed past its rating") {
        double biggest = 0.0;
        std::size_t line = 0;
        int hour = 0;
        for (std::size_t l = 0; l < sol.flow.size(); ++l)
            for (int t = 0; t < sol.hours; ++t)
                if (std::fabs(sol.flow[l][t]) > biggest) {
                    biggest = std::fabs(sol.flow[l][t]);
                    line = l;
                    hour = t;
                }
        REQUIRE(biggest > 1.0);
        ScenarioInputs tight = inputs;
        tight.line_rating[line][hour] = biggest - 0.1;
        auto v = check_solution_feasibility(fb.system, ptdf, tight, 0.0, sol);
        REQUIRE(!v.empty());
        bool found = false;
        for (const auto& s : v) found |= s.find("exceeds derated rating") != std::string::npos;
        CHECK(found);
    }
}

TEST_CASE("short months collapse to a single window") {
    PowerSystem sys = one_bus_system(0.0, 100.0, 20.0, 50.0, 10.0);
    PtdfMatrix ptdf = build_ptdf(sys);
    std::vector<double> demand(100, 40.0);
    ScenarioInputs in = flat_inputs(sys, demand);
    UcCosts costs;
    SolverOptions opts;
    UcSolution sol = solve_rolling_horizon(sys, ptdf, in, 0.0, costs, opts);
    CHECK(sol.hours == 100);
    CHECK(check_solution_feasibility(sys, ptdf, in, 0.0, sol).empty());
    CHECK(sol.g_thermal[0][50] == doctest::Approx(40.0));
}

TEST_CASE("raising VOLL never lowers the optimal objective") {
    PowerSystem sys = one_bus_system(0.0, 100.0, 20.0, 0.0, 0.0);
    PtdfMatrix ptdf = build_ptdf(sys);
    ScenarioInputs in = flat_inputs(sys, {120.0, 90.0, 130.0});
    UcWindow w = window_for(sys, in, 0.0, 0, 3);
    SolverOptions opts;
    double prev = -1.0;
    for (double voll : {1000.0, 5000.0, 10000.0, 20000.0}) {
        UcCosts costs;
        costs.voll = voll;
        MilpModel m = build_uc_model(sys, ptdf, w, costs, nullptr);
        MilpResult r = solve_milp(m, opts);
        REQUIRE(r.status == MilpStatus::Optimal);
        CHECK(r.objective >= prev - 1e-9);
        prev = r.objective;
    }
}

TEST_CASE("curtailment identity holds on a renewable-heavy hour") {
    PowerSystem sys = one_bus_system(0.0, 50.0, 20.0, 0.0, 0.0);
    SolarFarm s;
    s.id = 1;
    s.bus = 1;
    s.nominal_power = 100.0;
    s.noct = 45.0;
    s.temp_coeff = 0.004;
    s.efficiency = 0.95;
    s.cost = 25.0;
    sys.solar.push_back(s);
    PtdfMatrix ptdf = build_ptdf(sys);
    ScenarioInputs in = flat_inputs(sys, {30.0});
    in.pv_max[0][0] = 80.0;  // far above demand: must curtail
    UcWindow w = window_for(sys, in, 0.0, 0, 1);
    UcCosts costs;
    UcVarMap map;
    MilpModel m = build_uc_model(sys, ptdf, w, costs, &map);
    SolverOptions opts;
    MilpResult r = solve_milp(m, opts);
    REQUIRE(r.status == MilpStatus::Optimal);
    double g = r.x[map.g_s[0][0]], c = r.x[map.curt_s[0][0]];
    CHECK(g + c == doctest::Approx(80.0));
    CHECK(g == doctest::Approx(30.0));  // thermal stays off; solar serves all demand
}

TEST_CASE("hurricane stall zeroes an exposed wind farm") {
    PowerSystem sys = one_bus_system(0.0, 100.0, 20.0, 0.0, 0.0);
    WindFarm f;
    f.id = 1;
    f.bus = 1;
    f.nominal_power = 50.0;
    f.efficiency = 1.0;
    f.cut_in = 3.0;
    f.rated = 12.0;
    f.cut_out = 25.0;
    f.c3 = 0.035;
    f.hurricane_exposed = true;
    sys.wind.push_back(f);
    PtdfMatrix ptdf = build_ptdf(sys);
    ScenarioInputs in = flat_inputs(sys, {60.0, 60.0});
    in.wind_max[0] = {40.0, 40.0};
    in.hurricane = {0, 1};
    UcWindow w = window_for(sys, in, 0.0, 0, 2);
    UcCosts costs;
    UcVarMap map;
    MilpModel m = build_uc_model(sys, ptdf, w, costs, &map);
    SolverOptions opts;
    MilpResult r = solve_milp(m, opts);
    REQUIRE(r.status == MilpStatus::Optimal);
    CHECK(r.x[map.g_w[0][0]] == doctest::Approx(40.0));
    CHECK(r.x[map.g_w[0][1]] == doctest::Approx(0.0));  // stalled
    CHECK(r.x[map.g_th[0][1]] == doctest::Approx(60.0));
}

TEST_CASE("LP export round-trips and solves identically") {
    PowerSystem sys = one_bus_system(5.0, 100.0, 20.0, 300.0, 80.0);
    PtdfMatrix ptdf = build_ptdf(sys);
    ScenarioInputs in = flat_inputs(sys, {50.0, 80.0, 20.0});
    UcWindow w = window_for(sys, in, 0.0, 0, 3);
    UcCosts costs;
    MilpModel m = build_uc_model(sys, ptdf, w, costs, nullptr);

    auto path = std::filesystem::temp_directory_path() / "gridcred_uc_window.lp";
    export_model(m, path.string());
    MilpModel back = import_model(path.string());
    REQUIRE(back.var_count() == m.var_count());
    REQUIRE(back.row_count() == m.row_count());

    // re-export must be byte-identical (idempotent round trip)
    auto path2 = std::filesystem::temp_directory_path() / "gridcred_uc_window2.lp";
    export_model(back, path2.string());
    std::ifstream a(path), b(path2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);

    SolverOptions opts;
    MilpResult r1 = solve_milp(m, opts);
    MilpResult r2 = solve_milp(back, opts);
    REQUIRE(r1.status == MilpStatus::Optimal);
    REQUIRE(r2.status == MilpStatus::Optimal);
    CHECK(r1.objective == doctest::Approx(r2.objective).epsilon(1e-9));
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}
