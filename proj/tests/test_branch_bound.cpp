#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gridcred/branch_bound.hpp"
#include "gridcred/linalg.hpp"
#include "gridcred/rng.hpp"

using namespace gridcred;

namespace {

// Brute force over all binary assignments; rows checked by direct substitution.
struct EnumResult {
    bool feasible = false;
    double objective = 0.0;
};

EnumResult enumerate_binary(const MilpModel& m) {
    const int n = static_cast<int>(m.var_count());
    EnumResult out;
    std::vector<double> x(n, 0.0);
    for (long mask = 0; mask < (1L << n); ++mask) {
        for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1;
        bool ok = true;
        for (const auto& r : m.rows()) {
            double lhs = 0.0;
            for (auto& [j, c] : r.terms) lhs += c * x[j];
            if (r.sense == RowSense::LessEqual && lhs > r.rhs + 1e-9) ok = false;
            if (r.sense == RowSense::GreaterEqual && lhs < r.rhs - 1e-9) ok = false;
            if (r.sense == RowSense::Equal && std::fabs(lhs - r.rhs) > 1e-9) ok = false;
            if (!ok) break;
        }
        if (!ok) continue;
        double obj = m.objective_value(x);
        if (!out.feasible || obj < out.objective) {
            out.feasible = true;
            out.objective = obj;
        }
    }
    return out;
}

MilpModel random_binary_milp(CounterRng& rng, int max_bin) {
    int n = static_cast<int>(rng.uniform_int(4, max_bin));
    int nr = static_cast<int>(rng.uniform_int(2, 7));
    MilpModel m;
    for (int j = 0; j < n; ++j)
        m.add_var("b" + std::to_string(j), 0.0, 1.0, true,
                  static_cast<double>(rng.uniform_int(-10, 10)));
    for (int i = 0; i < nr; ++i) {
        std::vector<std::pair<int, double>> terms;
        double mag = 0.0;
        for (int j = 0; j < n; ++j) {
            int c = static_cast<int>(rng.uniform_int(-9, 9));
            if (c != 0 && rng.next_double() < 0.7) {
                terms.emplace_back(j, static_cast<double>(c));
                mag += std::fabs(static_cast<double>(c));
            }
        }
        if (terms.empty()) terms.emplace_back(0, 1.0);
        RowSense sense = rng.next_double() < 0.5 ? RowSense::LessEqual : RowSense::GreaterEqual;
        double rhs = rng.uniform(-mag / 2.0, mag / 2.0);
        m.add_row("r" + std::to_string(i), std::move(terms), sense, rhs);
    }
    return m;
}

}  // namespace

TEST_CASE("ten-binary knapsack matches exhaustive enumeration") {
    const int n = 10;
    const double weights[n] = {3, 5, 7, 2, 9, 4, 6, 8, 1, 5};
    const double values[n] = {4, 7, 9, 1, 12, 5, 7, 11, 2, 6};
    MilpModel m;
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < n; ++j) {
        m.add_var("b" + std::to_string(j), 0.0, 1.0, true, -values[j]);
        row.emplace_back(j, weights[j]);
    }
    m.add_row("cap", std::move(row), RowSense::LessEqual, 20.0);

    EnumResult oracle = enumerate_binary(m);
    SolverOptions opts;
    opts.mip_gap_abs = 1e-9;
    MilpResult r = solve_milp(m, opts);
    REQUIRE(r.status == MilpStatus::Optimal);
    REQUIRE(oracle.feasible);
    CHECK(r.objective == doctest::Approx(oracle.objective).epsilon(1e-9));
}

TEST_CASE("random pure-binary MILPs match enumeration") {
    CounterRng rng(555, 0);
    int feas = 0, infeas = 0;
    for (int trial = 0; trial < 60; ++trial) {
        MilpModel m = random_binary_milp(rng, 12);
        EnumResult oracle = enumerate_binary(m);
        SolverOptions opts;
        opts.mip_gap_abs = 1e-9;
        MilpResult r = solve_milp(m, opts);
        if (oracle.feasible) {
            REQUIRE_MESSAGE(r.status == MilpStatus::Optimal, "trial ", trial);
            REQUIRE_MESSAGE(std::fabs(r.objective - oracle.objective) < 1e-7, "trial ", trial,
                            " got ", r.objective, " want ", oracle.objective);
            ++feas;
        } else {
            REQUIRE_MESSAGE(r.status == MilpStatus::Infeasible, "trial ", trial);
            ++infeas;
        }
    }
    CHECK(feas > 20);
    CHECK(infeas > 5);
}

TEST_CASE("mixed binary-continuous MILP") {
    // x is capped at 1, so both indicator terms must switch on
    MilpModel m;
    int b1 = m.add_var("b1", 0.0, 1.0, true, 10.0);
    int b2 = m.add_var("b2", 0.0, 1.0, true, 10.0);
    int x = m.add_var("x", 0.0, 1.0, false, 1.0);
    m.add_row("c1", {{x, 1.0}, {b1, 5.0}}, RowSense::GreaterEqual, 2.0);
    m.add_row("c2", {{x, 1.0}, {b2, 5.0}}, RowSense::GreaterEqual, 4.0);
    SolverOptions opts;
    MilpResult r = solve_milp(m, opts);
    REQUIRE(r.status == MilpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(20.0));
    CHECK(r.x[b1] == doctest::Approx(1.0));
    CHECK(r.x[b2] == doctest::Approx(1.0));
    CHECK(r.x[x] == doctest::Approx(0.0));
}

TEST_CASE("infeasible MILP reports a hint") {
    MilpModel m;
    int b = m.add_var("b", 0.0, 1.0, true, 1.0);
    m.add_row("need2", {{b, 1.0}}, RowSense::GreaterEqual, 2.0);
    SolverOptions opts;
    MilpResult r = solve_milp(m, opts);
    CHECK(r.status == MilpStatus::Infeasible);
    CHECK(!r.infeasible_hint.empty());
}

TEST_CASE("solve is deterministic") {
    CounterRng rng(99, 0);
    MilpModel m = random_binary_milp(rng, 14);
    SolverOptions opts;
    MilpResult a = solve_milp(m, opts);
    MilpResult b = solve_milp(m, opts);
    REQUIRE(a.status == b.status);
    CHECK(a.nodes == b.nodes);
    if (a.status == MilpStatus::Optimal) {
        REQUIRE(a.x.size() == b.x.size());
        for (std::size_t j = 0; j < a.x.size(); ++j) CHECK(a.x[j] == b.x[j]);
    }
}

TEST_CASE("solver log emits machine-parseable progress lines") {
    // knapsack: guaranteed feasible, guaranteed incumbent improvements
    MilpModel m;
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 12; ++j) {
        m.add_var("b" + std::to_string(j), 0.0, 1.0, true, -(3.0 + j % 5));
        row.emplace_back(j, 2.0 + j % 4);
    }
    m.add_row("cap", std::move(row), RowSense::LessEqual, 14.0);
    std::ostringstream log;
    SolverOptions opts;
    opts.log = &log;
    solve_milp(m, opts);
    std::istringstream in(log.str());
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header == "node_count,bound,incumbent,gap");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        // four comma-separated numeric fields
        int commas = 0;
        for (char c : line)
            if (c == ',') ++commas;
        CHECK(commas == 3);
    }
    CHECK(rows >= 1);
}

TEST_CASE("node limit keeps whatever was proven") {
    CounterRng rng(1234, 0);
    MilpModel m;
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < 18; ++j) {
        double wgt = rng.uniform(1.0, 9.0);
        m.add_var("b" + std::to_string(j), 0.0, 1.0, true, -rng.uniform(1.0, 12.0));
        row.emplace_back(j, wgt);
    }
    m.add_row("cap", std::move(row), RowSense::LessEqual, 30.0);
    SolverOptions opts;
    opts.node_limit = 2;
    MilpResult r = solve_milp(m, opts);
    CHECK((r.status == MilpStatus::Optimal || r.status == MilpStatus::NodeLimit));
}
