#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gridcred/milp.hpp"

using namespace gridcred;

TEST_CASE("model validation catches structural defects") {
    MilpModel m;
    int x = m.add_var("x", 0.0, 5.0, false, 1.0);
    m.add_row("ok", {{x, 1.0}}, RowSense::LessEqual, 3.0);
    CHECK_NOTHROW(m.validate());

    SUBCASE("out-of-range index") {
        m.add_row("bad", {{7, 1.0}}, RowSense::LessEqual, 1.0);
        CHECK_THROWS_AS(m.validate(), InputError);
    }
    SUBCASE("duplicate variable in a row") {
        m.add_row("dup", {{x, 1.0}, {x, 2.0}}, RowSense::Equal, 1.0);
        CHECK_THROWS_AS(m.validate(), InputError);
    }
    SUBCASE("binary outside [0,1]") {
        m.add_var("b", 0.0, 2.0, true, 0.0);
        CHECK_THROWS_AS(m.validate(), InputError);
    }
    SUBCASE("inverted bounds") {
        m.add_var("y", 3.0, 1.0, false, 0.0);
        CHECK_THROWS_AS(m.validate(), InputError);
    }
}

TEST_CASE("export rejects duplicate names") {
    MilpModel m;
    m.add_var("x", 0.0, 1.0, false, 1.0);
    m.add_var("x", 0.0, 1.0, false, 1.0);
    auto path = std::filesystem::temp_directory_path() / "gridcred_dup.lp";
    CHECK_THROWS_AS(export_model(m, path.string()), InputError);
}

TEST_CASE("external solution files map onto variables by name") {
    MilpModel m;
    m.add_var("alpha", 0.0, 10.0, false, 1.0);
    m.add_var("beta", 0.0, 10.0, false, 1.0);
    auto path = std::filesystem::temp_directory_path() / "gridcred_sol.csv";
    {
        std::ofstream f(path);
        f << "variable_name,value\n";
        f << "beta,4.25\n";
        f << "alpha,1.5\n";
    }
    auto x = import_solution(m, path.string());
    CHECK(x[0] == doctest::Approx(1.5));
    CHECK(x[1] == doctest::Approx(4.25));

    {
        std::ofstream f(path);
        f << "variable_name,value\n";
        f << "gamma,1.0\n";
    }
    CHECK_THROWS_AS(import_solution(m, path.string()), IngestError);
    std::filesystem::remove(path);
}

TEST_CASE("hand-written LP files parse with glued signs and bare terms") {
    auto path = std::filesystem::temp_directory_path() / "gridcred_hand.lp";
    {
        std::ofstream f(path);
        f << "\\ hand-written model\n";
        f << "Minimize\n obj: 2x + 3 y -1.5 z\n";
        f << "Subject To\n";
        f << " c1: x + y >= 1\n";
        f << " c2: -2 x + z <= 4\n";
        f << "Bounds\n 0 <= x <= 2\n y <= 3\n z free\n";
        f << "Binaries\n x\nEnd\n";
    }
    MilpModel m = import_model(path.string());
    REQUIRE(m.var_count() == 3);
    CHECK(m.vars()[0].is_binary);
    CHECK(m.vars()[2].lb == -kInf);
    REQUIRE(m.row_count() == 2);
    CHECK(m.rows()[0].sense == RowSense::GreaterEqual);
    CHECK(m.objective()[1] == doctest::Approx(3.0));
    CHECK(m.objective()[2] == doctest::Approx(-1.5));
    std::filesystem::remove(path);
}

TEST_CASE("objective value is a plain dot product") {
    MilpModel m;
    int a = m.add_var("a", 0.0, 1.0, false, 2.0);
    int b = m.add_var("b", 0.0, 1.0, false, -3.0);
    std::vector<double> x(m.var_count(), 0.0);
    x[a] = 0.5;
    x[b] = 1.0;
    CHECK(m.objective_value(x) == doctest::Approx(-2.0));
}
