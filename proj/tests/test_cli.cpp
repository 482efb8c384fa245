#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gridcred/cli_commands.hpp"
#include "gridcred/results.hpp"

using namespace gridcred;
namespace fs = std::filesystem;

namespace {

struct CliSandbox {
    fs::path dir;
    CliSandbox() {
        dir = fs::temp_directory_path() / ("gridcred_cli_" + std::to_string(next()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~CliSandbox() { fs::remove_all(dir); }
    static int next() {
        static int c = 0;
        return c++;
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

StudyConfig fixture_config(const CliSandbox& box, const std::string& fixture_dir) {
    StudyConfig c;
    c.system_file = fixture_dir + "/system.json";
    c.weather_files = {fixture_dir + "/weather.csv"};
    c.load_files = {fixture_dir + "/load.csv"};
    c.hurricane_file = fixture_dir + "/hurricanes.csv";
    c.out_dir = box.path("out");
    c.month = 7;
    c.eval_year = 2030;
    c.scenario_count = 2;
    c.master_seed = 9;
    c.node_limit = 150;
    c.threads = 1;
    return c;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// drop the timestamp header line
std::string body_of(const std::string& text) {
    std::size_t nl = text.find('\n');
    return nl == std::string::npos ? text : text.substr(nl + 1);
}

}  // namespace

TEST_CASE("make-fixture emits loadable, ingestible files") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 0;
    spec.archive_years = 3;
    spec.seed = 1;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);

    PowerSystem sys = load_system(box.path("fx") + "/system.json");
    CHECK(validate_system(sys).empty());
    HistoricalArchive arch = ingest_archive({box.path("fx") + "/weather.csv"},
                                            {box.path("fx") + "/load.csv"},
                                            box.path("fx") + "/hurricanes.csv");
    CHECK(arch.years.size() == 3);
    CHECK(arch.interpolated_hours == 0);
}

TEST_CASE("fit-trends recovers an injected drift and honours overrides") {
    CliSandbox box;
    FixtureSpec spec;
    spec.archive_years = 31;
    spec.temp_trend_c_per_year = 0.05;
    spec.storm_trend_per_year = 0.01;
    spec.seed = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);

    StudyConfig cfg = fixture_config(box, box.path("fx"));
    REQUIRE(cmd_fit_trends(cfg) == kExitOk);
    TrendModel trend = load_trend_model(cfg.out_dir + "/trends.json");
    double mean_beta = 0.0;
    for (double b : trend.beta_tau) mean_beta += b / 12.0;
    CHECK(std::fabs(mean_beta - 0.05) < 1e-3);
    CHECK(std::fabs(trend.hurricane.beta_hurr - 0.01) < 1e-3);

    SUBCASE("beta-tau override zeroes every month") {
        cfg.beta_tau_override = 0.0;
        REQUIRE(cmd_fit_trends(cfg) == kExitOk);
        TrendModel base = load_trend_model(cfg.out_dir + "/trends.json");
        for (double b : base.beta_tau) CHECK(b == 0.0);
    }

    SUBCASE("two-year archives fail the three-year precondition") {
        FixtureSpec tiny = spec;
        tiny.archive_years = 2;
        REQUIRE(cmd_make_fixture(tiny, box.path("fx2")) == kExitOk);
        StudyConfig c2 = fixture_config(box, box.path("fx2"));
        CHECK(cmd_fit_trends(c2) == kExitIngest);
    }
}

TEST_CASE("missing files exit with the config code and name the path") {
    CliSandbox box;
    StudyConfig cfg;
    cfg.system_file = box.path("nope.json");
    cfg.weather_files = {box.path("w.csv")};
    cfg.load_files = {box.path("l.csv")};
    CHECK(cmd_accredit(cfg) == kExitConfig);
}

TEST_CASE("sample writes per-scenario files plus a manifest") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 1;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    cfg.scenario_count = 3;
    REQUIRE(cmd_sample(cfg) == kExitOk);
    CHECK(fs::exists(cfg.out_dir + "/scenario_0.csv"));
    CHECK(fs::exists(cfg.out_dir + "/scenario_2.csv"));
    CHECK(fs::exists(cfg.out_dir + "/scenarios.json"));
    std::ifstream in(cfg.out_dir + "/scenario_0.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "hour,temp_c,ghi_wm2,wind_ms_site1,demand_mw,hurricane");
}

TEST_CASE("uc-run solves, verifies, and writes dispatch") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 1;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    REQUIRE(cmd_uc_run(cfg, 0, 0.0) == kExitOk);
    std::string head = read_file(cfg.out_dir + "/dispatch.csv").substr(0, 200);
    CHECK(head.find("hour,demand_mw,shed_mw") == 0);
    CHECK(head.find("soc_b1") != std::string::npos);
}

TEST_CASE("accredit emits canonical results with reproducible bodies") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 0;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    REQUIRE(cmd_accredit(cfg) == kExitOk);
    REQUIRE(fs::exists(cfg.out_dir + "/results.json"));
    REQUIRE(fs::exists(cfg.out_dir + "/results.csv"));
    REQUIRE(fs::exists(cfg.out_dir + "/trace_base.csv"));

    std::string body1 = body_of(read_file(cfg.out_dir + "/results.json"));
    std::string csv1 = read_file(cfg.out_dir + "/results.csv");
    std::string csv_header = csv1.substr(0, csv1.find('\n'));
    CHECK(csv_header ==
          "resource,kind,bus,nameplate_mw,fi_mw,li_mw,iie_mw,elcc_mw,elcc_pct_nameplate,"
          "li_marginal_mw");

    // re-run with more threads: byte-identical bodies
    cfg.threads = 2;
    REQUIRE(cmd_accredit(cfg) == kExitOk);
    std::string body2 = body_of(read_file(cfg.out_dir + "/results.json"));
    CHECK(body1 == body2);
    CHECK(read_file(cfg.out_dir + "/results.csv") == csv1);
}

TEST_CASE("sensitivity identity row matches the base accreditation") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 0;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    REQUIRE(cmd_accredit(cfg) == kExitOk);
    std::string results = read_file(cfg.out_dir + "/results.csv");

    REQUIRE(cmd_sensitivity(cfg, "line_capacity_scale", {1.0}, {}) == kExitOk);
    std::string sens = read_file(cfg.out_dir + "/sensitivity.csv");
    CHECK(sens.substr(0, sens.find('\n')) == "parameter,value,resource,elcc_mw,port_mw,roc_pct");

    // the base ELCC value appears verbatim in the identity sweep row
    std::size_t p1 = results.find('\n');
    std::string row = results.substr(p1 + 1, results.find('\n', p1 + 1) - p1 - 1);
    // row: resource,kind,bus,nameplate,fi,li,iie,elcc,...
    int commas = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == ',') {
            ++commas;
            if (commas == 7) start = i + 1;
            if (commas == 8) {
                std::string elcc = row.substr(start, i - start);
                CHECK(sens.find("," + elcc + ",") != std::string::npos);
                break;
            }
        }
    }

    SUBCASE("unknown sweep parameters are rejected") {
        CHECK(cmd_sensitivity(cfg, "frequency", {1.0}, {}) == kExitConfig);
    }
}

TEST_CASE("study months move the answer on a seasonal fixture") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 0;
    spec.archive_years = 3;
    spec.fleet_margin = 0.9;  // December loads must still stress the fleet
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));

    cfg.month = 6;
    cfg.out_dir = box.path("jun");
    REQUIRE(cmd_accredit(cfg) == kExitOk);
    std::string jun = read_file(cfg.out_dir + "/results.csv");

    cfg.month = 12;
    cfg.out_dir = box.path("dec");
    REQUIRE(cmd_accredit(cfg) == kExitOk);
    std::string dec = read_file(cfg.out_dir + "/results.csv");
    CHECK(jun != dec);  // solar is worth a different amount across seasons
}

TEST_CASE("beta_tau sweep emits one block per value") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 0;
    spec.archive_years = 3;
    spec.fleet_margin = 0.9;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    REQUIRE(cmd_sensitivity(cfg, "beta_tau", {0.0, 0.1}, {}) == kExitOk);
    std::ifstream in(cfg.out_dir + "/sensitivity.csv");
    std::string line;
    std::getline(in, line);  // header
    int rows_v0 = 0, rows_v1 = 0;
    while (std::getline(in, line)) {
        if (line.rfind("beta_tau,0,", 0) == 0) ++rows_v0;
        if (line.rfind("beta_tau,0.1,", 0) == 0) ++rows_v1;
    }
    CHECK(rows_v0 == 2);  // one resource row + one PORT row
    CHECK(rows_v1 == 2);
}

TEST_CASE("lole reports the scenario-mean shed hours") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    cfg.scenario_count = 1;
    REQUIRE(cmd_lole(cfg, 0.0) == kExitOk);
    std::ifstream in(cfg.out_dir + "/lolh.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "scenario,shed_hours");
    std::string row;
    REQUIRE(std::getline(in, row));
    CHECK(row.rfind("0,", 0) == 0);
}

TEST_CASE("beta_hurr sweep runs the hurricane branch") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 2;
    spec.solar_farms = 1;
    spec.wind_farms = 0;
    spec.storage_units = 0;
    spec.archive_years = 3;
    spec.fleet_margin = 0.9;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    cfg.scenario_count = 1;
    REQUIRE(cmd_sensitivity(cfg, "beta_hurr", {0.0108}, {}) == kExitOk);
    std::string sens = read_file(cfg.out_dir + "/sensitivity.csv");
    CHECK(sens.find("beta_hurr,0.0108,") != std::string::npos);
}

TEST_CASE("accredit refuses export-only solver mode") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 1;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    cfg.solver_mode = "export";
    CHECK(cmd_accredit(cfg) == kExitConfig);
}

TEST_CASE("export-lp writes a reimportable window model") {
    CliSandbox box;
    FixtureSpec spec;
    spec.thermal_units = 1;
    spec.archive_years = 3;
    REQUIRE(cmd_make_fixture(spec, box.path("fx")) == kExitOk);
    StudyConfig cfg = fixture_config(box, box.path("fx"));
    std::string lp = box.path("window.lp");
    REQUIRE(cmd_export_lp(cfg, 0, 0, 0.0, lp) == kExitOk);
    MilpModel m = import_model(lp);
    CHECK(m.var_count() > 100);
    CHECK(m.row_count() > 100);
}

TEST_CASE("config files load and hash stably") {
    CliSandbox box;
    {
        std::ofstream f(box.path("cfg.json"));
        f << R"({"system_file": "sys.json", "weather_files": ["w.csv"],
                 "load_files": ["l.csv"], "month": 12, "samples": 7,
                 "seed": 42, "target_lolh": 0.3, "voll": 9000.0,
                 "beta_tau": 0.05, "accredit": ["s1", "b2"]})";
    }
    StudyConfig c = load_config(box.path("cfg.json"));
    CHECK(c.month == 12);
    CHECK(c.scenario_count == 7);
    CHECK(c.master_seed == 42);
    CHECK(c.target_lolh == doctest::Approx(0.3));
    CHECK(c.voll == doctest::Approx(9000.0));
    REQUIRE(c.beta_tau_override.has_value());
    CHECK(*c.beta_tau_override == doctest::Approx(0.05));
    REQUIRE(c.accredit.size() == 2);
    CHECK(c.accredit[1] == "b2");
    CHECK(c.config_hash() == load_config(box.path("cfg.json")).config_hash());

    SUBCASE("validation rejects bad months") {
        c.month = 13;
        CHECK_THROWS_AS(c.validate(), InputError);
    }
}
