#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridcred/cli_commands.hpp"

using namespace gridcred;

namespace {

// Flags override config-file values, which override built-in defaults.
struct CommonFlags {
    std::string config_path;
    std::string system_file;
    std::vector<std::string> weather_files, load_files;
    std::string hurricane_file, trend_file, out_dir;
    int month = -1, eval_year = -1, samples = -1;
    long seed = -1;
    double target_lolh = -1.0, epsilon_la = -1.0, voll = -1.0;
    double beta_tau = -1e30, beta_hurr = -1e30;
    std::string solver_mode;
    int threads = -1;
    long node_limit = -1;
    std::vector<std::string> accredit;
};

void add_common(CLI::App* cmd, CommonFlags* f) {
    cmd->add_option("--config", f->config_path, "study config file (JSON)");
    cmd->add_option("--system", f->system_file, "system description file");
    cmd->add_option("--weather", f->weather_files, "weather csv file(s)");
    cmd->add_option("--load", f->load_files, "load csv file(s)");
    cmd->add_option("--hurricanes", f->hurricane_file, "hurricane record csv");
    cmd->add_option("--trends", f->trend_file, "pre-fitted trend model json");
    cmd->add_option("--out", f->out_dir, "output directory");
    cmd->add_option("--month", f->month, "study month 1..12");
    cmd->add_option("--year", f->eval_year, "evaluation year");
    cmd->add_option("--samples", f->samples, "Monte Carlo scenario count");
    cmd->add_option("--seed", f->seed, "master seed");
    cmd->add_option("--target-lolh", f->target_lolh, "target LOLH hours/month");
    cmd->add_option("--epsilon-la", f->epsilon_la, "LA bracket tolerance MW");
    cmd->add_option("--voll", f->voll, "value of lost load $/MWh");
    cmd->add_option("--beta-tau", f->beta_tau, "override temperature trend degC/yr");
    cmd->add_option("--beta-hurr", f->beta_hurr, "override hurricane trend events/yr");
    cmd->add_option("--solver", f->solver_mode, "bundled | export")
        ->check(CLI::IsMember({"bundled", "export"}));
    cmd->add_option("--threads", f->threads, "worker threads");
    cmd->add_option("--node-limit", f->node_limit,
                    "branch-and-bound node budget per window (0 = prove optimality)");
    cmd->add_option("--accredit", f->accredit, "resource labels forming the accredited set");
}

StudyConfig resolve(const CommonFlags& f) {
    StudyConfig c;
    std::string path = f.config_path;
    if (path.empty()) {
        const char* env = std::getenv("GRIDCRED_CONFIG");
        if (env && *env) path = env;
    }
    if (!path.empty()) c = load_config(path);
    if (!f.system_file.empty()) c.system_file = f.system_file;
    if (!f.weather_files.empty()) c.weather_files = f.weather_files;
    if (!f.load_files.empty()) c.load_files = f.load_files;
    if (!f.hurricane_file.empty()) c.hurricane_file = f.hurricane_file;
    if (!f.trend_file.empty()) c.trend_file = f.trend_file;
    if (!f.out_dir.empty()) c.out_dir = f.out_dir;
    if (f.month > 0) c.month = f.month;
    if (f.eval_year > 0) c.eval_year = f.eval_year;
    if (f.samples > 0) c.scenario_count = f.samples;
    if (f.seed >= 0) c.master_seed = static_cast<std::uint64_t>(f.seed);
    if (f.target_lolh > 0) c.target_lolh = f.target_lolh;
    if (f.epsilon_la > 0) c.epsilon_la = f.epsilon_la;
    if (f.voll > 0) c.voll = f.voll;
    if (f.beta_tau > -1e29) c.beta_tau_override = f.beta_tau;
    if (f.beta_hurr > -1e29) c.beta_hurr_override = f.beta_hurr;
    if (!f.solver_mode.empty()) c.solver_mode = f.solver_mode;
    if (f.threads > 0) c.threads = static_cast<unsigned>(f.threads);
    if (f.node_limit >= 0) c.node_limit = f.node_limit;
    if (!f.accredit.empty()) c.accredit = f.accredit;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transmission- and climate-aware capacity accreditation studies"};
    app.require_subcommand(1);

    CommonFlags fit_f, sample_f, ucrun_f, lole_f, accr_f, sens_f, export_f;

    CLI::App* fit = app.add_subcommand("fit-trends", "fit climate trend models from archives");
    add_common(fit, &fit_f);

    CLI::App* sample = app.add_subcommand("sample", "emit Monte Carlo monthly scenarios");
    add_common(sample, &sample_f);

    CLI::App* ucrun = app.add_subcommand("uc-run", "solve one scenario month and verify it");
    add_common(ucrun, &ucrun_f);
    int ucrun_scenario = 0;
    double ucrun_la = 0.0;
    ucrun->add_option("--scenario", ucrun_scenario, "scenario index");
    ucrun->add_option("--la", ucrun_la, "load adjustment MW");

    CLI::App* lole = app.add_subcommand("lole", "mean LOLH across scenarios at a fixed LA");
    add_common(lole, &lole_f);
    double lole_la = 0.0;
    lole->add_option("--la", lole_la, "load adjustment MW");

    CLI::App* accr = app.add_subcommand("accredit", "run the full capacity accreditation study");
    add_common(accr, &accr_f);

    CLI::App* sens = app.add_subcommand("sensitivity", "sweep one parameter and re-accredit");
    add_common(sens, &sens_f);
    std::string sens_param;
    std::vector<double> sens_values;
    std::vector<int> sens_lines;
    sens->add_option("--param", sens_param,
                     "beta_tau | beta_hurr | line_capacity_scale")->required();
    sens->add_option("--values", sens_values, "sweep values")->required();
    sens->add_option("--lines", sens_lines, "line ids for capacity sweeps (default: all)");

    CLI::App* mkfix = app.add_subcommand("make-fixture", "generate a synthetic desk-scale study");
    FixtureSpec fspec;
    std::string fix_out = "fixture";
    long fix_seed = 1;
    mkfix->add_option("--out", fix_out, "output directory");
    mkfix->add_option("--buses", fspec.buses, "bus count");
    mkfix->add_option("--line-density", fspec.line_density, "extra line probability");
    mkfix->add_option("--thermal", fspec.thermal_units, "thermal unit count");
    mkfix->add_option("--solar", fspec.solar_farms, "solar farm count");
    mkfix->add_option("--wind", fspec.wind_farms, "wind farm count");
    mkfix->add_option("--storage", fspec.storage_units, "storage unit count");
    mkfix->add_flag("--congestion", fspec.congestion, "feed the resource bus through one tight line");
    mkfix->add_option("--congested-capacity", fspec.congested_capacity_mw,
                      "tight line capacity MW");
    mkfix->add_option("--years", fspec.archive_years, "archive year count");
    mkfix->add_option("--start-year", fspec.archive_start_year, "first archive year");
    mkfix->add_option("--temp-trend", fspec.temp_trend_c_per_year, "injected drift degC/yr");
    mkfix->add_option("--storm-trend", fspec.storm_trend_per_year, "injected storm trend 1/yr");
    mkfix->add_option("--peak", fspec.peak_demand_mw, "approximate peak demand MW");
    mkfix->add_option("--fleet-margin", fspec.fleet_margin,
                      "thermal capacity as a fraction of peak demand");
    mkfix->add_flag("--evening-peak", fspec.evening_peak, "move the load peak past sunset");
    mkfix->add_option("--seed", fix_seed, "fixture seed");

    CLI::App* explp = app.add_subcommand("export-lp", "write one UC window as an LP file");
    add_common(explp, &export_f);
    int exp_scenario = 0, exp_window = 0;
    double exp_la = 0.0;
    std::string exp_path = "window.lp";
    explp->add_option("--scenario", exp_scenario, "scenario index");
    explp->add_option("--window", exp_window, "window index (144 h stride)");
    explp->add_option("--la", exp_la, "load adjustment MW");
    explp->add_option("--lp-out", exp_path, "output LP path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit_trends(resolve(fit_f));
        if (sample->parsed()) return cmd_sample(resolve(sample_f));
        if (ucrun->parsed()) return cmd_uc_run(resolve(ucrun_f), ucrun_scenario, ucrun_la);
        if (lole->parsed()) return cmd_lole(resolve(lole_f), lole_la);
        if (accr->parsed()) return cmd_accredit(resolve(accr_f));
        if (sens->parsed())
            return cmd_sensitivity(resolve(sens_f), sens_param, sens_values, sens_lines);
        if (mkfix->parsed()) {
            fspec.seed = static_cast<std::uint64_t>(fix_seed);
            return cmd_make_fixture(fspec, fix_out);
        }
        if (explp->parsed())
            return cmd_export_lp(resolve(export_f), exp_scenario, exp_window, exp_la, exp_path);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error (config): %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
