#include "gridcred/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gridcred {

using nlohmann::json;

void StudyConfig::validate() const {
    if (month < 1 || month > 12) throw InputError("config: month must be in 1..12");
    if (scenario_count < 1) throw InputError("config: samples must be >= 1");
    if (target_lolh <= 0.0) throw InputError("config: target LOLH must be > 0");
    if (epsilon_la <= 0.0) throw InputError("config: epsilon_la must be > 0");
    if (solver_mode != "bundled" && solver_mode != "export")
        throw InputError("config: solver mode must be 'bundled' or 'export'");
    if (threads < 1) throw InputError("config: threads must be >= 1");
}

std::string StudyConfig::canonical_text() const {
    std::ostringstream os;
    os << "system=" << system_file << ";weather=";
    for (const auto& f : weather_files) os << f << ',';
    os << ";load=";
    for (const auto& f : load_files) os << f << ',';
    os << ";hurr=" << hurricane_file << ";trend=" << trend_file << ";month=" << month
       << ";year=" << eval_year << ";samples=" << scenario_count << ";seed=" << master_seed
       << ";target=" << target_lolh << ";eps=" << epsilon_la << ";voll=" << voll
       << ";curtmult=" << curtailment_multiplier << ";shedtol=" << shed_tolerance_mw
       << ";buff=" << buffer_hours;
    os << ";btau=" << (beta_tau_override ? std::to_string(*beta_tau_override) : "fit");
    os << ";bhurr=" << (beta_hurr_override ? std::to_string(*beta_hurr_override) : "fit");
    os << ";solver=" << solver_mode << ";gap=" << mip_gap_abs << ";nodes=" << node_limit;
    os << ";accredit=";
    for (const auto& a : accredit) os << a << ',';
    return os.str();
}

StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
    StudyConfig c;
    try {
        auto get_strings = [&](const char* key, std::vector<std::string>* out) {
            if (!j.contains(key)) return;
            if (j[key].is_string())
                out->push_back(j[key].get<std::string>());
            else
                for (const auto& v : j[key]) out->push_back(v.get<std::string>());
        };
        c.system_file = j.value("system_file", c.system_file);
        get_strings("weather_files", &c.weather_files);
        get_strings("load_files", &c.load_files);
        c.hurricane_file = j.value("hurricane_file", c.hurricane_file);
        c.trend_file = j.value("trend_file", c.trend_file);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.month = j.value("month", c.month);
        c.eval_year = j.value("eval_year", c.eval_year);
        c.scenario_count = j.value("samples", c.scenario_count);
        c.master_seed = j.value("seed", c.master_seed);
        c.target_lolh = j.value("target_lolh", c.target_lolh);
        c.epsilon_la = j.value("epsilon_la", c.epsilon_la);
        c.voll = j.value("voll", c.voll);
        c.curtailment_multiplier = j.value("curtailment_multiplier", c.curtailment_multiplier);
        c.shed_tolerance_mw = j.value("shed_tolerance_mw", c.shed_tolerance_mw);
        c.buffer_hours = j.value("buffer_hours", c.buffer_hours);
        if (j.contains("beta_tau")) c.beta_tau_override = j["beta_tau"].get<double>();
        if (j.contains("beta_hurr")) c.beta_hurr_override = j["beta_hurr"].get<double>();
        c.solver_mode = j.value("solver", c.solver_mode);
        c.mip_gap_abs = j.value("mip_gap_abs", c.mip_gap_abs);
        c.node_limit = j.value("node_limit", c.node_limit);
        c.threads = j.value("threads", c.threads);
        get_strings("accredit", &c.accredit);
    } catch (const json::exception& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
    return c;
}

}  // namespace gridcred
