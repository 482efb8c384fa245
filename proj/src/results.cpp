#include "gridcred/results.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

namespace gridcred {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string result_body_json(const AccreditationResult& result,
                             const std::vector<double>& li_marginal, const StudyConfig& config) {
    // Hand-rolled emission keeps key order and float formatting stable, which
    // the byte-identical re-run contract depends on.
    std::string s;
    s += "{\n  \"study\": {\n";
    s += "    \"month\": " + std::to_string(config.month) + ",\n";
    s += "    \"eval_year\": " + std::to_string(config.eval_year) + ",\n";
    s += "    \"scenarios\": " + std::to_string(config.scenario_count) + ",\n";
    s += "    \"seed\": " + std::to_string(result.scenario_seed) + ",\n";
    s += "    \"target_lolh\": " + num(result.target_lolh) + ",\n";
    s += "    \"epsilon_la\": " + num(config.epsilon_la) + ",\n";
    s += "    \"voll\": " + num(config.voll) + ",\n";
    s += "    \"config_hash\": \"" + std::to_string(config.config_hash()) + "\",\n";
    s += "    \"version\": \"";
    s += kVersion;
    s += "\"\n  },\n";
    s += "  \"port_mw\": " + num(result.port) + ",\n";
    s += "  \"pie_mw\": " + num(result.pie) + ",\n";
    s += "  \"delta\": " + num(result.delta) + ",\n";
    s += "  \"degenerate_allocation\": ";
    s += result.degenerate_allocation ? "true" : "false";
    s += ",\n";
    s += "  \"la_base_mw\": " + num(result.la_base) + ",\n";
    s += "  \"la_port_mw\": " + num(result.la_port) + ",\n";
    s += "  \"resources\": [\n";
    for (std::size_t j = 0; j < result.resources.size(); ++j) {
        const auto& r = result.resources[j];
        s += "    {\"resource\": \"" + r.label + "\", \"kind\": \"" + r.kind + "\", \"bus\": " +
             std::to_string(r.bus) + ", \"nameplate_mw\": " + num(r.nameplate_mw) +
             ", \"fi_mw\": " + num(r.fi) + ", \"li_mw\": " + num(r.li) +
             ", \"iie_mw\": " + num(r.iie) + ", \"elcc_mw\": " + num(r.elcc) +
             ", \"elcc_pct_nameplate\": " +
             num(r.nameplate_mw > 0.0 ? 100.0 * r.elcc / r.nameplate_mw : 0.0) +
             ", \"la_fi_mw\": " + num(result.la_fi[j]) + ", \"la_li_mw\": " +
             num(result.la_li[j]) + ", \"li_marginal_mw\": " +
             num(j < li_marginal.size() ? li_marginal[j] : r.li) + "}";
        s += (j + 1 < result.resources.size()) ? ",\n" : "\n";
    }
    s += "  ]\n}\n";
    return s;
}

void write_accreditation_result(const AccreditationResult& result,
                                const std::vector<double>& li_marginal,
                                const StudyConfig& config, const std::string& json_path) {
    std::ofstream out(json_path);
    if (!out) throw InputError("cannot write results: " + json_path);
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# generated_at " << stamp << "\n";
    out << result_body_json(result, li_marginal, config);
}

void write_accreditation_csv(const AccreditationResult& result,
                             const std::vector<double>& li_marginal,
                             const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw InputError("cannot write results: " + csv_path);
    out << "resource,kind,bus,nameplate_mw,fi_mw,li_mw,iie_mw,elcc_mw,elcc_pct_nameplate,"
           "li_marginal_mw\n";
    for (std::size_t j = 0; j < result.resources.size(); ++j) {
        const auto& r = result.resources[j];
        out << r.label << ',' << r.kind << ',' << r.bus << ',' << num(r.nameplate_mw) << ','
            << num(r.fi) << ',' << num(r.li) << ',' << num(r.iie) << ',' << num(r.elcc) << ','
            << num(r.nameplate_mw > 0.0 ? 100.0 * r.elcc / r.nameplate_mw : 0.0) << ','
            << num(j < li_marginal.size() ? li_marginal[j] : r.li) << '\n';
    }
}

void write_sensitivity_csv(const std::vector<SensitivityRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write sensitivity table: " + path);
    out << "parameter,value,resource,elcc_mw,port_mw,roc_pct\n";
    for (const auto& r : rows) {
        out << r.parameter << ',' << num(r.value) << ',' << r.resource << ',' << num(r.elcc_mw)
            << ',' << num(r.port_mw) << ',';
        if (r.has_roc) out << num(r.roc_pct);
        out << '\n';
    }
}

}  // namespace gridcred
