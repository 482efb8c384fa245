#pragma once

#include <string>
#include <vector>

#include "gridcred/accreditation.hpp"
#include "gridcred/config.hpp"

namespace gridcred {

// Canonical results artifact: "# generated_at <ISO8601>" header line followed
// by a JSON body. Re-runs with the same config and seed reproduce the body
// byte for byte; only the header line varies.
void write_accreditation_result(const AccreditationResult& result,
                                const std::vector<double>& li_marginal,
                                const StudyConfig& config, const std::string& json_path);

// Plot-ready comparison table. Columns, exactly:
// resource,kind,bus,nameplate_mw,fi_mw,li_mw,iie_mw,elcc_mw,elcc_pct_nameplate,li_marginal_mw
void write_accreditation_csv(const AccreditationResult& result,
                             const std::vector<double>& li_marginal, const std::string& csv_path);

struct SensitivityRow {
    std::string parameter;
    double value = 0.0;
    std::string resource;  // label or PORT
    double elcc_mw = 0.0;
    double port_mw = 0.0;
    double roc_pct = 0.0;     // line sweeps only; 0 elsewhere
    bool has_roc = false;
};

// Long-format sweep table. Columns, exactly:
// parameter,value,resource,elcc_mw,port_mw,roc_pct
void write_sensitivity_csv(const std::vector<SensitivityRow>& rows, const std::string& path);

std::string result_body_json(const AccreditationResult& result,
                             const std::vector<double>& li_marginal, const StudyConfig& config);

}  // namespace gridcred
