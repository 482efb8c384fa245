#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridcred/common.hpp"

namespace gridcred {

// Study configuration: defaults here, overridden by the config file, then by
// command-line flags (precedence documented in the README).
struct StudyConfig {
    std::string system_file;
    std::vector<std::string> weather_files;
    std::vector<std::string> load_files;
    std::string hurricane_file;
    std::string trend_file;  // optional: reuse a fitted trend model
    std::string out_dir = ".";

    int month = 6;
    int eval_year = 2030;
    int scenario_count = 100;
    std::uint64_t master_seed = 1;

    double target_lolh = 0.2;   // hours/month
    double epsilon_la = 1.0;    // MW
    double voll = 10000.0;      // $/MWh
    double curtailment_multiplier = 10.0;
    double shed_tolerance_mw = 1e-3;
    double buffer_hours = 12.0;

    std::optional<double> beta_tau_override;   // degC/yr, all months
    std::optional<double> beta_hurr_override;  // events/yr

    std::string solver_mode = "bundled";  // bundled | export
    double mip_gap_abs = 1e-6;
    long node_limit = 0;
    unsigned threads = 1;

    // Resource labels (s<id>, w<id>, b<id>) forming the accredited set J;
    // empty means every solar, wind, and storage unit in the system file.
    std::vector<std::string> accredit;

    void validate() const;
    std::string canonical_text() const;  // stable serialization for hashing
    std::uint64_t config_hash() const { return fnv1a64(canonical_text()); }
};

StudyConfig load_config(const std::string& path);

}  // namespace gridcred
