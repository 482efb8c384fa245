#pragma once

#include <string>
#include <vector>

#include "gridcred/accreditation.hpp"
#include "gridcred/config.hpp"
#include "gridcred/fixture.hpp"

namespace gridcred {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIngest = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitNonBracketable = 4;
inline constexpr int kExitOther = 5;

// Inputs assembled for a study: network split into base + accredited set,
// archive, trend model (fitted or loaded, overrides applied), scenarios.
struct StudyContext {
    PowerSystem full_system;
    PortfolioSpec portfolio;
    HistoricalArchive archive;
    TrendModel trend;
    ScenarioSet scenarios;
};

StudyContext prepare_study(const StudyConfig& config);
StudyOptions study_options(const StudyConfig& config);

int cmd_fit_trends(const StudyConfig& config);
int cmd_sample(const StudyConfig& config);
int cmd_uc_run(const StudyConfig& config, int scenario_index, double load_adjustment);
int cmd_lole(const StudyConfig& config, double load_adjustment);
int cmd_accredit(const StudyConfig& config);
int cmd_sensitivity(const StudyConfig& config, const std::string& parameter,
                    const std::vector<double>& values, const std::vector<int>& line_ids);
int cmd_make_fixture(const FixtureSpec& spec, const std::string& out_dir);
int cmd_export_lp(const StudyConfig& config, int scenario_index, int window_index,
                  double load_adjustment, const std::string& out_path);

}  // namespace gridcred
