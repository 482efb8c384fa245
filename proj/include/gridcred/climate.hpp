#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridcred/common.hpp"
#include "gridcred/rng.hpp"

namespace gridcred {

// Calendar helpers (Gregorian, leap-aware; hours are whole-hour samples).
bool is_leap_year(int year);
int days_in_month(int year, int month);       // month 1..12
int hours_in_year(int year);
int month_start_hour(int year, int month);    // hour-of-year of the month's first hour
int hours_in_month(int year, int month);

struct HurricaneEvent {
    int year = 0;
    int month = 0;  // 1..12
    double duration_hours = 0.0;
};

struct ArchiveYear {
    int year = 0;
    std::vector<double> temp_c;                 // hours_in_year entries
    std::vector<double> insolation_wm2;
    std::vector<std::vector<double>> wind_ms;   // [site][hour]
    std::vector<double> load_mw;
};

struct HistoricalArchive {
    std::vector<ArchiveYear> years;  // ascending by year, contiguous
    std::vector<HurricaneEvent> hurricanes;
    int year_first = 0;
    int year_last = 0;
    std::size_t wind_site_count = 0;
    std::size_t interpolated_hours = 0;  // filled by the <= 6 h gap policy

    const ArchiveYear& year_record(int year) const;
};

struct LoadTempRegression {
    double breakpoint_c = 0.0;
    double left_slope = 0.0;    // MW/degC below the breakpoint (heating side)
    double right_slope = 0.0;   // MW/degC above it (cooling side)
    double base_mw = 0.0;       // value at the breakpoint; continuity holds by construction
    double sse = 0.0;

    double operator()(double temp_c) const {
        double d = temp_c - breakpoint_c;
        return base_mw + (d < 0.0 ? left_slope * d : right_slope * d);
    }
};

struct HurricaneModel {
    double beta_hurr = 0.0;              // events/year trend
    std::array<double, 12> monthly_count{};   // H[m], historical totals
    std::array<double, 12> duration_mean{};   // hours
    std::array<double, 12> duration_std{};    // hours; 0 when < 2 events
};

struct TrendModel {
    std::array<double, 12> beta_tau{};   // degC/year per month
    HurricaneModel hurricane;
    double buffer_hours = 12.0;          // storm pre/post buffer
    int archive_years = 0;               // N_yrs normalizer
    LoadTempRegression load_regression;
};

struct ScenarioProfile {
    int month = 0;
    int eval_year = 0;
    int source_year = 0;
    int shift_days = 0;
    std::uint64_t stream = 0;  // substream index under the set's master seed
    std::vector<double> temp_c;         // climate-adjusted
    std::vector<double> insolation_wm2;
    std::vector<std::vector<double>> wind_ms;  // [site][hour]
    std::vector<double> demand_mw;      // adjusted, clamped at 0
    std::vector<std::uint8_t> hurricane;
    std::size_t demand_clamped_hours = 0;

    std::size_t hours() const { return temp_c.size(); }
};

struct ScenarioSet {
    std::vector<ScenarioProfile> scenarios;
    std::uint64_t master_seed = 0;
};

// Weather files: timestamp_utc,temp_c,ghi_wm2,wind_ms_site1[,...].
// Load files: timestamp_utc,load_mw. Hurricane file: year,month,duration_hours.
// Rows merge across files; <= 6 h gaps are linearly interpolated, larger
// gaps raise IngestError naming the file span.
HistoricalArchive ingest_archive(const std::vector<std::string>& weather_files,
                                 const std::vector<std::string>& load_files,
                                 const std::string& hurricane_file);

// OLS slope of monthly mean temperature over years; needs >= 3 years.
std::array<double, 12> fit_monthly_temp_trend(const HistoricalArchive& archive);

// Two-segment continuous piecewise-linear load vs temperature fit.
// Breakpoint found by 0.5 degC grid search over the 5th-95th percentile span.
LoadTempRegression fit_load_temp_regression(const HistoricalArchive& archive);

HurricaneModel fit_hurricane_model(const HistoricalArchive& archive);

TrendModel fit_trend_model(const HistoricalArchive& archive, double buffer_hours);

// Hourly temperature trend shift: tau + beta * (eval_year - source_year).
std::vector<double> adjust_temperature(const std::vector<double>& sampled_temp_c,
                                       double beta_tau_month, int year_delta);

struct DemandAdjustment {
    std::vector<double> demand_mw;
    std::size_t clamped_hours = 0;
};

// Demand shifted by the regression delta between adjusted and sampled
// temperature, clamped at zero.
DemandAdjustment adjust_demand(const std::vector<double>& sampled_demand_mw,
                               const std::vector<double>& sampled_temp_c,
                               const std::vector<double>& adjusted_temp_c,
                               const LoadTempRegression& regression);

// Bernoulli storm onset per hour; each onset opens a window of
// max(0, normal(mu, sigma)) + buffer hours centered on the hit, truncated
// to the month. Overlapping windows merge.
std::vector<std::uint8_t> sample_hurricane_flags(const TrendModel& trend, int month,
                                                 int source_year, int eval_year,
                                                 int hours, CounterRng& rng);

struct SampleOptions {
    std::optional<int> force_source_year;  // tests: pin the drawn year
    std::optional<int> force_shift_days;   // tests: pin the weekday shift
};

// Monte Carlo monthly scenarios. Per-scenario substream = (master_seed, index),
// so the set is identical no matter how sampling is scheduled.
ScenarioSet sample_scenarios(const HistoricalArchive& archive, const TrendModel& trend,
                             int month, int eval_year, int count,
                             std::uint64_t master_seed, const SampleOptions& opts = {});

void save_trend_model(const TrendModel& trend, const std::string& path);
TrendModel load_trend_model(const std::string& path);

}  // namespace gridcred
