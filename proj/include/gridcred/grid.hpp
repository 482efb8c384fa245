#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "gridcred/common.hpp"
#include "gridcred/linalg.hpp"

namespace gridcred {

struct Bus {
    int id = 0;
    double load_weight = 0.0;  // fraction of system demand served here
};

struct AarBand {
    double temp_upper_c = 0.0;  // +inf on the last band
    double coeff = 1.0;
};

struct TransmissionLine {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.0;  // per unit, > 0
    double capacity = 0.0;   // MW
    std::vector<AarBand> aar_table;
};

struct CostBlock {
    double mw_breakpoint = 0.0;   // cumulative MW covered through this block
    double usd_per_mwh = 0.0;     // marginal cost within the block
};

struct ThermalGenerator {
    int id = 0;
    int bus = 0;
    double g_min = 0.0;
    double g_max = 0.0;
    int min_up_time = 1;
    int min_down_time = 1;
    double start_cost = 0.0;
    double stop_cost = 0.0;
    std::vector<CostBlock> cost_curve;   // convex: slopes nondecreasing
    std::array<double, 5> for_poly{};    // c0..c4 in air temperature, FOR fraction
};

struct SolarFarm {
    int id = 0;
    int bus = 0;
    double nominal_power = 0.0;  // MW
    double noct = 45.0;          // degC
    double temp_coeff = 0.0;     // 1/degC
    double efficiency = 1.0;
    double cost = 0.0;           // $/MWh LCOE
};

struct WindFarm {
    int id = 0;
    int bus = 0;
    double nominal_power = 0.0;
    double efficiency = 1.0;
    double cut_in = 0.0;   // m/s
    double rated = 0.0;    // m/s
    double cut_out = 0.0;  // m/s
    double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;  // partial-load cubic, MW
    double cost = 0.0;
    bool hurricane_exposed = false;
    int wind_site = 0;  // column index into the archive's wind-speed series
};

struct StorageUnit {
    int id = 0;
    int bus = 0;
    double energy_capacity = 0.0;  // MWh
    double ch_max = 0.0;           // MW
    double dis_max = 0.0;          // MW
    double soc_min = 0.0;          // fraction
    double soc_max = 1.0;          // fraction
    double eta_ch = 1.0;
    double eta_dis = 1.0;
    double cost = 0.0;  // $/MWh on charging
    double initial_soc = 0.5;
};

struct PowerSystem {
    std::vector<Bus> buses;
    std::vector<TransmissionLine> lines;
    std::vector<ThermalGenerator> thermal;
    std::vector<SolarFarm> solar;
    std::vector<WindFarm> wind;
    std::vector<StorageUnit> storage;
    int slack_bus = 0;

    // Index of a bus id within buses, or npos.
    std::size_t bus_index(int bus_id) const;
    double peak_capable_demand() const;  // sum of thermal g_max, used for search scaling
};

// Dense [lines x buses] injection-shift factors; slack column is zero.
// Sign convention: positive flow runs from_bus -> to_bus.
class PtdfMatrix {
  public:
    PtdfMatrix() = default;
    PtdfMatrix(std::size_t lines, std::size_t buses) : m_(lines, buses) {}

    double at(std::size_t line, std::size_t bus) const { return m_.at(line, bus); }
    double& at(std::size_t line, std::size_t bus) { return m_.at(line, bus); }
    std::size_t line_count() const { return m_.rows(); }
    std::size_t bus_count() const { return m_.cols(); }

    // Flow on each line for a vector of nodal injections (bus order).
    std::vector<double> flows(const std::vector<double>& injections) const;

  private:
    DenseMatrix m_;
};

// Injection-shift factors from the reduced DC susceptance matrix.
// Throws StructureError when the network is disconnected (message lists the
// buses isolated from the slack) and InputError on nonpositive reactance.
PtdfMatrix build_ptdf(const PowerSystem& system);

// Step-function ambient-adjusted rating: first band whose upper bound is
// >= air temperature applies; boundary temperatures belong to the cooler band.
double line_rating(const TransmissionLine& line, double air_temp_c);

// Every invariant violation as a human-readable description naming the
// entity and the rule; empty means the system is well formed.
std::vector<std::string> validate_system(const PowerSystem& system);

PowerSystem load_system(const std::string& path);
void save_system(const PowerSystem& system, const std::string& path);

}  // namespace gridcred
