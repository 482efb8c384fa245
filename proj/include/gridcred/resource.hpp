#pragma once

#include <array>
#include <utility>
#include <vector>

#include "gridcred/grid.hpp"

namespace gridcred {

struct WindPowerCurveFit {
    double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;  // MW per (m/s)^k
    double rmse = 0.0;                               // MW
};

struct ForPolynomialFit {
    std::array<double, 5> coeffs{};  // c0..c4 over air temperature degC
    double temp_min = 0.0;           // fitted hull; evaluation clamps to it
    double temp_max = 0.0;
};

// Cell temperature from air temperature and insolation (W/m^2).
double pv_cell_temperature(double air_temp_c, double insolation, double noct);

// Available PV power, clamped to [0, nominal_power].
double pv_max_output(const SolarFarm& farm, double air_temp_c, double insolation);

// Piecewise turbine curve; a hurricane forces stall regardless of speed.
double wind_max_output(const WindFarm& farm, double wind_speed, bool hurricane_active);

// FOR evaluated on the generator's quartic, clamped to [0,1]; deterministic derate.
double thermal_forced_outage_rate(const ThermalGenerator& gen, double air_temp_c);
double thermal_available_capacity(const ThermalGenerator& gen, double air_temp_c);
double for_polynomial_value(const ForPolynomialFit& fit, double air_temp_c);

// Least-squares cubic over the partial-load region [cut_in, rated).
// Throws FitError with < 4 distinct abscissae in the region, or when the
// fitted curve misses nominal_power at rated speed by more than 2%.
WindPowerCurveFit fit_wind_power_curve(const std::vector<std::pair<double, double>>& samples,
                                       double cut_in, double rated, double nominal_power);

// Least-squares quartic over (temperature, FOR) samples; >= 5 distinct temps.
ForPolynomialFit fit_for_polynomial(const std::vector<std::pair<double, double>>& samples);

// Sample files for the fits: delimited text with the exact header rows
// "wind_speed_ms,power_mw" and "temp_c,for_fraction".
std::vector<std::pair<double, double>> load_power_curve_samples(const std::string& path);
std::vector<std::pair<double, double>> load_for_samples(const std::string& path);

}  // namespace gridcred
