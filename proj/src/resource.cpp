#include "gridcred/resource.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "gridcred/linalg.hpp"

namespace gridcred {

double pv_cell_temperature(double air_temp_c, double insolation, double noct) {
    if (insolation < 0.0) throw InputError("pv_cell_temperature: insolation must be >= 0");
    return air_temp_c + (noct - 20.0) / 800.0 * insolation;
}

double pv_max_output(const SolarFarm& farm, double air_temp_c, double insolation) {
    if (insolation < 0.0) throw InputError("pv_max_output: insolation must be >= 0");
    double cell = pv_cell_temperature(air_temp_c, insolation, farm.noct);
    double p = farm.nominal_power * (insolation / 1000.0) *
               (1.0 - farm.temp_coeff * (cell - 25.0)) * farm.efficiency;
    return std::clamp(p, 0.0, farm.nominal_power);
}

double wind_max_output(const WindFarm& farm, double wind_speed, bool hurricane_active) {
    if (wind_speed < 0.0) throw InputError("wind_max_output: wind speed must be >= 0");
    if (hurricane_active) return 0.0;
    double ceiling = farm.efficiency * farm.nominal_power;
    if (wind_speed < farm.cut_in || wind_speed >= farm.cut_out) return 0.0;
    if (wind_speed >= farm.rated) return ceiling;
    double v = wind_speed;
    double p = farm.efficiency * (((farm.c3 * v + farm.c2) * v + farm.c1) * v + farm.c0);
    return std::clamp(p, 0.0, ceiling);
}

double thermal_forced_outage_rate(const ThermalGenerator& gen, double air_temp_c) {
    double t = air_temp_c;
    double f = gen.for_poly[0] +
               t * (gen.for_poly[1] + t * (gen.for_poly[2] + t * (gen.for_poly[3] + t * gen.for_poly[4])));
    return std::clamp(f, 0.0, 1.0);
}

double thermal_available_capacity(const ThermalGenerator& gen, double air_temp_c) {
    return gen.g_max * (1.0 - thermal_forced_outage_rate(gen, air_temp_c));
}

double for_polynomial_value(const ForPolynomialFit& fit, double air_temp_c) {
    // Quartics blow up outside the fitted hull; hold the edge value instead.
    double t = std::clamp(air_temp_c, fit.temp_min, fit.temp_max);
    double f = fit.coeffs[0] +
               t * (fit.coeffs[1] + t * (fit.coeffs[2] + t * (fit.coeffs[3] + t * fit.coeffs[4])));
    return std::clamp(f, 0.0, 1.0);
}

WindPowerCurveFit fit_wind_power_curve(const std::vector<std::pair<double, double>>& samples,
                                       double cut_in, double rated, double nominal_power) {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::set<double> distinct;
    for (const auto& [v, p] : samples) {
        if (v < cut_in || v >= rated) continue;
        rows.push_back({1.0, v, v * v, v * v * v});
        rhs.push_back(p);
        distinct.insert(v);
    }
    if (distinct.size() < 4)
        throw FitError("fit_wind_power_curve: need >= 4 distinct speeds in [cut_in, rated), got " +
                       std::to_string(distinct.size()));
    std::vector<double> c = least_squares(rows, rhs);

    WindPowerCurveFit fit;
    fit.c0 = c[0];
    fit.c1 = c[1];
    fit.c2 = c[2];
    fit.c3 = c[3];
    double sse = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double v = rows[i][1];
        double pred = ((fit.c3 * v + fit.c2) * v + fit.c1) * v + fit.c0;
        sse += (pred - rhs[i]) * (pred - rhs[i]);
    }
    fit.rmse = std::sqrt(sse / static_cast<double>(rows.size()));

    double at_rated = ((fit.c3 * rated + fit.c2) * rated + fit.c1) * rated + fit.c0;
    double gap = std::fabs(at_rated - nominal_power);
    if (gap > 0.02 * nominal_power)
        throw FitError("fit_wind_power_curve: continuity gap at rated speed is " +
                       std::to_string(gap) + " MW, over 2% of nominal power");
    return fit;
}

ForPolynomialFit fit_for_polynomial(const std::vector<std::pair<double, double>>& samples) {
    std::set<double> distinct;
    for (const auto& [t, f] : samples) {
        (void)f;
        distinct.insert(t);
    }
    if (distinct.size() < 5)
        throw FitError("fit_for_polynomial: need >= 5 distinct temperatures, got " +
                       std::to_string(distinct.size()));

    // Center temperatures before building the quartic basis; raw powers of
    // temperatures near 40 degC make the normal equations ill conditioned.
    double mean = 0.0;
    for (const auto& s : samples) mean += s.first;
    mean /= static_cast<double>(samples.size());

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& [t, f] : samples) {
        double u = t - mean;
        rows.push_back({1.0, u, u * u, u * u * u, u * u * u * u});
        rhs.push_back(f);
    }
    std::vector<double> b = least_squares(rows, rhs);

    // Expand the centered polynomial back to powers of raw temperature.
    ForPolynomialFit fit;
    double m = -mean;
    std::array<double, 5> c{};
    std::array<double, 5> basis{1.0, 0.0, 0.0, 0.0, 0.0};  // (t + m)^k expansion
    for (std::size_t k = 0; k < 5; ++k) {
        for (std::size_t i = 0; i < 5; ++i) c[i] += b[k] * basis[i];
        // multiply basis polynomial by (t + m)
        std::array<double, 5> nb{};
        for (std::size_t i = 0; i < 4; ++i) nb[i + 1] += basis[i];
        for (std::size_t i = 0; i < 5; ++i) nb[i] += m * basis[i];
        basis = nb;
    }
    fit.coeffs = c;
    fit.temp_min = *distinct.begin();
    fit.temp_max = *distinct.rbegin();
    return fit;
}

namespace {

std::vector<std::pair<double, double>> load_pair_csv(const std::string& path,
                                                     const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open sample file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IngestError(path + ": empty file");
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line != expected_header)
        throw IngestError(path + ":1: expected header '" + expected_header + "', got '" + line +
                          "'");
    std::vector<std::pair<double, double>> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw IngestError(path + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            out.emplace_back(std::stod(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IngestError(path + ":" + std::to_string(lineno) + ": bad numeric value");
        }
    }
    return out;
}

}  // namespace

std::vector<std::pair<double, double>> load_power_curve_samples(const std::string& path) {
    return load_pair_csv(path, "wind_speed_ms,power_mw");
}

std::vector<std::pair<double, double>> load_for_samples(const std::string& path) {
    return load_pair_csv(path, "temp_c,for_fraction");
}

}  // namespace gridcred
