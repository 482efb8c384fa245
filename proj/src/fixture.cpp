#include "gridcred/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace gridcred {

namespace {

constexpr double kPi = 3.14159265358979323846;

PowerSystem make_system(const FixtureSpec& spec, CounterRng& rng) {
    PowerSystem sys;
    const int nb = std::max(2, spec.buses);

    // Bus 1 hosts the thermal fleet and the slack; the last bus is the
    // resource bus, kept load-free so a congestion line cap binds cleanly.
    std::vector<double> weights(nb, 0.0);
    double wsum = 0.0;
    for (int n = 0; n < nb - 1; ++n) {
        weights[n] = (n == 1) ? 2.0 : 1.0;  // load centre on bus 2 when present
        wsum += weights[n];
    }
    for (int n = 0; n < nb; ++n) {
        Bus b;
        b.id = n + 1;
        b.load_weight = weights[n] / wsum;
        sys.buses.push_back(b);
    }
    sys.slack_bus = 1;

    std::vector<AarBand> aar{{25.0, 1.0}, {35.0, 0.95},
                             {std::numeric_limits<double>::infinity(), 0.9}};
    int line_id = 1;
    double big_cap = 2.0 * spec.peak_demand_mw;
    // spanning chain 1-2-...-nb
    for (int n = 1; n < nb; ++n) {
        TransmissionLine ln;
        ln.id = line_id++;
        ln.from_bus = n;
        ln.to_bus = n + 1;
        ln.reactance = rng.uniform(0.05, 0.2);
        bool into_resource_bus = (n + 1 == nb);
        ln.capacity = (spec.congestion && into_resource_bus) ? spec.congested_capacity_mw
                                                             : big_cap;
        ln.aar_table = aar;
        sys.lines.push_back(ln);
    }
    // density extras; never parallel the congested feeder
    for (int a = 1; a <= nb; ++a)
        for (int b = a + 2; b <= nb; ++b) {
            if (spec.congestion && b == nb) continue;
            if (rng.next_double() < spec.line_density) {
                TransmissionLine ln;
                ln.id = line_id++;
                ln.from_bus = a;
                ln.to_bus = b;
                ln.reactance = rng.uniform(0.05, 0.2);
                ln.capacity = big_cap;
                ln.aar_table = aar;
                sys.lines.push_back(ln);
            }
        }

    // Thermal fleet: a baseload unit plus a cheap-start peaker (the peaker
    // keeps marginal deficits served instead of micro-shedding them), then
    // mid-size units if more are requested. Total sits a few percent above
    // peak so shedding appears only under stressed load adjustments.
    int ng = std::max(1, spec.thermal_units);
    for (int i = 0; i < ng; ++i) {
        ThermalGenerator g;
        g.id = i + 1;
        g.bus = 1;
        double share;
        if (ng == 1) {
            share = 1.0;
        } else if (i == 0) {
            share = 0.735;
        } else if (i == 1) {
            share = 0.265;
        } else {
            share = 0.17;
        }
        g.g_max = spec.peak_demand_mw * spec.fleet_margin * share * rng.uniform(0.97, 1.03);
        bool peaker = (ng > 1 && i == 1);
        g.g_min = peaker ? 0.0 : 0.05 * g.g_max;
        g.min_up_time = peaker ? 1 : 2 + static_cast<int>(rng.uniform_int(0, 2));
        g.min_down_time = peaker ? 1 : 2 + static_cast<int>(rng.uniform_int(0, 1));
        g.start_cost = peaker ? rng.uniform(40.0, 120.0) : rng.uniform(700.0, 1400.0);
        g.stop_cost = peaker ? rng.uniform(10.0, 40.0) : rng.uniform(100.0, 400.0);
        double base_cost = peaker ? 48.0 + rng.uniform(0.0, 8.0)
                                  : 18.0 + 6.0 * i + rng.uniform(0.0, 4.0);
        g.cost_curve = {{0.6 * g.g_max, base_cost}, {g.g_max, base_cost + 12.0}};
        g.for_poly = {0.021, -2e-4, 1e-5, 0.0, 0.0};  // mild bowl around 10 degC
        sys.thermal.push_back(g);
    }

    int res_bus = nb;
    for (int s = 0; s < spec.solar_farms; ++s) {
        SolarFarm f;
        f.id = s + 1;
        f.bus = (s == 0) ? res_bus : 2;
        f.nominal_power = spec.peak_demand_mw * ((s == 0) ? 1.0 : 0.5);
        f.noct = 45.0;
        f.temp_coeff = 0.004;
        f.efficiency = 0.95;
        f.cost = 25.0;
        sys.solar.push_back(f);
    }
    for (int w = 0; w < spec.wind_farms; ++w) {
        WindFarm f;
        f.id = w + 1;
        f.bus = (spec.solar_farms == 0 && w == 0) ? res_bus : std::min(2, nb);
        f.nominal_power = spec.peak_demand_mw * 0.6;
        f.efficiency = 0.97;
        f.cut_in = 3.0;
        f.rated = 12.0;
        f.cut_out = 25.0;
        double denom = std::pow(f.rated, 3) - std::pow(f.cut_in, 3);
        f.c3 = f.nominal_power / denom;
        f.c2 = 0.0;
        f.c1 = 0.0;
        f.c0 = -f.nominal_power * std::pow(f.cut_in, 3) / denom;
        f.cost = 30.0;
        f.hurricane_exposed = true;
        f.wind_site = 0;
        sys.wind.push_back(f);
    }
    for (int b = 0; b < spec.storage_units; ++b) {
        StorageUnit st;
        st.id = b + 1;
        st.bus = std::min(2, nb);
        st.dis_max = 0.5 * spec.peak_demand_mw;
        st.ch_max = st.dis_max;
        st.energy_capacity = 4.0 * st.dis_max;
        st.soc_min = 0.1;
        st.soc_max = 0.9;
        st.eta_ch = 0.92;
        st.eta_dis = 0.92;
        st.cost = 2.0;
        st.initial_soc = 0.5;
        sys.storage.push_back(st);
    }
    return sys;
}

// Annual storm counts whose OLS slope lands within ~0.5/sum((y-mean)^2) of
// the requested trend: events added one at a time at the year that cancels
// the most of the remaining slope deficit.
std::vector<int> storm_counts(int years, double base, double trend) {
    std::vector<int> counts(years, static_cast<int>(std::lround(base)));
    if (years < 2) return counts;
    double mean = 0.5 * (years - 1);
    double d = 0.0;
    for (int k = 0; k < years; ++k) d += (k - mean) * (k - mean);
    double remaining = trend * d;
    for (int guard = 0; guard < 10000; ++guard) {
        int best_year = -1;
        double best_left = std::fabs(remaining);
        for (int k = 0; k < years; ++k) {
            double left = std::fabs(remaining - (k - mean));
            if (left < best_left - 1e-12) {
                best_left = left;
                best_year = k;
            }
        }
        if (best_year < 0) break;  // no event placement makes progress
        counts[best_year] += 1;
        remaining -= best_year - mean;
    }
    return counts;
}

HistoricalArchive make_archive(const FixtureSpec& spec, CounterRng& seed_rng) {
    HistoricalArchive arch;
    arch.year_first = spec.archive_start_year;
    arch.year_last = spec.archive_start_year + spec.archive_years - 1;
    arch.wind_site_count = 1;

    const double peak = spec.peak_demand_mw;
    const int peak_hour = spec.evening_peak ? 19 : 15;
    const std::uint64_t base_key = seed_rng.next_u64();

    for (int y = arch.year_first; y <= arch.year_last; ++y) {
        CounterRng rng(base_key, static_cast<std::uint64_t>(y));
        ArchiveYear rec;
        rec.year = y;
        int hrs = hours_in_year(y);
        rec.temp_c.resize(hrs);
        rec.insolation_wm2.resize(hrs);
        rec.load_mw.resize(hrs);
        rec.wind_ms.assign(1, std::vector<double>(hrs));

        double drift = spec.temp_trend_c_per_year * (y - arch.year_first);
        double ar = 0.0;
        double cloud = 0.8;
        for (int h = 0; h < hrs; ++h) {
            int day = h / 24;
            int hod = h % 24;
            double season = 2.0 * kPi * day / 365.0;
            if (hod == 0) cloud = rng.uniform(0.45, 1.0);
            ar = 0.5 * ar + rng.normal(0.0, 0.3);

            double temp = 12.0 - 11.0 * std::cos(season - 0.55) +
                          4.5 * std::sin(2.0 * kPi * (hod - 8) / 24.0) + ar + drift;
            rec.temp_c[h] = temp;

            double daylen = 12.0 + 3.0 * -std::cos(season - 0.55);
            double sunrise = 12.0 - daylen / 2.0;
            double frac = (hod - sunrise) / daylen;
            double ins = 0.0;
            if (frac > 0.0 && frac < 1.0)
                ins = 950.0 * std::sin(kPi * frac) * (0.55 + 0.45 * -std::cos(season - 0.55)) *
                      cloud;
            rec.insolation_wm2[h] = std::max(0.0, ins);

            double wsp = 8.0 + 3.5 * std::cos(season - 0.2) +
                         1.5 * std::sin(2.0 * kPi * (hod - 2) / 24.0) + rng.normal(0.0, 2.2);
            rec.wind_ms[0][h] = std::max(0.0, wsp);

            int dow = (day + (y - arch.year_first) * 365) % 7;
            double weekday = (dow < 5) ? 1.0 : 0.93;
            double diurnal = std::exp(-0.5 * std::pow((hod - peak_hour) / 4.0, 2.0));
            double vshape = 2.0 * std::max(temp - 18.0, 0.0) + 1.1 * std::max(18.0 - temp, 0.0);
            double load = 0.52 * peak * weekday * (0.72 + 0.42 * diurnal) +
                          vshape * peak / 115.0 + rng.normal(0.0, 0.006 * peak);
            rec.load_mw[h] = std::max(0.0, load);
        }
        arch.years.push_back(std::move(rec));
    }

    auto counts = storm_counts(spec.archive_years, spec.storm_base_per_year,
                               spec.storm_trend_per_year);
    CounterRng storm_rng(base_key, 0xABCDEFull);
    for (int k = 0; k < spec.archive_years; ++k) {
        for (int e = 0; e < counts[k]; ++e) {
            HurricaneEvent ev;
            ev.year = arch.year_first + k;
            ev.month = 9;
            ev.duration_hours = std::max(6.0, storm_rng.normal(24.0, 6.0));
            arch.hurricanes.push_back(ev);
        }
    }
    return arch;
}

}  // namespace

FixtureBundle make_fixture(const FixtureSpec& spec) {
    FixtureBundle out;
    std::uint64_t seed = spec.seed;
    std::string last_issue = "unknown";
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
        CounterRng rng(seed, 0x515EC0DEull + attempt);
        out.system = make_system(spec, rng);
        auto issues = validate_system(out.system);
        if (issues.empty()) {
            ok = true;
        } else {
            last_issue = issues.front();
        }
    }
    if (!ok)
        throw StructureError("make_fixture: could not produce a valid system: " + last_issue);

    CounterRng arng(spec.seed, 0xA2C4ull);
    out.archive = make_archive(spec, arng);
    return out;
}

void write_archive_files(const HistoricalArchive& archive, const std::string& weather_path,
                         const std::string& load_path, const std::string& hurricane_path) {
    auto stamp = [](int year, int hour_of_year, char* buf, std::size_t len) {
        int m = 1;
        int h = hour_of_year;
        while (h >= 24 * days_in_month(year, m)) {
            h -= 24 * days_in_month(year, m);
            ++m;
        }
        int day = h / 24 + 1;
        int hod = h % 24;
        std::snprintf(buf, len, "%04d-%02d-%02dT%02d:00:00Z", year, m, day, hod);
    };

    std::ofstream wf(weather_path);
    if (!wf) throw InputError("cannot write " + weather_path);
    wf << "timestamp_utc,temp_c,ghi_wm2";
    for (std::size_t s = 0; s < archive.wind_site_count; ++s) wf << ",wind_ms_site" << (s + 1);
    wf << "\n";
    std::ofstream lf(load_path);
    if (!lf) throw InputError("cannot write " + load_path);
    lf << "timestamp_utc,load_mw\n";

    char ts[40];
    char num[64];
    for (const auto& rec : archive.years) {
        int hrs = hours_in_year(rec.year);
        for (int h = 0; h < hrs; ++h) {
            stamp(rec.year, h, ts, sizeof(ts));
            std::snprintf(num, sizeof(num), "%.6f", rec.temp_c[h]);
            wf << ts << ',' << num;
            std::snprintf(num, sizeof(num), "%.4f", rec.insolation_wm2[h]);
            wf << ',' << num;
            for (std::size_t s = 0; s < archive.wind_site_count; ++s) {
                std::snprintf(num, sizeof(num), "%.6f", rec.wind_ms[s][h]);
                wf << ',' << num;
            }
            wf << '\n';
            std::snprintf(num, sizeof(num), "%.6f", rec.load_mw[h]);
            lf << ts << ',' << num << '\n';
        }
    }

    std::ofstream hf(hurricane_path);
    if (!hf) throw InputError("cannot write " + hurricane_path);
    hf << "year,month,duration_hours\n";
    for (const auto& ev : archive.hurricanes) {
        std::snprintf(num, sizeof(num), "%.4f", ev.duration_hours);
        hf << ev.year << ',' << ev.month << ',' << num << '\n';
    }
}

void write_fixture_files(const FixtureBundle& bundle, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    save_system(bundle.system, out_dir + "/system.json");
    write_archive_files(bundle.archive, out_dir + "/weather.csv", out_dir + "/load.csv",
                        out_dir + "/hurricanes.csv");
}

}  // namespace gridcred
