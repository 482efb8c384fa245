#include "gridcred/climate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "gridcred/linalg.hpp"
#include "json.hpp"

namespace gridcred {

using nlohmann::json;

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static const int days[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) throw InputError("month must be in 1..12");
    if (month == 2 && is_leap_year(year)) return 29;
    return days[month - 1];
}

int hours_in_year(int year) { return is_leap_year(year) ? 8784 : 8760; }

int month_start_hour(int year, int month) {
    int h = 0;
    for (int m = 1; m < month; ++m) h += 24 * days_in_month(year, m);
    return h;
}

int hours_in_month(int year, int month) { return 24 * days_in_month(year, month); }

const ArchiveYear& HistoricalArchive::year_record(int year) const {
    for (const auto& y : years)
        if (y.year == year) return y;
    throw InputError("archive has no year " + std::to_string(year));
}

namespace {

struct Timestamp {
    int year, month, day, hour;
    // Absolute hour index from year 0 for ordering and gap arithmetic.
    long long absolute(int base_year) const {
        long long h = 0;
        for (int y = base_year; y < year; ++y) h += hours_in_year(y);
        return h + month_start_hour(year, month) + 24LL * (day - 1) + hour;
    }
};

Timestamp parse_timestamp(const std::string& s, const std::string& file, std::size_t lineno) {
    Timestamp t{};
    int minute = 0, second = 0;
    int got = std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d", &t.year, &t.month, &t.day, &t.hour,
                          &minute, &second);
    if (got < 4 || t.month < 1 || t.month > 12 || t.day < 1 ||
        t.day > days_in_month(t.year, t.month) || t.hour < 0 || t.hour > 23 || minute != 0 ||
        second != 0)
        throw IngestError(file + ":" + std::to_string(lineno) + ": bad timestamp '" + s + "'");
    return t;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        std::size_t a = s.find_first_not_of(" \t");
        std::size_t b = s.find_last_not_of(" \t");
        s = (a == std::string::npos) ? "" : s.substr(a, b - a + 1);
    }
    return out;
}

double parse_number(const std::string& s, const std::string& file, std::size_t lineno) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IngestError(file + ":" + std::to_string(lineno) + ": bad numeric value '" + s + "'");
    }
}

struct TimedRow {
    Timestamp ts;
    long long abs_hour;
    std::vector<double> values;
    std::string file;
    std::size_t lineno;
};

// Reads one CSV with a fixed leading header set; extra columns must match
// the repeating pattern (wind_ms_site<k>).
std::vector<TimedRow> read_timed_csv(const std::string& path,
                                     const std::vector<std::string>& fixed_headers,
                                     const std::string& repeat_prefix,
                                     std::size_t* repeat_count) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IngestError(path + ": empty file");
    auto headers = split_csv(line);
    if (headers.size() < fixed_headers.size())
        throw IngestError(path + ":1: expected at least " +
                          std::to_string(fixed_headers.size()) + " columns");
    for (std::size_t i = 0; i < fixed_headers.size(); ++i)
        if (headers[i] != fixed_headers[i])
            throw IngestError(path + ":1: header mismatch, expected '" + fixed_headers[i] +
                              "' got '" + headers[i] + "'");
    std::size_t extras = headers.size() - fixed_headers.size();
    if (repeat_count) {
        for (std::size_t k = 0; k < extras; ++k) {
            std::string want = repeat_prefix + std::to_string(k + 1);
            if (headers[fixed_headers.size() + k] != want)
                throw IngestError(path + ":1: header mismatch, expected '" + want + "' got '" +
                                  headers[fixed_headers.size() + k] + "'");
        }
        *repeat_count = extras;
    } else if (extras != 0) {
        throw IngestError(path + ":1: unexpected extra columns");
    }

    std::vector<TimedRow> rows;
    std::size_t lineno = 1;
    long long prev_abs = std::numeric_limits<long long>::min();
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv(line);
        if (cells.size() != headers.size())
            throw IngestError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(headers.size()) + " columns, got " +
                              std::to_string(cells.size()));
        TimedRow r;
        r.ts = parse_timestamp(cells[0], path, lineno);
        r.abs_hour = r.ts.absolute(1900);
        if (r.abs_hour <= prev_abs)
            throw IngestError(path + ":" + std::to_string(lineno) +
                              ": timestamps not strictly increasing");
        prev_abs = r.abs_hour;
        for (std::size_t i = 1; i < cells.size(); ++i)
            r.values.push_back(parse_number(cells[i], path, lineno));
        r.file = path;
        r.lineno = lineno;
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw IngestError(path + ": no data rows");
    return rows;
}

// Merge rows from several files, fill gaps of <= 6 hours by linear
// interpolation, and reject anything larger.
std::vector<TimedRow> merge_and_fill(std::vector<TimedRow> rows, std::size_t value_count,
                                     std::size_t* interpolated) {
    std::sort(rows.begin(), rows.end(),
              [](const TimedRow& a, const TimedRow& b) { return a.abs_hour < b.abs_hour; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].abs_hour == rows[i - 1].abs_hour)
            throw IngestError(rows[i].file + ":" + std::to_string(rows[i].lineno) +
                              ": duplicate timestamp across files");

    std::vector<TimedRow> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!out.empty()) {
            long long gap = rows[i].abs_hour - out.back().abs_hour - 1;
            if (gap > 6)
                throw IngestError(rows[i].file + ":" + std::to_string(rows[i].lineno) + ": " +
                                  std::to_string(gap) + "-hour gap before this row exceeds the 6-hour "
                                  "interpolation policy");
            if (gap > 0) {
                const TimedRow& a = out.back();
                const TimedRow& b = rows[i];
                for (long long k = 1; k <= gap; ++k) {
                    TimedRow f;
                    f.abs_hour = a.abs_hour + k;
                    double w = static_cast<double>(k) / static_cast<double>(gap + 1);
                    f.values.resize(value_count);
                    for (std::size_t v = 0; v < value_count; ++v)
                        f.values[v] = a.values[v] + w * (b.values[v] - a.values[v]);
                    out.push_back(std::move(f));
                    if (interpolated) ++(*interpolated);
                }
            }
        }
        out.push_back(rows[i]);
    }
    return out;
}

void year_span_of(const std::vector<TimedRow>& rows, int* first, int* last) {
    long long base = rows.front().abs_hour;
    long long h = 0;
    int y = 1900;
    while (h + hours_in_year(y) <= base) h += hours_in_year(y), ++y;
    *first = y;
    long long end = rows.back().abs_hour;
    while (h + hours_in_year(y) <= end) h += hours_in_year(y), ++y;
    *last = y;
}

}  // namespace

HistoricalArchive ingest_archive(const std::vector<std::string>& weather_files,
                                 const std::vector<std::string>& load_files,
                                 const std::string& hurricane_file) {
    HistoricalArchive arch;

    std::vector<TimedRow> weather;
    std::size_t sites = 0;
    for (const auto& f : weather_files) {
        std::size_t fsites = 0;
        auto rows = read_timed_csv(f, {"timestamp_utc", "temp_c", "ghi_wm2"}, "wind_ms_site",
                                   &fsites);
        if (sites == 0) sites = fsites;
        if (fsites != sites)
            throw IngestError(f + ": wind site column count differs from other weather files");
        weather.insert(weather.end(), rows.begin(), rows.end());
    }
    if (sites == 0) throw IngestError("weather files declare no wind_ms_site columns");
    weather = merge_and_fill(std::move(weather), 2 + sites, &arch.interpolated_hours);

    std::vector<TimedRow> load;
    for (const auto& f : load_files) {
        auto rows = read_timed_csv(f, {"timestamp_utc", "load_mw"}, "", nullptr);
        load.insert(load.end(), rows.begin(), rows.end());
    }
    load = merge_and_fill(std::move(load), 1, &arch.interpolated_hours);

    if (weather.front().abs_hour != load.front().abs_hour ||
        weather.back().abs_hour != load.back().abs_hour)
        throw IngestError("weather and load archives cover different time spans");

    int y_first = 0, y_last = 0;
    year_span_of(weather, &y_first, &y_last);
    arch.year_first = y_first;
    arch.year_last = y_last;

    // Demand full calendar years.
    long long expect_start = Timestamp{y_first, 1, 1, 0}.absolute(1900);
    long long expect_hours = 0;
    for (int y = y_first; y <= y_last; ++y) expect_hours += hours_in_year(y);
    if (weather.front().abs_hour != expect_start ||
        static_cast<long long>(weather.size()) != expect_hours)
        throw IngestError("archive must cover whole calendar years (Jan 1 00:00 through Dec 31 23:00)");

    arch.wind_site_count = sites;
    std::size_t idx = 0;
    for (int y = y_first; y <= y_last; ++y) {
        ArchiveYear rec;
        rec.year = y;
        int hrs = hours_in_year(y);
        rec.temp_c.resize(hrs);
        rec.insolation_wm2.resize(hrs);
        rec.load_mw.resize(hrs);
        rec.wind_ms.assign(sites, std::vector<double>(hrs));
        for (int h = 0; h < hrs; ++h, ++idx) {
            rec.temp_c[h] = weather[idx].values[0];
            rec.insolation_wm2[h] = weather[idx].values[1];
            for (std::size_t s = 0; s < sites; ++s) rec.wind_ms[s][h] = weather[idx].values[2 + s];
            rec.load_mw[h] = load[idx].values[0];
        }
        arch.years.push_back(std::move(rec));
    }

    if (!hurricane_file.empty()) {
        std::ifstream in(hurricane_file);
        if (!in) throw IngestError("cannot open file: " + hurricane_file);
        std::string line;
        if (!std::getline(in, line)) throw IngestError(hurricane_file + ": empty file");
        auto headers = split_csv(line);
        if (headers.size() != 3 || headers[0] != "year" || headers[1] != "month" ||
            headers[2] != "duration_hours")
            throw IngestError(hurricane_file + ":1: expected header 'year,month,duration_hours'");
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            auto cells = split_csv(line);
            if (cells.size() != 3)
                throw IngestError(hurricane_file + ":" + std::to_string(lineno) +
                                  ": expected 3 columns");
            HurricaneEvent ev;
            ev.year = static_cast<int>(parse_number(cells[0], hurricane_file, lineno));
            ev.month = static_cast<int>(parse_number(cells[1], hurricane_file, lineno));
            ev.duration_hours = parse_number(cells[2], hurricane_file, lineno);
            if (ev.month < 1 || ev.month > 12)
                throw IngestError(hurricane_file + ":" + std::to_string(lineno) + ": month out of range");
            arch.hurricanes.push_back(ev);
        }
    }
    return arch;
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double xm = 0.0, ym = 0.0;
    std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0) return 0.0;
    return sxy / sxx;
}

}  // namespace

std::array<double, 12> fit_monthly_temp_trend(const HistoricalArchive& archive) {
    if (archive.years.size() < 3)
        throw FitError("fit_monthly_temp_trend: need >= 3 archive years, got " +
                       std::to_string(archive.years.size()));
    std::array<double, 12> beta{};
    for (int m = 1; m <= 12; ++m) {
        std::vector<double> xs, ys;
        for (const auto& rec : archive.years) {
            int start = month_start_hour(rec.year, m);
            int len = hours_in_month(rec.year, m);
            double mean = 0.0;
            for (int h = start; h < start + len; ++h) mean += rec.temp_c[h];
            mean /= static_cast<double>(len);
            xs.push_back(static_cast<double>(rec.year));
            ys.push_back(mean);
        }
        beta[m - 1] = ols_slope(xs, ys);
    }
    return beta;
}

LoadTempRegression fit_load_temp_regression(const HistoricalArchive& archive) {
    std::vector<std::pair<double, double>> pts;  // (temp, load)
    for (const auto& rec : archive.years)
        for (std::size_t h = 0; h < rec.temp_c.size(); ++h)
            pts.emplace_back(rec.temp_c[h], rec.load_mw[h]);
    if (pts.size() < 1000)
        throw FitError("fit_load_temp_regression: need >= 1000 hourly pairs, got " +
                       std::to_string(pts.size()));
    std::sort(pts.begin(), pts.end());
    double tmin = pts.front().first, tmax = pts.back().first;
    if (tmax - tmin < 5.0)
        throw FitError("fit_load_temp_regression: temperature spread below 5 degC is degenerate");

    const std::size_t n = pts.size();
    // Prefix sums over the temperature-sorted points.
    std::vector<double> ct(n + 1, 0.0), ct2(n + 1, 0.0), cl(n + 1, 0.0), ctl(n + 1, 0.0),
        cl2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        ct[i + 1] = ct[i] + pts[i].first;
        ct2[i + 1] = ct2[i] + pts[i].first * pts[i].first;
        cl[i + 1] = cl[i] + pts[i].second;
        ctl[i + 1] = ctl[i] + pts[i].first * pts[i].second;
        cl2[i + 1] = cl2[i] + pts[i].second * pts[i].second;
    }

    double p5 = pts[static_cast<std::size_t>(0.05 * static_cast<double>(n - 1))].first;
    double p95 = pts[static_cast<std::size_t>(0.95 * static_cast<double>(n - 1))].first;
    double first_bp = std::ceil(p5 / 0.5) * 0.5;

    LoadTempRegression best;
    double best_sse = std::numeric_limits<double>::infinity();
    bool found = false;

    for (double bp = first_bp; bp <= p95 + 1e-12; bp += 0.5) {
        // Split: points with temp < bp go left.
        std::size_t s = static_cast<std::size_t>(
            std::lower_bound(pts.begin(), pts.end(), std::make_pair(bp, -1e300)) - pts.begin());
        double nl = static_cast<double>(s), nr = static_cast<double>(n - s);
        if (nl < 2 || nr < 2) continue;

        // Basis: [1, u, w], u = min(t-bp,0) (left side), w = max(t-bp,0).
        double su = ct[s] - nl * bp;
        double su2 = ct2[s] - 2.0 * bp * ct[s] + nl * bp * bp;
        double sw = (ct[n] - ct[s]) - nr * bp;
        double sw2 = (ct2[n] - ct2[s]) - 2.0 * bp * (ct[n] - ct[s]) + nr * bp * bp;
        double sl = cl[n];
        double sul = ctl[s] - bp * cl[s];
        double swl = (ctl[n] - ctl[s]) - bp * (cl[n] - cl[s]);

        // 3x3 normal equations; u and w have disjoint support.
        DenseMatrix m(3, 3);
        m.at(0, 0) = static_cast<double>(n);
        m.at(0, 1) = m.at(1, 0) = su;
        m.at(0, 2) = m.at(2, 0) = sw;
        m.at(1, 1) = su2;
        m.at(2, 2) = sw2;
        m.at(1, 2) = m.at(2, 1) = 0.0;
        std::vector<double> rhs{sl, sul, swl};
        std::vector<double> sol;
        try {
            DenseLu lu(std::move(m));
            sol = lu.solve(rhs);
        } catch (const StructureError&) {
            continue;  // zero-variance side at this candidate
        }
        double sse = cl2[n] - (sol[0] * sl + sol[1] * sul + sol[2] * swl);
        if (sse < best_sse) {
            best_sse = sse;
            best.breakpoint_c = bp;
            best.base_mw = sol[0];
            best.left_slope = sol[1];
            best.right_slope = sol[2];
            best.sse = std::max(0.0, sse);
            found = true;
        }
    }
    if (!found) throw FitError("fit_load_temp_regression: no viable breakpoint candidate");
    return best;
}

HurricaneModel fit_hurricane_model(const HistoricalArchive& archive) {
    HurricaneModel model;
    if (archive.years.empty()) return model;

    std::map<int, int> annual;
    for (int y = archive.year_first; y <= archive.year_last; ++y) annual[y] = 0;
    std::array<std::vector<double>, 12> durations;
    for (const auto& ev : archive.hurricanes) {
        if (annual.count(ev.year)) annual[ev.year] += 1;
        model.monthly_count[ev.month - 1] += 1.0;
        durations[ev.month - 1].push_back(ev.duration_hours);
    }
    std::vector<double> xs, ys;
    for (const auto& [y, c] : annual) {
        xs.push_back(static_cast<double>(y));
        ys.push_back(static_cast<double>(c));
    }
    model.beta_hurr = ols_slope(xs, ys);

    for (int m = 0; m < 12; ++m) {
        const auto& d = durations[m];
        if (d.empty()) continue;
        double mean = 0.0;
        for (double v : d) mean += v;
        mean /= static_cast<double>(d.size());
        model.duration_mean[m] = mean;
        if (d.size() >= 2) {
            double ss = 0.0;
            for (double v : d) ss += (v - mean) * (v - mean);
            model.duration_std[m] = std::sqrt(ss / static_cast<double>(d.size() - 1));
        }
    }
    return model;
}

TrendModel fit_trend_model(const HistoricalArchive& archive, double buffer_hours) {
    TrendModel trend;
    trend.beta_tau = fit_monthly_temp_trend(archive);
    trend.hurricane = fit_hurricane_model(archive);
    trend.buffer_hours = buffer_hours;
    trend.archive_years = static_cast<int>(archive.years.size());
    trend.load_regression = fit_load_temp_regression(archive);
    return trend;
}

std::vector<double> adjust_temperature(const std::vector<double>& sampled_temp_c,
                                       double beta_tau_month, int year_delta) {
    std::vector<double> out(sampled_temp_c.size());
    double shift = beta_tau_month * static_cast<double>(year_delta);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sampled_temp_c[i] + shift;
    return out;
}

DemandAdjustment adjust_demand(const std::vector<double>& sampled_demand_mw,
                               const std::vector<double>& sampled_temp_c,
                               const std::vector<double>& adjusted_temp_c,
                               const LoadTempRegression& regression) {
    if (sampled_demand_mw.size() != sampled_temp_c.size() ||
        sampled_temp_c.size() != adjusted_temp_c.size())
        throw InputError("adjust_demand: series length mismatch");
    DemandAdjustment out;
    out.demand_mw.resize(sampled_demand_mw.size());
    for (std::size_t i = 0; i < out.demand_mw.size(); ++i) {
        double delta = (adjusted_temp_c[i] == sampled_temp_c[i])
                           ? 0.0
                           : regression(adjusted_temp_c[i]) - regression(sampled_temp_c[i]);
        double d = sampled_demand_mw[i] + delta;
        if (d < 0.0) {
            d = 0.0;
            ++out.clamped_hours;
        }
        out.demand_mw[i] = d;
    }
    return out;
}

std::vector<std::uint8_t> sample_hurricane_flags(const TrendModel& trend, int month,
                                                 int source_year, int eval_year, int hours,
                                                 CounterRng& rng) {
    std::vector<std::uint8_t> flags(hours, 0);
    const auto& hm = trend.hurricane;
    double numer = hm.monthly_count[month - 1] +
                   static_cast<double>(eval_year - source_year) * hm.beta_hurr;
    double denom = static_cast<double>(trend.archive_years) * static_cast<double>(hours);
    double p = denom > 0.0 ? std::max(0.0, numer / denom) : 0.0;
    if (p <= 0.0) return flags;

    for (int t = 1; t <= hours; ++t) {
        if (!rng.bernoulli(p)) continue;
        double dur = std::max(0.0, rng.normal(hm.duration_mean[month - 1],
                                              hm.duration_std[month - 1])) +
                     trend.buffer_hours;
        int lo = static_cast<int>(std::ceil(static_cast<double>(t) - dur / 2.0));
        int hi = static_cast<int>(std::floor(static_cast<double>(t) + dur / 2.0));
        lo = std::max(lo, 1);
        hi = std::min(hi, hours);
        for (int h = lo; h <= hi; ++h) flags[h - 1] = 1;
    }
    return flags;
}

ScenarioSet sample_scenarios(const HistoricalArchive& archive, const TrendModel& trend,
                             int month, int eval_year, int count, std::uint64_t master_seed,
                             const SampleOptions& opts) {
    if (archive.years.empty()) throw InputError("sample_scenarios: empty archive");
    if (count < 1) throw InputError("sample_scenarios: count must be >= 1");

    ScenarioSet set;
    set.master_seed = master_seed;
    set.scenarios.resize(count);
    for (int i = 0; i < count; ++i) {
        CounterRng rng(master_seed, static_cast<std::uint64_t>(i));
        ScenarioProfile& sc = set.scenarios[i];
        sc.month = month;
        sc.eval_year = eval_year;
        sc.stream = static_cast<std::uint64_t>(i);

        int year = opts.force_source_year
                       ? *opts.force_source_year
                       : archive.year_first +
                             static_cast<int>(rng.uniform_int(
                                 0, static_cast<int>(archive.years.size()) - 1));
        int shift = opts.force_shift_days ? *opts.force_shift_days
                                          : static_cast<int>(rng.uniform_int(0, 12));
        sc.source_year = year;
        sc.shift_days = shift;

        const ArchiveYear& rec = archive.year_record(year);
        int start = month_start_hour(year, month);
        int len = hours_in_month(year, month);
        int year_hours = hours_in_year(year);

        std::vector<double> temp_samp(rec.temp_c.begin() + start,
                                      rec.temp_c.begin() + start + len);
        sc.insolation_wm2.assign(rec.insolation_wm2.begin() + start,
                                 rec.insolation_wm2.begin() + start + len);
        sc.wind_ms.resize(archive.wind_site_count);
        for (std::size_t s = 0; s < archive.wind_site_count; ++s)
            sc.wind_ms[s].assign(rec.wind_ms[s].begin() + start,
                                 rec.wind_ms[s].begin() + start + len);

        // Weekday alignment: load shifted circularly within its year, weather untouched.
        std::vector<double> load_samp(len);
        for (int h = 0; h < len; ++h)
            load_samp[h] = rec.load_mw[(start + h + 24 * shift) % year_hours];

        sc.temp_c = adjust_temperature(temp_samp, trend.beta_tau[month - 1], eval_year - year);
        sc.hurricane = sample_hurricane_flags(trend, month, year, eval_year, len, rng);
        auto adj = adjust_demand(load_samp, temp_samp, sc.temp_c, trend.load_regression);
        sc.demand_mw = std::move(adj.demand_mw);
        sc.demand_clamped_hours = adj.clamped_hours;
    }
    return set;
}

void save_trend_model(const TrendModel& trend, const std::string& path) {
    json j;
    j["beta_tau"] = trend.beta_tau;
    j["beta_hurr"] = trend.hurricane.beta_hurr;
    j["monthly_count"] = trend.hurricane.monthly_count;
    j["duration_mean"] = trend.hurricane.duration_mean;
    j["duration_std"] = trend.hurricane.duration_std;
    j["buffer_hours"] = trend.buffer_hours;
    j["archive_years"] = trend.archive_years;
    j["load_regression"] = {{"breakpoint_c", trend.load_regression.breakpoint_c},
                            {"left_slope", trend.load_regression.left_slope},
                            {"right_slope", trend.load_regression.right_slope},
                            {"base_mw", trend.load_regression.base_mw},
                            {"sse", trend.load_regression.sse}};
    std::ofstream out(path);
    if (!out) throw InputError("cannot write trend model: " + path);
    out << j.dump(2) << '\n';
}

TrendModel load_trend_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open trend model: " + path);
    json j;
    try {
        in >> j;
        TrendModel trend;
        for (std::size_t i = 0; i < 12; ++i) {
            trend.beta_tau[i] = j.at("beta_tau").at(i).get<double>();
            trend.hurricane.monthly_count[i] = j.at("monthly_count").at(i).get<double>();
            trend.hurricane.duration_mean[i] = j.at("duration_mean").at(i).get<double>();
            trend.hurricane.duration_std[i] = j.at("duration_std").at(i).get<double>();
        }
        trend.hurricane.beta_hurr = j.at("beta_hurr").get<double>();
        trend.buffer_hours = j.at("buffer_hours").get<double>();
        trend.archive_years = j.at("archive_years").get<int>();
        const auto& lr = j.at("load_regression");
        trend.load_regression.breakpoint_c = lr.at("breakpoint_c").get<double>();
        trend.load_regression.left_slope = lr.at("left_slope").get<double>();
        trend.load_regression.right_slope = lr.at("right_slope").get<double>();
        trend.load_regression.base_mw = lr.at("base_mw").get<double>();
        trend.load_regression.sse = lr.at("sse").get<double>();
        return trend;
    } catch (const json::exception& e) {
        throw IngestError("trend model " + path + ": " + e.what());
    }
}

}  // namespace gridcred
