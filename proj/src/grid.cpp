#include "gridcred/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gridcred {

using nlohmann::json;

std::size_t PowerSystem::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == bus_id) return i;
    return static_cast<std::size_t>(-1);
}

double PowerSystem::peak_capable_demand() const {
    double total = 0.0;
    for (const auto& g : thermal) total += g.g_max;
    return total;
}

std::vector<double> PtdfMatrix::flows(const std::vector<double>& injections) const {
    std::vector<double> out(line_count(), 0.0);
    for (std::size_t l = 0; l < line_count(); ++l) {
        double f = 0.0;
        for (std::size_t n = 0; n < bus_count(); ++n) f += at(l, n) * injections[n];
        out[l] = f;
    }
    return out;
}

namespace {

// Buses reachable from the slack through the line set.
std::vector<bool> reachable_from_slack(const PowerSystem& sys) {
    const std::size_t nb = sys.buses.size();
    std::vector<std::vector<std::size_t>> adj(nb);
    for (const auto& ln : sys.lines) {
        std::size_t a = sys.bus_index(ln.from_bus);
        std::size_t b = sys.bus_index(ln.to_bus);
        if (a >= nb || b >= nb) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(nb, false);
    std::size_t s = sys.bus_index(sys.slack_bus);
    if (s >= nb) return seen;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty()) {
        std::size_t v = q.front();
        q.pop();
        for (std::size_t w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                q.push(w);
            }
    }
    return seen;
}

}  // namespace

PtdfMatrix build_ptdf(const PowerSystem& sys) {
    const std::size_t nb = sys.buses.size();
    const std::size_t nl = sys.lines.size();
    if (nb == 0) throw InputError("build_ptdf: system has no buses");
    std::size_t slack = sys.bus_index(sys.slack_bus);
    if (slack >= nb)
        throw InputError("build_ptdf: slack bus " + std::to_string(sys.slack_bus) +
                         " not present in bus list");
    for (const auto& ln : sys.lines)
        if (!(ln.reactance > 0.0))
            throw InputError("build_ptdf: line " + std::to_string(ln.id) +
                             " has nonpositive reactance");

    auto seen = reachable_from_slack(sys);
    std::vector<int> isolated;
    for (std::size_t i = 0; i < nb; ++i)
        if (!seen[i]) isolated.push_back(sys.buses[i].id);
    if (!isolated.empty()) {
        std::ostringstream os;
        os << "build_ptdf: network disconnected; buses isolated from slack:";
        for (int b : isolated) os << ' ' << b;
        throw StructureError(os.str());
    }

    // Reduced susceptance matrix over non-slack buses.
    std::vector<std::size_t> red_index(nb, static_cast<std::size_t>(-1));
    std::size_t k = 0;
    for (std::size_t i = 0; i < nb; ++i)
        if (i != slack) red_index[i] = k++;
    const std::size_t nr = nb - 1;

    PtdfMatrix ptdf(nl, nb);
    if (nr == 0) return ptdf;  // single-bus system: all PTDF zero

    DenseMatrix b(nr, nr);
    for (const auto& ln : sys.lines) {
        std::size_t i = sys.bus_index(ln.from_bus);
        std::size_t j = sys.bus_index(ln.to_bus);
        double y = 1.0 / ln.reactance;
        if (i != slack) b.at(red_index[i], red_index[i]) += y;
        if (j != slack) b.at(red_index[j], red_index[j]) += y;
        if (i != slack && j != slack) {
            b.at(red_index[i], red_index[j]) -= y;
            b.at(red_index[j], red_index[i]) -= y;
        }
    }
    DenseLu lu(std::move(b));

    // One solve per line: row l of the PTDF is (e_i - e_j)^T B^-1 / x_l
    // restricted to non-slack columns (B is symmetric).
    for (std::size_t l = 0; l < nl; ++l) {
        const auto& ln = sys.lines[l];
        std::size_t i = sys.bus_index(ln.from_bus);
        std::size_t j = sys.bus_index(ln.to_bus);
        std::vector<double> rhs(nr, 0.0);
        if (i != slack) rhs[red_index[i]] += 1.0 / ln.reactance;
        if (j != slack) rhs[red_index[j]] -= 1.0 / ln.reactance;
        std::vector<double> col = lu.solve(rhs);
        for (std::size_t nbi = 0; nbi < nb; ++nbi)
            ptdf.at(l, nbi) = (nbi == slack) ? 0.0 : col[red_index[nbi]];
    }
    return ptdf;
}

double line_rating(const TransmissionLine& line, double air_temp_c) {
    for (const auto& band : line.aar_table)
        if (air_temp_c <= band.temp_upper_c) return line.capacity * band.coeff;
    // Invariant guarantees the last band covers +inf; fall back to it anyway.
    return line.aar_table.empty() ? line.capacity
                                  : line.capacity * line.aar_table.back().coeff;
}

std::vector<std::string> validate_system(const PowerSystem& sys) {
    std::vector<std::string> out;
    auto fail = [&out](const std::string& msg) { out.push_back(msg); };

    std::set<int> bus_ids;
    double wsum = 0.0;
    for (const auto& b : sys.buses) {
        if (!bus_ids.insert(b.id).second)
            fail("bus " + std::to_string(b.id) + ": duplicate id");
        if (b.load_weight < 0.0)
            fail("bus " + std::to_string(b.id) + ": load_weight negative");
        wsum += b.load_weight;
    }
    if (!sys.buses.empty() && std::fabs(wsum - 1.0) > 1e-9)
        fail("buses: load weights sum to " + std::to_string(wsum) + ", expected 1 within 1e-9");
    if (bus_ids.count(sys.slack_bus) == 0)
        fail("slack_bus " + std::to_string(sys.slack_bus) + ": not a bus id");

    std::set<int> line_ids;
    for (const auto& ln : sys.lines) {
        std::string tag = "line " + std::to_string(ln.id);
        if (!line_ids.insert(ln.id).second) fail(tag + ": duplicate id");
        if (ln.from_bus == ln.to_bus) fail(tag + ": from_bus equals to_bus");
        if (bus_ids.count(ln.from_bus) == 0) fail(tag + ": from_bus not a bus id");
        if (bus_ids.count(ln.to_bus) == 0) fail(tag + ": to_bus not a bus id");
        if (!(ln.reactance > 0.0)) fail(tag + ": reactance must be > 0");
        if (!(ln.capacity > 0.0)) fail(tag + ": capacity must be > 0");
        if (ln.aar_table.empty()) {
            fail(tag + ": aar_table empty");
        } else {
            double prev = -std::numeric_limits<double>::infinity();
            for (const auto& band : ln.aar_table) {
                if (!(band.coeff > 0.0 && band.coeff <= 1.5))
                    fail(tag + ": aar coefficient outside (0, 1.5]");
                if (!(band.temp_upper_c > prev))
                    fail(tag + ": aar temperature bounds not strictly increasing");
                prev = band.temp_upper_c;
            }
            if (!std::isinf(ln.aar_table.back().temp_upper_c))
                fail(tag + ": last aar band must cover +inf");
        }
    }

    auto check_bus_ref = [&](const std::string& tag, int bus) {
        if (bus_ids.count(bus) == 0) fail(tag + ": bus not a bus id");
    };

    std::set<int> gen_ids;
    for (const auto& g : sys.thermal) {
        std::string tag = "thermal " + std::to_string(g.id);
        if (!gen_ids.insert(g.id).second) fail(tag + ": duplicate id");
        check_bus_ref(tag, g.bus);
        if (!(g.g_min >= 0.0 && g.g_min <= g.g_max))
            fail(tag + ": requires 0 <= g_min <= g_max");
        if (g.min_up_time < 1 || g.min_down_time < 1)
            fail(tag + ": min up/down times must be >= 1 hour");
        if (g.cost_curve.empty()) {
            fail(tag + ": cost_curve empty");
        } else {
            double prev_bp = 0.0, prev_slope = -std::numeric_limits<double>::infinity();
            for (const auto& blk : g.cost_curve) {
                if (!(blk.mw_breakpoint > prev_bp))
                    fail(tag + ": cost_curve breakpoints not increasing");
                if (blk.usd_per_mwh < prev_slope)
                    fail(tag + ": cost_curve slopes decreasing (not convex)");
                prev_bp = blk.mw_breakpoint;
                prev_slope = blk.usd_per_mwh;
            }
            if (g.cost_curve.back().mw_breakpoint < g.g_max - 1e-9)
                fail(tag + ": cost_curve does not cover g_max");
        }
    }

    std::set<int> solar_ids;
    for (const auto& s : sys.solar) {
        std::string tag = "solar " + std::to_string(s.id);
        if (!solar_ids.insert(s.id).second) fail(tag + ": duplicate id");
        check_bus_ref(tag, s.bus);
        if (!(s.nominal_power > 0.0)) fail(tag + ": nominal_power must be > 0");
        if (!(s.efficiency > 0.0 && s.efficiency <= 1.0))
            fail(tag + ": efficiency must be in (0, 1]");
        if (s.temp_coeff < 0.0) fail(tag + ": temp_coeff must be >= 0");
    }

    std::set<int> wind_ids;
    for (const auto& w : sys.wind) {
        std::string tag = "wind " + std::to_string(w.id);
        if (!wind_ids.insert(w.id).second) fail(tag + ": duplicate id");
        check_bus_ref(tag, w.bus);
        if (!(w.nominal_power > 0.0)) fail(tag + ": nominal_power must be > 0");
        if (!(w.cut_in > 0.0 && w.cut_in < w.rated && w.rated < w.cut_out))
            fail(tag + ": requires 0 < cut_in < rated < cut_out");
        if (!(w.efficiency > 0.0 && w.efficiency <= 1.0))
            fail(tag + ": efficiency must be in (0, 1]");
        if (w.wind_site < 0) fail(tag + ": wind_site must be >= 0");
    }

    std::set<int> storage_ids;
    for (const auto& b : sys.storage) {
        std::string tag = "storage " + std::to_string(b.id);
        if (!storage_ids.insert(b.id).second) fail(tag + ": duplicate id");
        check_bus_ref(tag, b.bus);
        if (!(b.energy_capacity > 0.0)) fail(tag + ": energy_capacity must be > 0");
        if (!(b.soc_min >= 0.0 && b.soc_min < b.soc_max && b.soc_max <= 1.0))
            fail(tag + ": requires 0 <= soc_min < soc_max <= 1");
        if (!(b.eta_ch > 0.0 && b.eta_ch <= 1.0) || !(b.eta_dis > 0.0 && b.eta_dis <= 1.0))
            fail(tag + ": efficiencies must be in (0, 1]");
        if (!(b.ch_max > 0.0) || !(b.dis_max > 0.0))
            fail(tag + ": charge/discharge limits must be > 0");
        if (b.initial_soc < b.soc_min - 1e-12 || b.initial_soc > b.soc_max + 1e-12)
            fail(tag + ": initial_soc outside [soc_min, soc_max]");
    }

    if (bus_ids.count(sys.slack_bus) > 0 && !sys.lines.empty()) {
        auto seen = reachable_from_slack(sys);
        for (std::size_t i = 0; i < sys.buses.size(); ++i)
            if (!seen[i])
                fail("bus " + std::to_string(sys.buses[i].id) +
                     ": disconnected from slack (network must be a single component)");
    } else if (sys.buses.size() > 1 && sys.lines.empty()) {
        fail("network: more than one bus but no lines");
    }
    return out;
}

namespace {

double json_temp_bound(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::infinity();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf" || s == "+inf" || s == "infinity")
            return std::numeric_limits<double>::infinity();
        throw IngestError("aar_table: unrecognized temperature bound '" + s + "'");
    }
    return v.get<double>();
}

json temp_bound_json(double v) {
    if (std::isinf(v)) return json(nullptr);
    return json(v);
}

}  // namespace

PowerSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open system file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IngestError("system file " + path + ": " + e.what());
    }

    PowerSystem sys;
    try {
        for (const auto& jb : j.at("buses"))
            sys.buses.push_back({jb.at("id").get<int>(), jb.at("load_weight").get<double>()});
        for (const auto& jl : j.at("lines")) {
            TransmissionLine ln;
            ln.id = jl.at("id").get<int>();
            ln.from_bus = jl.at("from_bus").get<int>();
            ln.to_bus = jl.at("to_bus").get<int>();
            ln.reactance = jl.at("reactance").get<double>();
            ln.capacity = jl.at("capacity").get<double>();
            for (const auto& band : jl.at("aar_table"))
                ln.aar_table.push_back({json_temp_bound(band.at(0)), band.at(1).get<double>()});
            sys.lines.push_back(std::move(ln));
        }
        for (const auto& jg : j.at("thermal")) {
            ThermalGenerator g;
            g.id = jg.at("id").get<int>();
            g.bus = jg.at("bus").get<int>();
            g.g_min = jg.at("g_min").get<double>();
            g.g_max = jg.at("g_max").get<double>();
            g.min_up_time = jg.at("min_up_time").get<int>();
            g.min_down_time = jg.at("min_down_time").get<int>();
            g.start_cost = jg.at("start_cost").get<double>();
            g.stop_cost = jg.at("stop_cost").get<double>();
            for (const auto& blk : jg.at("cost_curve"))
                g.cost_curve.push_back({blk.at(0).get<double>(), blk.at(1).get<double>()});
            auto poly = jg.at("for_poly");
            for (std::size_t i = 0; i < 5; ++i) g.for_poly[i] = poly.at(i).get<double>();
            sys.thermal.push_back(std::move(g));
        }
        for (const auto& js : j.at("solar")) {
            SolarFarm s;
            s.id = js.at("id").get<int>();
            s.bus = js.at("bus").get<int>();
            s.nominal_power = js.at("nominal_power").get<double>();
            s.noct = js.at("noct").get<double>();
            s.temp_coeff = js.at("temp_coeff").get<double>();
            s.efficiency = js.at("efficiency").get<double>();
            s.cost = js.at("cost").get<double>();
            sys.solar.push_back(s);
        }
        for (const auto& jw : j.at("wind")) {
            WindFarm w;
            w.id = jw.at("id").get<int>();
            w.bus = jw.at("bus").get<int>();
            w.nominal_power = jw.at("nominal_power").get<double>();
            w.efficiency = jw.at("efficiency").get<double>();
            w.cut_in = jw.at("cut_in").get<double>();
            w.rated = jw.at("rated").get<double>();
            w.cut_out = jw.at("cut_out").get<double>();
            w.c3 = jw.at("c3").get<double>();
            w.c2 = jw.at("c2").get<double>();
            w.c1 = jw.at("c1").get<double>();
            w.c0 = jw.at("c0").get<double>();
            w.cost = jw.at("cost").get<double>();
            w.hurricane_exposed = jw.at("hurricane_exposed").get<bool>();
            w.wind_site = jw.value("wind_site", 0);
            sys.wind.push_back(w);
        }
        for (const auto& jb : j.at("storage")) {
            StorageUnit b;
            b.id = jb.at("id").get<int>();
            b.bus = jb.at("bus").get<int>();
            b.energy_capacity = jb.at("energy_capacity").get<double>();
            b.ch_max = jb.at("ch_max").get<double>();
            b.dis_max = jb.at("dis_max").get<double>();
            b.soc_min = jb.at("soc_min").get<double>();
            b.soc_max = jb.at("soc_max").get<double>();
            b.eta_ch = jb.at("eta_ch").get<double>();
            b.eta_dis = jb.at("eta_dis").get<double>();
            b.cost = jb.at("cost").get<double>();
            b.initial_soc = jb.at("initial_soc").get<double>();
            sys.storage.push_back(b);
        }
        sys.slack_bus = j.at("slack_bus").get<int>();
    } catch (const json::exception& e) {
        throw IngestError("system file " + path + ": " + e.what());
    }
    return sys;
}

void save_system(const PowerSystem& sys, const std::string& path) {
    json j;
    j["buses"] = json::array();
    for (const auto& b : sys.buses)
        j["buses"].push_back({{"id", b.id}, {"load_weight", b.load_weight}});
    j["lines"] = json::array();
    for (const auto& ln : sys.lines) {
        json bands = json::array();
        for (const auto& band : ln.aar_table)
            bands.push_back({temp_bound_json(band.temp_upper_c), band.coeff});
        j["lines"].push_back({{"id", ln.id},
                              {"from_bus", ln.from_bus},
                              {"to_bus", ln.to_bus},
                              {"reactance", ln.reactance},
                              {"capacity", ln.capacity},
                              {"aar_table", bands}});
    }
    j["thermal"] = json::array();
    for (const auto& g : sys.thermal) {
        json curve = json::array();
        for (const auto& blk : g.cost_curve) curve.push_back({blk.mw_breakpoint, blk.usd_per_mwh});
        j["thermal"].push_back({{"id", g.id},
                                {"bus", g.bus},
                                {"g_min", g.g_min},
                                {"g_max", g.g_max},
                                {"min_up_time", g.min_up_time},
                                {"min_down_time", g.min_down_time},
                                {"start_cost", g.start_cost},
                                {"stop_cost", g.stop_cost},
                                {"cost_curve", curve},
                                {"for_poly", g.for_poly}});
    }
    j["solar"] = json::array();
    for (const auto& s : sys.solar)
        j["solar"].push_back({{"id", s.id},
                              {"bus", s.bus},
                              {"nominal_power", s.nominal_power},
                              {"noct", s.noct},
                              {"temp_coeff", s.temp_coeff},
                              {"efficiency", s.efficiency},
                              {"cost", s.cost}});
    j["wind"] = json::array();
    for (const auto& w : sys.wind)
        j["wind"].push_back({{"id", w.id},
                             {"bus", w.bus},
                             {"nominal_power", w.nominal_power},
                             {"efficiency", w.efficiency},
                             {"cut_in", w.cut_in},
                             {"rated", w.rated},
                             {"cut_out", w.cut_out},
                             {"c3", w.c3},
                             {"c2", w.c2},
                             {"c1", w.c1},
                             {"c0", w.c0},
                             {"cost", w.cost},
                             {"hurricane_exposed", w.hurricane_exposed},
                             {"wind_site", w.wind_site}});
    j["storage"] = json::array();
    for (const auto& b : sys.storage)
        j["storage"].push_back({{"id", b.id},
                                {"bus", b.bus},
                                {"energy_capacity", b.energy_capacity},
                                {"ch_max", b.ch_max},
                                {"dis_max", b.dis_max},
                                {"soc_min", b.soc_min},
                                {"soc_max", b.soc_max},
                                {"eta_ch", b.eta_ch},
                                {"eta_dis", b.eta_dis},
                                {"cost", b.cost},
                                {"initial_soc", b.initial_soc}});
    j["slack_bus"] = sys.slack_bus;

    std::ofstream out(path);
    if (!out) throw InputError("cannot write system file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace gridcred
