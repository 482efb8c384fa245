#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gridcred/milp.hpp"

namespace gridcred {

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_terms(std::ostream& os, const std::vector<std::pair<int, double>>& terms,
                 const std::vector<MilpVar>& vars) {
    bool first = true;
    for (const auto& [j, c] : terms) {
        if (c >= 0.0)
            os << (first ? "" : " + ") << fmt_num(c);
        else
            os << (first ? "- " : " - ") << fmt_num(-c);
        os << ' ' << vars[j].name;
        first = false;
    }
    if (first) os << "0 " << vars[0].name;  // LP format needs at least one term
}

}  // namespace

void export_model(const MilpModel& model, const std::string& path) {
    model.validate();
    if (model.var_count() == 0) throw InputError("export_model: model has no variables");
    std::set<std::string> names;
    for (const auto& v : model.vars())
        if (!names.insert(v.name).second)
            throw InputError("export_model: duplicate variable name '" + v.name + "'");
    names.clear();
    for (const auto& r : model.rows())
        if (!names.insert(r.name).second)
            throw InputError("export_model: duplicate row name '" + r.name + "'");

    std::ofstream os(path);
    if (!os) throw InputError("export_model: cannot write " + path);

    os << "Minimize\n obj:";
    bool any = false;
    for (std::size_t j = 0; j < model.var_count(); ++j) {
        double c = model.objective()[j];
        if (c == 0.0) continue;
        if (c >= 0.0)
            os << (any ? " + " : " ") << fmt_num(c);
        else
            os << (any ? " - " : " - ") << fmt_num(-c);
        os << ' ' << model.vars()[j].name;
        any = true;
    }
    if (!any) os << " 0 " << model.vars()[0].name;
    os << "\nSubject To\n";
    for (const auto& r : model.rows()) {
        os << ' ' << r.name << ": ";
        write_terms(os, r.terms, model.vars());
        switch (r.sense) {
            case RowSense::LessEqual: os << " <= "; break;
            case RowSense::Equal: os << " = "; break;
            case RowSense::GreaterEqual: os << " >= "; break;
        }
        os << fmt_num(r.rhs) << '\n';
    }
    os << "Bounds\n";
    for (const auto& v : model.vars()) {
        if (std::isinf(v.lb) && std::isinf(v.ub))
            os << ' ' << v.name << " free\n";
        else if (std::isinf(v.lb))
            os << " -inf <= " << v.name << " <= " << fmt_num(v.ub) << '\n';
        else if (std::isinf(v.ub))
            os << ' ' << fmt_num(v.lb) << " <= " << v.name << '\n';
        else
            os << ' ' << fmt_num(v.lb) << " <= " << v.name << " <= " << fmt_num(v.ub) << '\n';
    }
    bool has_bin = false;
    for (const auto& v : model.vars()) has_bin |= v.is_binary;
    if (has_bin) {
        os << "Binaries\n";
        for (const auto& v : model.vars())
            if (v.is_binary) os << ' ' << v.name << '\n';
    }
    os << "End\n";
}

namespace {

struct Token {
    std::string text;
};

std::vector<std::string> tokenize(std::istream& in) {
    std::vector<std::string> toks;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t bs = line.find('\\');
        if (bs != std::string::npos) line.resize(bs);  // strip comments
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) {
                toks.push_back(cur);
                cur.clear();
            }
        };
        for (std::size_t i = 0; i < line.size(); ++i) {
            char c = line[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                flush();
            } else if (c == ':') {
                cur += ':';
                flush();
            } else if (c == '+' || c == '-') {
                // sign may glue to a number (e.g. -3.5) but stands alone between terms
                if (!cur.empty()) flush();
                cur += c;
                if (i + 1 < line.size() &&
                    !std::isspace(static_cast<unsigned char>(line[i + 1]))) {
                    continue;  // keep accumulating into the same token
                }
                flush();
            } else if (c == '<' || c == '>' || c == '=') {
                if (!cur.empty() && cur.back() != '<' && cur.back() != '>' && cur.back() != '=')
                    flush();
                cur += c;
                bool next_is_rel = i + 1 < line.size() && (line[i + 1] == '=');
                if (!next_is_rel) flush();
            } else {
                if (!cur.empty() && (cur.back() == '<' || cur.back() == '>' || cur.back() == '='))
                    flush();
                cur += c;
            }
        }
        flush();
    }
    return toks;
}

bool is_number(const std::string& s, double* out) {
    if (s.empty()) return false;
    if (s == "-inf" || s == "-infinity") {
        *out = -kInf;
        return true;
    }
    if (s == "+inf" || s == "inf" || s == "infinity") {
        *out = kInf;
        return true;
    }
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

MilpModel import_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("import_model: cannot open " + path);
    auto toks = tokenize(in);

    enum Section { None, Objective, Constraints, Bounds, Binaries, Done };
    Section sec = None;

    std::unordered_map<std::string, int> var_index;
    MilpModel model;
    auto ensure_var = [&](const std::string& name) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        int idx = model.add_var(name, 0.0, kInf, false, 0.0);
        var_index.emplace(name, idx);
        return idx;
    };

    // Register variables in Bounds-section order first: our exporter writes a
    // bound line for every variable in declaration order, which keeps import
    // followed by re-export byte-identical. Files without a full Bounds
    // section fall back to first-appearance order.
    {
        bool in_bounds = false;
        for (std::size_t t = 0; t < toks.size(); ++t) {
            std::string w = lower(toks[t]);
            if (w == "bounds") {
                in_bounds = true;
                continue;
            }
            if (w == "binaries" || w == "binary" || w == "bin" || w == "end" ||
                w == "subject" || w == "st" || w == "minimize" || w == "min") {
                in_bounds = false;
                continue;
            }
            if (!in_bounds) continue;
            double dummy;
            if (toks[t] == "<=" || toks[t] == ">=" || toks[t] == "=" || w == "free" ||
                is_number(toks[t], &dummy))
                continue;
            ensure_var(toks[t]);
        }
    }

    std::size_t i = 0;
    auto section_of = [&](const std::string& t, std::size_t* skip) -> Section {
        std::string w = lower(t);
        *skip = 1;
        if (w == "minimize" || w == "min") return Objective;
        if (w == "subject") {
            *skip = 2;  // "subject to"
            return Constraints;
        }
        if (w == "st" || w == "s.t.") return Constraints;
        if (w == "bounds") return Bounds;
        if (w == "binaries" || w == "binary" || w == "bin") return Binaries;
        if (w == "end") return Done;
        return None;
    };

    // terms: sign/coeff/name triples until a relation or section keyword
    auto parse_terms = [&](std::vector<std::pair<int, double>>* terms, double* rhs,
                           RowSense* sense) {
        double sign = 1.0;
        bool have_coeff = false;
        double coeff = 1.0;
        while (i < toks.size()) {
            const std::string& t = toks[i];
            std::size_t skip = 0;
            if (section_of(t, &skip) != None && !have_coeff) return false;  // section break
            if (t == "+") {
                sign = 1.0;
                ++i;
                continue;
            }
            if (t == "-") {
                sign = -1.0;
                ++i;
                continue;
            }
            if (t == "<=" || t == "<") {
                *sense = RowSense::LessEqual;
                ++i;
                double v = 0.0;
                if (i >= toks.size() || !is_number(toks[i], &v))
                    throw IngestError("import_model: missing rhs in " + path);
                *rhs = v;
                ++i;
                return true;
            }
            if (t == ">=" || t == ">") {
                *sense = RowSense::GreaterEqual;
                ++i;
                double v = 0.0;
                if (i >= toks.size() || !is_number(toks[i], &v))
                    throw IngestError("import_model: missing rhs in " + path);
                *rhs = v;
                ++i;
                return true;
            }
            if (t == "=") {
                *sense = RowSense::Equal;
                ++i;
                double v = 0.0;
                if (i >= toks.size() || !is_number(toks[i], &v))
                    throw IngestError("import_model: missing rhs in " + path);
                *rhs = v;
                ++i;
                return true;
            }
            double num = 0.0;
            if (is_number(t, &num)) {
                coeff = sign * num;
                have_coeff = true;
                sign = 1.0;
                ++i;
                continue;
            }
            // names cannot start with a digit, so a numeric prefix glued to
            // a name ("2x") is a coefficient
            const char* cstr = t.c_str();
            char* endp = nullptr;
            double glued = std::strtod(cstr, &endp);
            if (endp != cstr && *endp != '\0') {
                int j = ensure_var(std::string(endp));
                terms->emplace_back(j, (have_coeff ? coeff : sign) * glued);
            } else {
                int j = ensure_var(t);
                terms->emplace_back(j, have_coeff ? coeff : sign);
            }
            have_coeff = false;
            sign = 1.0;
            coeff = 1.0;
            ++i;
        }
        return false;
    };

    std::vector<std::pair<int, double>> obj_terms;
    while (i < toks.size()) {
        std::size_t skip = 0;
        Section s = section_of(toks[i], &skip);
        if (s != None) {
            sec = s;
            i += skip;
            if (sec == Done) break;
            continue;
        }
        if (sec == Objective) {
            std::string label;
            if (!toks[i].empty() && toks[i].back() == ':') {
                label = toks[i].substr(0, toks[i].size() - 1);
                ++i;
            }
            double rhs = 0.0;
            RowSense sense = RowSense::LessEqual;
            parse_terms(&obj_terms, &rhs, &sense);
        } else if (sec == Constraints) {
            std::string label = "c" + std::to_string(model.row_count());
            if (!toks[i].empty() && toks[i].back() == ':') {
                label = toks[i].substr(0, toks[i].size() - 1);
                ++i;
            }
            std::vector<std::pair<int, double>> terms;
            double rhs = 0.0;
            RowSense sense = RowSense::LessEqual;
            if (!parse_terms(&terms, &rhs, &sense))
                throw IngestError("import_model: constraint '" + label + "' has no relation");
            model.add_row(label, std::move(terms), sense, rhs);
        } else if (sec == Bounds) {
            // forms: "lb <= x <= ub", "-inf <= x <= ub", "lb <= x", "x <= ub", "x free"
            double first_num = 0.0;
            if (is_number(toks[i], &first_num)) {
                if (i + 1 >= toks.size() || toks[i + 1] != "<=")
                    throw IngestError("import_model: malformed bound near '" + toks[i] + "'");
                std::string name = toks[i + 2];
                int j = ensure_var(name);
                auto v = model.vars()[j];
                v.lb = first_num;
                i += 3;
                if (i + 1 < toks.size() && toks[i] == "<=") {
                    double ub = 0.0;
                    if (!is_number(toks[i + 1], &ub))
                        throw IngestError("import_model: malformed upper bound for " + name);
                    v.ub = ub;
                    i += 2;
                }
                const_cast<MilpVar&>(model.vars()[j]) = v;
            } else {
                std::string name = toks[i];
                int j = ensure_var(name);
                auto v = model.vars()[j];
                ++i;
                if (i < toks.size() && lower(toks[i]) == "free") {
                    v.lb = -kInf;
                    v.ub = kInf;
                    ++i;
                } else if (i + 1 < toks.size() && toks[i] == "<=") {
                    double ub = 0.0;
                    if (!is_number(toks[i + 1], &ub))
                        throw IngestError("import_model: malformed upper bound for " + name);
                    v.ub = ub;
                    i += 2;
                } else if (i + 1 < toks.size() && toks[i] == ">=") {
                    double lb = 0.0;
                    if (!is_number(toks[i + 1], &lb))
                        throw IngestError("import_model: malformed lower bound for " + name);
                    v.lb = lb;
                    i += 2;
                } else {
                    throw IngestError("import_model: malformed bound line for " + name);
                }
                const_cast<MilpVar&>(model.vars()[j]) = v;
            }
        } else if (sec == Binaries) {
            int j = ensure_var(toks[i]);
            auto& v = const_cast<MilpVar&>(model.vars()[j]);
            v.is_binary = true;
            if (std::isinf(v.ub)) v.ub = 1.0;
            v.lb = std::max(v.lb, 0.0);
            v.ub = std::min(v.ub, 1.0);
            ++i;
        } else {
            throw IngestError("import_model: unexpected token '" + toks[i] + "' outside sections");
        }
    }

    for (const auto& [j, c] : obj_terms) model.set_objective(j, c);
    model.validate();
    return model;
}

std::vector<double> import_solution(const MilpModel& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("import_solution: cannot open " + path);
    std::unordered_map<std::string, int> var_index;
    for (std::size_t j = 0; j < model.var_count(); ++j)
        var_index.emplace(model.vars()[j].name, static_cast<int>(j));

    std::vector<double> x(model.var_count(), 0.0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw IngestError(path + ":" + std::to_string(lineno) + ": expected 'name,value'");
        std::string name = line.substr(0, comma);
        std::string val = line.substr(comma + 1);
        if (lineno == 1 && name == "variable_name") continue;  // header
        auto it = var_index.find(name);
        if (it == var_index.end())
            throw IngestError(path + ":" + std::to_string(lineno) + ": unknown variable '" +
                              name + "'");
        try {
            x[it->second] = std::stod(val);
        } catch (const std::exception&) {
            throw IngestError(path + ":" + std::to_string(lineno) + ": bad value '" + val + "'");
        }
    }
    return x;
}

}  // namespace gridcred
