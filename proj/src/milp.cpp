#include "gridcred/milp.hpp"

#include <cmath>

namespace gridcred {

int MilpModel::add_var(const std::string& name, double lb, double ub, bool is_binary,
                       double objective, int branch_priority) {
    MilpVar v;
    v.name = name;
    v.lb = lb;
    v.ub = ub;
    v.is_binary = is_binary;
    v.branch_priority = branch_priority;
    vars_.push_back(std::move(v));
    obj_.push_back(objective);
    return static_cast<int>(vars_.size()) - 1;
}

int MilpModel::add_row(const std::string& name, std::vector<std::pair<int, double>> terms,
                       RowSense sense, double rhs) {
    MilpRow r;
    r.name = name;
    r.terms = std::move(terms);
    r.sense = sense;
    r.rhs = rhs;
    rows_.push_back(std::move(r));
    return static_cast<int>(rows_.size()) - 1;
}

void MilpModel::validate() const {
    const int n = static_cast<int>(vars_.size());
    for (const auto& v : vars_) {
        if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub)
            throw InputError("variable " + v.name + ": invalid bounds");
        if (v.is_binary && (v.lb < 0.0 || v.ub > 1.0))
            throw InputError("variable " + v.name + ": binary bounds must lie in [0,1]");
    }
    std::vector<int> last_row_touch(vars_.size(), -1);
    int row_idx = 0;
    for (const auto& r : rows_) {
        for (const auto& [j, c] : r.terms) {
            if (j < 0 || j >= n)
                throw InputError("row " + r.name + ": references undeclared variable index " +
                                 std::to_string(j));
            if (last_row_touch[j] == row_idx)
                throw InputError("row " + r.name + ": variable " + vars_[j].name +
                                 " appears twice");
            last_row_touch[j] = row_idx;
            if (std::isnan(c) || std::isinf(c))
                throw InputError("row " + r.name + ": non-finite coefficient");
        }
        ++row_idx;
        if (std::isnan(r.rhs) || std::isinf(r.rhs))
            throw InputError("row " + r.name + ": non-finite right-hand side");
    }
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < obj_.size(); ++j) v += obj_[j] * x[j];
    return v;
}

}  // namespace gridcred
