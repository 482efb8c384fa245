#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gridcred/common.hpp"

namespace gridcred {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct MilpVar {
    std::string name;
    double lb = 0.0;
    double ub = kInf;
    bool is_binary = false;   // integral with bounds inside [0,1]
    int branch_priority = 0;  // higher branches first while fractional
};

struct MilpRow {
    std::string name;
    std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
    RowSense sense = RowSense::LessEqual;
    double rhs = 0.0;
};

// Solver-independent linear model: variables with bounds and integrality,
// linear rows, minimized linear objective.
class MilpModel {
  public:
    int add_var(const std::string& name, double lb, double ub, bool is_binary,
                double objective = 0.0, int branch_priority = 0);
    int add_row(const std::string& name, std::vector<std::pair<int, double>> terms,
                RowSense sense, double rhs);
    void set_objective(int var, double coeff) { obj_[var] = coeff; }

    const std::vector<MilpVar>& vars() const { return vars_; }
    const std::vector<MilpRow>& rows() const { return rows_; }
    const std::vector<double>& objective() const { return obj_; }
    std::size_t var_count() const { return vars_.size(); }
    std::size_t row_count() const { return rows_.size(); }

    // Structural checks: term indices in range, finite bounds where required,
    // binaries inside [0,1]. Throws InputError on the first defect.
    void validate() const;

    double objective_value(const std::vector<double>& x) const;

  private:
    std::vector<MilpVar> vars_;
    std::vector<MilpRow> rows_;
    std::vector<double> obj_;
};

// Writes the model as an LP-format text file (CPLEX dialect subset:
// Minimize / Subject To / Bounds / Binaries / End). Numeric output uses
// %.17g so import followed by re-export is byte-identical.
// Throws InputError on duplicate variable or row names.
void export_model(const MilpModel& model, const std::string& path);

MilpModel import_model(const std::string& path);

// Delimited external-solution file: "variable_name,value" with a header row.
// Values map onto the model's variables by name; unknown names are an error.
std::vector<double> import_solution(const MilpModel& model, const std::string& path);

}  // namespace gridcred
