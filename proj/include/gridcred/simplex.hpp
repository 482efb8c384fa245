#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridcred/milp.hpp"

namespace gridcred {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

enum class ColStatus : std::int8_t { Basic = 0, AtLower = 1, AtUpper = 2, FreeZero = 3 };

// Column statuses over structurals followed by one logical per row.
struct Basis {
    std::vector<ColStatus> status;
    bool empty() const { return status.empty(); }
};

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    double objective = 0.0;
    std::vector<double> x;  // structural values
    long iterations = 0;
    // Name of the row (or variable bound) driving a primal infeasibility
    // verdict; prefixes identify the constraint family.
    std::string infeasible_hint;
};

// Bounded-variable revised simplex over a fixed row/column structure.
// Bound changes between solves are cheap, which is what branch-and-bound
// and the load-adjustment probes rely on. Rows and columns are equilibrated
// internally; results are reported in original units.
class SimplexSolver {
  public:
    explicit SimplexSolver(const MilpModel& model);

    void set_var_bounds(int var, double lb, double ub);
    void set_rhs(int row, double rhs);
    double var_lb(int var) const { return lb_[var] * cscale_[var]; }
    double var_ub(int var) const { return ub_[var] * cscale_[var]; }

    LpResult solve(const Basis* warm = nullptr);
    Basis basis() const;

    long last_iterations() const { return iterations_; }

  private:
    // ---- static problem data (scaled) ----
    int n_ = 0;  // structurals
    int m_ = 0;  // rows
    int total_ = 0;
    std::vector<int> col_ptr_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> obj_;        // length total_, logicals zero
    std::vector<double> lb_, ub_;    // length total_
    std::vector<double> rhs_;        // length m_
    std::vector<double> rscale_, cscale_;
    std::vector<std::string> row_names_;
    std::vector<std::string> var_names_;

    // ---- basis state ----
    std::vector<ColStatus> stat_;
    std::vector<int> basic_;        // column at each basis position
    std::vector<int> pos_of_;       // position of a basic column, else -1
    std::vector<double> xb_;        // basic values
    long iterations_ = 0;

    // ---- LU factorization of the basis + product-form updates ----
    struct Factor {
        int m = 0;
        std::vector<int> lp_, li_;      // L columns (unit diagonal implicit)
        std::vector<double> lx_;
        std::vector<int> up_, ui_;      // U columns, row indices in pivot space
        std::vector<double> ux_;
        std::vector<double> udiag_;
        std::vector<int> pinv_, perm_;  // original row <-> pivot position
    };
    struct Eta {
        int pos = 0;
        std::vector<int> idx;
        std::vector<double> val;
        double pivot = 0.0;
    };
    Factor factor_;
    std::vector<Eta> etas_;
    bool factor_valid_ = false;

    void build_columns(const MilpModel& model);
    void compute_scaling(const MilpModel& model);

    double col_value(int j) const;  // nonbasic value implied by status
    void gather_column(int j, std::vector<int>& idx, std::vector<double>& val) const;

    bool factorize();               // LU of current basis; false when singular
    void ftran(std::vector<double>& full) const;  // in/out dense length m (basis positions)
    void btran(std::vector<double>& full) const;
    void compute_basic_values();
    double reduced_cost_scan(const std::vector<double>& y, int j) const;

    void cold_start();
    void load_basis(const Basis& b);
    bool repair_basis();            // make basic_ consistent with stat_

    LpStatus primal_iterate(long max_iters);
    LpStatus dual_iterate(long max_iters, std::string* hint);

    double primal_infeasibility() const;
    double dual_infeasibility();

    LpResult finish(LpStatus st, const std::string& hint);
};

}  // namespace gridcred
