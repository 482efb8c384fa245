#include "gridcred/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace gridcred {

namespace {
constexpr double kPrimalTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr double kArtificialBound = 1e9;
constexpr int kRefactorInterval = 64;
}  // namespace

SimplexSolver::SimplexSolver(const MilpModel& model) {
    model.validate();
    n_ = static_cast<int>(model.var_count());
    m_ = static_cast<int>(model.row_count());
    total_ = n_ + m_;
    build_columns(model);
    compute_scaling(model);

    obj_.assign(total_, 0.0);
    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
        obj_[j] = model.objective()[j] * cscale_[j];
        lb_[j] = model.vars()[j].lb / cscale_[j];
        ub_[j] = model.vars()[j].ub / cscale_[j];
        // guard 0 * inf
        if (std::isinf(model.vars()[j].lb)) lb_[j] = -kInf;
        if (std::isinf(model.vars()[j].ub)) ub_[j] = kInf;
    }
    rhs_.assign(m_, 0.0);
    row_names_.resize(m_);
    var_names_.resize(n_);
    for (int j = 0; j < n_; ++j) var_names_[j] = model.vars()[j].name;
    for (int i = 0; i < m_; ++i) {
        const auto& r = model.rows()[i];
        rhs_[i] = r.rhs * rscale_[i];
        row_names_[i] = r.name;
        int lj = n_ + i;
        switch (r.sense) {
            case RowSense::LessEqual:
                lb_[lj] = 0.0;
                ub_[lj] = kInf;
                break;
            case RowSense::Equal:
                lb_[lj] = 0.0;
                ub_[lj] = 0.0;
                break;
            case RowSense::GreaterEqual:
                lb_[lj] = -kInf;
                ub_[lj] = 0.0;
                break;
        }
    }
    stat_.assign(total_, ColStatus::AtLower);
    basic_.assign(m_, -1);
    pos_of_.assign(total_, -1);
    xb_.assign(m_, 0.0);
}

void SimplexSolver::build_columns(const MilpModel& model) {
    std::vector<int> counts(n_, 0);
    for (const auto& r : model.rows())
        for (const auto& [j, c] : r.terms)
            if (c != 0.0) ++counts[j];
    col_ptr_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_ptr_[j + 1] = col_ptr_[j] + counts[j];
    col_row_.assign(col_ptr_[n_], 0);
    col_val_.assign(col_ptr_[n_], 0.0);
    std::vector<int> fill(n_, 0);
    for (int i = 0; i < m_; ++i) {
        for (const auto& [j, c] : model.rows()[i].terms) {
            if (c == 0.0) continue;
            int at = col_ptr_[j] + fill[j]++;
            col_row_[at] = i;
            col_val_[at] = c;
        }
    }
}

void SimplexSolver::compute_scaling(const MilpModel& model) {
    rscale_.assign(m_, 1.0);
    cscale_.assign(n_, 1.0);
    auto pow2_near = [](double v) {
        if (v <= 0.0 || !std::isfinite(v)) return 1.0;
        int e = 0;
        std::frexp(v, &e);
        return std::ldexp(1.0, e - 1);
    };
    for (int pass = 0; pass < 2; ++pass) {
        // rows
        std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
        for (int j = 0; j < n_; ++j)
            for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                double a = std::fabs(col_val_[k] * rscale_[col_row_[k]] * cscale_[j]);
                if (a == 0.0) continue;
                rmin[col_row_[k]] = std::min(rmin[col_row_[k]], a);
                rmax[col_row_[k]] = std::max(rmax[col_row_[k]], a);
            }
        for (int i = 0; i < m_; ++i)
            if (rmax[i] > 0.0) rscale_[i] /= pow2_near(std::sqrt(rmin[i] * rmax[i]));
        // columns
        std::vector<double> cmin(n_, kInf), cmax(n_, 0.0);
        for (int j = 0; j < n_; ++j)
            for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                double a = std::fabs(col_val_[k] * rscale_[col_row_[k]] * cscale_[j]);
                if (a == 0.0) continue;
                cmin[j] = std::min(cmin[j], a);
                cmax[j] = std::max(cmax[j], a);
            }
        for (int j = 0; j < n_; ++j)
            if (cmax[j] > 0.0) cscale_[j] /= pow2_near(std::sqrt(cmin[j] * cmax[j]));
    }
    // Bake scales into the stored columns.
    for (int j = 0; j < n_; ++j)
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k)
            col_val_[k] *= rscale_[col_row_[k]] * cscale_[j];
    (void)model;
}

void SimplexSolver::set_var_bounds(int var, double lb, double ub) {
    lb_[var] = std::isinf(lb) ? -kInf : lb / cscale_[var];
    ub_[var] = std::isinf(ub) ? kInf : ub / cscale_[var];
}

void SimplexSolver::set_rhs(int row, double rhs) { rhs_[row] = rhs * rscale_[row]; }

double SimplexSolver::col_value(int j) const {
    switch (stat_[j]) {
        case ColStatus::AtLower: return lb_[j];
        case ColStatus::AtUpper: return ub_[j];
        case ColStatus::FreeZero: return 0.0;
        case ColStatus::Basic: break;
    }
    return xb_[pos_of_[j]];
}

void SimplexSolver::gather_column(int j, std::vector<int>& idx, std::vector<double>& val) const {
    idx.clear();
    val.clear();
    if (j < n_) {
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
            idx.push_back(col_row_[k]);
            val.push_back(col_val_[k]);
        }
    } else {
        idx.push_back(j - n_);
        val.push_back(1.0);
    }
}

// ---------------------------------------------------------------------------
// LU factorization (left-looking, partial pivoting, DFS sparse solves)
// ---------------------------------------------------------------------------

bool SimplexSolver::factorize() {
    Factor f;
    f.m = m_;
    f.pinv_.assign(m_, -1);
    f.perm_.assign(m_, -1);
    f.lp_.assign(1, 0);
    f.up_.assign(1, 0);
    f.udiag_.assign(m_, 0.0);

    std::vector<double> w(m_, 0.0);
    std::vector<int> pattern;          // topological order, reversed
    std::vector<int> stack, stack_pos; // DFS state
    std::vector<int> mark(m_, -1);

    std::vector<int> cidx;
    std::vector<double> cval;

    for (int k = 0; k < m_; ++k) {
        gather_column(basic_[k], cidx, cval);

        // Reach: DFS through columns of L already pivoted.
        pattern.clear();
        for (int s0 : cidx) {
            if (mark[s0] == k) continue;
            stack.clear();
            stack_pos.clear();
            stack.push_back(s0);
            stack_pos.push_back(0);
            mark[s0] = k;
            while (!stack.empty()) {
                int i = stack.back();
                int p = f.pinv_[i];
                bool descended = false;
                if (p >= 0) {
                    int start = f.lp_[p] + stack_pos.back();
                    int end = f.lp_[p + 1];
                    for (int e = start; e < end; ++e) {
                        int r = f.li_[e];
                        stack_pos.back() = e - f.lp_[p] + 1;
                        if (mark[r] != k) {
                            mark[r] = k;
                            stack.push_back(r);
                            stack_pos.push_back(0);
                            descended = true;
                            break;
                        }
                    }
                }
                if (!descended) {
                    pattern.push_back(i);
                    stack.pop_back();
                    stack_pos.pop_back();
                }
            }
        }

        for (std::size_t z = 0; z < cidx.size(); ++z) w[cidx[z]] += cval[z];
        // entries may appear in pattern that were not in cidx; they start at 0
        for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
            int i = *it;
            int p = f.pinv_[i];
            if (p < 0) continue;
            double xi = w[i];
            if (xi == 0.0) continue;
            for (int e = f.lp_[p]; e < f.lp_[p + 1]; ++e) w[f.li_[e]] -= f.lx_[e] * xi;
        }

        // Split into U entries (pivoted rows) and pivot candidates.
        int ipiv = -1;
        double best = 0.0;
        for (int i : pattern) {
            if (f.pinv_[i] >= 0) continue;
            double a = std::fabs(w[i]);
            if (a > best || (a == best && ipiv >= 0 && i < ipiv)) {
                best = a;
                ipiv = i;
            }
        }
        if (ipiv < 0 || best < 1e-11) {
            for (int i : pattern) w[i] = 0.0;
            factor_valid_ = false;
            return false;  // numerically singular basis
        }

        double piv = w[ipiv];
        for (int i : pattern) {
            int p = f.pinv_[i];
            if (p >= 0) {
                if (std::fabs(w[i]) > kDropTol) {
                    f.ui_.push_back(p);
                    f.ux_.push_back(w[i]);
                }
            } else if (i != ipiv) {
                if (std::fabs(w[i]) > kDropTol) {
                    f.li_.push_back(i);
                    f.lx_.push_back(w[i] / piv);
                }
            }
            w[i] = 0.0;
        }
        f.up_.push_back(static_cast<int>(f.ui_.size()));
        f.lp_.push_back(static_cast<int>(f.li_.size()));
        f.udiag_[k] = piv;
        f.pinv_[ipiv] = k;
        f.perm_[k] = ipiv;
    }

    factor_ = std::move(f);
    etas_.clear();
    factor_valid_ = true;
    return true;
}

void SimplexSolver::ftran(std::vector<double>& v) const {
    const Factor& f = factor_;
    // L solve in original row space.
    for (int k = 0; k < f.m; ++k) {
        double xi = v[f.perm_[k]];
        if (xi == 0.0) continue;
        for (int e = f.lp_[k]; e < f.lp_[k + 1]; ++e) v[f.li_[e]] -= f.lx_[e] * xi;
    }
    // Map to pivot-position space, then U solve backward.
    std::vector<double> y(f.m);
    for (int k = 0; k < f.m; ++k) y[k] = v[f.perm_[k]];
    for (int k = f.m - 1; k >= 0; --k) {
        double yk = y[k] / f.udiag_[k];
        y[k] = yk;
        if (yk == 0.0) continue;
        for (int e = f.up_[k]; e < f.up_[k + 1]; ++e) y[f.ui_[e]] -= f.ux_[e] * yk;
    }
    v = std::move(y);
    // Product-form updates.
    for (const Eta& e : etas_) {
        double t = v[e.pos] / e.pivot;
        if (t != 0.0) {
            for (std::size_t z = 0; z < e.idx.size(); ++z) v[e.idx[z]] -= e.val[z] * t;
        }
        v[e.pos] = t;
    }
}

void SimplexSolver::btran(std::vector<double>& v) const {
    const Factor& f = factor_;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        const Eta& e = *it;
        double s = 0.0;
        for (std::size_t z = 0; z < e.idx.size(); ++z) s += e.val[z] * v[e.idx[z]];
        v[e.pos] = (v[e.pos] - s) / e.pivot;
    }
    // U^T solve forward over pivot positions.
    std::vector<double> t(f.m, 0.0);
    for (int k = 0; k < f.m; ++k) {
        double s = v[k];
        for (int e = f.up_[k]; e < f.up_[k + 1]; ++e) s -= f.ux_[e] * t[f.ui_[e]];
        t[k] = s / f.udiag_[k];
    }
    // L^T solve backward; output in original row space.
    std::vector<double> y(f.m, 0.0);
    for (int k = f.m - 1; k >= 0; --k) {
        double s = t[k];
        for (int e = f.lp_[k]; e < f.lp_[k + 1]; ++e) s -= f.lx_[e] * y[f.li_[e]];
        y[f.perm_[k]] = s;
    }
    v = std::move(y);
}

void SimplexSolver::compute_basic_values() {
    std::vector<double> acc(m_, 0.0);
    for (int i = 0; i < m_; ++i) acc[i] = rhs_[i];
    for (int j = 0; j < total_; ++j) {
        if (stat_[j] == ColStatus::Basic) continue;
        double v = col_value(j);
        if (v == 0.0) continue;
        if (j < n_) {
            for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k)
                acc[col_row_[k]] -= col_val_[k] * v;
        } else {
            acc[j - n_] -= v;
        }
    }
    ftran(acc);
    xb_ = std::move(acc);
}

double SimplexSolver::reduced_cost_scan(const std::vector<double>& y, int j) const {
    double d = obj_[j];
    if (j < n_) {
        for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) d -= y[col_row_[k]] * col_val_[k];
    } else {
        d -= y[j - n_];
    }
    return d;
}

void SimplexSolver::cold_start() {
    for (int i = 0; i < m_; ++i) {
        basic_[i] = n_ + i;
        stat_[n_ + i] = ColStatus::Basic;
        pos_of_[n_ + i] = i;
    }
    for (int j = 0; j < n_; ++j) {
        pos_of_[j] = -1;
        bool lo = std::isfinite(lb_[j]);
        bool hi = std::isfinite(ub_[j]);
        if (lo && (obj_[j] >= 0.0 || !hi))
            stat_[j] = ColStatus::AtLower;
        else if (hi)
            stat_[j] = ColStatus::AtUpper;
        else if (lo)
            stat_[j] = ColStatus::AtLower;
        else
            stat_[j] = ColStatus::FreeZero;
    }
    // Logical statuses for the initial basis were set above; fix their pos.
    for (int i = 0; i < m_; ++i) pos_of_[n_ + i] = i;
}

void SimplexSolver::load_basis(const Basis& b) {
    stat_ = b.status;
    std::fill(pos_of_.begin(), pos_of_.end(), -1);
    int pos = 0;
    for (int j = 0; j < total_; ++j) {
        if (stat_[j] == ColStatus::Basic) {
            if (pos >= m_) {
                cold_start();
                return;
            }
            basic_[pos] = j;
            pos_of_[j] = pos;
            ++pos;
        }
        // A nonbasic var resting on an infinite bound is inconsistent; repair.
        if (stat_[j] == ColStatus::AtLower && !std::isfinite(lb_[j]))
            stat_[j] = std::isfinite(ub_[j]) ? ColStatus::AtUpper : ColStatus::FreeZero;
        else if (stat_[j] == ColStatus::AtUpper && !std::isfinite(ub_[j]))
            stat_[j] = std::isfinite(lb_[j]) ? ColStatus::AtLower : ColStatus::FreeZero;
    }
    if (pos != m_) {
        // Pad with logicals of rows not already covered.
        for (int i = 0; i < m_ && pos < m_; ++i) {
            int lj = n_ + i;
            if (stat_[lj] != ColStatus::Basic) {
                stat_[lj] = ColStatus::Basic;
                basic_[pos] = lj;
                pos_of_[lj] = pos;
                ++pos;
            }
        }
        if (pos != m_) cold_start();
    }
}

bool SimplexSolver::repair_basis() {
    if (!factorize()) {
        // Singular warm basis: fall back to the all-logical basis.
        for (int j = 0; j < total_; ++j)
            if (stat_[j] == ColStatus::Basic)
                stat_[j] = std::isfinite(lb_[j])
                               ? ColStatus::AtLower
                               : (std::isfinite(ub_[j]) ? ColStatus::AtUpper : ColStatus::FreeZero);
        std::fill(pos_of_.begin(), pos_of_.end(), -1);
        for (int i = 0; i < m_; ++i) {
            basic_[i] = n_ + i;
            stat_[n_ + i] = ColStatus::Basic;
            pos_of_[n_ + i] = i;
        }
        if (!factorize()) return false;
    }
    compute_basic_values();
    return true;
}

double SimplexSolver::primal_infeasibility() const {
    double s = 0.0;
    for (int p = 0; p < m_; ++p) {
        int j = basic_[p];
        if (xb_[p] < lb_[j]) s += lb_[j] - xb_[p];
        if (xb_[p] > ub_[j]) s += xb_[p] - ub_[j];
    }
    return s;
}

double SimplexSolver::dual_infeasibility() {
    std::vector<double> y(m_, 0.0);
    for (int p = 0; p < m_; ++p) y[p] = obj_[basic_[p]];
    btran(y);
    double s = 0.0;
    for (int j = 0; j < total_; ++j) {
        if (stat_[j] == ColStatus::Basic) continue;
        double d = reduced_cost_scan(y, j);
        if (stat_[j] == ColStatus::AtLower && d < -kDualTol && ub_[j] > lb_[j]) s += -d;
        if (stat_[j] == ColStatus::AtUpper && d > kDualTol && ub_[j] > lb_[j]) s += d;
        if (stat_[j] == ColStatus::FreeZero && std::fabs(d) > kDualTol) s += std::fabs(d);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Primal simplex (phase 2; assumes primal-feasible basis)
// ---------------------------------------------------------------------------

LpStatus SimplexSolver::primal_iterate(long max_iters) {
    std::vector<double> y(m_), alpha(m_);
    int stall = 0;
    bool bland = false;
    int since_refactor = 0;

    for (long it = 0; it < max_iters; ++it) {
        ++iterations_;
        for (int p = 0; p < m_; ++p) y[p] = obj_[basic_[p]];
        btran(y);

        int q = -1;
        double best = bland ? 0.0 : kDualTol;
        int dir = +1;
        for (int j = 0; j < total_; ++j) {
            if (stat_[j] == ColStatus::Basic) continue;
            if (lb_[j] == ub_[j]) continue;  // fixed
            double d = reduced_cost_scan(y, j);
            double viol = 0.0;
            int cand_dir = 0;
            if (stat_[j] == ColStatus::AtLower && d < -kDualTol) {
                viol = -d;
                cand_dir = +1;
            } else if (stat_[j] == ColStatus::AtUpper && d > kDualTol) {
                viol = d;
                cand_dir = -1;
            } else if (stat_[j] == ColStatus::FreeZero && std::fabs(d) > kDualTol) {
                viol = std::fabs(d);
                cand_dir = d < 0.0 ? +1 : -1;
            }
            if (cand_dir == 0) continue;
            if (bland) {
                q = j;
                dir = cand_dir;
                break;
            }
            if (viol > best) {
                best = viol;
                q = j;
                dir = cand_dir;
            }
        }
        if (q < 0) return LpStatus::Optimal;

        alpha.assign(m_, 0.0);
        if (q < n_) {
            for (int k = col_ptr_[q]; k < col_ptr_[q + 1]; ++k) alpha[col_row_[k]] += col_val_[k];
        } else {
            alpha[q - n_] = 1.0;
        }
        ftran(alpha);

        // Ratio test (two passes, Harris-style): basics move by -dir*alpha*t.
        double range_q = ub_[q] - lb_[q];  // may be inf
        double tmax = std::isfinite(range_q) ? range_q : kInf;
        for (int p = 0; p < m_; ++p) {
            double rate = -static_cast<double>(dir) * alpha[p];
            if (std::fabs(rate) < kPivotTol) continue;
            int jb = basic_[p];
            double room = rate > 0.0 ? (ub_[jb] - xb_[p]) : (xb_[p] - lb_[jb]);
            if (!std::isfinite(room)) continue;
            double t = (room + kPrimalTol) / std::fabs(rate);
            tmax = std::min(tmax, t);
        }
        if (!std::isfinite(tmax)) return LpStatus::Unbounded;

        int leave = -1;
        double best_piv = 0.0;
        double t_leave = tmax;
        for (int p = 0; p < m_; ++p) {
            double rate = -static_cast<double>(dir) * alpha[p];
            if (std::fabs(rate) < kPivotTol) continue;
            int jb = basic_[p];
            double room = rate > 0.0 ? (ub_[jb] - xb_[p]) : (xb_[p] - lb_[jb]);
            if (!std::isfinite(room)) continue;
            double t = std::max(0.0, room) / std::fabs(rate);
            if (t <= tmax && std::fabs(rate) > best_piv) {
                best_piv = std::fabs(rate);
                leave = p;
                t_leave = t;
            }
        }

        double step;
        bool bound_flip = false;
        if (leave < 0) {
            if (!std::isfinite(range_q)) return LpStatus::Unbounded;
            step = range_q;
            bound_flip = true;
        } else if (std::isfinite(range_q) && range_q < t_leave) {
            step = range_q;
            bound_flip = true;
        } else {
            step = t_leave;
        }

        if (step <= kPrimalTol) {
            if (++stall > 200) bland = true;
        } else {
            stall = 0;
            bland = false;
        }

        for (int p = 0; p < m_; ++p) xb_[p] -= static_cast<double>(dir) * alpha[p] * step;

        if (bound_flip) {
            stat_[q] = (dir > 0) ? ColStatus::AtUpper : ColStatus::AtLower;
            continue;
        }

        int jl = basic_[leave];
        double enter_val = col_value(q);  // old nonbasic value
        enter_val += static_cast<double>(dir) * step;
        double rate_l = -static_cast<double>(dir) * alpha[leave];
        stat_[jl] = rate_l > 0.0 ? ColStatus::AtUpper : ColStatus::AtLower;
        if (lb_[jl] == ub_[jl]) stat_[jl] = ColStatus::AtLower;
        pos_of_[jl] = -1;
        basic_[leave] = q;
        pos_of_[q] = leave;
        stat_[q] = ColStatus::Basic;
        xb_[leave] = enter_val;

        if (std::fabs(alpha[leave]) < kPivotTol || ++since_refactor >= kRefactorInterval ||
            static_cast<int>(etas_.size()) >= kRefactorInterval) {
            if (!factorize()) return LpStatus::IterationLimit;
            compute_basic_values();
            since_refactor = 0;
        } else {
            Eta e;
            e.pos = leave;
            e.pivot = alpha[leave];
            for (int p = 0; p < m_; ++p)
                if (p != leave && std::fabs(alpha[p]) > kDropTol) {
                    e.idx.push_back(p);
                    e.val.push_back(alpha[p]);
                }
            etas_.push_back(std::move(e));
        }
    }
    return LpStatus::IterationLimit;
}

// ---------------------------------------------------------------------------
// Dual simplex (assumes dual-feasible statuses)
// ---------------------------------------------------------------------------

LpStatus SimplexSolver::dual_iterate(long max_iters, std::string* hint) {
    std::vector<double> y(m_), rho(m_), alpha_col(m_);
    std::vector<double> row_vals(total_, 0.0);
    std::vector<int> row_idx;
    row_idx.reserve(total_);
    int since_refactor = 0;
    int stall = 0;
    bool bland = false;

    // Reduced costs maintained across pivots; rebuilt after refactorization.
    std::vector<double> d(total_, 0.0);
    auto rebuild_duals = [&] {
        for (int p = 0; p < m_; ++p) y[p] = obj_[basic_[p]];
        btran(y);
        for (int j = 0; j < total_; ++j)
            d[j] = (stat_[j] == ColStatus::Basic) ? 0.0 : reduced_cost_scan(y, j);
    };
    rebuild_duals();

    for (long it = 0; it < max_iters; ++it) {
        ++iterations_;

        // Leaving: largest primal bound violation.
        int p_leave = -1;
        double worst = kPrimalTol;
        bool above = false;
        for (int p = 0; p < m_; ++p) {
            int j = basic_[p];
            double v = xb_[p];
            if (v < lb_[j] - 1e-12 && lb_[j] - v > worst) {
                worst = lb_[j] - v;
                p_leave = p;
                above = false;
            } else if (v > ub_[j] + 1e-12 && v - ub_[j] > worst) {
                worst = v - ub_[j];
                p_leave = p;
                above = true;
            }
        }
        if (p_leave < 0) return LpStatus::Optimal;

        rho.assign(m_, 0.0);
        rho[p_leave] = 1.0;
        btran(rho);

        // Pivot row alpha_j = rho . A_j over nonbasics; the sign flip makes
        // the leaving variable "decrease toward its violated bound".
        double flip = above ? 1.0 : -1.0;
        int q = -1;
        double best_ratio = kInf;
        double best_piv = 0.0;
        row_idx.clear();
        for (int j = 0; j < total_; ++j) {
            if (stat_[j] == ColStatus::Basic) continue;
            double a_raw;
            if (j < n_) {
                a_raw = 0.0;
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k)
                    a_raw += rho[col_row_[k]] * col_val_[k];
            } else {
                a_raw = rho[j - n_];
            }
            if (std::fabs(a_raw) < 1e-12) continue;
            row_vals[j] = a_raw;
            row_idx.push_back(j);
            if (lb_[j] == ub_[j]) continue;
            double a = a_raw * flip;
            if (std::fabs(a) < kPivotTol) continue;
            // Entering must push the leaving value toward its violated bound
            // while keeping its own reduced cost sign valid after the pivot.
            bool ok = (stat_[j] == ColStatus::AtLower && a > 0.0) ||
                      (stat_[j] == ColStatus::AtUpper && a < 0.0) ||
                      (stat_[j] == ColStatus::FreeZero);
            if (!ok) continue;
            double ratio = d[j] / a;
            if (ratio < 0.0) ratio = 0.0;  // numerical dust on dual feasibility
            bool better;
            if (q < 0) {
                better = true;
            } else if (ratio < best_ratio - 1e-12) {
                better = true;
            } else if (ratio < best_ratio + 1e-12) {
                // tie: larger pivot wins; under Bland keep the lowest index
                better = !bland && std::fabs(a) > best_piv;
            } else {
                better = false;
            }
            if (better) {
                best_ratio = std::min(best_ratio, std::max(ratio, 0.0));
                best_piv = std::fabs(a);
                q = j;
            }
        }
        if (q < 0) {
            if (hint) {
                int jb = basic_[p_leave];
                *hint = jb >= n_ ? row_names_[jb - n_] : var_names_[jb];
            }
            return LpStatus::Infeasible;
        }

        // Primal step: move leaving exactly onto its violated bound.
        int j_leave = basic_[p_leave];
        double target = above ? ub_[j_leave] : lb_[j_leave];
        double delta = xb_[p_leave] - target;  // signed surplus
        alpha_col.assign(m_, 0.0);
        if (q < n_) {
            for (int k = col_ptr_[q]; k < col_ptr_[q + 1]; ++k) alpha_col[col_row_[k]] += col_val_[k];
        } else {
            alpha_col[q - n_] = 1.0;
        }
        ftran(alpha_col);

        double denom = alpha_col[p_leave];
        if (std::fabs(denom) < kPivotTol) {
            if (!factorize()) return LpStatus::IterationLimit;
            compute_basic_values();
            rebuild_duals();
            since_refactor = 0;
            if (++stall > 50) bland = true;
            for (int j : row_idx) row_vals[j] = 0.0;
            continue;
        }
        double t_enter = delta / denom;  // change in entering value
        double enter_new = col_value(q) + t_enter;

        if (std::fabs(t_enter) <= 1e-12) {
            if (++stall > 200) bland = true;
        } else {
            stall = 0;
            bland = false;
        }

        // dual update: y moves along rho by s = d_q / alpha_q (raw row)
        double s_dual = d[q] / row_vals[q];
        for (int j : row_idx) {
            if (stat_[j] != ColStatus::Basic) d[j] -= s_dual * row_vals[j];
            row_vals[j] = 0.0;
        }
        d[q] = 0.0;
        d[j_leave] = -s_dual;

        for (int p = 0; p < m_; ++p) xb_[p] -= alpha_col[p] * t_enter;
        stat_[j_leave] = above ? ColStatus::AtUpper : ColStatus::AtLower;
        if (lb_[j_leave] == ub_[j_leave]) stat_[j_leave] = ColStatus::AtLower;
        pos_of_[j_leave] = -1;
        basic_[p_leave] = q;
        pos_of_[q] = p_leave;
        stat_[q] = ColStatus::Basic;
        xb_[p_leave] = enter_new;

        if (++since_refactor >= kRefactorInterval ||
            static_cast<int>(etas_.size()) >= kRefactorInterval) {
            if (!factorize()) return LpStatus::IterationLimit;
            compute_basic_values();
            rebuild_duals();
            since_refactor = 0;
        } else {
            Eta e;
            e.pos = p_leave;
            e.pivot = denom;
            for (int p = 0; p < m_; ++p)
                if (p != p_leave && std::fabs(alpha_col[p]) > kDropTol) {
                    e.idx.push_back(p);
                    e.val.push_back(alpha_col[p]);
                }
            etas_.push_back(std::move(e));
        }
    }
    return LpStatus::IterationLimit;
}

LpResult SimplexSolver::finish(LpStatus st, const std::string& hint) {
    LpResult res;
    res.status = st;
    res.iterations = iterations_;
    res.infeasible_hint = hint;
    if (st != LpStatus::Optimal) return res;
    res.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        double v = (stat_[j] == ColStatus::Basic) ? xb_[pos_of_[j]] : col_value(j);
        res.x[j] = v * cscale_[j];
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += (obj_[j] / cscale_[j]) * res.x[j];
    res.objective = obj;
    return res;
}

LpResult SimplexSolver::solve(const Basis* warm) {
    iterations_ = 0;
    const long max_iters = std::max<long>(20000, 50L * (m_ + n_));

    if (factor_valid_ && warm != nullptr && warm->status == stat_) {
        // basis unchanged since the last solve: only bounds/rhs moved, the
        // factorization still applies
        compute_basic_values();
    } else {
        if (warm != nullptr && static_cast<int>(warm->status.size()) == total_) {
            load_basis(*warm);
        } else {
            cold_start();
        }
        if (!repair_basis()) return finish(LpStatus::IterationLimit, "singular basis");
    }

    // Restore dual feasibility by flipping nonbasics where possible; where a
    // finite opposite bound is missing, pin an artificial one and check later.
    std::vector<double> y(m_);
    for (int p = 0; p < m_; ++p) y[p] = obj_[basic_[p]];
    btran(y);
    std::vector<int> artificial;
    bool flipped = false;
    for (int j = 0; j < total_; ++j) {
        if (stat_[j] == ColStatus::Basic || lb_[j] == ub_[j]) continue;
        double d = reduced_cost_scan(y, j);
        if (stat_[j] == ColStatus::AtLower && d < -kDualTol) {
            if (std::isfinite(ub_[j])) {
                stat_[j] = ColStatus::AtUpper;
                flipped = true;
            } else {
                ub_[j] = kArtificialBound;
                stat_[j] = ColStatus::AtUpper;
                artificial.push_back(j);
                flipped = true;
            }
        } else if (stat_[j] == ColStatus::AtUpper && d > kDualTol) {
            if (std::isfinite(lb_[j])) {
                stat_[j] = ColStatus::AtLower;
                flipped = true;
            } else {
                lb_[j] = -kArtificialBound;
                stat_[j] = ColStatus::AtLower;
                artificial.push_back(j);
                flipped = true;
            }
        } else if (stat_[j] == ColStatus::FreeZero && std::fabs(d) > kDualTol) {
            if (d > 0.0) {
                lb_[j] = -kArtificialBound;
                stat_[j] = ColStatus::AtLower;
            } else {
                ub_[j] = kArtificialBound;
                stat_[j] = ColStatus::AtUpper;
            }
            artificial.push_back(j);
            flipped = true;
        }
    }
    if (flipped) compute_basic_values();

    std::string hint;
    LpStatus st = dual_iterate(max_iters, &hint);

    if (st == LpStatus::Optimal) {
        double rhs_mag = 1.0;
        for (int i = 0; i < m_; ++i) rhs_mag = std::max(rhs_mag, std::fabs(rhs_[i]));
        // Polish: fresh factorization, recheck, continue if drift is found.
        for (int round = 0; round < 3 && st == LpStatus::Optimal; ++round) {
            if (!factorize()) break;
            compute_basic_values();
            double pinf = primal_infeasibility();
            double dinf = dual_infeasibility();
            if (pinf <= 10 * kPrimalTol * rhs_mag && dinf <= 1e-6) break;
            if (dinf > 1e-6) st = primal_iterate(max_iters);
            else st = dual_iterate(max_iters, &hint);
        }
    }

    if (st == LpStatus::Optimal && !artificial.empty()) {
        for (int j : artificial) {
            double v = (stat_[j] == ColStatus::Basic) ? xb_[pos_of_[j]] : col_value(j);
            if (std::fabs(v) > 0.5 * kArtificialBound)
                return finish(LpStatus::Unbounded, var_names_.size() > static_cast<std::size_t>(j)
                                                       ? var_names_[j]
                                                       : "");
        }
    }
    return finish(st, hint);
}

Basis SimplexSolver::basis() const {
    Basis b;
    b.status = stat_;
    return b;
}

}  // namespace gridcred
