#include "gridcred/branch_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <queue>

namespace gridcred {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
    double bound = -kInf;
    long id = 0;
    // Complete binary fixings from the root: (var, value).
    std::vector<std::pair<int, double>> fixes;
    std::shared_ptr<Basis> warm;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
        return a.id < b.id;  // on ties plunge into the newest node
    }
};

// Feasibility of a fully specified point against the original model.
bool point_feasible(const MilpModel& model, const std::vector<double>& x, double tol) {
    for (std::size_t j = 0; j < model.var_count(); ++j) {
        const auto& v = model.vars()[j];
        if (x[j] < v.lb - tol || x[j] > v.ub + tol) return false;
    }
    for (const auto& r : model.rows()) {
        double lhs = 0.0;
        double scale = 1.0;
        for (const auto& [j, c] : r.terms) {
            lhs += c * x[j];
            scale = std::max(scale, std::fabs(c * x[j]));
        }
        double slack = lhs - r.rhs;
        switch (r.sense) {
            case RowSense::LessEqual:
                if (slack > tol * scale) return false;
                break;
            case RowSense::GreaterEqual:
                if (slack < -tol * scale) return false;
                break;
            case RowSense::Equal:
                if (std::fabs(slack) > tol * scale) return false;
                break;
        }
    }
    return true;
}

// Direction in which rounding binary j cannot tighten any constraint:
// +1 (up), -1 (down), or 0 when neither direction is sign-safe.
int safe_round_direction(const MilpModel& model,
                         const std::vector<std::vector<std::pair<int, double>>>& var_rows,
                         int j) {
    bool up_ok = true, down_ok = true;
    for (const auto& [row, coeff] : var_rows[j]) {
        RowSense sense = model.rows()[row].sense;
        if (sense == RowSense::Equal) {
            if (coeff != 0.0) return 0;
            continue;
        }
        bool increases_lhs_hurts = (sense == RowSense::LessEqual);
        if (increases_lhs_hurts) {
            if (coeff > 0.0) up_ok = false;
            if (coeff < 0.0) down_ok = false;
        } else {
            if (coeff < 0.0) up_ok = false;
            if (coeff > 0.0) down_ok = false;
        }
    }
    if (up_ok) return +1;
    if (down_ok) return -1;
    return 0;
}

}  // namespace

MilpResult solve_milp(const MilpModel& model, const SolverOptions& options,
                      const Basis* root_warm, Basis* root_basis_out) {
    model.validate();
    MilpResult res;
    if (options.mode == SolverOptions::Mode::ExportOnly)
        throw SolverError("solve_milp: solver is in export-only mode");

    SimplexSolver lp(model);

    std::vector<int> binaries;
    for (std::size_t j = 0; j < model.var_count(); ++j)
        if (model.vars()[j].is_binary) binaries.push_back(static_cast<int>(j));

    // rows touching each variable, for the rounding heuristic
    std::vector<std::vector<std::pair<int, double>>> var_rows(model.var_count());
    for (std::size_t i = 0; i < model.row_count(); ++i)
        for (const auto& [j, c] : model.rows()[i].terms)
            var_rows[j].emplace_back(static_cast<int>(i), c);

    const double obj_cost_tol = options.mip_gap_abs;
    double incumbent_obj = kInf;
    std::vector<double> incumbent_x;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    long node_count = 0;

    auto log_line = [&](double bound) {
        if (!options.log) return;
        double gap = std::isfinite(incumbent_obj) ? incumbent_obj - bound : kInf;
        (*options.log) << node_count << ',' << bound << ','
                       << (std::isfinite(incumbent_obj) ? incumbent_obj : kInf) << ',' << gap
                       << '\n';
    };
    if (options.log) (*options.log) << "node_count,bound,incumbent,gap\n";

    auto try_incumbent = [&](const std::vector<double>& x, double obj) {
        if (obj < incumbent_obj - 1e-12) {
            incumbent_obj = obj;
            incumbent_x = x;
            return true;
        }
        return false;
    };

    // Rounding fix-up: prefer the sign-safe direction per binary, verify the
    // whole point, and only then accept it as an incumbent.
    auto rounding_heuristic = [&](const std::vector<double>& x) {
        std::vector<double> cand = x;
        for (int j : binaries) {
            double v = cand[j];
            double frac = v - std::floor(v);
            if (frac <= kIntTol || frac >= 1.0 - kIntTol) {
                cand[j] = std::round(v);
                continue;
            }
            int dir = safe_round_direction(model, var_rows, j);
            if (dir > 0)
                cand[j] = std::ceil(v);
            else if (dir < 0)
                cand[j] = std::floor(v);
            else
                cand[j] = std::round(v);
        }
        if (point_feasible(model, cand, 1e-7))
            try_incumbent(cand, model.objective_value(cand));
    };

    auto apply_bounds = [&](const Node& node) {
        for (int j : binaries) lp.set_var_bounds(j, model.vars()[j].lb, model.vars()[j].ub);
        for (const auto& [j, v] : node.fixes) lp.set_var_bounds(j, v, v);
    };
    auto solve_node = [&](const Node& node, LpResult* out) {
        apply_bounds(node);
        *out = lp.solve(node.warm.get());
    };

    // Depth-first rounding dive: repeatedly pin the least-fractional binary to
    // its nearest value and re-optimize from the warm basis. Cheap way to land
    // a first incumbent in models whose gate binaries carry no cost signal.
    auto dive_for_incumbent = [&](const Node& node, const LpResult& start) {
        LpResult cur = start;
        int steps_left = static_cast<int>(binaries.size()) + 8;
        while (steps_left-- > 0) {
            int pick = -1;
            int best_prio = std::numeric_limits<int>::min();
            double best_dist = 2.0;
            for (int b : binaries) {
                double f = cur.x[b] - std::floor(cur.x[b]);
                double dist = std::min(f, 1.0 - f);
                if (dist <= kIntTol) continue;
                int prio = model.vars()[b].branch_priority;
                if (prio > best_prio || (prio == best_prio && dist < best_dist)) {
                    best_prio = prio;
                    best_dist = dist;
                    pick = b;
                }
            }
            if (pick < 0) {
                std::vector<double> x = cur.x;
                for (int b : binaries) x[b] = std::round(x[b]);
                if (point_feasible(model, x, 1e-7)) try_incumbent(x, model.objective_value(x));
                break;
            }
            if (std::isfinite(incumbent_obj) && cur.objective >= incumbent_obj) break;
            double target = std::round(cur.x[pick]);
            Basis warm = lp.basis();
            lp.set_var_bounds(pick, target, target);
            LpResult near = lp.solve(&warm);
            bool near_ok = near.status == LpStatus::Optimal;
            // A sharp objective jump usually means this side strands load or
            // energy; price the opposite fix before committing the dive.
            bool regret = !near_ok ||
                          near.objective > cur.objective +
                                               1e-9 * std::max(1.0, std::fabs(cur.objective));
            if (regret) {
                Basis near_basis = lp.basis();
                lp.set_var_bounds(pick, 1.0 - target, 1.0 - target);
                LpResult other = lp.solve(&warm);
                bool other_ok = other.status == LpStatus::Optimal;
                if (other_ok && (!near_ok || other.objective < near.objective)) {
                    cur = std::move(other);
                    continue;
                }
                if (!near_ok) break;  // both sides failed
                lp.set_var_bounds(pick, target, target);
                LpResult redo = lp.solve(&near_basis);
                if (redo.status != LpStatus::Optimal) break;
                cur = std::move(redo);
                continue;
            }
            cur = std::move(near);
        }
        apply_bounds(node);
    };

    Node root;
    root.id = next_id++;
    if (root_warm) root.warm = std::make_shared<Basis>(*root_warm);
    LpResult rres;
    solve_node(root, &rres);
    ++node_count;
    if (rres.status == LpStatus::Unbounded) {
        res.status = MilpStatus::Unbounded;
        log_line(-kInf);
        return res;
    }
    if (rres.status == LpStatus::Infeasible) {
        res.status = MilpStatus::Infeasible;
        res.infeasible_hint = rres.infeasible_hint;
        log_line(kInf);
        return res;
    }
    if (rres.status == LpStatus::IterationLimit)
        throw SolverError("solve_milp: root relaxation hit iteration limit");
    if (root_basis_out) *root_basis_out = lp.basis();

    double root_bound = rres.objective;
    root.bound = root_bound;
    root.warm = std::make_shared<Basis>(lp.basis());

    if (options.binary_hint && options.binary_hint->size() == model.var_count()) {
        Basis warm = lp.basis();
        for (int j : binaries) {
            double v = std::round((*options.binary_hint)[j]);
            v = std::clamp(v, model.vars()[j].lb, model.vars()[j].ub);
            lp.set_var_bounds(j, v, v);
        }
        if (options.hint_relax_up)
            for (int j : *options.hint_relax_up)
                if (model.vars()[j].is_binary && model.vars()[j].ub >= 1.0)
                    lp.set_var_bounds(j, 1.0, 1.0);
        LpResult hres = lp.solve(&warm);
        if (hres.status == LpStatus::Optimal) {
            std::vector<double> x = hres.x;
            for (int b : binaries) x[b] = std::round(x[b]);
            if (point_feasible(model, x, 1e-7)) try_incumbent(x, model.objective_value(x));
        }
        apply_bounds(root);
    }

    // Highest branch priority first: binaries whose fixing moves the bound
    // (commitment) resolve before cost-free gates, which would otherwise
    // spawn sibling nodes the bound can never separate.
    auto frac_binary = [&](const std::vector<double>& x) {
        int pick = -1;
        int best_prio = std::numeric_limits<int>::min();
        double best_score = -1.0;
        for (int j : binaries) {
            double f = x[j] - std::floor(x[j]);
            double dist = std::min(f, 1.0 - f);
            if (dist <= kIntTol) continue;
            int prio = model.vars()[j].branch_priority;
            if (prio < best_prio) continue;
            if (options.branching_rule == 1) {
                if (prio > best_prio) {
                    best_prio = prio;
                    pick = j;
                }
                continue;  // lowest index within the top priority class
            }
            if (prio > best_prio || dist > best_score) {
                best_prio = prio;
                best_score = dist;
                pick = j;
            }
        }
        return pick;
    };

    // Process a solved node: either record an incumbent or branch.
    auto expand = [&](Node&& node, const LpResult& lpres) {
        int j = frac_binary(lpres.x);
        if (j < 0) {
            std::vector<double> x = lpres.x;
            for (int b : binaries) x[b] = std::round(x[b]);
            // objective re-read off the cleaned point, not the LP value, so
            // rounding noise on costly binaries cannot leak into the incumbent
            if (try_incumbent(x, model.objective_value(x))) log_line(node.bound);
            return;
        }
        rounding_heuristic(lpres.x);
        auto warm = std::make_shared<Basis>(lp.basis());
        if (!std::isfinite(incumbent_obj) || (node_count & 0xFF) == 0)
            dive_for_incumbent(node, lpres);
        double v = lpres.x[j];
        Node down, up;
        down.fixes = node.fixes;
        down.fixes.emplace_back(j, 0.0);
        down.bound = lpres.objective;
        down.warm = warm;
        up.fixes = std::move(node.fixes);
        up.fixes.emplace_back(j, 1.0);
        up.bound = lpres.objective;
        up.warm = warm;
        // Dive first toward the relaxation's preference.
        if (v >= 0.5) {
            up.id = next_id++;
            down.id = next_id++;
        } else {
            down.id = next_id++;
            up.id = next_id++;
        }
        open.push(std::move(down));
        open.push(std::move(up));
    };

    expand(std::move(root), rres);

    while (!open.empty()) {
        double cutoff = incumbent_obj -
                        std::max(options.mip_gap_abs,
                                 options.mip_gap_rel * std::fabs(incumbent_obj));
        Node node = open.top();
        open.pop();
        if (node.bound >= cutoff) continue;  // best-bound order: the rest prune too
        // the node budget never cuts the search off without an incumbent in hand
        if (options.node_limit > 0 && node_count >= options.node_limit &&
            (std::isfinite(incumbent_obj) || node_count >= 8 * options.node_limit))
            break;

        LpResult lpres;
        solve_node(node, &lpres);
        ++node_count;
        if ((node_count & 0xFF) == 0) log_line(node.bound);
        if (lpres.status == LpStatus::Infeasible) continue;
        if (lpres.status == LpStatus::IterationLimit)
            throw SolverError("solve_milp: node relaxation hit iteration limit");
        if (lpres.status == LpStatus::Unbounded)
            throw SolverError("solve_milp: node relaxation unbounded");
        node.bound = std::max(node.bound, lpres.objective);
        if (lpres.objective >= cutoff) continue;
        expand(std::move(node), lpres);
    }

    double best_open = open.empty() ? kInf : open.top().bound;
    res.nodes = node_count;
    if (!std::isfinite(incumbent_obj)) {
        if (!open.empty()) {
            res.status = MilpStatus::NodeLimit;
            res.best_bound = best_open;
        } else {
            res.status = MilpStatus::Infeasible;
            res.infeasible_hint = "all branches infeasible";
        }
        return res;
    }
    res.objective = incumbent_obj;
    res.x = std::move(incumbent_x);
    res.best_bound = std::min(incumbent_obj, best_open);
    res.mip_gap = incumbent_obj - res.best_bound;
    bool within_gap = res.mip_gap <= std::max(options.mip_gap_abs,
                                              options.mip_gap_rel * std::fabs(incumbent_obj));
    res.status = (open.empty() || within_gap) ? MilpStatus::Optimal : MilpStatus::NodeLimit;
    (void)obj_cost_tol;
    log_line(res.best_bound);
    return res;
}

}  // namespace gridcred
