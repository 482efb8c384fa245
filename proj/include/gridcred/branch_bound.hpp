#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gridcred/milp.hpp"
#include "gridcred/simplex.hpp"

namespace gridcred {

enum class MilpStatus { Optimal, Infeasible, Unbounded, NodeLimit, IterationLimit };

struct SolverOptions {
    enum class Mode { Bundled, ExportOnly };
    Mode mode = Mode::Bundled;
    double mip_gap_abs = 1e-6;
    double mip_gap_rel = 0.0;
    double feasibility_tol = 1e-6;
    int branching_rule = 0;  // 0: most fractional, 1: lowest index
    long node_limit = 0;     // 0 = unlimited
    std::ostream* log = nullptr;  // solver log: node_count,bound,incumbent,gap

    // Optional incumbent seed: binaries pinned to these rounded values (those
    // in hint_relax_up pinned to 1 instead) for one LP solve at the root.
    // A feasible result enters as the first incumbent; never affects bounds.
    const std::vector<double>* binary_hint = nullptr;
    const std::vector<int>* hint_relax_up = nullptr;
};

struct MilpResult {
    MilpStatus status = MilpStatus::IterationLimit;
    double objective = 0.0;
    double best_bound = 0.0;
    double mip_gap = kInf;
    std::vector<double> x;
    long nodes = 0;
    std::string infeasible_hint;
};

// Exact branch-and-bound over dual-simplex LP relaxations, best-bound node
// order. Bound changes are the only difference between nodes, so each child
// re-optimizes from its parent's basis in a few dual iterations.
// root_warm seeds the root relaxation (probe-to-probe reuse); root_basis_out,
// when non-null, receives the root's optimal basis for the next caller.
MilpResult solve_milp(const MilpModel& model, const SolverOptions& options,
                      const Basis* root_warm = nullptr, Basis* root_basis_out = nullptr);

}  // namespace gridcred
