#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridcred/climate.hpp"
#include "gridcred/grid.hpp"
#include "gridcred/reliability.hpp"
#include "gridcred/uc.hpp"

namespace gridcred {

// Base system (thermal fleet + network) plus the resources under
// accreditation, kept separate so subsets can be assembled per variant.
struct PortfolioSpec {
    PowerSystem base;
    std::vector<SolarFarm> solar;
    std::vector<WindFarm> wind;
    std::vector<StorageUnit> storage;

    std::size_t resource_count() const { return solar.size() + wind.size() + storage.size(); }
};

struct DeltaAllocation {
    double pie = 0.0;
    std::vector<double> iie;
    double delta = 0.0;
    std::vector<double> elcc;
    bool degenerate = false;  // sum(IIE) == 0 with PIE != 0; fallback split applied
};

// Pure arithmetic of the Delta method. When the interactive effects cancel
// (sum IIE == 0) with PIE == 0 the ratio is defined as zero; with PIE != 0
// the PIE is split in proportion to LI instead, keeping sum(ELCC) == PORT.
DeltaAllocation delta_allocate(double port, const std::vector<double>& fi,
                               const std::vector<double>& li);

struct StudyOptions {
    double target_lolh = 0.2;  // hours/month
    double epsilon_la = 1.0;   // MW
    double shed_tolerance_mw = 1e-3;
    UcCosts costs;
    SolverOptions solver;
    unsigned threads = 1;
    bool per_scenario_search = false;  // average per-scenario LA instead of
                                       // bisecting on the scenario-mean LOLH
};

struct ResourceAccreditation {
    std::string label;  // s<id>, w<id>, b<id>
    std::string kind;   // solar | wind | storage
    int id = 0;
    int bus = 0;
    double nameplate_mw = 0.0;
    double fi = 0.0;
    double li = 0.0;
    double iie = 0.0;
    double elcc = 0.0;
};

struct AccreditationResult {
    std::vector<ResourceAccreditation> resources;
    double port = 0.0;
    double pie = 0.0;
    double delta = 0.0;
    bool degenerate_allocation = false;
    double la_base = 0.0;
    double la_port = 0.0;
    std::vector<double> la_fi;
    std::vector<double> la_li;
    std::uint64_t scenario_seed = 0;
    double target_lolh = 0.2;
};

// Runs the 2|J|+2 system variants (base, portfolio, first-in and last-in per
// resource) against one shared scenario set, caching load adjustments by
// resource subset so overlapping variants are never re-solved.
class AccreditationEngine {
  public:
    AccreditationEngine(PortfolioSpec spec, const ScenarioSet* scenarios, StudyOptions options);

    AccreditationResult run_delta_accreditation();
    // Industry-baseline comparison: the last-in marginal value per resource.
    std::vector<double> run_last_in_marginal();

    // LA for an arbitrary subset of resource indices (0..|J|-1); cached.
    double variant_la(std::vector<std::size_t> subset);

    long searches_requested() const { return searches_requested_; }
    long searches_performed() const { return searches_performed_; }
    const std::map<std::string, LoadAdjustmentResult>& cache() const { return cache_; }

    PowerSystem assemble_system(const std::vector<std::size_t>& subset) const;
    ResourceAccreditation resource_info(std::size_t j) const;

  private:
    LoadAdjustmentResult evaluate_variant(const PowerSystem& system);

    PortfolioSpec spec_;
    const ScenarioSet* scenarios_;
    StudyOptions options_;
    double peak_demand_ = 0.0;
    std::map<std::string, LoadAdjustmentResult> cache_;
    long searches_requested_ = 0;
    long searches_performed_ = 0;
};

}  // namespace gridcred
