#pragma once

// Randomized invariant checks shared by the unit tests (few seeds) and the
// acceptance binary (full scale).

#include "iertc/planner.hpp"
#include "iertc/scenegen.hpp"

#include <map>
#include <string>

namespace iertc::props {

/// Per-property counts: runs that exercised the property and runs that broke it.
struct Tally {
    struct Entry {
        std::size_t runs = 0;
        std::size_t failures = 0;
        std::string first_failure;
    };
    std::map<std::string, Entry> entries;

    void record(const std::string& property, const std::string& error);
    void merge(const Tally& other);
    bool ok() const;
};

struct SuiteSize {
    int planar = 70;           // 2-D point robot runs
    int spatial = 70;          // 6-D point robot runs
    int arm = 60;              // planar arm runs; about half solve
    double budget = 0.15;      // virtual seconds per point robot run
    double arm_budget = 0.5;   // arm runs need longer to find a first solution
    // Every iteration rechecks both trees in full, so runs are capped to keep
    // that quadratic cost bounded.
    std::uint64_t max_iterations = 3000;
};

/// One seeded planner run: tree cost consistency after every iteration,
/// prune safety, rejection soundness, anytime monotonicity, solution
/// validity and determinism.
void check_planner_run(const Problem& problem, const PathLibrary& library, std::uint64_t seed, const Budget& budget,
                       Tally& tally);

/// Rewire against an exhaustive oracle on a random tree of at most 30 nodes.
void check_rewire(const Scene& scene, std::uint64_t seed, Tally& tally);

/// Explore-mode extend: a shortcut edge never costs more than the segment it replaced.
void check_shortcut(const Scene& scene, const PathLibrary& library, const Query& query, std::uint64_t seed,
                    Tally& tally);

/// Runs every check over generated 2-D, 6-D and arm problems. Each robot
/// family gets its own problem set and an experience library from other seeds.
Tally run_suite(const SuiteSize& size, std::uint64_t seed);

} // namespace iertc::props
