#pragma once

#include "iertc/cspace.hpp"
#include "iertc/planner.hpp"
#include "iertc/result.hpp"

namespace iertc {

struct BaselineConfig {
    double step = 0.0;       // steering step; <= 0 selects 5% of the space diagonal
    double goal_bias = 0.05; // RRT* only
    NearRadiusPolicy near_radius = ShrinkingBall{};
    Budget budget = Budget::wall(1.0);
    std::uint64_t seed = 0;

    double resolved_step(const ConfigSpace& space) const { return step > 0.0 ? step : 0.05 * space.diagonal(); }
    void validate() const;
};

/// Bidirectional greedy extend/connect. Returns the first path found.
PlanResult rrt_connect(const Query& query, const Scene& scene, const BaselineConfig& cfg);

/// Single-tree RRT* with choose-parent and rewiring; anytime until the budget ends.
PlanResult rrt_star(const Query& query, const Scene& scene, const BaselineConfig& cfg);

} // namespace iertc
