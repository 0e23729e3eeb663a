#pragma once

// Experience-guided bidirectional tree search with asymptotic improvement.
//
// Both trees grow over (configuration, phase) states. New edges are
// "micro-experiences": slices of the retrieved experience path, translated to
// start at the expanded node and sheared by a random offset. Edges are
// shortcut to straight motions when possible, rewired RRT*-style, and the
// trees are pruned against an admissible heuristic once a solution exists.

#include "iertc/cspace.hpp"
#include "iertc/experience.hpp"
#include "iertc/result.hpp"
#include "iertc/tree.hpp"

#include <array>
#include <functional>
#include <optional>
#include <variant>

namespace iertc {

struct FixedRadius {
    double radius;
};

/// radius = min(gamma * (log n / n)^(1/d), r_max). Non-positive gamma or
/// r_max select the defaults derived from the configuration space.
struct ShrinkingBall {
    double gamma = 0.0;
    double r_max = 0.0;
};

using NearRadiusPolicy = std::variant<FixedRadius, ShrinkingBall>;

/// Resolved near-neighbour radius for a tree of n nodes in the given space.
double near_radius(const NearRadiusPolicy& policy, std::size_t n, const ConfigSpace& space);

struct PlannerConfig {
    int divisions = 20;           // phase grid divisions m
    double morph_fraction = 0.1;  // shear magnitude as a fraction of segment arc length
    double prune_threshold = 0.0; // prune when an improvement is at least this large
    NearRadiusPolicy near_radius = ShrinkingBall{};
    Budget budget = Budget::wall(1.0);
    std::uint64_t seed = 0;
    double heartbeat = 0.1; // trace sampling period, seconds

    void validate() const;
};

/// Candidate solution assembled from the two trees.
struct Candidate {
    std::vector<Config> path;
    double cost;
};

// ---------------------------------------------------------------------------
// Building blocks. Exposed for testing and for reuse by the baselines.

/// Uniform choice over expandable nodes; nullopt when every node sits at the
/// terminal phase.
std::optional<NodeId> select_node(const SearchTree& tree, Rng& rng);

/// Uniform grid phase strictly beyond alpha_init in the growth direction.
double sample_segment_end(double alpha_init, Orientation orientation, const PhaseGrid& grid, Rng& rng);

/// Slice of a grid-discretized experience between two grid phases, ordered
/// from alpha_init to alpha_targ (reversed when alpha_targ < alpha_init).
MicroSegment extract_segment(const ExperiencePath& mapped, double alpha_init, double alpha_targ,
                             const PhaseGrid& grid);

/// w_i -> w_i + b + rho_i * lambda with rho_i the phase fraction of the span.
MicroSegment morph_segment(const MicroSegment& segment, const Config& shear, const Config& shift);

MicroSegment straight_segment(const PlannerState& from, const PlannerState& to);

/// Targeted mode (target present) bends the slice so it ends exactly at the
/// target; explore mode draws the end phase and a random shear.
std::pair<MicroSegment, PlannerState> generate_segment(const PlannerState& init,
                                                       const std::optional<PlannerState>& target,
                                                       const ExperiencePath& mapped, Orientation orientation,
                                                       const PhaseGrid& grid, double morph_fraction, Rng& rng);

std::vector<NodeId> near(const SearchTree& tree, const Config& q, const NearRadiusPolicy& policy,
                         const ConfigSpace& space);

struct RewireResult {
    NodeId parent;
    NodeId node;
    std::size_t reparented = 0;
};

/// Chooses the cheapest collision-free parent among the neighbours of target,
/// inserts target, then reroutes neighbours through it where that is cheaper.
/// The segment is replaced by a straight motion when a neighbour wins.
RewireResult rewire(SearchTree& tree, NodeId init, const PlannerState& target, MicroSegment segment,
                    const Scene& scene, const NearRadiusPolicy& policy);

enum class ExtendOutcome { Advance, Fail };

struct ExtendResult {
    ExtendOutcome outcome = ExtendOutcome::Fail;
    NodeId node = 0;
};

ExtendResult extend(SearchTree& tree, MicroSegment segment, NodeId init, const PlannerState& target, bool explore,
                    const Scene& scene, const NearRadiusPolicy& policy);

/// Distance from start to q plus distance from q to goal; a lower bound on
/// the cost of any path through q.
double heuristic_cost(const Config& q, const Config& q_start, const Config& q_goal);

/// True when q cannot lie on a path cheaper than best_cost.
bool reject_sample(const Config& q, double best_cost, const Config& q_start, const Config& q_goal);

/// Removes nodes whose heuristic exceeds best_cost, with their subtrees.
std::size_t prune(std::array<SearchTree*, 2> trees, double best_cost, const Config& q_start, const Config& q_goal);

/// Joins the start-tree branch ending at start_node with the goal-tree branch
/// ending at goal_node (both at the same configuration).
Candidate join_paths(const SearchTree& start_tree, NodeId start_node, const SearchTree& goal_tree, NodeId goal_node);

/// Bridges the other tree's nearest node to the freshly added node. On
/// success the bridge node is added to `other` and the joined path returned.
std::optional<Candidate> try_connect(const SearchTree& active, NodeId added, SearchTree& other,
                                     const ExperiencePath& mapped, const PhaseGrid& grid, const Scene& scene);

struct Incumbent {
    std::vector<Config> path;
    double cost = std::numeric_limits<double>::infinity();

    bool exists() const { return !path.empty(); }
};

struct IncumbentUpdate {
    bool accepted = false;
    bool prune = false;
};

/// Strictly-cheaper replacement; prune when the improvement reaches the
/// threshold (always on the first solution).
IncumbentUpdate update_incumbent(Incumbent& incumbent, Candidate candidate, double prune_threshold);

/// Read-only view of the search after each iteration, for instrumentation.
struct PlannerSnapshot {
    const SearchTree& start_tree;
    const SearchTree& goal_tree;
    const Incumbent& incumbent;
    std::uint64_t iteration;
};

using PlannerObserver = std::function<void(const PlannerSnapshot&)>;

/// Runs the anytime search until the budget is exhausted.
PlanResult plan(const Query& query, const Scene& scene, const PathLibrary& library, const PlannerConfig& cfg,
                const PlannerObserver& observer = {});

} // namespace iertc
