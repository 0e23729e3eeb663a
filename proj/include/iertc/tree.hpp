#pragma once

#include "iertc/cspace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iertc {

/// Growth direction of a tree along the phase axis. A FromStart tree is
/// rooted at phase 0 and grows toward 1; a FromGoal tree the reverse.
enum class Orientation { FromStart, FromGoal };

struct PlannerState {
    Config q;
    double alpha = 0.0;
};

inline double root_phase(Orientation o) { return o == Orientation::FromStart ? 0.0 : 1.0; }
inline double terminal_phase(Orientation o) { return o == Orientation::FromStart ? 1.0 : 0.0; }

using NodeId = std::size_t;

/// Rooted tree over planner states. Each non-root node stores the segment
/// from its parent (waypoints run parent to child) and its cost-to-come.
/// Removed nodes keep their ids; ids are never reused.
class SearchTree {
public:
    SearchTree(PlannerState root, Orientation orientation);

    Orientation orientation() const { return orientation_; }
    NodeId root() const { return 0; }
    int dim() const { return dim_; }

    /// Number of live nodes.
    std::size_t size() const { return alive_.size(); }
    const std::vector<NodeId>& nodes() const { return alive_; }
    /// Live nodes whose phase is not the terminal phase of the orientation.
    const std::vector<NodeId>& expandable() const { return expandable_; }

    bool alive(NodeId id) const { return id < nodes_.size() && nodes_[id].alive; }
    const PlannerState& state(NodeId id) const { return nodes_.at(id).state; }
    std::optional<NodeId> parent(NodeId id) const;
    const MicroSegment& edge(NodeId id) const { return nodes_.at(id).edge; }
    double cost(NodeId id) const { return nodes_.at(id).cost; }
    const std::vector<NodeId>& children(NodeId id) const { return nodes_.at(id).children; }

    NodeId add(PlannerState state, NodeId parent, MicroSegment edge);

    /// Moves a subtree under a new parent and refreshes descendant costs.
    void reparent(NodeId id, NodeId new_parent, MicroSegment edge);

    /// Removes a node and all its descendants; the root cannot be removed.
    std::size_t remove_subtree(NodeId id);
    /// Batch form of remove_subtree; ids already removed are skipped.
    std::size_t remove_subtrees(const std::vector<NodeId>& ids);

    bool is_ancestor(NodeId ancestor, NodeId id) const;

    NodeId nearest(const Config& q) const;
    std::vector<NodeId> within(const Config& q, double radius) const;

    /// Configurations from the root to id, concatenating edge waypoints.
    std::vector<Config> path_to(NodeId id) const;

    /// Distance evaluations performed by nearest/within so far.
    std::uint64_t distance_evals() const { return distance_evals_; }

    /// Empty when all structural and cost invariants hold, otherwise a
    /// description of the first violation.
    std::string check_invariants(double tol = 1e-9) const;

private:
    struct Node {
        PlannerState state;
        std::optional<NodeId> parent;
        MicroSegment edge;
        double cost = 0.0;
        std::vector<NodeId> children;
        bool alive = true;
    };

    void propagate_costs(NodeId id);
    std::size_t detach_subtree(NodeId id);
    void rebuild_index();
    bool is_terminal(double alpha) const;
    double squared_distance_to(NodeId id, const Config& q) const;

    Orientation orientation_;
    int dim_;
    std::vector<Node> nodes_;
    std::vector<double> coords_; // node positions, dim_ values per id
    std::vector<NodeId> alive_;
    std::vector<NodeId> expandable_;
    mutable std::uint64_t distance_evals_ = 0;
};

} // namespace iertc
