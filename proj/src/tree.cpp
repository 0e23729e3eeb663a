#include "iertc/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace iertc {

namespace {

inline double squared_distance(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace

SearchTree::SearchTree(PlannerState root, Orientation orientation)
    : orientation_(orientation), dim_(static_cast<int>(root.q.size())) {
    if (root.alpha != root_phase(orientation)) throw InputError("search tree: root phase must match orientation");
    Node node;
    node.state = std::move(root);
    node.edge.waypoints = {node.state.q, node.state.q};
    node.edge.alpha_init = node.edge.alpha_targ = node.state.alpha;
    coords_.assign(node.state.q.data(), node.state.q.data() + dim_);
    nodes_.push_back(std::move(node));
    alive_.push_back(0);
    expandable_.push_back(0);
}

std::optional<NodeId> SearchTree::parent(NodeId id) const { return nodes_.at(id).parent; }

bool SearchTree::is_terminal(double alpha) const { return alpha == terminal_phase(orientation_); }

NodeId SearchTree::add(PlannerState state, NodeId parent, MicroSegment edge) {
    if (!alive(parent)) throw InputError("search tree: parent is not a live node");
    if (state.q.size() != dim_) throw InputError("search tree: state dimension mismatch");
    const NodeId id = nodes_.size();
    Node node;
    node.cost = nodes_[parent].cost + edge.cost;
    node.parent = parent;
    node.edge = std::move(edge);
    node.state = std::move(state);
    coords_.insert(coords_.end(), node.state.q.data(), node.state.q.data() + dim_);
    const bool terminal = is_terminal(node.state.alpha);
    nodes_.push_back(std::move(node));
    nodes_[parent].children.push_back(id);
    alive_.push_back(id);
    if (!terminal) expandable_.push_back(id);
    return id;
}

void SearchTree::reparent(NodeId id, NodeId new_parent, MicroSegment edge) {
    if (id == root()) throw InputError("search tree: cannot reparent the root");
    if (!alive(id) || !alive(new_parent)) throw InputError("search tree: reparent on a removed node");
    if (is_ancestor(id, new_parent)) throw InputError("search tree: reparent would create a cycle");
    auto& old_children = nodes_[*nodes_[id].parent].children;
    old_children.erase(std::find(old_children.begin(), old_children.end(), id));
    nodes_[new_parent].children.push_back(id);
    nodes_[id].parent = new_parent;
    nodes_[id].edge = std::move(edge);
    propagate_costs(id);
}

void SearchTree::propagate_costs(NodeId id) {
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        nodes_[n].cost = nodes_[*nodes_[n].parent].cost + nodes_[n].edge.cost;
        for (NodeId c : nodes_[n].children) stack.push_back(c);
    }
}

std::size_t SearchTree::detach_subtree(NodeId id) {
    if (id == root()) throw InputError("search tree: cannot remove the root");
    if (!alive(id)) return 0;
    auto& siblings = nodes_[*nodes_[id].parent].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), id));

    std::size_t removed = 0;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        nodes_[n].alive = false;
        ++removed;
        for (NodeId c : nodes_[n].children) stack.push_back(c);
        nodes_[n].children.clear();
    }
    return removed;
}

std::size_t SearchTree::remove_subtree(NodeId id) {
    const std::size_t removed = detach_subtree(id);
    if (removed > 0) rebuild_index();
    return removed;
}

std::size_t SearchTree::remove_subtrees(const std::vector<NodeId>& ids) {
    std::size_t removed = 0;
    for (NodeId id : ids) removed += detach_subtree(id);
    if (removed > 0) rebuild_index();
    return removed;
}

void SearchTree::rebuild_index() {
    alive_.clear();
    expandable_.clear();
    for (NodeId id = 0; id < nodes_.size(); ++id) {
        if (!nodes_[id].alive) continue;
        alive_.push_back(id);
        if (!is_terminal(nodes_[id].state.alpha)) expandable_.push_back(id);
    }
}

bool SearchTree::is_ancestor(NodeId ancestor, NodeId id) const {
    std::optional<NodeId> cur = id;
    while (cur) {
        if (*cur == ancestor) return true;
        cur = nodes_[*cur].parent;
    }
    return false;
}

double SearchTree::squared_distance_to(NodeId id, const Config& q) const {
    return squared_distance(coords_.data() + id * static_cast<std::size_t>(dim_), q.data(), dim_);
}

NodeId SearchTree::nearest(const Config& q) const {
    NodeId best = root();
    double best_d = std::numeric_limits<double>::infinity();
    const double* base = coords_.data();
    const double* qp = q.data();
    const auto stride = static_cast<std::size_t>(dim_);
    for (NodeId id : alive_) {
        const double d = squared_distance(base + id * stride, qp, dim_);
        if (d < best_d) {
            best_d = d;
            best = id;
        }
    }
    distance_evals_ += alive_.size();
    return best;
}

std::vector<NodeId> SearchTree::within(const Config& q, double radius) const {
    std::vector<NodeId> out;
    if (radius < 0.0) return out;
    const double* base = coords_.data();
    const double* qp = q.data();
    const auto stride = static_cast<std::size_t>(dim_);
    for (NodeId id : alive_)
        if (std::sqrt(squared_distance(base + id * stride, qp, dim_)) <= radius) out.push_back(id);
    distance_evals_ += alive_.size();
    return out;
}

std::vector<Config> SearchTree::path_to(NodeId id) const {
    std::vector<NodeId> chain;
    for (std::optional<NodeId> cur = id; cur; cur = nodes_.at(*cur).parent) chain.push_back(*cur);
    std::reverse(chain.begin(), chain.end());

    std::vector<Config> path{nodes_[root()].state.q};
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto& wps = nodes_[chain[i]].edge.waypoints;
        path.insert(path.end(), wps.begin() + 1, wps.end());
    }
    return path;
}

std::string SearchTree::check_invariants(double tol) const {
    std::ostringstream err;
    if (!nodes_[root()].alive || nodes_[root()].parent) return "root missing or has a parent";
    if (nodes_[root()].state.alpha != root_phase(orientation_)) return "root phase does not match orientation";
    if (nodes_[root()].cost != 0.0) return "root cost is not zero";
    for (NodeId id : alive_) {
        if (id == root()) continue;
        const auto& n = nodes_[id];
        if (!n.parent || !nodes_[*n.parent].alive) {
            err << "node " << id << " has no live parent";
            return err.str();
        }
        const auto& siblings = nodes_[*n.parent].children;
        if (std::count(siblings.begin(), siblings.end(), id) != 1) {
            err << "node " << id << " missing from its parent's child list";
            return err.str();
        }
        const double expected = nodes_[*n.parent].cost + n.edge.cost;
        if (std::abs(n.cost - expected) > tol * std::max(1.0, expected)) {
            err << "node " << id << " cost " << n.cost << " != parent cost + edge cost " << expected;
            return err.str();
        }
        if (std::abs(n.edge.cost - polyline_length(n.edge.waypoints)) > tol * std::max(1.0, n.edge.cost)) {
            err << "node " << id << " edge cost disagrees with its polyline length";
            return err.str();
        }
        if (n.edge.waypoints.size() < 2 || n.edge.waypoints.front() != nodes_[*n.parent].state.q ||
            n.edge.waypoints.back() != n.state.q) {
            err << "node " << id << " edge does not join parent to node";
            return err.str();
        }
    }
    // Every live node must be reachable from the root through child links;
    // with one parent per node this rules out cycles.
    std::vector<NodeId> stack{root()};
    std::size_t reached = 0;
    while (!stack.empty() && reached <= alive_.size()) {
        const NodeId n = stack.back();
        stack.pop_back();
        ++reached;
        for (NodeId c : nodes_[n].children) stack.push_back(c);
    }
    if (reached != alive_.size()) {
        err << "reached " << reached << " of " << alive_.size() << " live nodes from the root";
        return err.str();
    }
    return {};
}

} // namespace iertc
