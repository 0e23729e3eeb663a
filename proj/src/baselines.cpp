#include "iertc/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace iertc {

namespace {

void check_query(const Query& query, const Scene& scene) {
    if (query.start.size() != scene.dim() || query.goal.size() != scene.dim())
        throw InputError("baseline: query dimension differs from scene dimension");
    if (!is_state_valid(query.start, scene)) throw InputError("baseline: start state is invalid");
    if (!is_state_valid(query.goal, scene)) throw InputError("baseline: goal state is invalid");
}

Config steer(const Config& from, const Config& to, double step) {
    const double d = distance(from, to);
    if (d <= step) return to;
    return from + (to - from) * (step / d);
}

bool out_of_budget(const Budget& budget, std::uint64_t iterations, const RunClock& clock) {
    if (budget.max_iterations > 0 && iterations >= budget.max_iterations) return true;
    return budget.seconds > 0.0 && clock.elapsed() >= budget.seconds;
}

PlanResult trivial_result() {
    PlanResult r;
    r.status = PlanStatus::Solved;
    r.cost = 0.0;
    r.time_to_first_solution = 0.0;
    r.trace.append(0.0, 0.0);
    return r;
}

enum class Growth { Reached, Advanced, Trapped };

struct GrowResult {
    Growth growth;
    NodeId node;
};

GrowResult grow(SearchTree& tree, const Config& target, double step, const Scene& scene) {
    const NodeId near_id = tree.nearest(target);
    const PlannerState& from = tree.state(near_id);
    const Config q_new = steer(from.q, target, step);
    if (!is_motion_valid(from.q, q_new, scene)) return {Growth::Trapped, near_id};
    const PlannerState s_new{q_new, from.alpha};
    const NodeId id = tree.add(s_new, near_id, straight_segment(from, s_new));
    return {q_new == target ? Growth::Reached : Growth::Advanced, id};
}

} // namespace

void BaselineConfig::validate() const {
    if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw InputError("baseline config: goal bias must be in [0, 1]");
    if (step < 0.0) throw InputError("baseline config: step must be positive");
    budget.validate();
}

PlanResult rrt_connect(const Query& query, const Scene& scene, const BaselineConfig& cfg) {
    cfg.validate();
    check_query(query, scene);
    if (query.start == query.goal) {
        auto r = trivial_result();
        r.path = {query.start, query.goal};
        return r;
    }
    const double step = cfg.resolved_step(scene.space());
    RunClock clock(cfg.budget.clock);
    Rng rng(cfg.seed);
    std::array<SearchTree, 2> trees{SearchTree({query.start, 0.0}, Orientation::FromStart),
                                    SearchTree({query.goal, 1.0}, Orientation::FromGoal)};
    std::uint64_t charged = 0;
    PlanResult result;
    std::size_t active = 0;

    while (!out_of_budget(cfg.budget, result.iterations, clock)) {
        ++result.iterations;
        clock.charge_iteration();
        SearchTree& a = trees[active];
        SearchTree& b = trees[1 - active];
        const Config sample = sample_uniform(scene.space(), rng);
        const auto extended = grow(a, sample, step, scene);
        if (extended.growth != Growth::Trapped) {
            const Config& target = a.state(extended.node).q;
            GrowResult connect{Growth::Advanced, 0};
            while (connect.growth == Growth::Advanced) connect = grow(b, target, step, scene);
            if (connect.growth == Growth::Reached) {
                const Candidate c = active == 0 ? join_paths(a, extended.node, b, connect.node)
                                                : join_paths(b, connect.node, a, extended.node);
                const double t = clock.elapsed();
                result.status = PlanStatus::Solved;
                result.path = c.path;
                result.cost = c.cost;
                result.time_to_first_solution = t;
                result.trace.append(t, c.cost);
                return result;
            }
        }
        const std::uint64_t evals = trees[0].distance_evals() + trees[1].distance_evals();
        clock.charge_distance_evals(evals - charged);
        charged = evals;
        active = 1 - active;
    }
    return result;
}

PlanResult rrt_star(const Query& query, const Scene& scene, const BaselineConfig& cfg) {
    cfg.validate();
    check_query(query, scene);
    if (query.start == query.goal) {
        auto r = trivial_result();
        r.path = {query.start, query.goal};
        return r;
    }
    const double step = cfg.resolved_step(scene.space());
    RunClock clock(cfg.budget.clock);
    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SearchTree tree({query.start, 0.0}, Orientation::FromStart);

    // Nodes with a collision-free straight motion to the goal.
    std::vector<NodeId> goal_links;
    std::optional<NodeId> best_link;
    double best_cost = std::numeric_limits<double>::infinity();
    std::uint64_t charged = 0;
    PlanResult result;
    double last_trace = 0.0;

    while (!out_of_budget(cfg.budget, result.iterations, clock)) {
        ++result.iterations;
        clock.charge_iteration();
        const Config sample = unit(rng) < cfg.goal_bias ? query.goal : sample_uniform(scene.space(), rng);
        const NodeId near_id = tree.nearest(sample);
        const PlannerState& from = tree.state(near_id);
        const PlannerState s_new{steer(from.q, sample, step), 0.0};
        if (is_motion_valid(from.q, s_new.q, scene)) {
            const auto r = rewire(tree, near_id, s_new, straight_segment(from, s_new), scene, cfg.near_radius);
            if (distance(s_new.q, query.goal) <= step && is_motion_valid(s_new.q, query.goal, scene))
                goal_links.push_back(r.node);
        }

        // Rewiring can lower the cost of any linked node, so rescan.
        for (NodeId id : goal_links) {
            const double c = tree.cost(id) + distance(tree.state(id).q, query.goal);
            if (c < best_cost) {
                best_cost = c;
                best_link = id;
                const double t = clock.elapsed();
                if (!result.time_to_first_solution) result.time_to_first_solution = t;
                result.trace.append(t, c);
                last_trace = t;
            }
        }
        const std::uint64_t evals = tree.distance_evals();
        clock.charge_distance_evals(evals - charged);
        charged = evals;
        if (best_link && clock.elapsed() - last_trace >= 0.1) {
            last_trace = clock.elapsed();
            result.trace.append(last_trace, best_cost);
        }
    }

    if (best_link) {
        std::vector<Config> path = tree.path_to(*best_link);
        if (path.back() != query.goal) path.push_back(query.goal);
        result.status = PlanStatus::Solved;
        result.cost = best_cost;
        result.path = std::move(path);
        const double t = clock.elapsed();
        if (result.trace.samples.back().time < t) result.trace.append(t, result.cost);
    }
    return result;
}

} // namespace iertc
