#include "iertc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iertc {

namespace {

// Relative slack for heuristic comparisons, so points exactly on the
// incumbent path survive rounding in the triangle inequality.
constexpr double kCostSlack = 1e-9;

bool exceeds(double value, double bound) { return value > bound + kCostSlack * std::max(1.0, bound); }

void recompute_cost(MicroSegment& segment) { segment.cost = polyline_length(segment.waypoints); }

MicroSegment generate_targeted(const PlannerState& init, const PlannerState& target, const ExperiencePath& mapped,
                               const PhaseGrid& grid) {
    MicroSegment slice = extract_segment(mapped, init.alpha, target.alpha, grid);
    const Config shift = init.q - slice.waypoints.front();
    const Config shear = target.q - (slice.waypoints.back() + shift);
    MicroSegment out = morph_segment(slice, shear, shift);
    out.waypoints.front() = init.q;
    out.waypoints.back() = target.q;
    recompute_cost(out);
    return out;
}

} // namespace

double near_radius(const NearRadiusPolicy& policy, std::size_t n, const ConfigSpace& space) {
    if (const auto* fixed = std::get_if<FixedRadius>(&policy)) return fixed->radius;
    const auto& ball = std::get<ShrinkingBall>(policy);
    const double d = space.dim();
    const double gamma =
        ball.gamma > 0.0 ? ball.gamma : 2.0 * std::pow(1.0 + 1.0 / d, 1.0 / d) * std::pow(space.measure(), 1.0 / d);
    const double r_max = ball.r_max > 0.0 ? ball.r_max : 0.25 * space.diagonal();
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    return std::min(gamma * std::pow(std::log(nn) / nn, 1.0 / d), r_max);
}

void PlannerConfig::validate() const {
    if (divisions < 2) throw InputError("planner config: divisions must be >= 2");
    if (!(morph_fraction >= 0.0)) throw InputError("planner config: morph fraction must be >= 0");
    if (!(prune_threshold >= 0.0)) throw InputError("planner config: prune threshold must be >= 0");
    if (const auto* fixed = std::get_if<FixedRadius>(&near_radius); fixed && fixed->radius < 0.0)
        throw InputError("planner config: fixed near radius must be >= 0");
    if (!(heartbeat > 0.0)) throw InputError("planner config: heartbeat must be positive");
    budget.validate();
}

std::optional<NodeId> select_node(const SearchTree& tree, Rng& rng) {
    const auto& candidates = tree.expandable();
    if (candidates.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
}

double sample_segment_end(double alpha_init, Orientation orientation, const PhaseGrid& grid, Rng& rng) {
    const int i = grid.index_of(alpha_init);
    if (!grid.on_grid(alpha_init)) throw InputError("sample_segment_end: phase is not on the grid");
    const int m = grid.divisions();
    if (orientation == Orientation::FromStart) {
        if (i >= m) throw InputError("sample_segment_end: phase is already terminal");
        return grid.value(std::uniform_int_distribution<int>(i + 1, m)(rng));
    }
    if (i <= 0) throw InputError("sample_segment_end: phase is already terminal");
    return grid.value(std::uniform_int_distribution<int>(0, i - 1)(rng));
}

MicroSegment extract_segment(const ExperiencePath& mapped, double alpha_init, double alpha_targ,
                             const PhaseGrid& grid) {
    if (static_cast<int>(mapped.size()) != grid.divisions() + 1)
        throw InputError("extract_segment: experience is not discretized on the phase grid");
    const int from = grid.index_of(alpha_init);
    const int to = grid.index_of(alpha_targ);
    if (from == to) throw InputError("extract_segment: empty phase span");
    MicroSegment seg;
    const int step = to > from ? 1 : -1;
    for (int i = from;; i += step) {
        seg.waypoints.push_back(mapped.waypoints[static_cast<std::size_t>(i)]);
        seg.phases.push_back(grid.value(i));
        if (i == to) break;
    }
    seg.alpha_init = grid.value(from);
    seg.alpha_targ = grid.value(to);
    recompute_cost(seg);
    return seg;
}

MicroSegment morph_segment(const MicroSegment& segment, const Config& shear, const Config& shift) {
    const double span = segment.alpha_targ - segment.alpha_init;
    if (span == 0.0) throw InputError("morph_segment: degenerate phase span");
    if (segment.waypoints.size() != segment.phases.size())
        throw InputError("morph_segment: segment needs one phase per waypoint");
    MicroSegment out = segment;
    for (std::size_t i = 0; i < out.waypoints.size(); ++i) {
        if (out.waypoints[i].size() != shear.size() || shear.size() != shift.size())
            throw InputError("morph_segment: dimension mismatch");
        const double rho = (segment.phases[i] - segment.alpha_init) / span;
        out.waypoints[i] = segment.waypoints[i] + shift + rho * shear;
    }
    recompute_cost(out);
    return out;
}

MicroSegment straight_segment(const PlannerState& from, const PlannerState& to) {
    MicroSegment seg;
    seg.waypoints = {from.q, to.q};
    seg.phases = {from.alpha, to.alpha};
    seg.alpha_init = from.alpha;
    seg.alpha_targ = to.alpha;
    recompute_cost(seg);
    return seg;
}

std::pair<MicroSegment, PlannerState> generate_segment(const PlannerState& init,
                                                       const std::optional<PlannerState>& target,
                                                       const ExperiencePath& mapped, Orientation orientation,
                                                       const PhaseGrid& grid, double morph_fraction, Rng& rng) {
    if (target) return {generate_targeted(init, *target, mapped, grid), *target};

    const double alpha_targ = sample_segment_end(init.alpha, orientation, grid, rng);
    const MicroSegment slice = extract_segment(mapped, init.alpha, alpha_targ, grid);
    const Config shift = init.q - slice.waypoints.front();
    const double bound = morph_fraction * slice.cost;
    Config shear = Config::Zero(init.q.size());
    if (bound > 0.0) {
        std::uniform_real_distribution<double> offset(-bound, bound);
        for (Eigen::Index j = 0; j < shear.size(); ++j) shear[j] = offset(rng);
    }
    MicroSegment out = morph_segment(slice, shear, shift);
    out.waypoints.front() = init.q;
    recompute_cost(out);
    PlannerState end{out.waypoints.back(), alpha_targ};
    return {std::move(out), std::move(end)};
}

std::vector<NodeId> near(const SearchTree& tree, const Config& q, const NearRadiusPolicy& policy,
                         const ConfigSpace& space) {
    return tree.within(q, near_radius(policy, tree.size(), space));
}

RewireResult rewire(SearchTree& tree, NodeId init, const PlannerState& target, MicroSegment segment,
                    const Scene& scene, const NearRadiusPolicy& policy) {
    const std::vector<NodeId> neighbours = near(tree, target.q, policy, scene.space());

    NodeId parent = init;
    double best = tree.cost(init) + segment.cost;
    for (NodeId s : neighbours) {
        const double candidate = tree.cost(s) + distance(tree.state(s).q, target.q);
        if (candidate < best && is_motion_valid(tree.state(s).q, target.q, scene)) {
            best = candidate;
            parent = s;
            segment = straight_segment(tree.state(s), target);
        }
    }

    RewireResult result{parent, tree.add(target, parent, std::move(segment))};
    const NodeId node = result.node;
    for (NodeId s : neighbours) {
        if (s == parent || !tree.alive(s) || s == tree.root()) continue;
        const double through = tree.cost(node) + distance(target.q, tree.state(s).q);
        if (through < tree.cost(s) && !tree.is_ancestor(s, node) &&
            is_motion_valid(target.q, tree.state(s).q, scene)) {
            tree.reparent(s, node, straight_segment(tree.state(node), tree.state(s)));
            ++result.reparented;
        }
    }
    return result;
}

ExtendResult extend(SearchTree& tree, MicroSegment segment, NodeId init, const PlannerState& target, bool explore,
                    const Scene& scene, const NearRadiusPolicy& policy) {
    if (!is_segment_valid(segment, scene)) return {};
    if (!explore) return {ExtendOutcome::Advance, tree.add(target, init, std::move(segment))};

    const PlannerState& from = tree.state(init);
    if (segment.waypoints.size() > 2 && is_motion_valid(from.q, target.q, scene))
        segment = straight_segment(from, target);
    const auto r = rewire(tree, init, target, std::move(segment), scene, policy);
    return {ExtendOutcome::Advance, r.node};
}

double heuristic_cost(const Config& q, const Config& q_start, const Config& q_goal) {
    return distance(q_start, q) + distance(q, q_goal);
}

bool reject_sample(const Config& q, double best_cost, const Config& q_start, const Config& q_goal) {
    if (!std::isfinite(best_cost)) return false;
    return exceeds(heuristic_cost(q, q_start, q_goal), best_cost);
}

std::size_t prune(std::array<SearchTree*, 2> trees, double best_cost, const Config& q_start, const Config& q_goal) {
    if (!std::isfinite(best_cost)) return 0;
    std::size_t removed = 0;
    for (SearchTree* tree : trees) {
        std::vector<NodeId> doomed;
        for (NodeId id : tree->nodes())
            if (id != tree->root() && exceeds(heuristic_cost(tree->state(id).q, q_start, q_goal), best_cost))
                doomed.push_back(id);
        removed += tree->remove_subtrees(doomed);
    }
    return removed;
}

Candidate join_paths(const SearchTree& start_tree, NodeId start_node, const SearchTree& goal_tree,
                     NodeId goal_node) {
    std::vector<Config> path = start_tree.path_to(start_node);
    std::vector<Config> tail = goal_tree.path_to(goal_node);
    std::reverse(tail.begin(), tail.end());
    path.insert(path.end(), tail.begin() + 1, tail.end());

    // Zero-length legs (bridges between coincident nodes) carry no cost.
    std::vector<Config> compact;
    compact.reserve(path.size());
    for (auto& q : path)
        if (compact.empty() || q != compact.back()) compact.push_back(std::move(q));
    if (compact.size() == 1) compact.push_back(compact.front());
    const double cost = polyline_length(compact);
    return {std::move(compact), cost};
}

std::optional<Candidate> try_connect(const SearchTree& active, NodeId added, SearchTree& other,
                                     const ExperiencePath& mapped, const PhaseGrid& grid, const Scene& scene) {
    const PlannerState& target = active.state(added);
    const NodeId near_id = other.nearest(target.q);
    const PlannerState from = other.state(near_id);

    const int i_from = grid.index_of(from.alpha);
    const int i_to = grid.index_of(target.alpha);
    const bool ordered = other.orientation() == Orientation::FromStart ? i_to > i_from : i_to < i_from;

    // Extension without shortcutting or rewiring; the radius is unused.
    auto attach = [&](MicroSegment bridge, const PlannerState& end) -> std::optional<Candidate> {
        const auto ext = extend(other, std::move(bridge), near_id, end, false, scene, FixedRadius{0.0});
        if (ext.outcome == ExtendOutcome::Fail) return std::nullopt;
        if (active.orientation() == Orientation::FromStart) return join_paths(active, added, other, ext.node);
        return join_paths(other, ext.node, active, added);
    };

    if (ordered) {
        if (auto joined = attach(generate_targeted(from, target, mapped, grid), target)) return joined;
    }
    // Fall back to a straight bridge. When the phases run against the other
    // tree's growth direction, the bridge node keeps the near node's phase.
    const PlannerState end = ordered ? target : PlannerState{target.q, from.alpha};
    return attach(straight_segment(from, end), end);
}

IncumbentUpdate update_incumbent(Incumbent& incumbent, Candidate candidate, double prune_threshold) {
    if (!(candidate.cost < incumbent.cost)) return {};
    const double improvement = incumbent.cost - candidate.cost;
    incumbent.path = std::move(candidate.path);
    incumbent.cost = candidate.cost;
    return {true, improvement >= prune_threshold};
}

// ---------------------------------------------------------------------------

namespace {

class Search {
public:
    Search(const Query& query, const Scene& scene, ExperiencePath mapped, const PlannerConfig& cfg)
        : query_(query), scene_(scene), cfg_(cfg), grid_(cfg.divisions), mapped_(std::move(mapped)),
          trees_{SearchTree({query.start, 0.0}, Orientation::FromStart),
                 SearchTree({query.goal, 1.0}, Orientation::FromGoal)},
          rng_(cfg.seed), clock_(cfg.budget.clock) {}

    PlanResult run(const PlannerObserver& observer) {
        PlanResult result;
        std::size_t active = 0;
        while (!stop()) {
            ++iterations_;
            clock_.charge_iteration();
            const bool swap = iterate(active);
            if (swap) active = 1 - active;
            charge_clock();
            heartbeat();
            if (observer) observer(PlannerSnapshot{trees_[0], trees_[1], incumbent_, iterations_});
        }
        result.iterations = iterations_;
        if (incumbent_.exists()) {
            const double t = clock_.elapsed();
            if (trace_.samples.back().time < t) trace_.append(t, incumbent_.cost);
            result.status = PlanStatus::Solved;
            result.path = incumbent_.path;
            result.cost = incumbent_.cost;
            result.time_to_first_solution = first_solution_;
            result.trace = trace_;
        }
        return result;
    }

private:
    bool stop() const {
        const auto& b = cfg_.budget;
        if (b.max_iterations > 0 && iterations_ >= b.max_iterations) return true;
        return b.seconds > 0.0 && clock_.elapsed() >= b.seconds;
    }

    // One pass of the main loop; returns whether the trees swap roles.
    bool iterate(std::size_t active) {
        SearchTree& tree = trees_[active];
        SearchTree& other = trees_[1 - active];

        const auto init = select_node(tree, rng_);
        if (!init) return true;

        auto [segment, target] = generate_segment(tree.state(*init), std::nullopt, mapped_, tree.orientation(), grid_,
                                                  cfg_.morph_fraction, rng_);
        // A rejected sample restarts the loop without swapping trees.
        if (incumbent_.exists() && reject_sample(target.q, incumbent_.cost, query_.start, query_.goal)) return false;

        const auto ext = extend(tree, std::move(segment), *init, target, true, scene_, cfg_.near_radius);
        if (ext.outcome == ExtendOutcome::Fail) return true;

        // The explored end landed on the other tree's root.
        if (target.alpha == terminal_phase(tree.orientation()) && target.q == other.state(other.root()).q) {
            offer(tree.orientation() == Orientation::FromStart ? join_paths(tree, ext.node, other, other.root())
                                                               : join_paths(other, other.root(), tree, ext.node));
        }
        if (auto joined = try_connect(tree, ext.node, other, mapped_, grid_, scene_)) offer(std::move(*joined));
        return true;
    }

    void offer(Candidate candidate) {
        const auto update = update_incumbent(incumbent_, std::move(candidate), cfg_.prune_threshold);
        if (!update.accepted) return;
        const double t = clock_.elapsed();
        if (!first_solution_) first_solution_ = t;
        trace_.append(t, incumbent_.cost);
        if (update.prune) prune({&trees_[0], &trees_[1]}, incumbent_.cost, query_.start, query_.goal);
    }

    void charge_clock() {
        const std::uint64_t evals = trees_[0].distance_evals() + trees_[1].distance_evals();
        clock_.charge_distance_evals(evals - charged_evals_);
        charged_evals_ = evals;
    }

    void heartbeat() {
        if (!incumbent_.exists()) return;
        const double t = clock_.elapsed();
        if (t - trace_.samples.back().time >= cfg_.heartbeat) trace_.append(t, incumbent_.cost);
    }

    const Query& query_;
    const Scene& scene_;
    const PlannerConfig& cfg_;
    PhaseGrid grid_;
    ExperiencePath mapped_;
    std::array<SearchTree, 2> trees_;
    Rng rng_;
    RunClock clock_;
    Incumbent incumbent_;
    ConvergenceTrace trace_;
    std::optional<double> first_solution_;
    std::uint64_t iterations_ = 0;
    std::uint64_t charged_evals_ = 0;
};

} // namespace

PlanResult plan(const Query& query, const Scene& scene, const PathLibrary& library, const PlannerConfig& cfg,
                const PlannerObserver& observer) {
    cfg.validate();
    if (query.start.size() != scene.dim() || query.goal.size() != scene.dim())
        throw InputError("plan: query dimension differs from scene dimension");
    if (!is_state_valid(query.start, scene)) throw InputError("plan: start state is invalid");
    if (!is_state_valid(query.goal, scene)) throw InputError("plan: goal state is invalid");
    const ExperiencePath& experience = retrieve(library, query.start, query.goal);

    if (query.start == query.goal) {
        PlanResult result;
        result.status = PlanStatus::Solved;
        result.path = {query.start, query.goal};
        result.cost = 0.0;
        result.time_to_first_solution = 0.0;
        result.trace.append(0.0, 0.0);
        return result;
    }

    ExperiencePath mapped = discretize_phases(map_experience(experience, query.start, query.goal), cfg.divisions);
    Search search(query, scene, std::move(mapped), cfg);
    return search.run(observer);
}

} // namespace iertc
