#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace iertc::props {

namespace {

constexpr double kSlack = 1e-9;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Config sample_valid(const Scene& scene, Rng& rng) {
    for (int i = 0; i < 100000; ++i) {
        Config q = sample_uniform(scene.space(), rng);
        if (is_state_valid(q, scene)) return q;
    }
    throw std::runtime_error("no valid configuration found");
}

// First error wins; later ones are dropped.
void note(std::string& slot, const std::string& msg) {
    if (slot.empty()) slot = msg;
}

std::string check_pruned(const SearchTree& tree, double best, const Config& s, const Config& g) {
    if (!tree.alive(tree.root())) return "root removed";
    for (NodeId id : tree.nodes()) {
        const double h = heuristic_cost(tree.state(id).q, s, g);
        if (h > best * (1.0 + kSlack) + kSlack) {
            std::ostringstream msg;
            msg << "node " << id << " survives with heuristic " << h << " > best " << best;
            return msg.str();
        }
    }
    return {};
}

} // namespace

void Tally::record(const std::string& property, const std::string& error) {
    auto& e = entries[property];
    ++e.runs;
    if (!error.empty()) {
        if (e.failures == 0) e.first_failure = error;
        ++e.failures;
    }
}

void Tally::merge(const Tally& other) {
    for (const auto& [name, e] : other.entries) {
        auto& mine = entries[name];
        if (mine.failures == 0 && e.failures > 0) mine.first_failure = e.first_failure;
        mine.runs += e.runs;
        mine.failures += e.failures;
    }
}

bool Tally::ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& kv) { return kv.second.failures == 0; });
}

void check_planner_run(const Problem& problem, const PathLibrary& library, std::uint64_t seed, const Budget& budget,
                       Tally& tally) {
    const Config& s = problem.query.start;
    const Config& g = problem.query.goal;
    PlannerConfig cfg;
    cfg.budget = budget;
    cfg.seed = seed;

    std::string consistency, anytime, pruning, rejection;
    bool improved_once = false;
    double last = std::numeric_limits<double>::infinity();
    Rng probe(seed ^ 0x5bd1e995ULL);

    const auto observer = [&](const PlannerSnapshot& snap) {
        for (const SearchTree* t : {&snap.start_tree, &snap.goal_tree}) {
            const std::string err = t->check_invariants(1e-9);
            if (!err.empty()) note(consistency, "iteration " + std::to_string(snap.iteration) + ": " + err);
        }
        const double best = snap.incumbent.cost;
        if (best > last) note(anytime, "incumbent cost rose from " + std::to_string(last) + " to " + std::to_string(best));
        if (best < last) {
            improved_once = true;
            for (const SearchTree* t : {&snap.start_tree, &snap.goal_tree}) {
                const std::string err = check_pruned(*t, best, s, g);
                if (!err.empty()) note(pruning, err);
            }
            for (const Config& q : snap.incumbent.path)
                if (heuristic_cost(q, s, g) > best * (1.0 + kSlack) + kSlack)
                    note(pruning, "incumbent path vertex would be pruned");
            const auto& path = snap.incumbent.path;
            for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                for (int k = 0; k < 4; ++k) {
                    const double t = uniform01(probe);
                    const Config q = path[i] + t * (path[i + 1] - path[i]);
                    if (reject_sample(q, best, s, g)) note(rejection, "a point on the incumbent path is rejected");
                }
            }
        }
        last = best;
    };

    const PlanResult r = plan(problem.query, problem.scene, library, cfg, observer);
    tally.record("tree cost consistency", consistency);

    if (!r.trace.non_increasing()) note(anytime, "trace is not non-increasing");
    if (r.solved() && (r.trace.empty() || r.trace.samples.back().cost != r.cost))
        note(anytime, "returned cost differs from the last trace value");
    tally.record("anytime monotonicity", anytime);

    if (improved_once) {
        tally.record("prune safety", pruning);
        tally.record("rejection soundness", rejection);
    }

    if (r.solved()) {
        std::string validity;
        if (r.path.size() < 2) note(validity, "path has fewer than two vertices");
        else {
            if ((r.path.front() - s).cwiseAbs().maxCoeff() > 1e-9) note(validity, "path does not start at the start");
            if ((r.path.back() - g).cwiseAbs().maxCoeff() > 1e-9) note(validity, "path does not end at the goal");
            for (std::size_t i = 0; i + 1 < r.path.size(); ++i)
                if (!is_motion_valid(r.path[i], r.path[i + 1], problem.scene))
                    note(validity, "leg " + std::to_string(i) + " collides");
            const double length = polyline_length(r.path);
            if (std::abs(length - r.cost) > 1e-6 * std::max(1.0, length))
                note(validity, "reported cost " + std::to_string(r.cost) + " != length " + std::to_string(length));
        }
        tally.record("solution validity", validity);
    }

    const PlanResult again = plan(problem.query, problem.scene, library, cfg);
    tally.record("determinism", again == r ? std::string{} : "rerun with the same seed differs");
}

void check_rewire(const Scene& scene, std::uint64_t seed, Tally& tally) {
    Rng rng(seed);
    const double diag = scene.space().diagonal();
    SearchTree tree({sample_valid(scene, rng), 0.0}, Orientation::FromStart);
    const int n = 2 + static_cast<int>(uniform01(rng) * 28.0);
    for (int tries = 0; static_cast<int>(tree.size()) < n && tries < 20000; ++tries) {
        const Config q = sample_valid(scene, rng);
        const auto ids = tree.nodes();
        const NodeId parent = ids[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ids.size()))];
        if (distance(tree.state(parent).q, q) > 0.4 * diag) continue;
        if (!is_motion_valid(tree.state(parent).q, q, scene)) continue;
        const PlannerState st{q, 0.5};
        tree.add(st, parent, straight_segment(tree.state(parent), st));
    }

    const auto ids = tree.nodes();
    const NodeId init = ids[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(ids.size()))];
    Config q = sample_valid(scene, rng);
    const Config from = tree.state(init).q;
    // A bent proposal through a midpoint offset, never shorter than the chord.
    Config mid = (from + q) / 2.0;
    for (int j = 0; j < mid.size(); ++j) mid[j] += 0.02 * diag * (uniform01(rng) - 0.5);
    MicroSegment proposal;
    proposal.alpha_init = 0.5;
    proposal.alpha_targ = 0.5;
    proposal.waypoints = {from, mid, q};
    proposal.phases = {0.5, 0.5, 0.5};
    proposal.cost = polyline_length(proposal.waypoints);

    const double radius = (0.1 + 0.4 * uniform01(rng)) * diag;
    std::map<NodeId, double> before;
    for (NodeId id : ids) before[id] = tree.cost(id);
    const auto nbrs = tree.within(q, radius);
    double expected = before[init] + proposal.cost;
    for (NodeId nb : nbrs)
        if (is_motion_valid(tree.state(nb).q, q, scene))
            expected = std::min(expected, before[nb] + distance(tree.state(nb).q, q));

    std::string err;
    const auto r = rewire(tree, init, {q, 0.5}, proposal, scene, FixedRadius{radius});
    const double got = tree.cost(r.node);
    if (std::abs(got - expected) > 1e-9 * std::max(1.0, expected))
        note(err, "arrival cost " + std::to_string(got) + " != oracle " + std::to_string(expected));
    for (const auto& [id, c] : before)
        if (tree.cost(id) > c + 1e-9) note(err, "node " + std::to_string(id) + " got more expensive");
    for (NodeId nb : nbrs) {
        if (nb == r.parent || nb == tree.root() || tree.is_ancestor(nb, r.node)) continue;
        if (is_motion_valid(q, tree.state(nb).q, scene) &&
            tree.cost(nb) > got + distance(q, tree.state(nb).q) + 1e-9)
            note(err, "neighbour " + std::to_string(nb) + " was not rerouted through the new node");
    }
    const std::string inv = tree.check_invariants(1e-9);
    if (!inv.empty()) note(err, inv);
    tally.record("rewire monotonicity", err);
}

void check_shortcut(const Scene& scene, const PathLibrary& library, const Query& query, std::uint64_t seed,
                    Tally& tally) {
    Rng rng(seed);
    const PhaseGrid grid(20);
    const ExperiencePath mapped =
        discretize_phases(map_experience(retrieve(library, query.start, query.goal), query.start, query.goal), 20);
    SearchTree tree({query.start, 0.0}, Orientation::FromStart);
    std::string err;
    bool exercised = false;
    for (int i = 0; i < 200; ++i) {
        const auto node = select_node(tree, rng);
        if (!node) break;
        auto [segment, end] =
            generate_segment(tree.state(*node), std::nullopt, mapped, Orientation::FromStart, grid, 0.1, rng);
        const MicroSegment original = segment;
        const auto ext = extend(tree, std::move(segment), *node, end, true, scene, FixedRadius{0.0});
        if (ext.outcome != ExtendOutcome::Advance) continue;
        const MicroSegment& stored = tree.edge(ext.node);
        if (tree.parent(ext.node) != *node) continue; // an exact duplicate won the parent choice
        if (original.waypoints.size() > 2 && stored.waypoints.size() == 2) {
            exercised = true;
            if (stored.cost > original.cost + 1e-12)
                note(err, "straight edge " + std::to_string(stored.cost) + " > segment " + std::to_string(original.cost));
        }
    }
    if (exercised) tally.record("shortcut dominance", err);
}

namespace {

struct Family {
    std::string label;
    std::vector<std::string> templates;
    int runs;
};

Tally run_family(const Family& family, const Budget& budget, std::uint64_t seed) {
    Tally tally;
    const int per_template = (family.runs + static_cast<int>(family.templates.size()) - 1) /
                             static_cast<int>(family.templates.size());
    int done = 0;
    for (std::size_t k = 0; k < family.templates.size() && done < family.runs; ++k) {
        const SceneTemplate tmpl = SceneTemplate::parse(family.templates[k]);
        const std::uint64_t base = derive_seed(seed, k);
        const PathLibrary library = build_dataset(tmpl, 10, derive_seed(base, 1)).library;
        const ProblemSet problems = build_dataset(tmpl, std::min(per_template, family.runs - done), derive_seed(base, 2)).problems;
        for (std::size_t i = 0; i < problems.size(); ++i, ++done) {
            const std::uint64_t run = derive_seed(base, 100 + i);
            check_planner_run(problems[i], library, run, budget, tally);
            check_rewire(problems[i].scene, derive_seed(run, 1), tally);
            check_shortcut(problems[i].scene, library, problems[i].query, derive_seed(run, 2), tally);
        }
    }
    Tally labelled;
    for (const auto& [name, e] : tally.entries) labelled.entries[family.label + ": " + name] = e;
    return labelled;
}

} // namespace

Tally run_suite(const SuiteSize& size, std::uint64_t seed) {
    const auto budget = [&](double seconds) { return Budget{seconds, size.max_iterations, ClockKind::Virtual}; };
    Tally all;
    all.merge(run_family({"2-D point", {"ClutterGrid-2d", "GapWall-2d"}, size.planar}, budget(size.budget), derive_seed(seed, 1)));
    all.merge(run_family({"6-D point", {"ClutterGrid-6d", "OpenBox-6d"}, size.spatial}, budget(size.budget), derive_seed(seed, 2)));
    all.merge(run_family({"planar arm", {"ArmShelf-3d"}, size.arm}, budget(size.arm_budget), derive_seed(seed, 3)));
    return all;
}

} // namespace iertc::props
