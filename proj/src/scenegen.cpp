#include "iertc/scenegen.hpp"
#include "iertc/json_io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace iertc {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string_view to_string(TemplateKind kind) {
    switch (kind) {
    case TemplateKind::OpenBox: return "OpenBox";
    case TemplateKind::GapWall: return "GapWall";
    case TemplateKind::ClutterGrid: return "ClutterGrid";
    case TemplateKind::Cage2D: return "Cage2D";
    case TemplateKind::ArmShelf: return "ArmShelf";
    }
    return "?";
}

TemplateKind template_kind_from_string(std::string_view name) {
    for (auto k : {TemplateKind::OpenBox, TemplateKind::GapWall, TemplateKind::ClutterGrid, TemplateKind::Cage2D,
                   TemplateKind::ArmShelf})
        if (to_string(k) == name) return k;
    throw InputError("unknown scene template '" + std::string(name) + "'");
}

SceneTemplate SceneTemplate::make(TemplateKind kind, int dim) {
    SceneTemplate t;
    t.kind = kind;
    switch (kind) {
    case TemplateKind::OpenBox:
    case TemplateKind::ClutterGrid:
        t.dim = dim > 0 ? dim : 2;
        break;
    case TemplateKind::GapWall:
        t.dim = dim > 0 ? dim : 5;
        break;
    case TemplateKind::Cage2D:
        t.dim = dim > 0 ? dim : 2;
        t.gap_width = {0.07, 0.10};
        t.endpoint_band = {0.3, 0.7};
        t.wall_thickness = 0.04;
        break;
    case TemplateKind::ArmShelf:
        t.dim = dim > 0 ? dim : 3;
        t.gap_width = {0.18, 0.24};
        t.gap_center = {-0.05, 0.15};
        t.wall_thickness = 0.04;
        break;
    }
    return t;
}

SceneTemplate SceneTemplate::parse(std::string_view name) {
    const auto dash = name.find('-');
    if (dash == std::string_view::npos) return make(template_kind_from_string(name));
    const std::string_view suffix = name.substr(dash + 1);
    int dim = 0;
    const auto [end, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), dim);
    if (ec != std::errc{} || std::string_view(end, suffix.data() + suffix.size() - end) != "d" || dim < 2)
        throw InputError("bad template name '" + std::string(name) + "', expected e.g. GapWall-5d");
    return make(template_kind_from_string(name.substr(0, dash)), dim);
}

void SceneTemplate::validate() const {
    if (dim < 2) throw InputError("scene template: dim must be >= 2");
    if (gap_width.lo > gap_width.hi || gap_center.lo > gap_center.hi || clutter_size.lo > clutter_size.hi ||
        position_jitter.lo > position_jitter.hi)
        throw InputError("scene template: empty variation range");
    if (clutter_count < 0 || open_count < 0) throw InputError("scene template: negative obstacle count");
    if (!(wall_thickness > 0.0)) throw InputError("scene template: wall thickness must be positive");
    const double diag = kind == TemplateKind::ArmShelf ? 2.0 * std::numbers::pi * std::sqrt(dim) : std::sqrt(dim);
    const double d = delta > 0.0 ? delta : 0.01 * diag;
    // Arm slots are workspace gaps; the joint-space resolution does not bound them.
    if (kind != TemplateKind::ArmShelf && kind != TemplateKind::OpenBox && kind != TemplateKind::ClutterGrid &&
        !(gap_width.lo > 2.0 * d))
        throw InputError("scene template: gap widths must exceed twice the validation resolution");
}

std::string SceneTemplate::name() const {
    std::ostringstream s;
    s << to_string(kind) << '-' << dim << 'd';
    return s.str();
}

namespace {

double uniform(Rng& rng, Range r) {
    if (r.lo == r.hi) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

AxisBox unit_box(int dim, double pad = 0.0) {
    return {Config::Constant(dim, -pad), Config::Constant(dim, 1.0 + pad)};
}

AxisBox band_box(int dim, Range band) { return {Config::Constant(dim, band.lo), Config::Constant(dim, band.hi)}; }

// Wall slab across axis 0 over [x0, x1] with an open window of the given
// width around `center` on every other axis. Returns 2 (dim - 1) boxes that
// together cover the slab minus the window.
void add_windowed_wall(std::vector<Obstacle>& obstacles, int dim, double x0, double x1, const Config& center,
                       double width, const AxisBox& extent) {
    for (int j = 1; j < dim; ++j) {
        AxisBox below = extent, above = extent;
        below.min[0] = above.min[0] = x0;
        below.max[0] = above.max[0] = x1;
        below.max[j] = center[j] - width / 2.0;
        above.min[j] = center[j] + width / 2.0;
        if (below.max[j] > below.min[j]) obstacles.emplace_back(below);
        if (above.max[j] > above.min[j]) obstacles.emplace_back(above);
    }
}

SceneLayout open_box(const SceneTemplate& t, Rng& rng) {
    const int d = t.dim;
    std::vector<Obstacle> obstacles;
    for (int i = 0; i < t.open_count; ++i) {
        Config c(d), half(d);
        for (int j = 0; j < d; ++j) {
            c[j] = uniform(rng, {0.25, 0.75});
            half[j] = uniform(rng, {0.04, 0.08});
        }
        obstacles.emplace_back(AxisBox{c - half, c + half});
    }
    Scene scene(ConfigSpace(Config::Zero(d), Config::Ones(d)), PointRobot{}, std::move(obstacles), t.delta);
    return {std::move(scene), {unit_box(d), unit_box(d), std::nullopt}};
}

SceneLayout gap_wall(const SceneTemplate& t, Rng& rng) {
    const int d = t.dim;
    const double mid = 0.5 + uniform(rng, t.position_jitter);
    const double width = uniform(rng, t.gap_width);
    Config center(d);
    center[0] = mid;
    for (int j = 1; j < d; ++j) center[j] = uniform(rng, t.gap_center);

    std::vector<Obstacle> obstacles;
    add_windowed_wall(obstacles, d, mid - t.wall_thickness / 2.0, mid + t.wall_thickness / 2.0, center, width,
                      unit_box(d, 0.01));
    Scene scene(ConfigSpace(Config::Zero(d), Config::Ones(d)), PointRobot{}, std::move(obstacles), t.delta);

    QueryRegions regions{band_box(d, t.endpoint_band), band_box(d, t.endpoint_band), std::nullopt};
    regions.start.min[0] = 0.03;
    regions.start.max[0] = 0.2;
    regions.goal.min[0] = 0.8;
    regions.goal.max[0] = 0.97;
    return {std::move(scene), std::move(regions)};
}

SceneLayout clutter_grid(const SceneTemplate& t, Rng& rng) {
    const int d = t.dim;
    int per_axis = 1;
    while (std::pow(per_axis, d) < t.clutter_count) ++per_axis;
    std::size_t cells = 1;
    for (int j = 0; j < d; ++j) cells *= static_cast<std::size_t>(per_axis);
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const double pitch = 1.0 / per_axis;
    std::vector<Obstacle> obstacles;
    for (int i = 0; i < t.clutter_count; ++i) {
        std::size_t cell = order[static_cast<std::size_t>(i)];
        Config c(d);
        for (int j = 0; j < d; ++j) {
            c[j] = (static_cast<double>(cell % per_axis) + 0.5) * pitch + uniform(rng, t.position_jitter);
            cell /= static_cast<std::size_t>(per_axis);
        }
        const double half = uniform(rng, t.clutter_size) / 2.0;
        obstacles.emplace_back(AxisBox{c.array() - half, c.array() + half});
    }
    Scene scene(ConfigSpace(Config::Zero(d), Config::Ones(d)), PointRobot{}, std::move(obstacles), t.delta);
    return {std::move(scene), {unit_box(d), unit_box(d), std::nullopt}};
}

// Hollow box around the goal region with a single door facing the start side.
SceneLayout cage(const SceneTemplate& t, Rng& rng) {
    const int d = t.dim;
    const double inner = 0.13;
    const double wall = t.wall_thickness;
    Config center(d);
    center[0] = 0.72 + uniform(rng, t.position_jitter);
    for (int j = 1; j < d; ++j) center[j] = 0.5 + uniform(rng, t.position_jitter);
    const double door = uniform(rng, t.gap_width);

    std::vector<Obstacle> obstacles;
    const Config outer_lo = center.array() - (inner + wall);
    const Config outer_hi = center.array() + (inner + wall);
    for (int axis = 0; axis < d; ++axis) {
        for (int side = 0; side < 2; ++side) {
            AxisBox slab{outer_lo, outer_hi};
            if (side == 0)
                slab.max[axis] = center[axis] - inner;
            else
                slab.min[axis] = center[axis] + inner;
            if (axis == 0 && side == 0) {
                // Door wall: a window in the slab, centred on the cage.
                AxisBox extent{outer_lo, outer_hi};
                add_windowed_wall(obstacles, d, slab.min[0], slab.max[0], center, door, extent);
            } else {
                obstacles.emplace_back(slab);
            }
        }
    }
    Scene scene(ConfigSpace(Config::Zero(d), Config::Ones(d)), PointRobot{}, std::move(obstacles), t.delta);

    QueryRegions regions{band_box(d, t.endpoint_band),
                         {center.array() - (inner - 0.02), center.array() + (inner - 0.02)}, std::nullopt};
    regions.start.min[0] = 0.03;
    regions.start.max[0] = 0.3;
    return {std::move(scene), std::move(regions)};
}

// Planar arm reaching into a shelf slot; a round obstacle hangs over the arm.
SceneLayout arm_shelf(const SceneTemplate& t, Rng& rng) {
    const int d = t.dim;
    PlanarArm arm;
    // Link lengths taper and sum to 1.
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        arm.link_lengths.push_back(1.0 - 0.35 * i / std::max(1, d - 1));
        total += arm.link_lengths.back();
    }
    for (auto& l : arm.link_lengths) l /= total;

    const double slot_y = uniform(rng, t.gap_center);
    const double slot = uniform(rng, t.gap_width);
    const double x0 = 0.5 + uniform(rng, t.position_jitter);
    const double th = t.wall_thickness;
    auto box2 = [](double x_lo, double y_lo, double x_hi, double y_hi) {
        return AxisBox{Eigen::Vector2d(x_lo, y_lo), Eigen::Vector2d(x_hi, y_hi)};
    };
    std::vector<Obstacle> obstacles;
    obstacles.emplace_back(box2(x0, slot_y - slot / 2.0 - th, 0.95, slot_y - slot / 2.0));
    obstacles.emplace_back(box2(x0, slot_y + slot / 2.0, 0.95, slot_y + slot / 2.0 + th));
    obstacles.emplace_back(box2(0.95, slot_y - slot / 2.0 - th, 0.95 + th, slot_y + slot / 2.0 + th));
    Config ball(2);
    ball << 0.25 + uniform(rng, t.position_jitter), 0.55 + uniform(rng, t.position_jitter);
    obstacles.emplace_back(Sphere{ball, 0.08});

    const double pi = std::numbers::pi;
    ConfigSpace space(Config::Constant(d, -pi), Config::Constant(d, pi));
    AxisBox joints{space.lower(), space.upper()};
    AxisBox effector = box2(x0 + 0.05, slot_y - slot / 2.0 + 0.02, 0.9, slot_y + slot / 2.0 - 0.02);
    Scene scene(std::move(space), std::move(arm), std::move(obstacles), t.delta);
    return {std::move(scene), {joints, joints, effector}};
}

std::uint64_t template_salt(const SceneTemplate& t) {
    return (static_cast<std::uint64_t>(t.kind) + 1) * 0x100000001b3ULL + static_cast<std::uint64_t>(t.dim);
}

Config sample_box(const AxisBox& box, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Config q(box.min.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = box.min[i] + unit(rng) * (box.max[i] - box.min[i]);
    return q;
}

bool in_box(const Config& q, const AxisBox& box) {
    return (q.array() >= box.min.array()).all() && (q.array() <= box.max.array()).all();
}

std::optional<Config> draw_endpoint(const Scene& scene, const AxisBox& region, const std::optional<AxisBox>& effector,
                                    Rng& rng) {
    // Clip the region to the space so draws stay in bounds.
    AxisBox clipped{region.min.cwiseMax(scene.space().lower()), region.max.cwiseMin(scene.space().upper())};
    for (int draw = 0; draw < 20000; ++draw) {
        Config q = sample_box(clipped, rng);
        if (effector) {
            const auto& arm = std::get<PlanarArm>(scene.robot());
            const Config tip = arm.joint_positions(q).back();
            if (!in_box(tip, *effector)) continue;
        }
        if (is_state_valid(q, scene)) return q;
    }
    return std::nullopt;
}

} // namespace

SceneLayout generate_layout(const SceneTemplate& tmpl, std::uint64_t seed) {
    tmpl.validate();
    Rng rng(derive_seed(seed, template_salt(tmpl)));
    switch (tmpl.kind) {
    case TemplateKind::OpenBox: return open_box(tmpl, rng);
    case TemplateKind::GapWall: return gap_wall(tmpl, rng);
    case TemplateKind::ClutterGrid: return clutter_grid(tmpl, rng);
    case TemplateKind::Cage2D: return cage(tmpl, rng);
    case TemplateKind::ArmShelf: return arm_shelf(tmpl, rng);
    }
    throw InputError("unknown scene template");
}

Scene generate_scene(const SceneTemplate& tmpl, std::uint64_t seed) { return generate_layout(tmpl, seed).scene; }

VerifiedQuery generate_query(const SceneLayout& layout, std::uint64_t seed, const QueryOptions& options,
                             std::string_view scene_name) {
    const Scene& scene = layout.scene;
    const double min_sep = options.min_separation * scene.space().diagonal();
    Rng rng(seed);
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        const auto start = draw_endpoint(scene, layout.regions.start, std::nullopt, rng);
        const auto goal = draw_endpoint(scene, layout.regions.goal, layout.regions.goal_effector, rng);
        if (!start || !goal || distance(*start, *goal) < min_sep) continue;

        BaselineConfig verify;
        verify.budget = options.verify_budget;
        verify.seed = derive_seed(seed, static_cast<std::uint64_t>(attempt));
        Query query{*start, *goal};
        PlanResult solution = rrt_connect(query, scene, verify);
        if (solution.solved()) return {std::move(query), std::move(solution)};
    }
    std::ostringstream msg;
    msg << "could not generate a feasible query for " << scene_name << " after " << options.max_attempts
        << " attempts";
    throw GenerationError(msg.str());
}

Dataset build_dataset(const SceneTemplate& tmpl, int n, std::uint64_t seed, const QueryOptions& options,
                      int workers) {
    if (n < 1) throw InputError("build_dataset: n must be >= 1");
    if (workers < 1) throw InputError("build_dataset: worker count must be >= 1");
    tmpl.validate();
    const auto count = static_cast<std::size_t>(n);
    std::vector<std::optional<Problem>> problems(count);
    std::vector<PlanResult> solutions(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                const std::uint64_t problem_seed = derive_seed(seed, i);
                SceneLayout layout = generate_layout(tmpl, problem_seed);
                std::ostringstream id;
                id << tmpl.name() << '-' << problem_seed;
                VerifiedQuery vq = generate_query(layout, derive_seed(problem_seed, 1), options, id.str());
                problems[i] = Problem{id.str(),          tmpl.name(),    std::move(layout.scene),
                                      std::move(vq.query), problem_seed, vq.solution.cost};
                solutions[i] = std::move(vq.solution);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(static_cast<std::size_t>(workers), count); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Dataset data;
    for (std::size_t i = 0; i < count; ++i) {
        data.library.add(ExperiencePath::from_waypoints(solutions[i].path),
                         ExperienceMeta{problems[i]->id, problems[i]->seed, "rrt_connect", solutions[i].cost});
        data.problems.push_back(std::move(*problems[i]));
    }
    return data;
}

void save_problems(const ProblemSet& problems, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& p : problems) {
        Json j{{"id", p.id},
               {"template", p.template_name},
               {"scene", scene_to_json_value(p.scene)},
               {"query", {{"start", config_to_json(p.query.start)}, {"goal", config_to_json(p.query.goal)}}},
               {"seed", p.seed},
               {"criterion_cost", p.criterion_cost}};
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ProblemSet load_problems(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    ProblemSet problems;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const Json j = Json::parse(line);
            Scene scene = j.at("scene").is_string() ? load_scene(path.parent_path() / j.at("scene").get<std::string>())
                                                    : scene_from_json_value(j.at("scene"));
            Query query{config_from_json(j.at("query").at("start")), config_from_json(j.at("query").at("goal"))};
            problems.push_back(Problem{j.value("id", std::to_string(line_no)), j.value("template", std::string{}),
                                       std::move(scene), std::move(query), j.at("seed").get<std::uint64_t>(),
                                       j.at("criterion_cost").get<double>()});
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << path.string() << ": line " << line_no << ": " << e.what();
            throw InputError(msg.str());
        }
    }
    return problems;
}

} // namespace iertc
