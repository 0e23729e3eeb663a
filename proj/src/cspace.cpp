#include "iertc/cspace.hpp"
#include "iertc/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace iertc {

namespace {

thread_local std::uint64_t state_checks = 0;

void require_dim(const Config& q, int dim, const char* what) {
    if (q.size() != dim) {
        std::ostringstream msg;
        msg << what << ": expected dimension " << dim << ", got " << q.size();
        throw InputError(msg.str());
    }
}

bool point_in_obstacle(const Config& q, const Obstacle& obs) {
    if (const auto* box = std::get_if<AxisBox>(&obs))
        return (q.array() >= box->min.array()).all() && (q.array() <= box->max.array()).all();
    const auto& sphere = std::get<Sphere>(obs);
    return (q - sphere.center).squaredNorm() <= sphere.radius * sphere.radius;
}

bool arm_collides(const PlanarArm& arm, const Config& q, const std::vector<Obstacle>& obstacles) {
    const auto joints = arm.joint_positions(q);
    for (std::size_t i = 0; i + 1 < joints.size(); ++i) {
        for (const auto& obs : obstacles) {
            if (const auto* box = std::get_if<AxisBox>(&obs)) {
                if (segment_intersects_box(joints[i], joints[i + 1], *box)) return true;
            } else if (segment_intersects_circle(joints[i], joints[i + 1], std::get<Sphere>(obs))) {
                return true;
            }
        }
    }
    return false;
}

void validate_obstacle(const Obstacle& obs, int dim) {
    if (const auto* box = std::get_if<AxisBox>(&obs)) {
        if (box->min.size() != dim || box->max.size() != dim)
            throw InputError("box obstacle dimension mismatch");
        if (!(box->min.array() < box->max.array()).all())
            throw InputError("box obstacle requires min < max on every axis");
    } else {
        const auto& s = std::get<Sphere>(obs);
        if (s.center.size() != dim) throw InputError("sphere obstacle dimension mismatch");
        if (!(s.radius > 0.0)) throw InputError("sphere obstacle requires radius > 0");
    }
}

} // namespace

ConfigSpace::ConfigSpace(Config lower, Config upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) throw InputError("bounds dimension mismatch");
    if (lower_.size() < 2) throw InputError("configuration space needs dim >= 2");
    if (!(lower_.array() < upper_.array()).all()) throw InputError("bounds require lower < upper on every axis");
}

bool ConfigSpace::contains(const Config& q) const {
    return (q.array() >= lower_.array()).all() && (q.array() <= upper_.array()).all();
}

std::vector<Eigen::Vector2d> PlanarArm::joint_positions(const Config& q) const {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(link_lengths.size() + 1);
    pts.push_back(base);
    double angle = 0.0;
    for (std::size_t i = 0; i < link_lengths.size(); ++i) {
        angle += q[static_cast<Eigen::Index>(i)];
        pts.push_back(pts.back() + link_lengths[i] * Eigen::Vector2d(std::cos(angle), std::sin(angle)));
    }
    return pts;
}

Scene::Scene(ConfigSpace space, RobotModel robot, std::vector<Obstacle> obstacles, double delta)
    : space_(std::move(space)), robot_(std::move(robot)), obstacles_(std::move(obstacles)), delta_(delta) {
    const double diag = space_.diagonal();
    if (delta_ <= 0.0) delta_ = 0.01 * diag;
    if (delta_ > 0.05 * diag) throw InputError("resolution must not exceed 5% of the space diagonal");

    int obstacle_dim = space_.dim();
    if (const auto* arm = std::get_if<PlanarArm>(&robot_)) {
        if (static_cast<int>(arm->link_lengths.size()) != space_.dim())
            throw InputError("planar arm: configuration dimension must equal the number of links");
        for (double l : arm->link_lengths)
            if (!(l > 0.0)) throw InputError("planar arm: link lengths must be positive");
        const double pi = std::numbers::pi;
        if ((space_.lower().array() < -pi).any() || (space_.upper().array() > pi).any())
            throw InputError("planar arm: joint bounds must lie within [-pi, pi]");
        obstacle_dim = 2;
    }
    for (const auto& obs : obstacles_) validate_obstacle(obs, obstacle_dim);
}

Scene Scene::with_delta(double delta) const { return Scene(space_, robot_, obstacles_, delta); }

namespace {

bool obstacle_equal(const Obstacle& a, const Obstacle& b) {
    if (a.index() != b.index()) return false;
    if (const auto* ba = std::get_if<AxisBox>(&a)) {
        const auto& bb = std::get<AxisBox>(b);
        return ba->min == bb.min && ba->max == bb.max;
    }
    const auto& sa = std::get<Sphere>(a);
    const auto& sb = std::get<Sphere>(b);
    return sa.center == sb.center && sa.radius == sb.radius;
}

bool robot_equal(const RobotModel& a, const RobotModel& b) {
    if (a.index() != b.index()) return false;
    if (const auto* pa = std::get_if<PlanarArm>(&a)) {
        const auto& pb = std::get<PlanarArm>(b);
        return pa->link_lengths == pb.link_lengths && pa->base == pb.base;
    }
    return true;
}

} // namespace

bool Scene::operator==(const Scene& other) const {
    if (space_.lower() != other.space_.lower() || space_.upper() != other.space_.upper()) return false;
    if (delta_ != other.delta_ || !robot_equal(robot_, other.robot_)) return false;
    if (obstacles_.size() != other.obstacles_.size()) return false;
    for (std::size_t i = 0; i < obstacles_.size(); ++i)
        if (!obstacle_equal(obstacles_[i], other.obstacles_[i])) return false;
    return true;
}

double distance(const Config& a, const Config& b) {
    if (a.size() != b.size()) throw InputError("distance: dimension mismatch");
    return (b - a).norm();
}

bool is_state_valid(const Config& q, const Scene& scene) {
    require_dim(q, scene.dim(), "is_state_valid");
    ++state_checks;
    if (!scene.space().contains(q)) return false;
    if (const auto* arm = std::get_if<PlanarArm>(&scene.robot()))
        return !arm_collides(*arm, q, scene.obstacles());
    return std::none_of(scene.obstacles().begin(), scene.obstacles().end(),
                        [&](const Obstacle& o) { return point_in_obstacle(q, o); });
}

// Checks the straight motion at dyadic parameters t = i / 2^k with 2^k the
// smallest power of two giving spacing <= delta. Coarser levels are checked
// first so collisions surface early, and because every coarse point is also a
// fine point, shrinking delta never turns an invalid motion valid. Endpoints
// are ordered canonically so the check is exactly symmetric.
bool is_motion_valid(const Config& a, const Config& b, const Scene& scene) {
    require_dim(a, scene.dim(), "is_motion_valid");
    require_dim(b, scene.dim(), "is_motion_valid");
    const bool swap = std::lexicographical_compare(b.data(), b.data() + b.size(), a.data(), a.data() + a.size());
    const Config& from = swap ? b : a;
    const Config& to = swap ? a : b;

    if (!is_state_valid(from, scene) || !is_state_valid(to, scene)) return false;
    const double len = (to - from).norm();
    if (len <= scene.delta()) return true;

    const Config step = to - from;
    std::int64_t segments = 1;
    while (len / static_cast<double>(segments) > scene.delta()) segments *= 2;
    Config q(from.size());
    for (std::int64_t stride = segments / 2; stride >= 1; stride /= 2) {
        for (std::int64_t i = stride; i < segments; i += 2 * stride) {
            q = from + step * (static_cast<double>(i) / static_cast<double>(segments));
            if (!is_state_valid(q, scene)) return false;
        }
    }
    return true;
}

bool is_polyline_valid(const std::vector<Config>& waypoints, const Scene& scene) {
    if (waypoints.size() < 2) throw InputError("polyline needs at least two waypoints");
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i)
        if (!is_motion_valid(waypoints[i], waypoints[i + 1], scene)) return false;
    return true;
}

bool is_segment_valid(const MicroSegment& segment, const Scene& scene) {
    return is_polyline_valid(segment.waypoints, scene);
}

std::uint64_t thread_state_checks() { return state_checks; }

double polyline_length(const std::vector<Config>& waypoints) {
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) len += distance(waypoints[i], waypoints[i + 1]);
    return len;
}

Config sample_uniform(const ConfigSpace& space, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Config q(space.dim());
    for (int i = 0; i < space.dim(); ++i)
        q[i] = space.lower()[i] + unit(rng) * (space.upper()[i] - space.lower()[i]);
    return q;
}

// Liang-Barsky clipping against the closed box.
bool segment_intersects_box(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const AxisBox& box) {
    double t0 = 0.0, t1 = 1.0;
    const Eigen::Vector2d d = b - a;
    for (int axis = 0; axis < 2; ++axis) {
        const double lo = box.min[axis], hi = box.max[axis];
        if (d[axis] == 0.0) {
            if (a[axis] < lo || a[axis] > hi) return false;
            continue;
        }
        double ta = (lo - a[axis]) / d[axis];
        double tb = (hi - a[axis]) / d[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

bool segment_intersects_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Sphere& circle) {
    const Eigen::Vector2d c = circle.center.head<2>();
    const Eigen::Vector2d d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0.0 ? (c - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * d - c).squaredNorm() <= circle.radius * circle.radius;
}

// ---------------------------------------------------------------------------
// JSON

Json config_to_json(const Config& q) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < q.size(); ++i) arr.push_back(q[i]);
    return arr;
}

Config config_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected a numeric array");
    Config q(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) q[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return q;
}

Json scene_to_json_value(const Scene& scene) {
    Json j;
    j["dim"] = scene.dim();
    j["lower"] = config_to_json(scene.space().lower());
    j["upper"] = config_to_json(scene.space().upper());
    j["delta"] = scene.delta();
    if (const auto* arm = std::get_if<PlanarArm>(&scene.robot())) {
        j["robot"] = {{"kind", "PlanarArm"},
                      {"link_lengths", arm->link_lengths},
                      {"base", {arm->base.x(), arm->base.y()}}};
    } else {
        j["robot"] = {{"kind", "PointRobot"}};
    }
    Json obs = Json::array();
    for (const auto& o : scene.obstacles()) {
        if (const auto* box = std::get_if<AxisBox>(&o)) {
            obs.push_back({{"kind", "AxisBox"}, {"min", config_to_json(box->min)}, {"max", config_to_json(box->max)}});
        } else {
            const auto& s = std::get<Sphere>(o);
            obs.push_back({{"kind", "Sphere"}, {"center", config_to_json(s.center)}, {"radius", s.radius}});
        }
    }
    j["obstacles"] = std::move(obs);
    return j;
}

Scene scene_from_json_value(const Json& j) {
    try {
        ConfigSpace space(config_from_json(j.at("lower")), config_from_json(j.at("upper")));
        if (j.at("dim").get<int>() != space.dim()) throw InputError("scene: 'dim' disagrees with bounds");

        RobotModel robot = PointRobot{};
        const auto& r = j.at("robot");
        const auto kind = r.at("kind").get<std::string>();
        if (kind == "PlanarArm") {
            PlanarArm arm;
            arm.link_lengths = r.at("link_lengths").get<std::vector<double>>();
            if (r.contains("base")) {
                const auto base = r.at("base").get<std::vector<double>>();
                if (base.size() != 2) throw InputError("scene: arm base must be a 2-vector");
                arm.base = {base[0], base[1]};
            }
            robot = std::move(arm);
        } else if (kind != "PointRobot") {
            throw InputError("scene: unknown robot kind '" + kind + "'");
        }

        std::vector<Obstacle> obstacles;
        for (const auto& o : j.at("obstacles")) {
            const auto okind = o.at("kind").get<std::string>();
            if (okind == "AxisBox")
                obstacles.emplace_back(AxisBox{config_from_json(o.at("min")), config_from_json(o.at("max"))});
            else if (okind == "Sphere")
                obstacles.emplace_back(Sphere{config_from_json(o.at("center")), o.at("radius").get<double>()});
            else
                throw InputError("scene: unknown obstacle kind '" + okind + "'");
        }
        return Scene(std::move(space), std::move(robot), std::move(obstacles), j.at("delta").get<double>());
    } catch (const Json::exception& e) {
        throw InputError(std::string("scene: malformed JSON: ") + e.what());
    }
}

std::string scene_to_json(const Scene& scene) { return scene_to_json_value(scene).dump(); }

Scene scene_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("scene: ") + e.what());
    }
    return scene_from_json_value(j);
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << scene_to_json_value(scene).dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return scene_from_json(buf.str());
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

} // namespace iertc
