#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace iertc {

using Config = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Raised when an argument violates an operation's precondition
/// (dimension mismatch, invalid endpoints, malformed parameters).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigSpace {
public:
    ConfigSpace(Config lower, Config upper);

    int dim() const { return static_cast<int>(lower_.size()); }
    const Config& lower() const { return lower_; }
    const Config& upper() const { return upper_; }

    double diagonal() const { return (upper_ - lower_).norm(); }
    double measure() const { return (upper_ - lower_).prod(); }
    bool contains(const Config& q) const;

private:
    Config lower_;
    Config upper_;
};

struct AxisBox {
    Config min;
    Config max;
};

struct Sphere {
    Config center;
    double radius;
};

/// Boxes and spheres live in configuration space for a point robot and in
/// the 2-D workspace for a planar arm.
using Obstacle = std::variant<AxisBox, Sphere>;

struct PointRobot {};

/// Phase-bounded polyline attached to a search tree edge. Waypoints run from
/// the phase alpha_init to alpha_targ; cost is the polyline length.
struct MicroSegment {
    std::vector<Config> waypoints;
    std::vector<double> phases;
    double alpha_init = 0.0;
    double alpha_targ = 0.0;
    double cost = 0.0;
};

struct PlanarArm {
    std::vector<double> link_lengths;
    Eigen::Vector2d base{0.0, 0.0};

    /// Joint positions p_0 = base, p_1, ..., p_k for joint angles q
    /// (angles accumulate along the chain).
    std::vector<Eigen::Vector2d> joint_positions(const Config& q) const;
};

using RobotModel = std::variant<PointRobot, PlanarArm>;

class Scene {
public:
    /// delta <= 0 selects the default resolution (1% of the space diagonal).
    Scene(ConfigSpace space, RobotModel robot, std::vector<Obstacle> obstacles, double delta = 0.0);

    const ConfigSpace& space() const { return space_; }
    const RobotModel& robot() const { return robot_; }
    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    double delta() const { return delta_; }
    int dim() const { return space_.dim(); }

    /// Same scene with a different validation resolution; used by the
    /// refinement tests.
    Scene with_delta(double delta) const;

    bool operator==(const Scene& other) const;

private:
    ConfigSpace space_;
    RobotModel robot_;
    std::vector<Obstacle> obstacles_;
    double delta_;
};

double distance(const Config& a, const Config& b);

bool is_state_valid(const Config& q, const Scene& scene);
bool is_motion_valid(const Config& a, const Config& b, const Scene& scene);

/// Piecewise-linear polyline check; every leg must pass is_motion_valid.
bool is_polyline_valid(const std::vector<Config>& waypoints, const Scene& scene);

bool is_segment_valid(const MicroSegment& segment, const Scene& scene);

double polyline_length(const std::vector<Config>& waypoints);

Config sample_uniform(const ConfigSpace& space, Rng& rng);

/// Number of is_state_valid evaluations made on the calling thread so far.
/// Planners difference this counter to meter their own work.
std::uint64_t thread_state_checks();

// Geometry primitives shared with the arm model.
bool segment_intersects_box(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const AxisBox& box);
bool segment_intersects_circle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Sphere& circle);

// Scene file I/O (JSON object, see README for the field layout).
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

} // namespace iertc
