#pragma once

#include "iertc/baselines.hpp"
#include "iertc/cspace.hpp"
#include "iertc/experience.hpp"
#include "iertc/result.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iertc {

/// splitmix64 mixing of (base, index); used to give every problem and every
/// planner run its own independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

enum class TemplateKind { OpenBox, GapWall, ClutterGrid, Cage2D, ArmShelf };

std::string_view to_string(TemplateKind kind);
TemplateKind template_kind_from_string(std::string_view name);

struct Range {
    double lo;
    double hi;
};

/// Parameterized family of scenes. Unit-cube configuration space for point
/// robots; joint space [-pi, pi]^dim for the arm.
struct SceneTemplate {
    TemplateKind kind = TemplateKind::OpenBox;
    int dim = 2;
    double delta = 0.0;              // <= 0 selects the scene default
    Range gap_width{0.09, 0.13};     // GapWall window / Cage2D door / ArmShelf slot height
    Range gap_center{0.23, 0.27};    // GapWall window centre per cross axis
    Range endpoint_band{0.6, 0.8};   // GapWall start/goal range on the cross axes
    double wall_thickness = 0.06;
    int clutter_count = 30;          // ClutterGrid
    Range clutter_size{0.04, 0.09};  // ClutterGrid box side
    int open_count = 3;              // OpenBox obstacles
    Range position_jitter{-0.03, 0.03};

    /// Defaults for a named template at the given dimension (0 = template
    /// default: 5 for GapWall, 3 for ArmShelf, 2 otherwise).
    static SceneTemplate make(TemplateKind kind, int dim = 0);
    /// Accepts "GapWall" or "GapWall-5d" style names.
    static SceneTemplate parse(std::string_view name);

    void validate() const;
    std::string name() const;
};

/// Where query endpoints are drawn from. Boxes are in configuration space,
/// except goal_effector which constrains the arm's end effector in the
/// workspace.
struct QueryRegions {
    AxisBox start;
    AxisBox goal;
    std::optional<AxisBox> goal_effector;
};

struct SceneLayout {
    Scene scene;
    QueryRegions regions;
};

/// Deterministic in (template, seed); jitter stays within the template ranges.
SceneLayout generate_layout(const SceneTemplate& tmpl, std::uint64_t seed);
Scene generate_scene(const SceneTemplate& tmpl, std::uint64_t seed);

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QueryOptions {
    Budget verify_budget = Budget::virtual_time(2.0);
    int max_attempts = 50;
    double min_separation = 0.3; // fraction of the space diagonal
};

struct VerifiedQuery {
    Query query;
    PlanResult solution; // the verifying RRT-Connect run
};

/// Rejection-samples valid, well-separated endpoints (drawn from the
/// template's start/goal regions) and keeps the first pair RRT-Connect solves.
VerifiedQuery generate_query(const SceneLayout& layout, std::uint64_t seed, const QueryOptions& options = {},
                             std::string_view scene_name = "scene");

struct Problem {
    std::string id;
    std::string template_name;
    Scene scene;
    Query query;
    std::uint64_t seed = 0;
    double criterion_cost = 0.0;
};

using ProblemSet = std::vector<Problem>;

struct Dataset {
    ProblemSet problems;
    PathLibrary library;
};

/// n problems with their RRT-Connect solutions stored as experiences.
/// Problems are generated concurrently on `workers` threads; the output does
/// not depend on the worker count.
Dataset build_dataset(const SceneTemplate& tmpl, int n, std::uint64_t seed, const QueryOptions& options = {},
                      int workers = 1);

// ProblemSet file: JSON lines {id, template, scene, query{start, goal}, seed, criterion_cost}.
void save_problems(const ProblemSet& problems, const std::filesystem::path& path);
ProblemSet load_problems(const std::filesystem::path& path);

} // namespace iertc
