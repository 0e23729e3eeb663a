#pragma once

#include "iertc/cspace.hpp"

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace iertc {

/// Which clock drives budgets and trace timestamps.
///
/// Wall measures real elapsed time. Virtual charges a fixed cost per unit of
/// planner work (loop iterations, state validity checks and nearest-neighbour distance
/// evaluations), so a run with a virtual budget is bit-for-bit repeatable on
/// any machine. Benchmarks default to the virtual clock.
enum class ClockKind { Wall, Virtual };

struct Budget {
    double seconds = 0.0;             // 0 = no time limit
    std::uint64_t max_iterations = 0; // 0 = no iteration limit
    ClockKind clock = ClockKind::Wall;

    static Budget wall(double s) { return {s, 0, ClockKind::Wall}; }
    static Budget virtual_time(double s) { return {s, 0, ClockKind::Virtual}; }
    static Budget iterations(std::uint64_t n) { return {0.0, n, ClockKind::Virtual}; }

    void validate() const;
};

// Virtual clock rates, calibrated so one virtual second is roughly one wall
// second on a desktop core for the bundled scene templates.
inline constexpr double kVirtualSecondsPerStateCheck = 1.0e-6;
inline constexpr double kVirtualSecondsPerDistanceEval = 5.0e-9;
inline constexpr double kVirtualSecondsPerIteration = 1.5e-6;

/// Elapsed-time source for one planning run. Not thread-safe; one per run.
class RunClock {
public:
    explicit RunClock(ClockKind kind);

    double elapsed() const;
    /// Adds nearest-neighbour work to the virtual clock.
    void charge_distance_evals(std::uint64_t n) { distance_evals_ += n; }
    void charge_iteration() { ++iterations_; }

private:
    ClockKind kind_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t checks_at_start_;
    std::uint64_t distance_evals_ = 0;
    std::uint64_t iterations_ = 0;
};

struct TracePoint {
    double time;
    double cost;

    bool operator==(const TracePoint&) const = default;
};

/// Best cost over time; costs are non-increasing.
struct ConvergenceTrace {
    std::vector<TracePoint> samples;

    void append(double time, double cost);
    bool non_increasing() const;
    bool empty() const { return samples.empty(); }

    bool operator==(const ConvergenceTrace&) const = default;
};

enum class PlanStatus { Solved, TimedOut };

std::string_view to_string(PlanStatus status);

struct PlanResult {
    PlanStatus status = PlanStatus::TimedOut;
    std::vector<Config> path;
    double cost = std::numeric_limits<double>::infinity();
    std::optional<double> time_to_first_solution;
    std::uint64_t iterations = 0;
    ConvergenceTrace trace;

    bool solved() const { return status == PlanStatus::Solved; }
    bool operator==(const PlanResult&) const = default;
};

struct Query {
    Config start;
    Config goal;
};

} // namespace iertc
