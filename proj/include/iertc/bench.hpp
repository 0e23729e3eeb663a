#pragma once

#include "iertc/experience.hpp"
#include "iertc/result.hpp"
#include "iertc/scenegen.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace iertc {

enum class PlannerKind { RrtConnect, RrtStar, Iertc };

/// One planner entry of a suite. For Iertc, `experiences` limits the run to
/// the first n library entries (0 = the whole library).
struct PlannerSpec {
    std::string name;
    PlannerKind kind = PlannerKind::Iertc;
    std::size_t experiences = 0;

    bool operator==(const PlannerSpec&) const = default;
};

/// Accepts "rrt_connect", "rrt_star", "iertc" and "iertc-<n>".
PlannerSpec parse_planner(std::string_view name);
/// Comma-separated list of planner names.
std::vector<PlannerSpec> parse_planners(std::string_view list);

struct BenchRecord {
    std::string problem_id;
    std::string template_name;
    std::string planner;
    std::uint64_t seed = 0;
    PlanStatus status = PlanStatus::TimedOut;
    double cost = std::numeric_limits<double>::infinity();
    double criterion_cost = 0.0;
    std::optional<double> time_to_first_solution;
    std::uint64_t iterations = 0;
    ConvergenceTrace trace;

    bool solved() const { return status == PlanStatus::Solved; }
    bool operator==(const BenchRecord&) const = default;
};

struct SuiteOptions {
    Budget budget = Budget::virtual_time(3.0);
    std::uint64_t seed = 0;
    int workers = 1; // concurrent planner runs
};

/// Seed of the run for (problem index, planner index) under a suite seed.
std::uint64_t run_seed(std::uint64_t suite_seed, std::size_t problem, std::size_t planner);

/// Runs every (problem, planner) pair. Records come back in problem-major
/// order whatever the worker count. Throws InputError for configuration
/// problems (empty problem set, unusable library); planner timeouts are
/// recorded, not raised.
std::vector<BenchRecord> run_suite(const ProblemSet& problems, const std::vector<PlannerSpec>& planners,
                                   const PathLibrary& library, const SuiteOptions& options);

/// 100 * (1 - final / criterion). Negative when the planner did worse.
double relative_cost_reduction(double final_cost, double criterion_cost);

struct SummaryRow {
    std::string template_name;
    std::string planner;
    std::size_t runs = 0;
    std::size_t solved = 0;
    double success_rate = 0.0;
    std::optional<double> mean_cost_reduction;  // over solved runs
    std::optional<double> median_time_to_first; // over solved runs
    bool cost_table_eligible = false;           // success rate >= 50%

    bool operator==(const SummaryRow&) const = default;
};

using SummaryTable = std::vector<SummaryRow>;

/// Groups by (template, planner) in first-appearance order.
SummaryTable summarize(const std::vector<BenchRecord>& records);

/// Writes summary.csv, records.csv, traces.csv and, when there are records,
/// success.svg, reduction.svg and convergence.svg into out_dir.
void emit_outputs(const SummaryTable& table, const std::vector<BenchRecord>& records,
                  const std::filesystem::path& out_dir);

/// Reads records.csv and traces.csv written by emit_outputs.
std::vector<BenchRecord> load_records(const std::filesystem::path& out_dir);
SummaryTable load_summary(const std::filesystem::path& out_dir);

/// Mean cost over solved runs on a time grid. Before a run's first solution
/// its first cost stands in, so each curve is non-increasing.
struct ConvergenceCurve {
    std::string planner;
    std::vector<double> times;
    std::vector<double> mean_cost;
};

std::vector<ConvergenceCurve> convergence_curves(const std::vector<BenchRecord>& records, int samples = 60);

} // namespace iertc
