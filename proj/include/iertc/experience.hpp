#pragma once

#include "iertc/cspace.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iertc {

/// Phase-indexed waypoint polyline. Phases are strictly increasing from 0 to 1.
struct ExperiencePath {
    std::vector<Config> waypoints;
    std::vector<double> phases;

    /// Builds a path with phases set to normalized arc length. A path of zero
    /// length falls back to uniform phases by waypoint index.
    static ExperiencePath from_waypoints(std::vector<Config> waypoints);

    int dim() const { return waypoints.empty() ? 0 : static_cast<int>(waypoints.front().size()); }
    std::size_t size() const { return waypoints.size(); }
    const Config& front() const { return waypoints.front(); }
    const Config& back() const { return waypoints.back(); }

    /// Piecewise-linear position at phase alpha in [0, 1].
    Config at(double alpha) const;

    /// Throws InputError when the phase/waypoint invariants do not hold.
    void validate() const;

    bool operator==(const ExperiencePath&) const = default;
};

struct ExperienceMeta {
    std::string scene_id;
    std::uint64_t seed = 0;
    std::string solver;
    double cost = 0.0;

    bool operator==(const ExperienceMeta&) const = default;
};

struct LibraryEntry {
    ExperiencePath path;
    ExperienceMeta meta;

    bool operator==(const LibraryEntry&) const = default;
};

class LibraryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PathLibrary {
public:
    explicit PathLibrary(int dim = 0) : dim_(dim) {}

    int dim() const { return dim_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<LibraryEntry>& entries() const { return entries_; }
    const LibraryEntry& operator[](std::size_t i) const { return entries_.at(i); }

    /// Adds an entry; the first entry fixes the dimension of an unsized library.
    void add(ExperiencePath path, ExperienceMeta meta = {});

    /// Library holding only the first n entries.
    PathLibrary prefix(std::size_t n) const;

    bool operator==(const PathLibrary&) const = default;

private:
    int dim_;
    std::vector<LibraryEntry> entries_;
};

/// Uniform discretization {0, 1/m, ..., 1} of the phase interval.
class PhaseGrid {
public:
    explicit PhaseGrid(int m);

    int divisions() const { return m_; }
    double value(int index) const { return static_cast<double>(index) / static_cast<double>(m_); }
    /// Nearest grid index of a phase value.
    int index_of(double alpha) const;
    bool on_grid(double alpha) const;

private:
    int m_;
};

/// Similarity of an entry to a query: distance between start points plus
/// distance between goal points.
double similarity_distance(const ExperiencePath& path, const Config& q_start, const Config& q_goal);

/// Index of the entry minimizing similarity_distance (lowest index on ties).
std::size_t retrieve_index(const PathLibrary& lib, const Config& q_start, const Config& q_goal);
const ExperiencePath& retrieve(const PathLibrary& lib, const Config& q_start, const Config& q_goal);

/// Resamples to exactly m + 1 waypoints at phases i / m by interpolating the
/// path in phase. Endpoints are copied unchanged.
ExperiencePath discretize_phases(const ExperiencePath& path, int m);

/// Affine map w_i' = w_i + b + rho_i * lambda with b = q_start - w_0,
/// lambda = q_goal - (w_k + b) and rho_i the phase normalized over the path
/// span. The mapped path starts at q_start and ends at q_goal.
ExperiencePath map_experience(const ExperiencePath& path, const Config& q_start, const Config& q_goal);

// JSON-lines library file. The first line may carry {"dim": d}; each further
// line is {phases, waypoints, meta{scene_id, seed, solver, cost}}.
void save_library(const PathLibrary& lib, const std::filesystem::path& path);
PathLibrary load_library(const std::filesystem::path& path);

} // namespace iertc
