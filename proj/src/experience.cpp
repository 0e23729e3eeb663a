#include "iertc/experience.hpp"
#include "iertc/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace iertc {

ExperiencePath ExperiencePath::from_waypoints(std::vector<Config> waypoints) {
    if (waypoints.size() < 2) throw InputError("experience path needs at least two waypoints");
    ExperiencePath path;
    const std::size_t k = waypoints.size();
    path.phases.resize(k);
    std::vector<double> cumulative(k, 0.0);
    for (std::size_t i = 1; i < k; ++i) cumulative[i] = cumulative[i - 1] + distance(waypoints[i - 1], waypoints[i]);
    const double total = cumulative.back();

    // Arc-length phases are only usable when consecutive waypoints are
    // distinct; repeated points would produce equal phases.
    bool distinct = total > 0.0;
    for (std::size_t i = 1; i < k && distinct; ++i) distinct = cumulative[i] > cumulative[i - 1];
    for (std::size_t i = 0; i < k; ++i)
        path.phases[i] = distinct ? cumulative[i] / total : static_cast<double>(i) / static_cast<double>(k - 1);
    path.phases.front() = 0.0;
    path.phases.back() = 1.0;
    path.waypoints = std::move(waypoints);
    return path;
}

void ExperiencePath::validate() const {
    if (waypoints.size() < 2) throw InputError("experience path needs at least two waypoints");
    if (waypoints.size() != phases.size()) throw InputError("experience path: waypoint/phase count mismatch");
    if (phases.front() != 0.0 || phases.back() != 1.0) throw InputError("experience path: phases must span [0, 1]");
    for (std::size_t i = 1; i < phases.size(); ++i)
        if (!(phases[i] > phases[i - 1])) throw InputError("experience path: phases must be strictly increasing");
    const auto d = waypoints.front().size();
    for (const auto& w : waypoints)
        if (w.size() != d) throw InputError("experience path: inconsistent waypoint dimension");
}

Config ExperiencePath::at(double alpha) const {
    if (alpha <= phases.front()) return waypoints.front();
    if (alpha >= phases.back()) return waypoints.back();
    const auto it = std::upper_bound(phases.begin(), phases.end(), alpha);
    const auto j = static_cast<std::size_t>(it - phases.begin()) - 1;
    if (phases[j] == alpha) return waypoints[j];
    const double t = (alpha - phases[j]) / (phases[j + 1] - phases[j]);
    return waypoints[j] + t * (waypoints[j + 1] - waypoints[j]);
}

void PathLibrary::add(ExperiencePath path, ExperienceMeta meta) {
    path.validate();
    if (dim_ == 0) dim_ = path.dim();
    if (path.dim() != dim_) throw InputError("library: entry dimension differs from library dimension");
    entries_.push_back({std::move(path), std::move(meta)});
}

PathLibrary PathLibrary::prefix(std::size_t n) const {
    PathLibrary out(dim_);
    for (std::size_t i = 0; i < std::min(n, entries_.size()); ++i) out.entries_.push_back(entries_[i]);
    return out;
}

PhaseGrid::PhaseGrid(int m) : m_(m) {
    if (m < 2) throw InputError("phase grid needs at least 2 divisions");
}

int PhaseGrid::index_of(double alpha) const {
    return std::clamp(static_cast<int>(std::lround(alpha * m_)), 0, m_);
}

bool PhaseGrid::on_grid(double alpha) const { return std::abs(value(index_of(alpha)) - alpha) <= 1e-12; }

double similarity_distance(const ExperiencePath& path, const Config& q_start, const Config& q_goal) {
    return distance(q_start, path.front()) + distance(q_goal, path.back());
}

std::size_t retrieve_index(const PathLibrary& lib, const Config& q_start, const Config& q_goal) {
    if (lib.empty()) throw LibraryError("retrieve: path library is empty");
    if (q_start.size() != lib.dim() || q_goal.size() != lib.dim())
        throw InputError("retrieve: query dimension differs from library dimension");
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lib.size(); ++i) {
        const double score = similarity_distance(lib[i].path, q_start, q_goal);
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

const ExperiencePath& retrieve(const PathLibrary& lib, const Config& q_start, const Config& q_goal) {
    return lib[retrieve_index(lib, q_start, q_goal)].path;
}

ExperiencePath discretize_phases(const ExperiencePath& path, int m) {
    if (m < 2) throw InputError("discretize_phases: m must be >= 2");
    path.validate();
    ExperiencePath out;
    out.waypoints.reserve(static_cast<std::size_t>(m) + 1);
    out.phases.reserve(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        const double alpha = static_cast<double>(i) / static_cast<double>(m);
        out.phases.push_back(alpha);
        out.waypoints.push_back(i == 0 ? path.front() : i == m ? path.back() : path.at(alpha));
    }
    return out;
}

ExperiencePath map_experience(const ExperiencePath& path, const Config& q_start, const Config& q_goal) {
    path.validate();
    if (q_start.size() != path.dim() || q_goal.size() != path.dim())
        throw InputError("map_experience: query dimension differs from path dimension");
    const Config shift = q_start - path.front();
    const Config shear = q_goal - (path.back() + shift);
    const double span = path.phases.back() - path.phases.front();

    ExperiencePath out;
    out.phases = path.phases;
    out.waypoints.reserve(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double rho = (path.phases[i] - path.phases.front()) / span;
        out.waypoints.push_back(path.waypoints[i] + shift + rho * shear);
    }
    // rho is exactly 0 and 1 at the ends; pin them so rounding cannot move the query endpoints.
    out.waypoints.front() = q_start;
    out.waypoints.back() = q_goal;
    return out;
}

// ---------------------------------------------------------------------------
// JSON-lines persistence

namespace {

Json entry_to_json(const LibraryEntry& e) {
    Json wps = Json::array();
    for (const auto& w : e.path.waypoints) wps.push_back(config_to_json(w));
    return {{"phases", e.path.phases},
            {"waypoints", std::move(wps)},
            {"meta", {{"scene_id", e.meta.scene_id}, {"seed", e.meta.seed}, {"solver", e.meta.solver}, {"cost", e.meta.cost}}}};
}

LibraryEntry entry_from_json(const Json& j) {
    LibraryEntry e;
    e.path.phases = j.at("phases").get<std::vector<double>>();
    for (const auto& w : j.at("waypoints")) e.path.waypoints.push_back(config_from_json(w));
    if (j.contains("meta")) {
        const auto& m = j.at("meta");
        e.meta.scene_id = m.value("scene_id", std::string{});
        e.meta.seed = m.value("seed", std::uint64_t{0});
        e.meta.solver = m.value("solver", std::string{});
        e.meta.cost = m.value("cost", 0.0);
    }
    return e;
}

} // namespace

void save_library(const PathLibrary& lib, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw LibraryError("cannot open " + path.string() + " for writing");
    out << Json{{"dim", lib.dim()}}.dump() << '\n';
    for (const auto& e : lib.entries()) out << entry_to_json(e).dump() << '\n';
    if (!out) throw LibraryError("failed writing " + path.string());
}

PathLibrary load_library(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LibraryError("cannot open " + path.string());
    PathLibrary lib;
    std::string line;
    std::size_t line_no = 0;
    std::size_t entry = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const Json j = Json::parse(line);
            if (j.contains("dim") && !j.contains("waypoints")) {
                if (line_no != 1 && entry != 0) throw LibraryError("dimension header must precede entries");
                lib = PathLibrary(j.at("dim").get<int>());
                continue;
            }
            auto e = entry_from_json(j);
            lib.add(std::move(e.path), std::move(e.meta));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << path.string() << ": entry " << entry << " (line " << line_no << "): " << e.what();
            throw LibraryError(msg.str());
        }
        ++entry;
    }
    return lib;
}

} // namespace iertc
