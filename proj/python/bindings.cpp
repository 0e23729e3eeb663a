// Python bindings for scenes, experience libraries, the planners and the
// benchmark suite. Configurations cross the boundary as 1-D numpy arrays.

#include "iertc/baselines.hpp"
#include "iertc/bench.hpp"
#include "iertc/json_io.hpp"
#include "iertc/planner.hpp"
#include "iertc/scenegen.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace iertc;

namespace {

Budget make_budget(double seconds, const std::string& clock) {
    if (clock == "virtual") return Budget::virtual_time(seconds);
    if (clock == "wall") return Budget::wall(seconds);
    throw InputError("clock must be 'virtual' or 'wall'");
}

py::dict result_to_dict(const PlanResult& r) {
    py::dict d;
    d["status"] = std::string(to_string(r.status));
    d["solved"] = r.solved();
    d["cost"] = r.cost;
    d["path"] = r.path;
    d["time_to_first_solution"] = r.time_to_first_solution;
    d["iterations"] = r.iterations;
    py::list trace;
    for (const auto& s : r.trace.samples) trace.append(py::make_tuple(s.time, s.cost));
    d["trace"] = trace;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Experience-guided anytime motion planning";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<LibraryError>(m, "LibraryError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);

    py::class_<Scene>(m, "Scene")
        .def_static("from_json", &scene_from_json, py::arg("text"))
        .def("to_json", [](const Scene& s) { return scene_to_json(s); })
        .def_property_readonly("dim", &Scene::dim)
        .def_property_readonly("delta", &Scene::delta)
        .def_property_readonly("obstacle_count", [](const Scene& s) { return s.obstacles().size(); })
        .def("is_state_valid", [](const Scene& s, const Config& q) { return is_state_valid(q, s); }, py::arg("q"))
        .def("is_motion_valid", [](const Scene& s, const Config& a, const Config& b) { return is_motion_valid(a, b, s); },
             py::arg("a"), py::arg("b"));

    m.def("generate_scene", [](const std::string& tmpl, std::uint64_t seed) {
        return generate_scene(SceneTemplate::parse(tmpl), seed);
    }, py::arg("template"), py::arg("seed"));

    py::class_<ExperiencePath>(m, "ExperiencePath")
        .def_static("from_waypoints", &ExperiencePath::from_waypoints, py::arg("waypoints"))
        .def_readonly("waypoints", &ExperiencePath::waypoints)
        .def_readonly("phases", &ExperiencePath::phases);

    m.def("map_experience", &map_experience, py::arg("path"), py::arg("start"), py::arg("goal"));

    py::class_<PathLibrary>(m, "PathLibrary")
        .def(py::init<>())
        .def("add", [](PathLibrary& lib, const ExperiencePath& p) { lib.add(p); }, py::arg("path"))
        .def("__len__", &PathLibrary::size)
        .def("__getitem__", [](const PathLibrary& lib, std::size_t i) {
            if (i >= lib.size()) throw py::index_error();
            return lib[i].path;
        })
        .def("prefix", &PathLibrary::prefix, py::arg("n"))
        .def("retrieve_index", [](const PathLibrary& lib, const Config& s, const Config& g) {
            return retrieve_index(lib, s, g);
        }, py::arg("start"), py::arg("goal"))
        .def("save", [](const PathLibrary& lib, const std::filesystem::path& p) { save_library(lib, p); })
        .def_static("load", &load_library, py::arg("path"));

    py::class_<Problem>(m, "Problem")
        .def_readonly("id", &Problem::id)
        .def_readonly("template", &Problem::template_name)
        .def_readonly("scene", &Problem::scene)
        .def_property_readonly("start", [](const Problem& p) { return p.query.start; })
        .def_property_readonly("goal", [](const Problem& p) { return p.query.goal; })
        .def_readonly("seed", &Problem::seed)
        .def_readonly("criterion_cost", &Problem::criterion_cost);

    m.def("build_dataset", [](const std::string& tmpl, int n, std::uint64_t seed, int workers) {
        py::gil_scoped_release release;
        Dataset d = build_dataset(SceneTemplate::parse(tmpl), n, seed, {}, workers);
        return std::make_pair(std::move(d.problems), std::move(d.library));
    }, py::arg("template"), py::arg("n"), py::arg("seed"), py::arg("workers") = 1,
          "Returns (problems, library): verified problems and their RRT-Connect solutions.");

    m.def("plan", [](const Config& start, const Config& goal, const Scene& scene, const PathLibrary& library,
                     double budget, std::uint64_t seed, const std::string& clock) {
        PlannerConfig cfg;
        cfg.budget = make_budget(budget, clock);
        cfg.seed = seed;
        PlanResult r;
        {
            py::gil_scoped_release release;
            r = plan({start, goal}, scene, library, cfg);
        }
        return result_to_dict(r);
    }, py::arg("start"), py::arg("goal"), py::arg("scene"), py::arg("library"), py::arg("budget") = 1.0,
          py::arg("seed") = 0, py::arg("clock") = "virtual");

    const auto baseline = [](PlanResult (*fn)(const Query&, const Scene&, const BaselineConfig&)) {
        return [fn](const Config& start, const Config& goal, const Scene& scene, double budget, std::uint64_t seed,
                    const std::string& clock) {
            BaselineConfig cfg;
            cfg.budget = make_budget(budget, clock);
            cfg.seed = seed;
            PlanResult r;
            {
                py::gil_scoped_release release;
                r = fn({start, goal}, scene, cfg);
            }
            return result_to_dict(r);
        };
    };
    m.def("rrt_connect", baseline(&rrt_connect), py::arg("start"), py::arg("goal"), py::arg("scene"),
          py::arg("budget") = 1.0, py::arg("seed") = 0, py::arg("clock") = "virtual");
    m.def("rrt_star", baseline(&rrt_star), py::arg("start"), py::arg("goal"), py::arg("scene"),
          py::arg("budget") = 1.0, py::arg("seed") = 0, py::arg("clock") = "virtual");

    m.def("run_suite", [](const ProblemSet& problems, const std::string& planners, const PathLibrary& library,
                          double budget, std::uint64_t seed, int workers, std::optional<std::filesystem::path> out) {
        SuiteOptions opts;
        opts.budget = Budget::virtual_time(budget);
        opts.seed = seed;
        opts.workers = workers;
        std::vector<BenchRecord> records;
        SummaryTable table;
        {
            py::gil_scoped_release release;
            records = run_suite(problems, parse_planners(planners), library, opts);
            table = summarize(records);
            if (out) emit_outputs(table, records, *out);
        }
        py::list rows;
        for (const auto& r : table) {
            py::dict d;
            d["template"] = r.template_name;
            d["planner"] = r.planner;
            d["runs"] = r.runs;
            d["solved"] = r.solved;
            d["success_rate"] = r.success_rate;
            d["mean_cost_reduction"] = r.mean_cost_reduction;
            d["median_time_to_first_solution"] = r.median_time_to_first;
            d["cost_table_eligible"] = r.cost_table_eligible;
            rows.append(d);
        }
        return rows;
    }, py::arg("problems"), py::arg("planners"), py::arg("library"), py::arg("budget") = 3.0, py::arg("seed") = 0,
          py::arg("workers") = 1, py::arg("out") = py::none(),
          "Runs every (problem, planner) pair and returns the summary table; writes CSV/SVG outputs when out is set.");
}
