// Command-line front end: scene generation, dataset building, single
// queries and benchmark suites.

#include "iertc/baselines.hpp"
#include "iertc/bench.hpp"
#include "iertc/json_io.hpp"
#include "iertc/planner.hpp"
#include "iertc/scenegen.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace iertc;

namespace {

// Exit status for bad flags, unreadable inputs and similar configuration errors.
constexpr int kConfigError = 2;

struct Common {
    std::string template_name = "GapWall";
    int n = 10;
    std::uint64_t seed = 1;
    double budget = 3.0;
    std::string clock = "virtual";
    std::string planners = "rrt_star,iertc-1,iertc";
    std::string library;
    std::string problems;
    std::string out;
    int workers = 1;
    int library_size = 0;
    int index = 0;
};

Budget make_budget(double seconds, const std::string& clock) {
    if (!(seconds > 0.0)) throw InputError("--budget must be positive");
    if (clock == "virtual") return Budget::virtual_time(seconds);
    if (clock == "wall") return Budget::wall(seconds);
    throw InputError("--clock must be 'virtual' or 'wall'");
}

void print_summary(const SummaryTable& table) {
    std::printf("%-16s %-12s %6s %6s %8s %12s %10s\n", "template", "planner", "runs", "solved", "success",
                "reduction%", "median_tfs");
    for (const auto& r : table) {
        std::printf("%-16s %-12s %6zu %6zu %8.3f", r.template_name.c_str(), r.planner.c_str(), r.runs, r.solved,
                    r.success_rate);
        if (r.mean_cost_reduction && r.cost_table_eligible)
            std::printf(" %12.2f", *r.mean_cost_reduction);
        else
            std::printf(" %12s", "-");
        if (r.median_time_to_first)
            std::printf(" %10.3f\n", *r.median_time_to_first);
        else
            std::printf(" %10s\n", "-");
    }
}

std::size_t library_entries_needed(const std::vector<PlannerSpec>& planners, int requested) {
    std::size_t need = 0;
    for (const auto& p : planners) {
        if (p.kind != PlannerKind::Iertc) continue;
        need = std::max(need, p.experiences == 0 ? std::size_t{100} : p.experiences);
    }
    if (need > 0 && requested > 0) need = static_cast<std::size_t>(requested);
    return need;
}

int cmd_scene_gen(const Common& o) {
    const SceneTemplate tmpl = SceneTemplate::parse(o.template_name);
    const Scene scene = generate_scene(tmpl, o.seed);
    if (o.out.empty())
        std::cout << scene_to_json(scene) << '\n';
    else
        save_scene(scene, o.out);
    return 0;
}

int cmd_dataset_build(const Common& o) {
    if (o.out.empty()) throw InputError("--out directory is required");
    if (o.n < 1) throw InputError("--n must be >= 1");
    if (o.workers < 1) throw InputError("--workers must be >= 1");
    const SceneTemplate tmpl = SceneTemplate::parse(o.template_name);
    QueryOptions qo;
    qo.verify_budget = make_budget(o.budget, o.clock);
    const Dataset data = build_dataset(tmpl, o.n, o.seed, qo, o.workers);
    fs::create_directories(o.out);
    save_problems(data.problems, fs::path(o.out) / "problems.jsonl");
    save_library(data.library, fs::path(o.out) / "library.jsonl");
    std::printf("wrote %zu problems and %zu experiences to %s\n", data.problems.size(), data.library.size(),
                o.out.c_str());
    return 0;
}

int cmd_plan(const Common& o) {
    if (o.problems.empty()) throw InputError("--problems file is required");
    const ProblemSet problems = load_problems(o.problems);
    if (o.index < 0 || static_cast<std::size_t>(o.index) >= problems.size())
        throw InputError("--index out of range (" + std::to_string(problems.size()) + " problems)");
    const Problem& p = problems[static_cast<std::size_t>(o.index)];
    const auto planners = parse_planners(o.planners);
    if (planners.size() != 1) throw InputError("plan takes exactly one planner");
    const PlannerSpec& spec = planners.front();
    const Budget budget = make_budget(o.budget, o.clock);

    PlanResult r;
    if (spec.kind == PlannerKind::Iertc) {
        if (o.library.empty()) throw InputError("--library is required for " + spec.name);
        PathLibrary lib = load_library(o.library);
        if (spec.experiences > lib.size()) throw InputError("library holds fewer experiences than requested");
        if (spec.experiences > 0) lib = lib.prefix(spec.experiences);
        PlannerConfig cfg;
        cfg.budget = budget;
        cfg.seed = o.seed;
        r = plan(p.query, p.scene, lib, cfg);
    } else {
        BaselineConfig cfg;
        cfg.budget = budget;
        cfg.seed = o.seed;
        r = spec.kind == PlannerKind::RrtStar ? rrt_star(p.query, p.scene, cfg) : rrt_connect(p.query, p.scene, cfg);
    }

    Json j{{"problem", p.id},
           {"planner", spec.name},
           {"status", std::string(to_string(r.status))},
           {"cost", r.solved() ? Json(r.cost) : Json(nullptr)},
           {"criterion_cost", p.criterion_cost},
           {"iterations", r.iterations}};
    j["time_to_first_solution"] = r.time_to_first_solution ? Json(*r.time_to_first_solution) : Json(nullptr);
    j["path"] = Json::array();
    for (const auto& q : r.path) j["path"].push_back(config_to_json(q));
    j["trace"] = Json::array();
    for (const auto& s : r.trace.samples) j["trace"].push_back({s.time, s.cost});
    if (o.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(o.out);
        if (!out) throw std::runtime_error("cannot open " + o.out + " for writing");
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_bench_run(const Common& o) {
    if (o.out.empty()) throw InputError("--out directory is required");
    if (o.n < 1) throw InputError("--n must be >= 1");
    if (o.workers < 1) throw InputError("--workers must be >= 1");
    const auto planners = parse_planners(o.planners);
    SuiteOptions suite;
    suite.budget = make_budget(o.budget, o.clock);
    suite.seed = o.seed;
    suite.workers = o.workers;

    ProblemSet problems;
    PathLibrary library;
    std::optional<SceneTemplate> tmpl;
    if (!o.problems.empty()) {
        problems = load_problems(o.problems);
    } else {
        tmpl = SceneTemplate::parse(o.template_name);
        problems = build_dataset(*tmpl, o.n, derive_seed(o.seed, 2), {}, o.workers).problems;
    }
    const std::size_t need = library_entries_needed(planners, o.library_size);
    if (!o.library.empty()) {
        library = load_library(o.library);
    } else if (need > 0) {
        if (!tmpl) throw InputError("--library is required with --problems");
        library = build_dataset(*tmpl, static_cast<int>(need), derive_seed(o.seed, 1), {}, o.workers).library;
    }

    const auto records = run_suite(problems, planners, library, suite);
    const auto table = summarize(records);
    emit_outputs(table, records, o.out);
    print_summary(table);
    return 0;
}

int cmd_bench_report(const Common& o) {
    if (o.out.empty()) throw InputError("--out directory is required");
    const auto records = load_records(o.out);
    const auto table = summarize(records);
    emit_outputs(table, records, o.out);
    print_summary(table);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experience-guided anytime motion planning: scenes, datasets, planning and benchmarks"};
    app.require_subcommand(1);
    Common o;

    auto add_template = [&](CLI::App* c) {
        c->add_option("--template", o.template_name, "Scene template, e.g. GapWall or GapWall-5d")
            ->capture_default_str();
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Random seed")->capture_default_str(); };
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--budget", o.budget, "Per-run planning budget in seconds")->capture_default_str();
        c->add_option("--clock", o.clock, "Budget clock: virtual (reproducible) or wall")->capture_default_str();
    };

    auto* scene = app.add_subcommand("scene", "Scene utilities");
    scene->require_subcommand(1);
    auto* scene_gen = scene->add_subcommand("gen", "Generate one scene as JSON");
    add_template(scene_gen);
    add_seed(scene_gen);
    scene_gen->add_option("--out", o.out, "Output file (stdout when omitted)");

    auto* dataset = app.add_subcommand("dataset", "Problem sets and experience libraries");
    dataset->require_subcommand(1);
    auto* dataset_build = dataset->add_subcommand("build", "Generate verified problems and their experience library");
    add_template(dataset_build);
    add_seed(dataset_build);
    dataset_build->add_option("--n", o.n, "Number of problems")->capture_default_str();
    dataset_build->add_option("--budget", o.budget, "Verification budget in seconds")->capture_default_str();
    dataset_build->add_option("--clock", o.clock, "Budget clock: virtual or wall")->capture_default_str();
    dataset_build->add_option("--workers", o.workers, "Concurrent generation threads")->capture_default_str();
    dataset_build->add_option("--out", o.out, "Output directory")->required();

    auto* plan_cmd = app.add_subcommand("plan", "Solve a single query from a problem file");
    plan_cmd->add_option("--problems", o.problems, "Problem set (JSON lines)")->required();
    plan_cmd->add_option("--index", o.index, "Problem index in the file")->capture_default_str();
    plan_cmd->add_option("--planners", o.planners, "Planner: rrt_connect, rrt_star, iertc or iertc-<n>")
        ->default_str("iertc");
    plan_cmd->add_option("--library", o.library, "Experience library (JSON lines)");
    plan_cmd->add_option("--out", o.out, "Result JSON file (stdout when omitted)");
    add_seed(plan_cmd);
    add_budget(plan_cmd);

    auto* bench = app.add_subcommand("bench", "Benchmark suites");
    bench->require_subcommand(1);
    auto* bench_run = bench->add_subcommand("run", "Run planners over a problem set and write CSV/SVG reports");
    add_template(bench_run);
    add_seed(bench_run);
    add_budget(bench_run);
    bench_run->add_option("--n", o.n, "Number of generated problems")->capture_default_str();
    bench_run->add_option("--planners", o.planners, "Comma-separated planners")->capture_default_str();
    bench_run->add_option("--library", o.library, "Experience library; generated from the template when omitted");
    bench_run->add_option("--library-size", o.library_size, "Entries in a generated library (default: as needed)");
    bench_run->add_option("--problems", o.problems, "Problem set file instead of generating one");
    bench_run->add_option("--workers", o.workers, "Concurrent planner runs and dataset generation threads")->capture_default_str();
    bench_run->add_option("--out", o.out, "Output directory")->required();
    auto* bench_report = bench->add_subcommand("report", "Rebuild summary and plots from records.csv");
    bench_report->add_option("--out", o.out, "Directory holding records.csv and traces.csv")->required();

    CLI11_PARSE(app, argc, argv);

    if (plan_cmd->parsed() && plan_cmd->count("--planners") == 0) o.planners = "iertc";
    try {
        if (scene_gen->parsed()) return cmd_scene_gen(o);
        if (dataset_build->parsed()) return cmd_dataset_build(o);
        if (plan_cmd->parsed()) return cmd_plan(o);
        if (bench_run->parsed()) return cmd_bench_run(o);
        if (bench_report->parsed()) return cmd_bench_report(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}
