#include "iertc/bench.hpp"

#include "iertc/baselines.hpp"
#include "iertc/planner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace iertc {

namespace {

constexpr const char* kCriterionNote =
    "# criterion_cost: cost of the rrt_connect path that verified each problem (dataset generator)";

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw InputError("bad number '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double(s);
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw InputError("bad integer '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Data rows of a CSV written by emit_outputs: comments and the header skipped.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        auto cells = split(line, ',');
        if (cells.size() != columns)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                             " columns");
        rows.push_back(std::move(cells));
    }
    return rows;
}

PlanResult run_one(const PlannerSpec& spec, const Problem& problem, const PathLibrary& library, const Budget& budget,
                   std::uint64_t seed) {
    if (spec.kind == PlannerKind::Iertc) {
        PlannerConfig cfg;
        cfg.budget = budget;
        cfg.seed = seed;
        if (spec.experiences == 0) return plan(problem.query, problem.scene, library, cfg);
        return plan(problem.query, problem.scene, library.prefix(spec.experiences), cfg);
    }
    BaselineConfig cfg;
    cfg.budget = budget;
    cfg.seed = seed;
    if (spec.kind == PlannerKind::RrtStar) return rrt_star(problem.query, problem.scene, cfg);
    return rrt_connect(problem.query, problem.scene, cfg);
}

// --- SVG -------------------------------------------------------------------

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};

std::string colour(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof *kPalette)]; }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double width = 640, height = 400, left = 70, right = 150, top = 40, bottom = 60;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

void svg_open(std::ostream& out, const Frame& f, const std::string& title, const std::string& y_label) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << f.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << f.top + f.plot_h() / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
        << f.top + f.plot_h() / 2 << ")\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
    out << "<line x1=\"" << f.left << "\" y1=\"" << f.top + f.plot_h() << "\" x2=\"" << f.left + f.plot_w()
        << "\" y2=\"" << f.top + f.plot_h() << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\"" << f.top + f.plot_h()
        << "\" stroke=\"black\"/>\n";
}

void svg_y_ticks(std::ostream& out, const Frame& f, double lo, double hi) {
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double y = f.top + f.plot_h() * (1.0 - k / 4.0);
        out << "<text x=\"" << f.left - 6 << "\" y=\"" << y + 4 << "\" font-size=\"10\" text-anchor=\"end\">"
            << fmt(std::round(v * 1000.0) / 1000.0) << "</text>\n";
    }
}

void svg_legend(std::ostream& out, const Frame& f, const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = f.top + 10 + 18.0 * static_cast<double>(i);
        const double x = f.left + f.plot_w() + 12;
        out << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\"" << colour(i)
            << "\"/>\n";
        out << "<text x=\"" << x + 15 << "\" y=\"" << y << "\" font-size=\"11\">" << escape(names[i]) << "</text>\n";
    }
}

template <class T>
std::vector<std::string> unique_in_order(const std::vector<T>& rows, std::string T::*field) {
    std::vector<std::string> out;
    for (const auto& r : rows)
        if (std::find(out.begin(), out.end(), r.*field) == out.end()) out.push_back(r.*field);
    return out;
}

// Grouped bars: one group per template, one bar per planner.
void write_bars(const std::filesystem::path& path, const SummaryTable& rows, const std::string& title,
                const std::string& y_label, double (*value)(const SummaryRow&), double lo, double hi) {
    auto out = open_out(path);
    Frame f;
    svg_open(out, f, title, y_label);
    svg_y_ticks(out, f, lo, hi);
    const auto templates = unique_in_order(rows, &SummaryRow::template_name);
    const auto planners = unique_in_order(rows, &SummaryRow::planner);
    const double group_w = f.plot_w() / static_cast<double>(std::max<std::size_t>(1, templates.size()));
    const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(1, planners.size()));
    const double zero_y = f.top + f.plot_h() * (1.0 - (0.0 - lo) / (hi - lo));
    for (std::size_t t = 0; t < templates.size(); ++t) {
        const double gx = f.left + group_w * static_cast<double>(t);
        out << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << f.top + f.plot_h() + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(templates[t]) << "</text>\n";
        for (const auto& row : rows) {
            if (row.template_name != templates[t]) continue;
            const auto p = static_cast<std::size_t>(
                std::find(planners.begin(), planners.end(), row.planner) - planners.begin());
            const double v = std::clamp(value(row), lo, hi);
            const double y = f.top + f.plot_h() * (1.0 - (v - lo) / (hi - lo));
            const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(p);
            out << "<rect class=\"bar\" data-planner=\"" << escape(row.planner) << "\" data-value=\""
                << fmt(value(row)) << "\" x=\"" << x << "\" y=\"" << std::min(y, zero_y) << "\" width=\""
                << bar_w * 0.9 << "\" height=\"" << std::abs(zero_y - y) << "\" fill=\"" << colour(p) << "\"/>\n";
        }
    }
    svg_legend(out, f, planners);
    out << "</svg>\n";
    check_written(out, path);
}

void write_convergence(const std::filesystem::path& path, const std::vector<ConvergenceCurve>& curves) {
    auto out = open_out(path);
    Frame f;
    svg_open(out, f, "Mean best cost over solved runs", "path cost");
    double t_max = 0.0, c_lo = std::numeric_limits<double>::infinity(), c_hi = 0.0;
    for (const auto& c : curves) {
        if (!c.times.empty()) t_max = std::max(t_max, c.times.back());
        for (double v : c.mean_cost) {
            c_lo = std::min(c_lo, v);
            c_hi = std::max(c_hi, v);
        }
    }
    if (!(c_hi > c_lo)) {
        c_lo = std::isfinite(c_lo) ? c_lo - 0.5 : 0.0;
        c_hi = c_lo + 1.0;
    }
    if (!(t_max > 0.0)) t_max = 1.0;
    svg_y_ticks(out, f, c_lo, c_hi);
    out << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 14
        << "\" font-size=\"12\" text-anchor=\"middle\">time (s), 0 to " << fmt(t_max) << "</text>\n";
    std::vector<std::string> names;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        names.push_back(c.planner);
        out << "<polyline class=\"series\" data-planner=\"" << escape(c.planner) << "\" fill=\"none\" stroke=\""
            << colour(i) << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < c.times.size(); ++k) {
            const double x = f.left + f.plot_w() * c.times[k] / t_max;
            const double y = f.top + f.plot_h() * (1.0 - (c.mean_cost[k] - c_lo) / (c_hi - c_lo));
            out << (k ? " " : "") << x << ',' << y;
        }
        out << "\" data-costs=\"";
        for (std::size_t k = 0; k < c.mean_cost.size(); ++k) out << (k ? " " : "") << fmt(c.mean_cost[k]);
        out << "\"/>\n";
    }
    svg_legend(out, f, names);
    out << "</svg>\n";
    check_written(out, path);
}

} // namespace

PlannerSpec parse_planner(std::string_view name) {
    if (name == "rrt_connect") return {std::string(name), PlannerKind::RrtConnect, 0};
    if (name == "rrt_star") return {std::string(name), PlannerKind::RrtStar, 0};
    if (name == "iertc") return {std::string(name), PlannerKind::Iertc, 0};
    if (name.starts_with("iertc-")) {
        const std::string_view n = name.substr(6);
        std::size_t k = 0;
        const auto res = std::from_chars(n.data(), n.data() + n.size(), k);
        if (res.ec == std::errc{} && res.ptr == n.data() + n.size() && k > 0)
            return {std::string(name), PlannerKind::Iertc, k};
    }
    throw InputError("unknown planner '" + std::string(name) + "' (expected rrt_connect, rrt_star, iertc or iertc-<n>)");
}

std::vector<PlannerSpec> parse_planners(std::string_view list) {
    std::vector<PlannerSpec> out;
    for (const auto& item : split(std::string(list), ',')) {
        if (item.empty()) throw InputError("empty planner name in '" + std::string(list) + "'");
        out.push_back(parse_planner(item));
    }
    if (out.empty()) throw InputError("no planners given");
    return out;
}

std::uint64_t run_seed(std::uint64_t suite_seed, std::size_t problem, std::size_t planner) {
    return derive_seed(derive_seed(suite_seed, problem), planner);
}

std::vector<BenchRecord> run_suite(const ProblemSet& problems, const std::vector<PlannerSpec>& planners,
                                   const PathLibrary& library, const SuiteOptions& options) {
    if (problems.empty()) throw InputError("run_suite: problem set is empty");
    if (planners.empty()) throw InputError("run_suite: no planners");
    if (options.workers < 1) throw InputError("run_suite: worker count must be >= 1");
    options.budget.validate();
    if (options.budget.seconds <= 0.0 && options.budget.max_iterations == 0)
        throw InputError("run_suite: budget must be positive");
    for (const auto& spec : planners) {
        if (spec.kind != PlannerKind::Iertc) continue;
        if (library.empty()) throw InputError("run_suite: " + spec.name + " needs a non-empty experience library");
        if (spec.experiences > library.size())
            throw InputError("run_suite: " + spec.name + " asks for more experiences than the library holds (" +
                             std::to_string(library.size()) + ")");
        for (const auto& p : problems)
            if (p.scene.dim() != library.dim())
                throw InputError("run_suite: library dimension differs from problem " + p.id);
    }

    const std::size_t n = problems.size() * planners.size();
    std::vector<BenchRecord> records(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            const std::size_t pi = k / planners.size(), si = k % planners.size();
            const Problem& problem = problems[pi];
            BenchRecord& rec = records[k];
            rec.problem_id = problem.id;
            rec.template_name = problem.template_name;
            rec.planner = planners[si].name;
            rec.seed = run_seed(options.seed, pi, si);
            rec.criterion_cost = problem.criterion_cost;
            try {
                PlanResult r = run_one(planners[si], problem, library, options.budget, rec.seed);
                rec.status = r.status;
                rec.cost = r.cost;
                rec.time_to_first_solution = r.time_to_first_solution;
                rec.iterations = r.iterations;
                rec.trace = std::move(r.trace);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };

    const auto threads = static_cast<std::size_t>(options.workers);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return records;
}

double relative_cost_reduction(double final_cost, double criterion_cost) {
    if (!(criterion_cost > 0.0)) throw InputError("relative_cost_reduction: criterion cost must be positive");
    return 100.0 * (1.0 - final_cost / criterion_cost);
}

SummaryTable summarize(const std::vector<BenchRecord>& records) {
    SummaryTable table;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    std::vector<std::vector<const BenchRecord*>> groups;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.template_name, r.planner);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, table.size()).first;
            SummaryRow row;
            row.template_name = r.template_name;
            row.planner = r.planner;
            table.push_back(std::move(row));
            groups.emplace_back();
        }
        groups[it->second].push_back(&r);
    }
    for (std::size_t g = 0; g < table.size(); ++g) {
        SummaryRow& row = table[g];
        std::vector<double> reductions, firsts;
        for (const BenchRecord* r : groups[g]) {
            ++row.runs;
            if (!r->solved()) continue;
            ++row.solved;
            if (r->criterion_cost > 0.0) reductions.push_back(relative_cost_reduction(r->cost, r->criterion_cost));
            if (r->time_to_first_solution) firsts.push_back(*r->time_to_first_solution);
        }
        row.success_rate = static_cast<double>(row.solved) / static_cast<double>(row.runs);
        row.cost_table_eligible = row.success_rate >= 0.5;
        if (!reductions.empty()) {
            double sum = 0.0;
            for (double v : reductions) sum += v;
            row.mean_cost_reduction = sum / static_cast<double>(reductions.size());
        }
        if (!firsts.empty()) {
            std::sort(firsts.begin(), firsts.end());
            const std::size_t m = firsts.size();
            row.median_time_to_first = m % 2 ? firsts[m / 2] : 0.5 * (firsts[m / 2 - 1] + firsts[m / 2]);
        }
    }
    return table;
}

std::vector<ConvergenceCurve> convergence_curves(const std::vector<BenchRecord>& records, int samples) {
    if (samples < 2) throw InputError("convergence_curves: need at least 2 samples");
    double t_max = 0.0;
    for (const auto& r : records)
        if (r.solved() && !r.trace.empty()) t_max = std::max(t_max, r.trace.samples.back().time);
    std::vector<ConvergenceCurve> curves;
    for (const auto& planner : unique_in_order(records, &BenchRecord::planner)) {
        std::vector<const BenchRecord*> solved;
        for (const auto& r : records)
            if (r.planner == planner && r.solved() && !r.trace.empty()) solved.push_back(&r);
        if (solved.empty()) continue;
        ConvergenceCurve c{planner, {}, {}};
        for (int k = 0; k < samples; ++k) {
            const double t = t_max * k / (samples - 1);
            double sum = 0.0;
            for (const BenchRecord* r : solved) {
                const auto& s = r->trace.samples;
                // Last sample at or before t; the first sample before that.
                auto it = std::upper_bound(s.begin(), s.end(), t,
                                           [](double time, const TracePoint& p) { return time < p.time; });
                sum += it == s.begin() ? s.front().cost : std::prev(it)->cost;
            }
            c.times.push_back(t);
            c.mean_cost.push_back(sum / static_cast<double>(solved.size()));
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

void emit_outputs(const SummaryTable& table, const std::vector<BenchRecord>& records,
                  const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    {
        const auto path = out_dir / "summary.csv";
        auto out = open_out(path);
        out << kCriterionNote << '\n'
            << "template,planner,runs,solved,success_rate,mean_cost_reduction_pct,median_time_to_first_solution,"
               "cost_table_eligible\n";
        for (const auto& r : table)
            out << r.template_name << ',' << r.planner << ',' << r.runs << ',' << r.solved << ','
                << fmt(r.success_rate) << ',' << fmt(r.mean_cost_reduction) << ',' << fmt(r.median_time_to_first)
                << ',' << (r.cost_table_eligible ? 1 : 0) << '\n';
        check_written(out, path);
    }
    {
        const auto path = out_dir / "records.csv";
        auto out = open_out(path);
        out << kCriterionNote << '\n'
            << "problem_id,template,planner,seed,status,final_cost,criterion_cost,cost_reduction_pct,"
               "time_to_first_solution,iterations\n";
        for (const auto& r : records) {
            std::optional<double> reduction;
            if (r.solved() && r.criterion_cost > 0.0) reduction = relative_cost_reduction(r.cost, r.criterion_cost);
            out << r.problem_id << ',' << r.template_name << ',' << r.planner << ',' << r.seed << ','
                << to_string(r.status) << ',' << fmt(r.cost) << ',' << fmt(r.criterion_cost) << ',' << fmt(reduction)
                << ',' << fmt(r.time_to_first_solution) << ',' << r.iterations << '\n';
        }
        check_written(out, path);
    }
    {
        const auto path = out_dir / "traces.csv";
        auto out = open_out(path);
        out << kCriterionNote << '\n' << "problem_id,planner,time,best_cost\n";
        for (const auto& r : records)
            for (const auto& s : r.trace.samples)
                out << r.problem_id << ',' << r.planner << ',' << fmt(s.time) << ',' << fmt(s.cost) << '\n';
        check_written(out, path);
    }
    if (records.empty()) return;

    write_bars(out_dir / "success.svg", table, "Success rate", "success rate",
               [](const SummaryRow& r) { return r.success_rate; }, 0.0, 1.0);
    SummaryTable eligible;
    double lo = 0.0, hi = 10.0;
    for (const auto& r : table) {
        if (!r.cost_table_eligible || !r.mean_cost_reduction) continue;
        eligible.push_back(r);
        lo = std::min(lo, *r.mean_cost_reduction);
        hi = std::max(hi, *r.mean_cost_reduction);
    }
    write_bars(out_dir / "reduction.svg", eligible, "Cost reduction vs criterion (planners with >= 50% success)",
               "reduction (%)", [](const SummaryRow& r) { return *r.mean_cost_reduction; }, lo, hi * 1.05);
    write_convergence(out_dir / "convergence.svg", convergence_curves(records));
}

std::vector<BenchRecord> load_records(const std::filesystem::path& out_dir) {
    std::vector<BenchRecord> records;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& c : read_rows(out_dir / "records.csv", 10)) {
        BenchRecord r;
        r.problem_id = c[0];
        r.template_name = c[1];
        r.planner = c[2];
        r.seed = parse_u64(c[3]);
        if (c[4] == to_string(PlanStatus::Solved))
            r.status = PlanStatus::Solved;
        else if (c[4] == to_string(PlanStatus::TimedOut))
            r.status = PlanStatus::TimedOut;
        else
            throw InputError("records.csv: unknown status '" + c[4] + "'");
        r.cost = parse_double(c[5]);
        r.criterion_cost = parse_double(c[6]);
        r.time_to_first_solution = parse_optional(c[8]);
        r.iterations = parse_u64(c[9]);
        index[{r.problem_id, r.planner}] = records.size();
        records.push_back(std::move(r));
    }
    for (const auto& c : read_rows(out_dir / "traces.csv", 4)) {
        auto it = index.find({c[0], c[1]});
        if (it == index.end()) throw InputError("traces.csv: no record for " + c[0] + " / " + c[1]);
        records[it->second].trace.samples.push_back({parse_double(c[2]), parse_double(c[3])});
    }
    return records;
}

SummaryTable load_summary(const std::filesystem::path& out_dir) {
    SummaryTable table;
    for (const auto& c : read_rows(out_dir / "summary.csv", 8)) {
        SummaryRow r;
        r.template_name = c[0];
        r.planner = c[1];
        r.runs = parse_u64(c[2]);
        r.solved = parse_u64(c[3]);
        r.success_rate = parse_double(c[4]);
        r.mean_cost_reduction = parse_optional(c[5]);
        r.median_time_to_first = parse_optional(c[6]);
        r.cost_table_eligible = c[7] == "1";
        table.push_back(std::move(r));
    }
    return table;
}

} // namespace iertc
