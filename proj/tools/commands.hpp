#pragma once

// Command-line front end. run() is kept separate from main() so tests can
// drive every subcommand against in-memory streams.
//
// Exit codes: 0 success, 2 usage/parse, 3 infeasible regime,
// 4 data integrity (strict-turnstile violation, index outside the domain),
// 5 numeric failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccsketch/ccsketch.hpp"

namespace ccsketch::cli {

enum exit_code : int {
    ok = 0,
    usage = 2,
    infeasible = 3,
    data_integrity = 4,
    numeric = 5,
};

using json = nlohmann::ordered_json;

// An ordered set of named fields, printed as a one-row CSV or a JSON object.
class Report {
public:
    Report& add(std::string key, json value, std::string text)
    {
        fields_.push_back({std::move(key), std::move(value), std::move(text)});
        return *this;
    }
    Report& add(std::string key, double v) { return add(std::move(key), v, detail::num(v)); }
    Report& add_int(std::string key, std::uint64_t v) { return add(std::move(key), v, std::to_string(v)); }
    Report& add_bool(std::string key, bool v) { return add(std::move(key), v, v ? "true" : "false"); }
    Report& add_str(std::string key, const std::string& v) { return add(std::move(key), v, v); }

    void write(std::ostream& out, const std::string& format, const std::string& schema) const
    {
        if (format == "json") {
            json obj;
            obj["schema"] = schema;
            for (const auto& f : fields_)
                obj[f.key] = f.value;
            out << obj.dump(2) << '\n';
            return;
        }
        out << "# ccsketch " << schema << '\n';
        for (std::size_t i = 0; i < fields_.size(); ++i)
            out << (i ? "," : "") << fields_[i].key;
        out << '\n';
        for (std::size_t i = 0; i < fields_.size(); ++i)
            out << (i ? "," : "") << fields_[i].text;
        out << '\n';
    }

private:
    struct Field {
        std::string key;
        json value;
        std::string text;
    };
    std::vector<Field> fields_;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// Writes to --out when given, otherwise to the command's stdout.
template <typename Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn)
{
    if (path.empty()) {
        fn(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open output file " + path);
    fn(file);
    if (!file)
        throw std::runtime_error("failed writing " + path);
}

inline std::ifstream open_input(const std::string& path, bool binary = false)
{
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in)
        throw std::runtime_error("cannot open input file " + path);
    return in;
}

inline CCSketch load_sketch(const std::string& path)
{
    auto in = open_input(path, true);
    return read_sketch(in);
}

inline void save_sketch(const std::string& path, const CCSketch& sketch)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + path);
    write_sketch(out, sketch);
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
    double epsilon = 1e-3;
    double fail_prob = 1e-10;
    double gap = 1e-5;
    std::string format = "csv";
};

inline int cmd_plan(const PlanArgs& a, Streams io)
{
    const SamplePlan plan = sample_size({a.epsilon, a.fail_prob, a.gap});
    const auto k = static_cast<std::uint32_t>(plan.k_ceil);
    const double right = right_tail_bound({a.epsilon, a.fail_prob, a.gap, k});
    Report r;
    r.add("epsilon", a.epsilon).add("fail_prob", a.fail_prob).add("gap", a.gap);
    r.add("k", plan.k).add_int("k_plan", plan.k_ceil);
    r.add("right_tail_bound", right);
    if (a.epsilon < 1.0) {
        const LeftTailBound left = left_tail_bound({a.epsilon, a.fail_prob, a.gap, k});
        r.add("left_tail_bound", left.value);
        r.add("left_log10_exponent", left.log_exponent / std::log(10.0));
        r.add_bool("left_underflow", left.underflow);
    }
    r.write(io.out, a.format, "plan v1");
    return ok;
}

// ---------------------------------------------------------------- sketch

struct BuildArgs {
    std::string input;
    std::string out;
    double gap = 1e-4;
    std::uint32_t k = 3;
    std::uint64_t seed = 0;
    std::uint64_t domain = 0;
    bool unbounded = false;
    std::string format = "csv";
};

inline int cmd_sketch_build(const BuildArgs& a, Streams io)
{
    if (a.unbounded == (a.domain != 0))
        throw CLI::ValidationError("sketch build", "give exactly one of --domain N or --unbounded");
    CCSketch sketch(SketchConfig{a.gap, a.k, a.seed, a.unbounded ? 0 : a.domain});
    auto in = open_input(a.input);
    const std::size_t n = for_each_update(in, [&](const StreamUpdate& u, std::size_t line_no) {
        try {
            sketch.update(u);
        } catch (const index_error& e) {
            throw index_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    });
    save_sketch(a.out, sketch);
    Report r;
    r.add("f1", sketch.f1()).add_int("updates", n).add_int("k", a.k).add("gap", a.gap);
    r.write(io.out, a.format, "sketch_build v1");
    return ok;
}

struct MergeArgs {
    std::vector<std::string> inputs;
    std::string out;
    std::string format = "csv";
};

inline int cmd_sketch_merge(const MergeArgs& a, Streams io)
{
    if (a.inputs.size() < 2)
        throw CLI::ValidationError("sketch merge", "needs at least two input sketches");
    CCSketch acc = load_sketch(a.inputs.front());
    for (std::size_t i = 1; i < a.inputs.size(); ++i)
        acc.merge(load_sketch(a.inputs[i]));
    save_sketch(a.out, acc);
    Report r;
    r.add("f1", acc.f1()).add_int("merged", a.inputs.size());
    r.write(io.out, a.format, "sketch_merge v1");
    return ok;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string sketch;
    std::string what = "moment";
    std::string format = "csv";
};

inline int cmd_estimate(const EstimateArgs& a, Streams io)
{
    const CCSketch sketch = load_sketch(a.sketch);
    Report r;
    r.add_str("what", a.what).add("gap", sketch.config().delta).add_int("k", sketch.config().k);
    if (a.what == "moment") {
        const MomentEstimate m = sketch.estimate_moment();
        r.add("alpha", m.alpha).add("f_alpha", m.value).add("f1", sketch.f1());
    } else {
        const bool renyi = a.what == "renyi";
        const EntropyEstimate e =
            shannon_from_sketch(sketch, renyi ? EntropyFamily::renyi : EntropyFamily::tsallis);
        const std::string family = a.what == "shannon" ? "shannon_approx_via_tsallis" : a.what;
        r.add_str("family", family).add("alpha", e.alpha).add("entropy_nats", e.value);
    }
    r.write(io.out, a.format, "estimate v1");
    return ok;
}

// ---------------------------------------------------------------- simulate

struct GridArgs {
    double eps_min = 1e-4;
    double eps_max = 1e-1;
    std::size_t eps_points = 30;

    std::vector<double> grid() const { return log_spaced_grid(eps_min, eps_max, eps_points); }
};

struct SimulateArgs {
    double gap = 1e-4;
    std::uint32_t k = 1;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    GridArgs grid;
    unsigned threads = default_threads();
    bool figure1 = false;
    std::string out;
    std::string format = "csv";
};

inline json curve_json(const TailCurve& c)
{
    json rows = json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"epsilon", r.epsilon},
                        {"hits", r.hits},
                        {"empirical_prob", r.empirical_prob},
                        {"below_resolution", r.hits == 0},
                        {"bound", r.bound},
                        {"bound_feasible", r.bound_feasible},
                        {"trials", r.trials}});
    return {{"delta", c.delta}, {"k", c.k}, {"rows", rows}};
}

inline int cmd_simulate(const SimulateArgs& a, Streams io)
{
    std::vector<TailCurve> curves;
    if (a.figure1) {
        curves = figure1_dataset(figure1_default_specs(a.seed), a.threads);
    } else {
        curves.push_back(simulate_right_tail({a.gap, a.k, a.grid.grid(), a.trials, a.seed}, a.threads));
    }
    with_output(a.out, io.out, [&](std::ostream& out) {
        if (a.format == "json") {
            json arr = json::array();
            for (const auto& c : curves)
                arr.push_back(curve_json(c));
            out << json{{"schema", a.figure1 ? "figure1 v1" : "tail_curve v1"}, {"curves", arr}}.dump(2) << '\n';
        } else if (a.figure1) {
            write_figure1_csv(out, curves);
        } else {
            write_tail_csv(out, curves.front());
        }
    });
    return ok;
}

// ---------------------------------------------------------------- bounds-curve

struct BoundsCurveArgs {
    double gap = 1e-4;
    std::uint32_t k = 1;
    GridArgs grid;
    std::optional<double> refine_t;
    std::string out;
    std::string format = "csv";
};

inline int cmd_bounds_curve(const BoundsCurveArgs& a, Streams io)
{
    struct Row {
        double eps;
        std::optional<double> right;
        std::optional<double> refined;
        std::optional<LeftTailBound> left;
    };
    std::vector<Row> rows;
    for (double eps : a.grid.grid()) {
        Row row{eps, {}, {}, {}};
        const BoundQuery q{eps, 0.5, a.gap, a.k};
        try {
            row.right = right_tail_bound(q);
        } catch (const infeasible_error&) {
        }
        if (a.refine_t) {
            try {
                row.refined = right_tail_bound_refined(q, *a.refine_t);
            } catch (const infeasible_error&) {
            }
        }
        if (eps < 1.0)
            row.left = left_tail_bound(q);
        rows.push_back(row);
    }
    auto cell = [](const std::optional<double>& v) { return v ? detail::num(*v) : std::string("infeasible"); };
    with_output(a.out, io.out, [&](std::ostream& out) {
        if (a.format == "json") {
            json arr = json::array();
            for (const auto& r : rows) {
                json o{{"epsilon", r.eps}, {"right_bound", r.right ? json(*r.right) : json(nullptr)}};
                if (a.refine_t)
                    o["right_bound_refined"] = r.refined ? json(*r.refined) : json(nullptr);
                o["left_bound"] = r.left ? json(r.left->value) : json(nullptr);
                o["left_log10_exponent"] = r.left ? json(r.left->log_exponent / std::log(10.0)) : json(nullptr);
                arr.push_back(o);
            }
            out << json{{"schema", "bounds_curve v1"}, {"gap", a.gap}, {"k", a.k}, {"rows", arr}}.dump(2) << '\n';
            return;
        }
        out << "# ccsketch bounds_curve v1\n";
        out << "epsilon,right_bound" << (a.refine_t ? ",right_bound_refined" : "")
            << ",left_bound,left_log10_exponent\n";
        for (const auto& r : rows) {
            out << detail::num(r.eps) << ',' << cell(r.right);
            if (a.refine_t)
                out << ',' << cell(r.refined);
            if (r.left)
                out << ',' << detail::num(r.left->value) << ',' << detail::num(r.left->log_exponent / std::log(10.0));
            else
                out << ",,";
            out << '\n';
        }
    });
    return ok;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
    std::string input;
    std::uint64_t domain = 0;
    bool unbounded = false;
    double gap = 1e-4;
    std::string format = "csv";
};

inline int cmd_oracle(const OracleArgs& a, Streams io)
{
    if (a.unbounded)
        throw CLI::ValidationError("oracle", "exact moments need a bounded --domain; unbounded mode is unsupported");
    if (a.domain == 0)
        throw CLI::ValidationError("oracle", "--domain is required");
    validate_gap(a.gap);
    auto in = open_input(a.input);
    const std::vector<double> vec = materialize_stream(in, a.domain);
    const double alpha = 1.0 - a.gap;
    const double f_alpha = exact_moment(vec, alpha);
    const double f1 = exact_moment(vec, 1.0);
    Report r;
    r.add("gap", a.gap).add("alpha", alpha).add("f_alpha", f_alpha).add("f1", f1);
    r.add("shannon", shannon_exact(vec));
    r.add("renyi", renyi_entropy_gap(f_alpha, f1, a.gap));
    r.add("tsallis", tsallis_entropy_gap(f_alpha, f1, a.gap));
    r.write(io.out, a.format, "oracle v1");
    return ok;
}

// ---------------------------------------------------------------- driver

inline int classify(const std::exception& e)
{
    if (dynamic_cast<const infeasible_error*>(&e))
        return infeasible;
    if (dynamic_cast<const turnstile_violation_error*>(&e) || dynamic_cast<const non_positive_minimum_error*>(&e) ||
        dynamic_cast<const index_error*>(&e) || dynamic_cast<const degenerate_input_error*>(&e))
        return data_integrity;
    if (dynamic_cast<const numeric_error*>(&e) || dynamic_cast<const no_root_error*>(&e))
        return numeric;
    return usage;
}

inline std::string hint(const std::exception& e)
{
    if (dynamic_cast<const non_positive_minimum_error*>(&e))
        return " (is the stream strict-turnstile with at least one positive frequency?)";
    return "";
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Compressed Counting sketches: frequency moments and entropies near alpha = 1"};
    app.require_subcommand(1);
    const std::vector<std::string> formats{"csv", "json"};

    auto add_format = [&](CLI::App* sub, std::string& target) {
        sub->add_option("--format", target, "Output format")->check(CLI::IsMember(formats));
    };
    auto add_grid = [](CLI::App* sub, GridArgs& g) {
        sub->add_option("--eps-min", g.eps_min, "Smallest epsilon of the log-spaced grid");
        sub->add_option("--eps-max", g.eps_max, "Largest epsilon of the log-spaced grid");
        sub->add_option("--eps-points", g.eps_points, "Number of grid points")->check(CLI::Range(2, 100000));
    };

    PlanArgs plan;
    auto* p = app.add_subcommand("plan", "Sample size needed for a (1+eps) estimate w.p. 1-delta");
    p->add_option("--epsilon", plan.epsilon, "Relative error target");
    p->add_option("--delta", plan.fail_prob, "Failure probability");
    p->add_option("--gap", plan.gap, "Gap 1 - alpha");
    add_format(p, plan.format);

    auto* sk = app.add_subcommand("sketch", "Build or merge sketch files");
    sk->require_subcommand(1);
    BuildArgs build;
    auto* b = sk->add_subcommand("build", "Sketch a text stream of 'index increment' lines");
    b->add_option("--input", build.input, "Stream file")->required();
    b->add_option("--out", build.out, "Sketch file to write")->required();
    b->add_option("--gap", build.gap, "Gap 1 - alpha");
    b->add_option("--k", build.k, "Number of projections")->check(CLI::PositiveNumber);
    b->add_option("--seed", build.seed, "Projection seed");
    b->add_option("--domain", build.domain, "Domain size D (indices must be < D)");
    b->add_flag("--unbounded", build.unbounded, "Skip index validation (hashed key spaces)");
    add_format(b, build.format);
    MergeArgs merge_args;
    auto* m = sk->add_subcommand("merge", "Merge sketches built with one configuration");
    m->add_option("inputs", merge_args.inputs, "Sketch files")->required();
    m->add_option("--out", merge_args.out, "Merged sketch file")->required();
    add_format(m, merge_args.format);

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Estimate a moment or entropy from a sketch file");
    e->add_option("--sketch", est.sketch, "Sketch file")->required();
    e->add_option("--what", est.what, "Quantity")
        ->check(CLI::IsMember(std::vector<std::string>{"moment", "renyi", "tsallis", "shannon"}));
    add_format(e, est.format);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Monte Carlo right-tail probabilities against the bound");
    s->add_option("--gap", sim.gap, "Gap 1 - alpha");
    s->add_option("--k", sim.k, "Number of projections")->check(CLI::PositiveNumber);
    s->add_option("--trials", sim.trials, "Trials")->check(CLI::PositiveNumber);
    s->add_option("--seed", sim.seed, "Base seed");
    add_grid(s, sim.grid);
    s->add_option("--threads", sim.threads, "Worker threads (results do not depend on this)")
        ->check(CLI::Range(1u, 1024u));
    s->add_flag("--figure1", sim.figure1, "Emit the four reference panels (gap 1e-4 with k = 1, 2, 3; gap 1e-6 with k = 1)");
    s->add_option("--out", sim.out, "CSV/JSON output file (default stdout)");
    add_format(s, sim.format);

    BoundsCurveArgs bc;
    auto* c = app.add_subcommand("bounds-curve", "Right and left tail bounds over an epsilon grid");
    c->add_option("--gap", bc.gap, "Gap 1 - alpha");
    c->add_option("--k", bc.k, "Number of projections")->check(CLI::PositiveNumber);
    add_grid(c, bc.grid);
    c->add_option("--refine-t", bc.refine_t, "Extra trapezoid node t in (0,1) for the refined right bound");
    c->add_option("--out", bc.out, "Output file (default stdout)");
    add_format(c, bc.format);

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle", "Exact moments and entropies of a bounded stream");
    o->add_option("--input", orc.input, "Stream file")->required();
    o->add_option("--domain", orc.domain, "Domain size D");
    o->add_flag("--unbounded", orc.unbounded, "Unsupported; present for symmetry with sketch build");
    o->add_option("--gap", orc.gap, "Gap 1 - alpha");
    add_format(o, orc.format);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        Streams io{out, err};
        if (*p)
            return cmd_plan(plan, io);
        if (*b)
            return cmd_sketch_build(build, io);
        if (*m)
            return cmd_sketch_merge(merge_args, io);
        if (*e)
            return cmd_estimate(est, io);
        if (*s)
            return cmd_simulate(sim, io);
        if (*c)
            return cmd_bounds_curve(bc, io);
        if (*o)
            return cmd_oracle(orc, io);
    } catch (const CLI::Error& ce) {
        err << "error: " << ce.what() << '\n';
        return usage;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << hint(ex) << '\n';
        return classify(ex);
    }
    return usage;
}

} // namespace ccsketch::cli
