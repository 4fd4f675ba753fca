// gridcap: command-line front end for the grid capacity toolkit.
//
// Each subcommand reads a JSON experiment configuration, runs one analysis
// over a resolution ladder, and writes a JSON report (plus CSV / plot-data
// side files) into the output directory.  Outputs are deterministic for a
// fixed config and seed.
//
// Exit codes:
//   0  success
//   1  usage error or malformed configuration
//   2  fixture error (degenerate domain, mask outside grid, I/O failure)
//   3  a solver failed to converge (reports are still written)

#include <gridcap/gridcap.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gridcap;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = ".";
    uint64_t seed = 1;
    bool seed_given = false;
    int workers = 1;
    int refinements = 0; // 0 = config value or command default
    bool refinements_given = false;
};

struct Run {
    ExperimentConfig cfg;
    fs::path out;
    uint64_t seed = 1;
    int workers = 1;

    const json& raw() const { return cfg.raw; }
    int Q() const { return cfg.space.Q; }
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// How many ladder levels a multi-resolution command runs, and at which cell
// sides.  An explicit "ladder" array (strictly decreasing h values) wins;
// otherwise `refinements` levels are generated by halving the base h.
std::vector<double> resolve_ladder(const Run& run, const CliArgs& args, int default_levels) {
    if (run.raw().contains("ladder")) {
        auto hs = run.raw().at("ladder").get<std::vector<double>>();
        if (hs.empty()) throw std::invalid_argument("ladder must not be empty");
        for (size_t k = 0; k < hs.size(); ++k) {
            if (!(hs[k] > 0)) throw std::invalid_argument("ladder entries must be positive");
            if (k > 0 && !(hs[k] < hs[k - 1]))
                throw std::invalid_argument("ladder must be strictly decreasing");
        }
        return hs;
    }
    int levels = args.refinements_given ? args.refinements
                                        : run.raw().value("refinements", default_levels);
    if (levels < 1) throw std::invalid_argument("need at least one refinement level");
    std::vector<double> hs(levels);
    for (int k = 0; k < levels; ++k) hs[k] = run.cfg.space.h / double(int64_t(1) << k);
    return hs;
}

MetricGrid grid_at(const Run& run, double h) {
    SpaceParams sp = run.cfg.space;
    sp.h = h;
    return build_grid(run.cfg.domain, sp);
}

// Mask for set-valued commands: either the rasterization of config key
// `key`, or the grid complement of the domain when "complement" is true.
SetMask resolve_set(const Run& run, const MetricGrid& g, const char* key, const char* what) {
    if (run.raw().value("complement", false)) return complement_mask(g);
    if (!run.raw().contains(key))
        throw std::invalid_argument(std::string("config needs \"") + key +
                                    "\" or \"complement\": true");
    return parse_mask(run.raw().at(key), g, what);
}

json report_header(const Run& run) {
    json rep;
    rep["_meta"] = meta_block(run.cfg.text);
    rep["command"] = run.cfg.command;
    rep["domain"] = run.cfg.domain->name;
    rep["Q"] = run.Q();
    rep["workers"] = run.workers; // recorded; execution is serial and deterministic
    return rep;
}

json point_json(const Point& x, int Q) {
    json a = json::array();
    for (int i = 0; i < Q; ++i) a.push_back(x[i]);
    return a;
}

void finish(const Run& run, const json& rep) {
    fs::create_directories(run.out);
    write_json_report(run.out / (run.cfg.command + "-report.json"), rep);
}

const char* verdict(bool ok) { return ok ? "yes" : "no"; }

// ---------------------------------------------------------------- capacity

int run_capacity(const Run& run, const CliArgs& args) {
    const double p = run.raw().value("p", 2.0);
    auto hs = resolve_ladder(run, args, 3);

    json rows = json::array();
    std::vector<std::pair<double, double>> plot;
    std::vector<double> values;
    bool converged = true;
    for (double h : hs) {
        MetricGrid g = grid_at(run, h);
        CapacityProblem prob;
        prob.grid = &g;
        prob.plate = parse_mask(run.raw().at("plate"), g, "plate");
        prob.env = parse_mask(run.raw().at("env"), g, "environment");
        prob.p = p;
        prob.tol = run.raw().value("tol", 1e-8);
        CapacityResult res = solve_capacity(prob);
        rows.push_back({{"h", h},
                        {"value", res.value},
                        {"iterations", res.iterations},
                        {"converged", res.converged}});
        plot.emplace_back(h, res.value);
        values.push_back(res.value);
        converged = converged && res.converged;
    }

    json rep = report_header(run);
    rep["p"] = p;
    rep["levels"] = rows;
    rep["trend"] = trend_name(classify_trend(values));
    rep["converged"] = converged;
    finish(run, rep);
    write_plot_data(run.out / "capacity-plot.txt", "h", "capacity", plot);

    std::cout << "capacity: " << hs.size() << " level(s), finest value "
              << format_double(values.back()) << ", converged " << verdict(converged) << "\n";
    return converged ? 0 : 3;
}

// ----------------------------------------------------------------- fatness

int run_fatness(const Run& run, const CliArgs& args) {
    const double p = run.raw().value("p", double(run.Q()));
    const int centers = run.raw().value("centers", 6);
    const int radius_levels = run.raw().value("radius_levels", 5);
    auto hs = resolve_ladder(run, args, 3);

    json levels = json::array();
    std::vector<std::pair<double, double>> plot;
    std::vector<double> values;
    FatnessScan finest;
    for (double h : hs) {
        MetricGrid g = grid_at(run, h);
        SetMask E = resolve_set(run, g, "set", "fatness target");
        FatnessScan scan = fatness_scan(g, E, p, centers, radius_levels);
        levels.push_back({{"h", h},
                          {"c0_est", scan.c0_est},
                          {"rows", scan.rows.size()},
                          {"any_thin", scan.any_thin}});
        plot.emplace_back(h, scan.c0_est);
        values.push_back(scan.c0_est);
        finest = std::move(scan);
    }

    json rep = report_header(run);
    rep["p"] = p;
    rep["levels"] = levels;
    Trend trend = classify_trend(values);
    rep["trend"] = trend_name(trend);
    rep["positive"] = (trend != Trend::Vanishing);
    if (p < double(run.Q()) && finest.c0_est > 0) {
        auto b = fatness_to_perfectness_bound(finest.c0_est, p, run.Q());
        rep["perfectness_bound"] = {
            {"m_max", b.m_max}, {"c_upper", b.c_upper}, {"c_lower", b.c_lower}};
    } else {
        rep["perfectness_bound"] = nullptr;
    }
    finish(run, rep);
    write_plot_data(run.out / "fatness-plot.txt", "h", "c0_est", plot);

    std::string csv = "cx,cy,cz,r,ratio,thin\n";
    for (const auto& r : finest.rows) {
        csv += format_double(r.center[0]) + "," + format_double(r.center[1]) + "," +
               format_double(r.center[2]) + "," + format_double(r.radius) + "," +
               format_double(r.ratio) + "," + (r.thin ? "1" : "0") + "\n";
    }
    write_text_file(run.out / "fatness-rows.csv", csv);

    std::cout << "fatness: p = " << format_double(p) << ", finest c0 "
              << format_double(values.back()) << ", trend "
              << trend_name(trend) << "\n";
    return 0;
}

// ------------------------------------------------------------- perfectness

int run_perfectness(const Run& run, const CliArgs& args) {
    auto hs = resolve_ladder(run, args, 3);
    PerfectnessOptions opt;
    opt.max_centers = run.raw().value("max_centers", int64_t(64));

    json levels = json::array();
    std::vector<std::pair<double, double>> plot;
    std::vector<double> values;
    PerfectnessReport finest;
    for (double h : hs) {
        MetricGrid g = grid_at(run, h);
        SetMask mask = resolve_set(run, g, "set", "perfectness target");
        PerfectnessReport pr = perfectness_constant(g, mask, opt);
        levels.push_back({{"h", h},
                          {"c_up_est", pr.c_up_est},
                          {"witness",
                           {{"center", point_json(pr.witness.center, run.Q())},
                            {"r_low", pr.witness.r_low},
                            {"r_high", pr.witness.r_high},
                            {"ratio", pr.witness.ratio}}}});
        plot.emplace_back(h, pr.c_up_est);
        values.push_back(pr.c_up_est);
        finest = std::move(pr);
    }

    json rep = report_header(run);
    rep["levels"] = levels;
    Trend trend = classify_trend(values);
    rep["trend"] = trend_name(trend);
    rep["positive"] = (trend != Trend::Diverging);
    finish(run, rep);
    write_plot_data(run.out / "perfectness-plot.txt", "h", "c_up_est", plot);

    std::string csv = "cx,cy,cz,r_low,r_high,ratio\n";
    for (const auto& r : finest.rows) {
        csv += format_double(r.center[0]) + "," + format_double(r.center[1]) + "," +
               format_double(r.center[2]) + "," + format_double(r.r_low) + "," +
               format_double(r.r_high) + "," + format_double(r.ratio) + "\n";
    }
    write_text_file(run.out / "perfectness-centers.csv", csv);

    std::cout << "perfectness: finest c_up " << format_double(values.back()) << ", trend "
              << trend_name(trend) << "\n";
    return 0;
}

// ------------------------------------------------------------------- hardy

int run_hardy(const Run& run, const CliArgs& args) {
    if (run.raw().contains("ladder"))
        throw std::invalid_argument(
            "hardy refines by halving; use \"refinements\" instead of \"ladder\"");
    const double p = run.raw().value("p", double(run.Q()));
    int refinements = args.refinements_given ? args.refinements
                                             : run.raw().value("refinements", 3);
    HardyOptions opt;
    opt.tol = run.raw().value("tol", 1e-6);
    opt.random_restarts = run.raw().value("restarts", 9);
    opt.seed = run.seed;

    MetricGrid g = grid_at(run, run.cfg.space.h);
    HardyEstimate est = estimate_hardy_constant(g, p, refinements, opt);

    json rows = json::array();
    std::vector<std::pair<double, double>> plot;
    bool converged = true;
    for (const auto& lv : est.levels) {
        rows.push_back({{"h", lv.h},
                        {"energy", lv.energy},
                        {"c_h_est", lv.c_h_est},
                        {"iterations", lv.iterations},
                        {"converged", lv.converged}});
        plot.emplace_back(lv.h, lv.c_h_est);
        converged = converged && lv.converged;
    }

    json rep = report_header(run);
    rep["p"] = p;
    rep["seed"] = run.seed;
    rep["levels"] = rows;
    rep["trend"] = trend_name(est.trend);
    rep["holds"] = est.holds;
    rep["converged"] = converged;
    finish(run, rep);
    write_plot_data(run.out / "hardy-plot.txt", "h", "c_h_est", plot);

    std::cout << "hardy: p = " << format_double(p) << ", finest c_H "
              << format_double(est.levels.back().c_h_est) << ", holds "
              << verdict(est.holds) << ", converged " << verdict(converged) << "\n";
    return converged ? 0 : 3;
}

// ------------------------------------------------------------------- mazya

int run_mazya(const Run& run, const CliArgs& args) {
    const double p = run.raw().value("p", 2.0);
    auto hs = resolve_ladder(run, args, 3);

    json rows = json::array();
    std::vector<std::pair<double, double>> plot;
    std::vector<double> values;
    bool converged = true;
    for (double h : hs) {
        MetricGrid g = grid_at(run, h);
        SetMask K = parse_mask(run.raw().at("K"), g, "K");
        MazyaReport mr = mazya_check(g, K, p);
        rows.push_back({{"h", h},
                        {"numerator", mr.numerator},
                        {"capacity", mr.capacity},
                        {"quotient", mr.quotient},
                        {"converged", mr.converged}});
        plot.emplace_back(h, mr.quotient);
        values.push_back(mr.quotient);
        converged = converged && mr.converged;
    }

    json rep = report_header(run);
    rep["p"] = p;
    rep["levels"] = rows;
    rep["trend"] = trend_name(classify_trend(values));
    rep["converged"] = converged;
    finish(run, rep);
    write_plot_data(run.out / "mazya-plot.txt", "h", "quotient", plot);

    std::cout << "mazya: finest quotient " << format_double(values.back()) << ", converged "
              << verdict(converged) << "\n";
    return converged ? 0 : 3;
}

// ------------------------------------------------------------------- cover

int run_cover(const Run& run, const CliArgs&) {
    MetricGrid g = grid_at(run, run.cfg.space.h);
    SetMask target = resolve_set(run, g, "target", "cover target");

    MergeParams mp;
    mp.alpha = run.raw().value("alpha", 2.0);
    mp.c_up = run.raw().value("c_up", 1.0);
    const double thr = epsilon_threshold(mp.alpha * mp.c_up);
    mp.eps = run.raw().value("eps", 0.9 * thr);

    // natural cover: one ball of radius h per occupied cell (a cell's
    // half-diagonal is below h for Q <= 3, so each ball covers its cell)
    BallCover cover;
    cover.exponent = mp.eps;
    for (int64_t idx : target.cells) {
        Point x = g.cell_center(idx);
        cover.target.push_back(x);
        cover.balls.push_back(Ball{x, g.params.h});
    }
    const double cost_before = cover_cost(cover);

    MergeOutcome out = merge_cover(std::move(cover), mp, run.Q());
    const double cost_after = cover_cost(out.cover);
    const double s = run.raw().value("s", mp.eps);
    const double content = content_upper(out.cover.target, s, g.params.h, run.Q());
    SurvivalReport sv =
        surviving_radius_bound(out.cover, out.cover.target.front(), g.params.h, mp, run.Q());

    json rep = report_header(run);
    rep["params"] = {{"alpha", mp.alpha},
                     {"c_up", mp.c_up},
                     {"eps", mp.eps},
                     {"eps_threshold", thr},
                     {"s", s}};
    rep["initial_balls"] = target.cells.size();
    rep["final_balls"] = out.cover.balls.size();
    rep["merge_steps"] = out.steps.size();
    rep["cost_before"] = cost_before;
    rep["cost_after"] = cost_after;
    rep["content_upper"] = content;
    rep["survival"] = {{"radius", sv.radius}, {"bound", sv.bound}, {"pass", sv.pass}};
    finish(run, rep);

    std::ostringstream balls_csv;
    write_cover_csv(balls_csv, out.cover, run.Q());
    write_text_file(run.out / "cover-balls.csv", balls_csv.str());

    std::ostringstream trace_csv;
    write_merge_trace_csv(trace_csv, out.steps);
    write_text_file(run.out / "cover-trace.csv", trace_csv.str());

    std::vector<std::pair<double, double>> plot;
    plot.emplace_back(0.0, cost_before);
    for (const auto& st : out.steps) plot.emplace_back(double(st.step), st.cost_after);
    write_plot_data(run.out / "cover-plot.txt", "step", "cost", plot);

    std::cout << "cover: " << target.cells.size() << " -> " << out.cover.balls.size()
              << " balls, content_upper " << format_double(content) << ", survival "
              << verdict(sv.pass) << "\n";
    return 0;
}

// ------------------------------------------------------------- equivalence

json condition_json(const EquivalenceCondition& c) {
    return {{"name", c.name},      {"p", c.p},
            {"h", c.hs},           {"values", c.values},
            {"trend", trend_name(c.trend)}, {"positive", c.positive}};
}

int run_equivalence(const Run& run, const CliArgs& args) {
    if (run.raw().contains("ladder"))
        throw std::invalid_argument(
            "equivalence refines by halving; use \"refinements\" instead of \"ladder\"");
    EquivalenceOptions opt;
    opt.refinements = args.refinements_given ? args.refinements
                                             : run.raw().value("refinements", 3);
    opt.fatness_centers = run.raw().value("fatness_centers", opt.fatness_centers);
    opt.fatness_radius_levels =
        run.raw().value("fatness_radius_levels", opt.fatness_radius_levels);
    opt.perfectness_centers =
        run.raw().value("perfectness_centers", opt.perfectness_centers);
    if (run.raw().contains("fatness_eps"))
        opt.fatness_eps = run.raw().at("fatness_eps").get<std::vector<double>>();
    opt.hardy.tol = run.raw().value("tol", 1e-6);
    opt.hardy.random_restarts = run.raw().value("restarts", opt.hardy.random_restarts);
    opt.hardy.seed = run.seed;

    MetricGrid g = grid_at(run, run.cfg.space.h);
    EquivalenceMatrix mat = gridcap::run_equivalence(g, opt);

    json conds = json::array();
    conds.push_back(condition_json(mat.hardy));
    conds.push_back(condition_json(mat.perfectness));
    conds.push_back(condition_json(mat.fatness_conformal));
    for (const auto& c : mat.fatness_subconformal) conds.push_back(condition_json(c));

    json rep = report_header(run);
    rep["seed"] = run.seed;
    rep["conditions"] = conds;
    rep["bounds"] = {{"hardy_constant", mat.bounds.hardy_constant},
                     {"perfectness_bound_log", mat.bounds.perfectness_bound_log},
                     {"sharp_thresholds", mat.bounds.sharp_thresholds},
                     {"gap_bounds", mat.bounds.gap_bounds}};
    rep["all_positive"] = mat.all_positive;
    rep["converged"] = mat.converged;
    finish(run, rep);

    std::vector<std::pair<double, double>> plot;
    for (size_t k = 0; k < mat.hardy.hs.size(); ++k)
        plot.emplace_back(mat.hardy.hs[k], mat.hardy.values[k]);
    write_plot_data(run.out / "equivalence-plot.txt", "h", "c_h_est", plot);

    std::cout << "equivalence: all_positive " << verdict(mat.all_positive) << " (";
    for (size_t k = 0; k < conds.size(); ++k)
        std::cout << (k ? ", " : "") << conds[k]["name"].get<std::string>() << " "
                  << verdict(conds[k]["positive"].get<bool>());
    std::cout << "), converged " << verdict(mat.converged) << "\n";
    return mat.converged ? 0 : 3;
}

// ---------------------------------------------------------------- dispatch

int dispatch(const std::string& name, const CliArgs& args) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(slurp(args.config_path));
    } catch (const json::exception& e) {
        std::cerr << "gridcap: malformed config: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "gridcap: malformed config: " << e.what() << "\n";
        return 1;
    }
    if (cfg.command != name) {
        std::cerr << "gridcap: config declares command \"" << cfg.command << "\" but \"" << name
                  << "\" was invoked\n";
        return 1;
    }

    Run run;
    run.cfg = std::move(cfg);
    run.out = fs::path(args.out_dir);
    run.seed = args.seed_given ? args.seed : run.raw().value("seed", uint64_t(1));
    run.workers = args.workers;

    if (name == "capacity") return run_capacity(run, args);
    if (name == "fatness") return run_fatness(run, args);
    if (name == "perfectness") return run_perfectness(run, args);
    if (name == "hardy") return run_hardy(run, args);
    if (name == "mazya") return run_mazya(run, args);
    if (name == "cover") return run_cover(run, args);
    if (name == "equivalence") return run_equivalence(run, args);
    std::cerr << "gridcap: unknown command: " << name << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"grid capacity toolkit: discrete condenser capacity, fatness, "
                 "perfectness, Hardy and Maz'ya diagnostics on metric measure grids"};
    app.require_subcommand(1);

    CliArgs args;
    const std::vector<std::string> names = {"capacity", "fatness",     "perfectness", "hardy",
                                            "mazya",    "cover",       "equivalence"};
    const std::vector<std::string> descs = {
        "variational p-capacity of a condenser over a resolution ladder",
        "capacity-density scan: uniform fatness floor estimate",
        "uniform perfectness constant of a point set or mask",
        "Hardy constant estimate by constrained energy minimization",
        "Maz'ya capacitary quotient for a compact subset",
        "ball-cover merge with cost certificates and content bounds",
        "joint verdict matrix for the four linked conditions"};

    std::vector<CLI::Option*> seed_opts, refine_opts;
    for (size_t k = 0; k < names.size(); ++k) {
        CLI::App* sub = app.add_subcommand(names[k], descs[k]);
        sub->add_option("-c,--config", args.config_path, "experiment configuration (JSON)")
            ->required();
        sub->add_option("-o,--out", args.out_dir, "output directory (default: .)");
        seed_opts.push_back(
            sub->add_option("--seed", args.seed, "override the RNG seed from the config"));
        sub->add_option("--workers", args.workers, "worker count recorded in reports")
            ->check(CLI::PositiveNumber);
        refine_opts.push_back(sub->add_option("--refinements", args.refinements,
                                              "override the resolution ladder depth")
                                  ->check(CLI::PositiveNumber));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // --help is success; any parse failure is usage
    }

    CLI::App* sub = app.get_subcommands().front();
    for (auto* o : seed_opts) args.seed_given = args.seed_given || o->count() > 0;
    for (auto* o : refine_opts) args.refinements_given = args.refinements_given || o->count() > 0;

    try {
        return dispatch(sub->get_name(), args);
    } catch (const json::exception& e) {
        std::cerr << "gridcap: malformed config: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "gridcap: invalid parameter: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "gridcap: " << e.what() << "\n";
        return 2;
    }
}
