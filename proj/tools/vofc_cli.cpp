// vofc: solve, table, figure, weights, singularities.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 invalid
// configuration, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "vofc/analysis.hpp"
#include "vofc/errors.hpp"
#include "vofc/experiments.hpp"
#include "vofc/io.hpp"
#include "vofc/solver.hpp"
#include "vofc/weights.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Defaults < config file < flags. Keys are snake_case; the matching flag
// replaces '_' by '-'.
class Settings {
public:
    explicit Settings(CLI::App* app) : app_(app) {}

    template <class T>
    void add(const std::string& key, T fallback, const std::string& help) {
        values_[key] = fallback;
        auto store = std::make_shared<T>(fallback);
        std::string flag = "--" + key;
        for (auto& ch : flag)
            if (ch == '_') ch = '-';
        CLI::Option* opt = nullptr;
        if constexpr (std::is_same_v<T, bool>)
            opt = app_->add_flag(flag, *store, help);
        else
            opt = app_->add_option(flag, *store, help);
        writers_.push_back([opt, store, key](json& j) {
            if (opt->count()) j[key] = *store;
        });
    }

    json resolve(const std::string& section, const std::string& config_path) const {
        json eff = values_;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot read config file " + config_path);
            json file;
            try {
                file = json::parse(is);
            } catch (const json::parse_error& e) {
                throw vofc::ParameterError(std::string("config: ") + e.what());
            }
            if (!file.is_object()) throw vofc::ParameterError("config: top level must be an object");
            if (file.contains(section) && file[section].is_object()) file = file[section];
            for (auto it = file.begin(); it != file.end(); ++it) {
                if (!eff.contains(it.key()))
                    throw vofc::ParameterError("config: unknown key '" + it.key() + "' for " + section);
                eff[it.key()] = it.value();
            }
        }
        for (const auto& w : writers_) w(eff);
        return eff;
    }

private:
    CLI::App* app_;
    json values_ = json::object();
    std::vector<std::function<void(json&)>> writers_;
};

template <class T>
T get(const json& cfg, const std::string& key) {
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw vofc::ParameterError("config: bad value for '" + key + "': " + e.what());
    }
}

struct Common {
    std::string config;
    std::string out = "out";
};

void add_common(CLI::App* app, Common& c) {
    app->set_help_flag("--help", "print this help and exit");
    app->add_option("--config", c.config, "JSON config file (flags override it)");
    app->add_option("--out", c.out, "output directory")->capture_default_str();
}

void echo_config(const fs::path& dir, const std::string& command, const json& cfg) {
    json doc{{"command", command}, {"config", cfg}};
    vofc::io::write_text_atomic(dir / "effective_config.json", doc.dump(2) + "\n");
}

void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    vofc::io::write_text_atomic(dir / name, content);
    std::cout << "wrote " << (dir / name).string() << "\n";
}

vofc::WeightOptions weight_options(const json& cfg) {
    vofc::WeightOptions w;
    w.tau = get<double>(cfg, "tau");
    w.safety = get<double>(cfg, "safety");
    w.validate();
    return w;
}

vofc::ContourSpec contour_options(const json& cfg) {
    vofc::ContourSpec c;
    c.node_count = get<int>(cfg, "nodes");
    const auto shape = get<std::string>(cfg, "contour");
    if (shape == "parabolic")
        c.shape = vofc::ContourShape::parabolic;
    else if (shape == "hyperbolic")
        c.shape = vofc::ContourShape::hyperbolic;
    else
        throw vofc::ParameterError("contour must be 'parabolic' or 'hyperbolic'");
    c.validate();
    return c;
}

void add_weight_flags(Settings& s) {
    s.add("tau", 1e-13, "weight tolerance");
    s.add("safety", 0.1, "round-off safety factor F_s");
}

void add_contour_flags(Settings& s) {
    s.add("nodes", 129, "contour node count (odd)");
    s.add<std::string>("contour", "parabolic", "parabolic or hyperbolic");
}

void add_transition_flags(Settings& s) {
    s.add("a1", 0.6, "initial order alpha1");
    s.add("a2", 0.8, "final order alpha2");
    s.add("c", 2.0, "transition rate");
}

vofc::ExponentialTransition transition(const json& cfg) {
    return {get<double>(cfg, "a1"), get<double>(cfg, "a2"), get<double>(cfg, "c")};
}

int parse_index(const std::string& s, const std::string& prefix, int hi) {
    std::string digits = s.rfind(prefix, 0) == 0 ? s.substr(prefix.size()) : s;
    int v = 0;
    try {
        std::size_t used = 0;
        v = std::stoi(digits, &used);
        if (used != digits.size()) v = 0;
    } catch (const std::exception&) {
        v = 0;
    }
    if (v < 1 || v > hi) throw vofc::ParameterError("unknown " + prefix + " '" + s + "'");
    return v;
}

// --- solve -----------------------------------------------------------------

int run_solve(const Common& common, const json& cfg) {
    const auto tr = transition(cfg);
    const auto preset = get<std::string>(cfg, "preset");
    std::vector<double> y0 = get<std::vector<double>>(cfg, "y0");
    if (y0.empty()) {
        if (preset == "brusselator")
            y0 = {0.9, 2.1};
        else
            y0 = {1.0};
    }
    const std::map<std::string, double> params{
        {"lambda", get<double>(cfg, "lambda")}, {"a", get<double>(cfg, "a")}, {"mu", get<double>(cfg, "mu")}};
    const auto problem = vofc::preset_problem(preset, tr, params, y0, get<double>(cfg, "T"));
    vofc::StepSolverOptions sopts;
    sopts.tol = get<double>(cfg, "tol");
    sopts.max_iter = get<int>(cfg, "max_iter");
    sopts.validate();

    const double h = get<double>(cfg, "h");
    const vofc::Trajectory traj = vofc::solve_gl(problem, h, sopts, weight_options(cfg));

    const fs::path dir = common.out;
    echo_config(dir, "solve", cfg);
    const auto stem = get<std::string>(cfg, "name");
    write_file(dir, stem + ".csv", vofc::io::to_csv(vofc::io::trajectory_table(traj)));
    if (get<bool>(cfg, "svg")) {
        std::vector<vofc::io::Series> curves;
        const char* colors[] = {"black", "blue", "red", "green"};
        for (std::size_t k = 0; k < traj.dim; ++k) {
            vofc::io::Series s;
            s.label = "y" + std::to_string(k + 1);
            s.x = traj.ts;
            for (std::size_t n = 0; n < traj.size(); ++n) s.y.push_back(traj.state(n)[k]);
            s.color = colors[k % 4];
            curves.push_back(std::move(s));
        }
        write_file(dir, stem + ".svg", vofc::io::svg_line_plot({preset, "t", "y(t)"}, curves));
    }
    json meta{{"h", traj.meta.h},
              {"steps", traj.size() - 1},
              {"weights_checksum", traj.meta.weights_checksum},
              {"weights_plan", traj.meta.weights_plan},
              {"max_residual", traj.meta.max_residual},
              {"solver_tol", sopts.tol},
              {"solver_max_iter", sopts.max_iter}};
    write_file(dir, stem + "_meta.json", meta.dump(2) + "\n");
    return 0;
}

// --- table -----------------------------------------------------------------

int run_table_cmd(const Common& common, const std::string& which_name, const json& cfg) {
    const int which = parse_index(which_name, "table", 3);
    vofc::TableSpec spec = vofc::default_table(which);
    if (const auto y0 = get<std::vector<double>>(cfg, "y0"); !y0.empty())
        for (auto& s : spec.sets) s.y0 = y0;
    if (const auto hs = get<std::vector<int>>(cfg, "h_exponents"); !hs.empty()) spec.h_exponents = hs;
    if (const int ref = get<int>(cfg, "ref_exponent"); ref > 0) {
        if (!spec.ref_exponent) throw vofc::ParameterError("table1 uses the Laplace-inversion reference");
        spec.ref_exponent = ref;
    }
    if (const auto norm = get<std::string>(cfg, "norm"); !norm.empty()) {
        if (norm == "max")
            spec.norm = vofc::ErrorNorm::max_abs;
        else if (norm == "l2")
            spec.norm = vofc::ErrorNorm::euclidean;
        else
            throw vofc::ParameterError("norm must be 'max' or 'l2'");
    }
    vofc::StepSolverOptions sopts;
    sopts.tol = get<double>(cfg, "tol");
    sopts.validate();

    const auto res = vofc::run_table(spec, sopts, weight_options(cfg), contour_options(cfg));
    const fs::path dir = common.out;
    echo_config(dir, "table " + spec.name, cfg);
    const auto layout = vofc::table_layout(res);
    write_file(dir, spec.name + ".csv", vofc::io::to_csv(layout));

    json sets = json::array();
    for (const auto& col : res.columns)
        sets.push_back({{"label", col.set.label()}, {"y0", col.set.y0}, {"reference_final_state", col.reference}});
    json meta{{"table", spec.name},
              {"preset", spec.preset},
              {"T", spec.T},
              {"norm", spec.norm == vofc::ErrorNorm::max_abs ? "max" : "l2"},
              {"reference", spec.ref_exponent
                                ? "GL self-reference at h=2^-" + std::to_string(*spec.ref_exponent) +
                                      " (assumed identical to the nonlinear-equation setting)"
                                : "Laplace-transform inversion"},
              {"sets", sets},
              {"seconds", res.seconds}};
    write_file(dir, spec.name + "_meta.json", meta.dump(2) + "\n");

    std::cout << vofc::io::to_csv(layout);
    std::printf("runtime %.2f s\n", res.seconds);
    return 0;
}

// --- figure ----------------------------------------------------------------

int run_figure_cmd(const Common& common, const std::string& which_name, const json& cfg) {
    const int which = parse_index(which_name, "fig", 6);
    vofc::FigureConfig fc;
    fc.alpha1 = get<double>(cfg, "a1");
    fc.alpha2 = get<double>(cfg, "a2");
    fc.c = get<double>(cfg, "c");
    fc.lam = get<double>(cfg, "lambda");
    fc.y0 = get<double>(cfg, "y0");
    fc.h = get<double>(cfg, "h");
    fc.a = get<double>(cfg, "a");
    fc.mu_cycle = get<double>(cfg, "mu_cycle");
    fc.mu_stable = get<double>(cfg, "mu_stable");
    fc.y0_cycle = get<std::vector<double>>(cfg, "y0_cycle");
    fc.y0_stable = get<std::vector<double>>(cfg, "y0_stable");
    fc.T_cycle = get<double>(cfg, "t_cycle");
    fc.T_stable = get<double>(cfg, "t_stable");
    fc.panels = get<std::vector<std::vector<double>>>(cfg, "panels");
    fc.lam_min = get<double>(cfg, "lam_min");
    fc.lam_max = get<double>(cfg, "lam_max");
    fc.lam_ratio = get<double>(cfg, "lam_ratio");
    fc.contour = contour_options(cfg);

    const auto res = vofc::run_figure(which, fc);
    const fs::path dir = common.out;
    echo_config(dir, "figure fig" + std::to_string(which), cfg);
    for (const auto& a : res.files) write_file(dir, a.file, a.content);
    if (!res.metrics.empty()) {
        json m = json::object();
        for (const auto& [k, v] : res.metrics) {
            m[k] = v;
            std::cout << k << " = " << vofc::io::format_double(v) << "\n";
        }
        write_file(dir, "fig" + std::to_string(which) + "_metrics.json", m.dump(2) + "\n");
    }
    return 0;
}

// --- weights ---------------------------------------------------------------

fs::path cache_dir(const Common& common, const json& cfg) {
    if (auto d = get<std::string>(cfg, "cache_dir"); !d.empty()) return d;
    if (const char* env = std::getenv("VOFC_CACHE_DIR"); env && *env) return env;
    return fs::path(common.out) / "cache";
}

std::string hex(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int run_weights(const Common& common, const json& cfg) {
    const auto tr = transition(cfg);
    const double h = get<double>(cfg, "h");
    const auto N = get<std::size_t>(cfg, "N");
    const auto wopts = weight_options(cfg);
    if (!(h > 0.0)) throw vofc::ParameterError("weights: h must be > 0");

    const fs::path cdir = cache_dir(common, cfg);
    const fs::path file = cdir / vofc::cache_file_name(tr, h, N, wopts.tau);
    std::vector<double> omegas;
    std::optional<vofc::WeightTable> table;
    if (fs::exists(file)) {
        const auto stored = vofc::read_weights(file);
        if (stored.N != N || stored.h != h || stored.tau != wopts.tau || stored.alpha1 != tr.alpha1() ||
            stored.alpha2 != tr.alpha2() || stored.c != tr.rate())
            throw vofc::ParameterError("weights: cache file " + file.string() + " does not match the request");
        omegas = stored.omegas;
        std::cout << "cache hit " << file.string() << " checksum " << hex(vofc::fnv1a(omegas)) << "\n";
    } else {
        try {
            table = vofc::compute_weights(tr, h, N, wopts);
        } catch (const vofc::InfeasiblePlan& e) {
            std::cerr << "infeasible weight plan: " << e.what() << "\n"
                      << "suggestions: raise --tau, lower --N or raise --h\n";
            throw;
        }
        fs::create_directories(cdir);
        vofc::write_weights(file, *table);
        omegas = table->omegas;
        std::cout << "cache miss, wrote " << file.string() << " checksum " << hex(table->checksum()) << "\n";
        std::cout << table->plan.summary() << "\n";
        std::cout << "certified max bound " << vofc::io::format_double(*std::max_element(
                                                   table->error_bound.begin(), table->error_bound.end()))
                  << "\n";
    }

    const fs::path dir = common.out;
    echo_config(dir, "weights", cfg);
    vofc::io::Table t;
    t.header = {"n", "omega"};
    std::vector<double> oracle;
    if (tr.is_constant_order()) {
        t.header.push_back("co_oracle");
        oracle = vofc::co_weights(tr.alpha1(), N);
        const double scale = std::pow(h, tr.alpha1());
        double worst = 0.0;
        for (std::size_t n = 0; n <= N; ++n) {
            oracle[n] *= scale;
            worst = std::max(worst, std::abs(omegas[n] - oracle[n]));
        }
        std::cout << "constant order: max |omega - h^alpha w_co| = " << vofc::io::format_double(worst) << "\n";
    }
    if (table) t.header.push_back("error_bound");
    for (std::size_t n = 0; n <= N; ++n) {
        std::vector<double> row{static_cast<double>(n), omegas[n]};
        if (!oracle.empty()) row.push_back(oracle[n]);
        if (table) row.push_back(table->error_bound[n]);
        t.add_row(row);
    }
    write_file(dir, "weights.csv", vofc::io::to_csv(t));
    return 0;
}

// --- singularities ---------------------------------------------------------

int run_singularities(const Common& common, const json& cfg) {
    const auto tr = transition(cfg);
    vofc::SearchBox box;
    box.re_min = get<double>(cfg, "re_min");
    box.re_max = get<double>(cfg, "re_max");
    box.im_min = get<double>(cfg, "im_min");
    box.im_max = get<double>(cfg, "im_max");
    const double lam = get<double>(cfg, "lambda");

    vofc::io::Table t;
    t.header = {"lambda", "re", "im", "residual"};
    auto add = [&t](double l, const std::vector<vofc::Root>& roots) {
        for (const auto& r : roots) t.add_row({l, r.s.real(), r.s.imag(), r.residual});
    };
    json meta;
    if (lam > 0.0) {
        const auto roots = vofc::find_singularities(tr, lam, box);
        add(lam, roots);
        meta = {{"lambda", lam}, {"roots", roots.size()}};
        std::cout << roots.size() << " roots at lambda " << lam << "\n";
    } else {
        const auto scan = vofc::scan_singularities(tr, get<double>(cfg, "lam_min"), get<double>(cfg, "lam_max"),
                                                   get<double>(cfg, "lam_ratio"), box);
        for (const auto& s : scan.slices) add(s.lam, s.roots);
        meta = {{"slices", scan.slices.size()}, {"continuous", scan.continuous}, {"notes", scan.notes}};
        std::cout << scan.slices.size() << " lambda slices, continuous=" << (scan.continuous ? "yes" : "no")
                  << "\n";
        for (const auto& n : scan.notes) std::cout << "note: " << n << "\n";
    }
    const fs::path dir = common.out;
    echo_config(dir, "singularities", cfg);
    write_file(dir, "singularities.csv", vofc::io::to_csv(t));
    write_file(dir, "singularities_meta.json", meta.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-order fractional calculus toolkit"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    Common common;
    std::string which;

    auto* solve = app.add_subcommand("solve", "integrate a preset problem with the GL scheme");
    add_common(solve, common);
    Settings solve_s(solve);
    solve_s.add<std::string>("preset", "relaxation", "relaxation | nonlinear13y2 | brusselator");
    add_transition_flags(solve_s);
    solve_s.add("lambda", 1.0, "relaxation rate");
    solve_s.add("a", 1.0, "Brusselator a");
    solve_s.add("mu", 4.0, "Brusselator mu");
    solve_s.add("y0", std::vector<double>{}, "initial state");
    solve_s.add("h", 0.015625, "step size");
    solve_s.add("T", 4.0, "final time");
    solve_s.add("tol", 1e-12, "nonlinear residual tolerance");
    solve_s.add("max_iter", 50, "Newton iterations per attempt");
    solve_s.add<std::string>("name", "trajectory", "output file stem");
    solve_s.add("svg", false, "also write an SVG plot");
    add_weight_flags(solve_s);

    auto* table = app.add_subcommand("table", "error/EOC ladder: table1 | table2 | table3");
    add_common(table, common);
    table->add_option("which", which, "table1, table2 or table3")->required();
    Settings table_s(table);
    table_s.add("y0", std::vector<double>{}, "initial state for every set");
    table_s.add("h_exponents", std::vector<int>{}, "h = 2^-k ladder");
    table_s.add("ref_exponent", 0, "reference step 2^-k");
    table_s.add<std::string>("norm", "", "max or l2");
    table_s.add("tol", 1e-12, "nonlinear residual tolerance");
    add_weight_flags(table_s);
    add_contour_flags(table_s);

    auto* figure = app.add_subcommand("figure", "figure data and plots: fig1 .. fig6");
    add_common(figure, common);
    figure->add_option("which", which, "fig1 .. fig6")->required();
    Settings figure_s(figure);
    const vofc::FigureConfig fd;
    add_transition_flags(figure_s);
    figure_s.add("lambda", fd.lam, "relaxation rate");
    figure_s.add("y0", fd.y0, "relaxation initial value");
    figure_s.add("h", fd.h, "step size");
    figure_s.add("a", fd.a, "Brusselator a");
    figure_s.add("mu_cycle", fd.mu_cycle, "Brusselator mu, limit-cycle regime");
    figure_s.add("mu_stable", fd.mu_stable, "Brusselator mu, stable regime");
    figure_s.add("y0_cycle", fd.y0_cycle, "initial state, limit-cycle regime");
    figure_s.add("y0_stable", fd.y0_stable, "initial state, stable regime");
    figure_s.add("t_cycle", fd.T_cycle, "final time, limit-cycle regime");
    figure_s.add("t_stable", fd.T_stable, "final time, stable regime");
    figure_s.add("panels", fd.panels, "fig3 panels as [alpha1, alpha2, c] triples");
    figure_s.add("lam_min", fd.lam_min, "fig3 lambda range start");
    figure_s.add("lam_max", fd.lam_max, "fig3 lambda range end");
    figure_s.add("lam_ratio", fd.lam_ratio, "fig3 largest lambda ratio");
    add_contour_flags(figure_s);

    auto* weights = app.add_subcommand("weights", "plan, compute and cache GL weights");
    add_common(weights, common);
    Settings weights_s(weights);
    add_transition_flags(weights_s);
    weights_s.add("h", 0.015625, "step size");
    weights_s.add("N", std::size_t{4096}, "highest weight index");
    weights_s.add<std::string>("cache_dir", "", "cache directory (default $VOFC_CACHE_DIR)");
    add_weight_flags(weights_s);

    auto* sing = app.add_subcommand("singularities", "roots of 1 + lambda Psi(s)");
    add_common(sing, common);
    Settings sing_s(sing);
    add_transition_flags(sing_s);
    sing_s.add("lambda", 0.0, "single lambda; 0 scans [lam_min, lam_max]");
    sing_s.add("lam_min", 0.01, "scan start");
    sing_s.add("lam_max", 5.0, "scan end");
    sing_s.add("lam_ratio", 1.2, "largest consecutive lambda ratio");
    const vofc::SearchBox bd;
    sing_s.add("re_min", bd.re_min, "search box");
    sing_s.add("re_max", bd.re_max, "search box");
    sing_s.add("im_min", bd.im_min, "search box");
    sing_s.add("im_max", bd.im_max, "search box");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (solve->parsed()) return run_solve(common, solve_s.resolve("solve", common.config));
        if (table->parsed()) return run_table_cmd(common, which, table_s.resolve("table", common.config));
        if (figure->parsed()) return run_figure_cmd(common, which, figure_s.resolve("figure", common.config));
        if (weights->parsed()) return run_weights(common, weights_s.resolve("weights", common.config));
        if (sing->parsed()) return run_singularities(common, sing_s.resolve("singularities", common.config));
    } catch (const vofc::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vofc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
