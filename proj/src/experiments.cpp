#include "vofc/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "vofc/analysis.hpp"
#include "vofc/errors.hpp"
#include "vofc/mittag_leffler.hpp"

namespace vofc {

namespace {

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
    return v;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

double state_error(std::span<const double> a, std::span<const double> b, ErrorNorm norm) {
    double m = 0.0, s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::abs(a[k] - b[k]);
        m = std::max(m, d);
        s += d * d;
    }
    return norm == ErrorNorm::max_abs ? m : std::sqrt(s);
}

std::vector<double> column(const Trajectory& t, std::size_t k) {
    std::vector<double> v(t.size());
    for (std::size_t n = 0; n < t.size(); ++n) v[n] = t.state(n)[k];
    return v;
}

io::Series series(std::string label, std::vector<double> x, std::vector<double> y, std::string color,
                  std::string dash = "") {
    return io::Series{std::move(label), std::move(x), std::move(y), std::move(color), std::move(dash)};
}

FigureResult figure1(const FigureConfig& cfg) {
    const ExponentialTransition tr(cfg.alpha1, cfg.alpha2, cfg.c);
    const auto small = logspace(-3.0, 0.0, 61);
    const auto large = logspace(0.0, 3.0, 61);
    const KernelRatios k = kernel_ratio_study(tr, small, large, cfg.contour);

    io::Table t;
    t.header = {"t", "psi_ratio", "phi_ratio", "regime"};
    for (std::size_t i = 0; i < small.size(); ++i)
        t.rows.push_back({io::format_double(small[i]), io::format_double(k.psi_small[i]),
                          io::format_double(k.phi_small[i]), "small"});
    for (std::size_t i = 0; i < large.size(); ++i)
        t.rows.push_back({io::format_double(large[i]), io::format_double(k.psi_large[i]),
                          io::format_double(k.phi_large[i]), "large"});

    FigureResult r;
    r.files.push_back({"fig1_kernel_ratios.csv", io::to_csv(t)});
    r.files.push_back({"fig1_integral_kernels.svg",
                       io::svg_line_plot({"psi VO / psi CO", "t", "ratio", true, false},
                                         {series("small t (alpha1)", small, k.psi_small, "black"),
                                          series("large t (alpha2)", large, k.psi_large, "blue", "5,3")})});
    r.files.push_back({"fig1_derivative_kernels.svg",
                       io::svg_line_plot({"phi VO / phi CO", "t", "ratio", true, false},
                                         {series("small t (alpha1)", small, k.phi_small, "black"),
                                          series("large t (alpha2)", large, k.phi_large, "blue", "5,3")})});
    r.metrics = {{"psi_ratio_t_small_end", k.psi_small.front()},
                 {"phi_ratio_t_small_end", k.phi_small.front()},
                 {"psi_ratio_t_large_end", k.psi_large.back()},
                 {"phi_ratio_t_large_end", k.phi_large.back()}};
    return r;
}

FigureResult figure2(const FigureConfig& cfg) {
    const RelaxationSpec spec{ExponentialTransition(cfg.alpha1, cfg.alpha2, cfg.c), cfg.lam, cfg.y0};
    const auto small = logspace(-3.0, 0.0, 61);
    const auto large = linspace(1.0, 50.0, 99);
    const auto ds = relaxation_difference_study(spec, small, cfg.contour);
    const auto dl = relaxation_difference_study(spec, large, cfg.contour);

    io::Table t;
    t.header = {"t", "y_vo", "y_co_alpha1", "y_co_alpha2", "vo_minus_alpha1", "vo_minus_alpha2"};
    for (const auto* d : {&ds, &dl})
        for (std::size_t i = 0; i < d->ts.size(); ++i)
            t.add_row({d->ts[i], d->vo[i], d->co1[i], d->co2[i], d->diff1[i], d->diff2[i]});

    FigureResult r;
    r.files.push_back({"fig2_relaxation_difference.csv", io::to_csv(t)});
    r.files.push_back({"fig2_small_t.svg",
                       io::svg_line_plot({"VO minus CO, small t", "t", "difference", true, false},
                                         {series("y_VO - y_alpha1", ds.ts, ds.diff1, "black"),
                                          series("y_VO - y_alpha2", ds.ts, ds.diff2, "red", "5,3")})});
    r.files.push_back({"fig2_large_t.svg",
                       io::svg_line_plot({"VO minus CO, large t", "t", "difference", false, false},
                                         {series("y_VO - y_alpha1", dl.ts, dl.diff1, "black"),
                                          series("y_VO - y_alpha2", dl.ts, dl.diff2, "red", "5,3")})});
    r.metrics = {{"abs_diff_alpha1_at_t_1e-3", std::abs(ds.diff1.front())},
                 {"abs_diff_alpha1_at_t_1", std::abs(ds.diff1.back())},
                 {"abs_diff_alpha2_at_t_50", std::abs(dl.diff2.back())}};
    return r;
}

FigureResult figure3(const FigureConfig& cfg) {
    FigureResult r;
    io::Table t;
    t.header = {"panel", "alpha1", "alpha2", "c", "lambda", "re_s", "im_s", "residual"};
    const char* colors[] = {"red", "black", "blue", "green", "purple", "orange"};
    for (std::size_t p = 0; p < cfg.panels.size(); ++p) {
        const auto& v = cfg.panels[p];
        if (v.size() != 3) throw ParameterError("fig3: each panel needs (alpha1, alpha2, c)");
        const ExponentialTransition tr(v[0], v[1], v[2]);
        const SingularityScan scan = scan_singularities(tr, cfg.lam_min, cfg.lam_max, cfg.lam_ratio);
        double worst = 0.0;
        std::vector<double> xs, ys, x0, y0;
        for (const auto& sl : scan.slices)
            for (const auto& root : sl.roots) {
                std::vector<std::string> row{std::to_string(p + 1)};
                for (double x : {v[0], v[1], v[2], sl.lam, root.s.real(), root.s.imag(), root.residual})
                    row.push_back(io::format_double(x));
                t.rows.push_back(std::move(row));
                worst = std::max(worst, root.residual);
                xs.push_back(root.s.real());
                ys.push_back(root.s.imag());
                if (&sl == &scan.slices.front()) {
                    x0.push_back(root.s.real());
                    y0.push_back(root.s.imag());
                }
            }
        std::vector<io::Series> pts;
        for (std::size_t i = 0; i < xs.size(); ++i)
            pts.push_back(series("", {xs[i], xs[i] + 1e-3}, {ys[i], ys[i]}, colors[p % 6]));
        for (std::size_t i = 0; i < x0.size(); ++i)
            pts.push_back(series("", {x0[i] - 0.02, x0[i] + 0.02}, {y0[i], y0[i]}, "red"));
        std::ostringstream title;
        title << "roots of 1 + lambda Psi(s): alpha1=" << v[0] << " alpha2=" << v[1] << " c=" << v[2];
        r.files.push_back({"fig3_panel" + std::to_string(p + 1) + ".svg",
                           io::svg_line_plot({title.str(), "Re s", "Im s"}, pts)});
        const std::string tag = "panel" + std::to_string(p + 1);
        r.metrics.emplace_back(tag + "_slices", static_cast<double>(scan.slices.size()));
        r.metrics.emplace_back(tag + "_root_points", static_cast<double>(xs.size()));
        r.metrics.emplace_back(tag + "_max_residual", worst);
        r.metrics.emplace_back(tag + "_continuous", scan.continuous ? 1.0 : 0.0);
    }
    r.files.insert(r.files.begin(), {"fig3_singularities.csv", io::to_csv(t)});
    return r;
}

// Solutions of one preset for the Table 1/2 parameter sets.
FigureResult solution_figure(int which, const FigureConfig& cfg) {
    const TableSpec spec = default_table(which == 4 ? 1 : 2);
    const double h = which == 4 ? cfg.h : std::ldexp(1.0, -10);
    FigureResult r;
    io::Table t;
    t.header = {"set", "t", "y_gl"};
    if (which == 4) t.header.push_back("y_reference");
    std::vector<io::Series> curves;
    const char* colors[] = {"black", "blue", "red"};
    for (std::size_t i = 0; i < spec.sets.size(); ++i) {
        const auto& s = spec.sets[i];
        const ExponentialTransition tr(s.alpha1, s.alpha2, s.c);
        const auto prob = preset_problem(spec.preset, tr, s.params, s.y0, spec.T);
        const Trajectory traj = solve_gl(prob, h);
        std::vector<double> ref;
        if (which == 4)
            ref = reference_relaxation({tr, s.params.at("lambda"), s.y0[0]}, traj.ts, cfg.contour);
        const auto y = column(traj, 0);
        for (std::size_t n = 0; n < traj.size(); ++n) {
            std::vector<std::string> row{std::to_string(i + 1), io::format_double(traj.ts[n]),
                                         io::format_double(y[n])};
            if (which == 4) row.push_back(io::format_double(ref[n]));
            t.rows.push_back(std::move(row));
        }
        curves.push_back(series(s.label(), traj.ts, which == 4 ? ref : y, colors[i % 3]));
    }
    const std::string stem = which == 4 ? "fig4_relaxation" : "fig5_nonlinear";
    r.files.push_back({stem + ".csv", io::to_csv(t)});
    r.files.push_back({stem + ".svg", io::svg_line_plot({stem, "t", "y(t)"}, curves)});
    return r;
}

struct Box {
    double x0, x1, y0, y1;
};

Box bounding_box(const Trajectory& t, std::size_t from) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t n = from; n < t.size(); ++n) {
        const auto s = t.state(n);
        b.x0 = std::min(b.x0, s[0]), b.x1 = std::max(b.x1, s[0]);
        b.y0 = std::min(b.y0, s[1]), b.y1 = std::max(b.y1, s[1]);
    }
    return b;
}

FigureResult figure6(const FigureConfig& cfg) {
    FigureResult r;
    struct Regime {
        const char* name;
        double mu;
        std::vector<double> y0;
        double T;
    };
    const Regime regimes[] = {{"limit_cycle", cfg.mu_cycle, cfg.y0_cycle, cfg.T_cycle},
                              {"stable", cfg.mu_stable, cfg.y0_stable, cfg.T_stable}};
    const ExponentialTransition tr(cfg.alpha1, cfg.alpha2, cfg.c);
    for (const auto& g : regimes) {
        const std::map<std::string, double> params{{"a", cfg.a}, {"mu", g.mu}};
        const auto prob = preset_problem("brusselator", tr, params, g.y0, g.T);
        const Trajectory vo = solve_gl(prob, cfg.h);
        const Trajectory co1 = solve_co_gl(cfg.alpha1, prob, cfg.h);
        const Trajectory co2 = solve_co_gl(cfg.alpha2, prob, cfg.h);

        io::Table t;
        t.header = {"t", "x_vo", "y_vo", "x_co_alpha1", "y_co_alpha1", "x_co_alpha2", "y_co_alpha2"};
        for (std::size_t n = 0; n < vo.size(); ++n)
            t.add_row({vo.ts[n], vo.state(n)[0], vo.state(n)[1], co1.state(n)[0], co1.state(n)[1],
                       co2.state(n)[0], co2.state(n)[1]});
        const std::string stem = std::string("fig6_") + g.name;
        r.files.push_back({stem + ".csv", io::to_csv(t)});

        // The limit-cycle panel shows only the last part of the trajectories.
        const std::size_t from = std::string(g.name) == "limit_cycle" ? vo.size() * 3 / 4 : 0;
        auto tail = [from](const Trajectory& tj, std::size_t k) {
            auto c = column(tj, k);
            return std::vector<double>(c.begin() + static_cast<std::ptrdiff_t>(from), c.end());
        };
        r.files.push_back(
            {stem + ".svg",
             io::svg_line_plot({std::string("Brusselator phase plane: ") + g.name, "x", "y"},
                               {series("VO", tail(vo, 0), tail(vo, 1), "black"),
                                series("CO alpha1", tail(co1, 0), tail(co1, 1), "blue", "6,3"),
                                series("CO alpha2", tail(co2, 0), tail(co2, 1), "red", "8,3,2,3")})});

        if (std::string(g.name) == "limit_cycle") {
            const Box b = bounding_box(co2, from), v = bounding_box(vo, from);
            const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
            const double hx = 0.625 * (b.x1 - b.x0), hy = 0.625 * (b.y1 - b.y0);
            const bool inside = v.x0 >= cx - hx && v.x1 <= cx + hx && v.y0 >= cy - hy && v.y1 <= cy + hy;
            r.metrics.emplace_back("vo_loop_inside_inflated_alpha2_box", inside ? 1.0 : 0.0);
            r.metrics.emplace_back("vo_loop_x_span", v.x1 - v.x0);
            r.metrics.emplace_back("alpha2_loop_x_span", b.x1 - b.x0);
        }
    }
    return r;
}

}  // namespace

std::string TableSet::label() const {
    std::ostringstream os;
    os << "a1=" << alpha1 << " a2=" << alpha2 << " c=" << c;
    for (const auto& [k, v] : params) os << ' ' << k << '=' << v;
    return os.str();
}

TableSpec default_table(int which) {
    TableSpec s;
    switch (which) {
        case 1:
            s.name = "table1";
            s.preset = "relaxation";
            s.T = 4.0;
            s.h_exponents = {2, 3, 4, 5, 6, 7};
            s.sets = {{0.6, 0.8, 2.0, {{"lambda", 1.0}}, {1.0}},
                      {0.5, 0.9, 1.0, {{"lambda", 2.0}}, {1.0}},
                      {0.9, 0.6, 1.0, {{"lambda", 0.5}}, {1.0}}};
            break;
        case 2:
            s.name = "table2";
            s.preset = "nonlinear13y2";
            s.T = 2.0;
            s.h_exponents = {2, 3, 4, 5, 6, 7};
            s.ref_exponent = 10;
            s.sets = {{0.6, 0.8, 2.0, {}, {0.84}},
                      {0.5, 0.9, 1.0, {}, {0.84}},
                      {0.9, 0.6, 1.0, {}, {0.84}}};
            break;
        case 3:
            s.name = "table3";
            s.preset = "brusselator";
            s.T = 16.0;
            s.h_exponents = {4, 5, 6, 7, 8};
            s.ref_exponent = 10;
            s.norm = ErrorNorm::euclidean;
            s.sets = {{0.6, 0.8, 2.0, {{"a", 1.0}, {"mu", 4.0}}, {0.9, 2.1}},
                      {0.6, 0.8, 2.0, {{"a", 1.0}, {"mu", 2.0}}, {0.9, 2.1}},
                      {0.8, 0.6, 2.0, {{"a", 1.0}, {"mu", 4.0}}, {0.9, 2.1}},
                      {0.8, 0.6, 2.0, {{"a", 1.0}, {"mu", 2.0}}, {0.9, 2.1}}};
            break;
        default:
            throw ParameterError("unknown table " + std::to_string(which));
    }
    return s;
}

TableResult run_table(const TableSpec& spec, const StepSolverOptions& sopts, const WeightOptions& wopts,
                      const ContourSpec& contour) {
    const auto start = std::chrono::steady_clock::now();
    TableResult res;
    res.spec = spec;
    for (int k : spec.h_exponents) res.hs.push_back(std::ldexp(1.0, -k));

    for (const auto& set : spec.sets) {
        const ExponentialTransition tr(set.alpha1, set.alpha2, set.c);
        const auto prob = preset_problem(spec.preset, tr, set.params, set.y0, spec.T);
        TableColumn col;
        col.set = set;
        if (spec.ref_exponent) {
            const Trajectory ref = solve_gl(prob, std::ldexp(1.0, -*spec.ref_exponent), sopts, wopts);
            const auto fs = ref.final_state();
            col.reference.assign(fs.begin(), fs.end());
        } else {
            if (spec.preset != "relaxation")
                throw ParameterError("table: Laplace-inversion reference needs the relaxation preset");
            const double t = spec.T;
            col.reference = reference_relaxation({tr, set.params.at("lambda"), set.y0.at(0)},
                                                 std::span<const double>(&t, 1), contour);
        }
        col.errors.resize(res.hs.size());
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < res.hs.size(); ++i) {
            try {
                const Trajectory tj = solve_gl(prob, res.hs[i], sopts, wopts);
                col.errors[i] = state_error(tj.final_state(), col.reference, spec.norm);
            } catch (...) {
#pragma omp critical(vofc_table_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        col.eocs.assign(res.hs.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 1; i < res.hs.size(); ++i) col.eocs[i] = eoc(col.errors[i - 1], col.errors[i]);
        res.columns.push_back(std::move(col));
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

io::Table table_layout(const TableResult& result) {
    io::Table t;
    t.header.push_back("h");
    for (std::size_t c = 0; c < result.columns.size(); ++c) {
        t.header.push_back("error_set" + std::to_string(c + 1));
        t.header.push_back("eoc_set" + std::to_string(c + 1));
    }
    for (std::size_t i = 0; i < result.hs.size(); ++i) {
        std::vector<std::string> row{io::format_double(result.hs[i])};
        for (const auto& col : result.columns) {
            row.push_back(io::format_double(col.errors[i]));
            row.push_back(i == 0 ? "" : io::format_double(col.eocs[i]));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

FigureResult run_figure(int which, const FigureConfig& cfg) {
    switch (which) {
        case 1: return figure1(cfg);
        case 2: return figure2(cfg);
        case 3: return figure3(cfg);
        case 4:
        case 5: return solution_figure(which, cfg);
        case 6: return figure6(cfg);
        default: throw ParameterError("unknown figure " + std::to_string(which));
    }
}

}  // namespace vofc
