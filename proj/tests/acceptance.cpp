// One line per criterion: "PASS criterion N: ..." or "FAIL criterion N: ...".
// Usage: vofc_acceptance [N]; without N every criterion runs.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "vofc/analysis.hpp"
#include "vofc/experiments.hpp"
#include "vofc/laplace_inversion.hpp"
#include "vofc/solver.hpp"
#include "vofc/weights.hpp"

using namespace vofc;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Target ladders: rows are step sizes, columns are parameter sets.
struct Target {
    std::vector<std::vector<double>> err;
    std::vector<std::vector<double>> eoc;  // NaN in the first row
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const Target kTable1{
    {{9.96e-3, 1.02e-2, 3.71e-3}, {4.97e-3, 5.14e-3, 1.67e-3}, {2.48e-3, 2.59e-3, 7.89e-4},
     {1.24e-3, 1.30e-3, 3.82e-4}, {6.18e-4, 6.50e-4, 1.88e-4}, {3.09e-4, 3.25e-4, 9.31e-5}},
    {{kNaN, kNaN, kNaN}, {1.004, 0.981, 1.146}, {1.003, 0.991, 1.085},
     {1.002, 0.995, 1.046}, {1.001, 0.998, 1.024}, {1.000, 0.999, 1.012}}};

const Target kTable2{
    {{3.06e-3, 3.40e-3, 2.74e-4}, {1.54e-3, 1.75e-3, 2.36e-4}, {7.66e-4, 8.87e-4, 1.36e-4},
     {3.78e-4, 4.41e-4, 7.04e-5}, {1.83e-4, 2.15e-4, 3.48e-5}, {8.56e-5, 1.01e-4, 1.64e-5}},
    {{kNaN, kNaN, kNaN}, {0.994, 0.955, 0.217}, {1.005, 0.982, 0.794},
     {1.019, 1.006, 0.948}, {1.044, 1.037, 1.018}, {1.098, 1.094, 1.088}}};

const Target kTable3{
    {{4.65e-3, 7.62e-4, 5.74e-4, 1.73e-5}, {4.51e-3, 4.03e-4, 2.84e-4, 8.59e-6},
     {2.96e-3, 2.03e-4, 1.37e-4, 4.17e-6}, {1.32e-3, 9.63e-5, 6.41e-5, 1.95e-6},
     {5.55e-4, 4.16e-5, 2.75e-5, 8.35e-7}},
    {{kNaN, kNaN, kNaN, kNaN}, {0.043, 0.918, 1.016, 1.013}, {0.609, 0.994, 1.046, 1.044},
     {1.166, 1.073, 1.099, 1.098}, {1.249, 1.209, 1.222, 1.222}}};

// Compares a computed ladder against its target. `wide` lists
// (row, column, tolerance) entries whose EOC tolerance differs.
Verdict compare_table(int which, const Target& pub, double err_tol, double eoc_tol,
                      std::vector<std::array<double, 3>> wide, double time_limit) {
    const auto res = run_table(default_table(which));
    int bad = 0;
    double worst_err = 0.0, worst_eoc = 0.0;
    std::ostringstream misses;
    for (std::size_t j = 0; j < res.columns.size(); ++j) {
        const auto& col = res.columns[j];
        for (std::size_t i = 0; i < res.hs.size(); ++i) {
            const double rel = std::abs(col.errors[i] - pub.err[i][j]) / pub.err[i][j];
            worst_err = std::max(worst_err, rel);
            if (rel > err_tol) {
                ++bad;
                misses << fmt(" [set%zu h=2^-%d err %.3e vs %.3e]", j + 1,
                              res.spec.h_exponents[i], col.errors[i], pub.err[i][j]);
            }
            if (i == 0) continue;
            double tol = eoc_tol;
            for (const auto& w : wide)
                if (w[0] == double(i) && w[1] == double(j)) tol = w[2];
            const double d = std::abs(col.eocs[i] - pub.eoc[i][j]);
            worst_eoc = std::max(worst_eoc, d);
            if (d > tol) {
                ++bad;
                misses << fmt(" [set%zu h=2^-%d eoc %.3f vs %.3f]", j + 1,
                              res.spec.h_exponents[i], col.eocs[i], pub.eoc[i][j]);
            }
        }
    }
    const bool fast = res.seconds < time_limit;
    std::string detail = fmt("table%d: %d mismatches, worst rel err %.3g (tol %.2g), worst |dEOC| %.3f "
                             "(tol %.2f), runtime %.1fs (limit %.0fs)",
                             which, bad, worst_err, err_tol, worst_eoc, eoc_tol, res.seconds, time_limit);
    return {bad == 0 && fast, detail + misses.str()};
}

Verdict criterion1() { return compare_table(1, kTable1, 0.05, 0.02, {}, 30.0); }

Verdict criterion2() { return compare_table(2, kTable2, 0.10, 0.05, {{1, 2, 0.1}}, 120.0); }

Verdict criterion3() { return compare_table(3, kTable3, 0.20, 0.10, {{1, 0, 0.15}}, 600.0); }

Verdict criterion4() {
    double worst = 0.0;
    int plans = 0;
    for (double a : {0.3, 0.5, 0.9})
        for (int k : {2, 6})
            for (std::size_t N : {std::size_t{64}, std::size_t{4096}}) {
                const ExponentialTransition tr(a, a, 1.0);
                const double h = std::ldexp(1.0, -k);
                const auto t = compute_weights(tr, h, N);
                const auto w = co_weights(a, N);
                const double ha = std::pow(h, a);
                for (std::size_t n = 0; n <= N; ++n)
                    worst = std::max(worst, std::abs(t.omegas[n] - ha * w[n]));
                ++plans;
            }
    return {worst < 1e-12, fmt("%d plans, max |omega - h^a w| = %.3g (tol 1e-12)", plans, worst)};
}

Verdict criterion5() {
    const std::array<std::array<double, 3>, 4> trs{{{0.3, 0.3, 1.0}, {0.5, 0.5, 1.0}, {0.9, 0.9, 1.0}, {0.6, 0.8, 2.0}}};
    double worst = 0.0;
    std::size_t violations = 0;
    int plans = 0;
    for (const auto& p : trs)
        for (int k : {2, 6})
            for (std::size_t N : {std::size_t{64}, std::size_t{4096}}) {
                const ExponentialTransition tr(p[0], p[1], p[2]);
                const auto t = compute_weights(tr, std::ldexp(1.0, -k), N);
                auto plan4 = t.plan;
                plan4.L *= 4;
                const auto t4 = compute_weights_with_plan(tr, plan4);
                for (std::size_t n = 0; n <= N; ++n) {
                    const double d = std::abs(t.omegas[n] - t4.omegas[n]);
                    worst = std::max(worst, d / t.error_bound[n]);
                    if (d > t.error_bound[n]) ++violations;
                }
                ++plans;
            }
    return {violations == 0,
            fmt("%d plans, %zu violations, max |w(L) - w(4L)| / bound = %.3g", plans, violations, worst)};
}

// int_0^t psi(tau) phi(t - tau) dtau, split at t/2 with the endpoint
// singularities removed by tau = (t/2) u^{1/a1} and t - tau = (t/2) v^{1/(1-a1)}.
double sonine(const ExponentialTransition& tr, double t, const ContourSpec& cs) {
    using G = boost::math::quadrature::gauss<double, 60>;
    const double p = 1.0 / tr.alpha1(), q = 1.0 / (1.0 - tr.alpha1()), half = t / 2;
    std::vector<double> u, wu;
    const auto x = G::abscissa();
    const auto w = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i)
        for (int s : {-1, 1}) {
            u.push_back(0.5 * (1 + s * x[i]));
            wu.push_back(0.5 * w[i]);
        }
    std::vector<double> a1, b1, a2, b2;
    for (double v : u) {
        const double tau = half * std::pow(v, p);
        a1.push_back(tau);
        b1.push_back(t - tau);
        const double r = half * std::pow(v, q);
        a2.push_back(t - r);
        b2.push_back(r);
    }
    const auto ps1 = kernel_psi(tr, a1, cs), ph1 = kernel_phi(tr, b1, cs);
    const auto ps2 = kernel_psi(tr, a2, cs), ph2 = kernel_phi(tr, b2, cs);
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        sum += wu[k] * half * p * std::pow(u[k], p - 1) * ps1[k] * ph1[k];
        sum += wu[k] * half * q * std::pow(u[k], q - 1) * ps2[k] * ph2[k];
    }
    return sum;
}

Verdict criterion6() {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    ContourSpec cs;
    cs.t_min = 1e-14;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = 0.1 + (5.0 - 0.1) * i / 19.0;
        worst = std::max(worst, std::abs(sonine(tr, t, cs) - 1.0));
    }
    return {worst < 1e-6, fmt("20 points on [0.1,5], max |psi*phi - 1| = %.3g (tol 1e-6)", worst)};
}

Verdict criterion7() {
    struct Case {
        const char* name;
        TransformFn F;
        std::function<double(double)> f;
    };
    const std::vector<Case> cases{
        {"1/s", [](Complex s) { return 1.0 / s; }, [](double) { return 1.0; }},
        {"1/(s+2)", [](Complex s) { return 1.0 / (s + 2.0); }, [](double t) { return std::exp(-2 * t); }},
        {"1/s^2", [](Complex s) { return 1.0 / (s * s); }, [](double t) { return t; }},
        {"s^-0.7", [](Complex s) { return std::pow(s, -0.7); },
         [](double t) { return std::pow(t, -0.3) / std::tgamma(0.7); }},
        {"s^-0.3", [](Complex s) { return std::pow(s, -0.3); },
         [](double t) { return std::pow(t, -0.7) / std::tgamma(0.3); }},
    };
    std::vector<double> ts;
    for (int i = 0; i < 100; ++i) ts.push_back(0.1 * std::pow(100.0, i / 99.0));
    double worst = 0.0, worst_doubling = 0.0;
    std::string worst_name;
    for (const auto& c : cases) {
        const auto r = invert_detailed(c.F, ts, {}, {}, true);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double want = c.f(ts[i]);
            const double e = std::abs(r.values[i] - want) / std::max(1.0, std::abs(want));
            if (e > worst) {
                worst = e;
                worst_name = c.name;
            }
            worst_doubling = std::max(worst_doubling, r.doubling_change[i]);
        }
    }
    return {worst < 1e-9 && worst_doubling < 1e-8,
            fmt("5 transforms x 100 points on [0.1,10]: max error %.3g (%s, tol 1e-9), "
                "max doubling change %.3g (tol 1e-8)",
                worst, worst_name.c_str(), worst_doubling)};
}

Verdict criterion8() {
    const FigureConfig cfg;
    const RelaxationSpec spec{ExponentialTransition(cfg.alpha1, cfg.alpha2, cfg.c), cfg.lam, cfg.y0};
    const std::vector<double> ts{1e-3, 50.0};
    const auto d = relaxation_difference_study(spec, ts);
    const double small = std::abs(d.diff1[0]), large = std::abs(d.diff2[1]);
    const double tol = 1e-2 * cfg.y0;
    return {small < tol && large < tol,
            fmt("|y_VO - E_a1| at t=1e-3: %.3g, |y_VO - E_a2| at t=50: %.3g (tol %.3g)", small, large, tol)};
}

Verdict criterion9() {
    const FigureConfig cfg;
    bool ok = true;
    std::size_t slices = 0, roots = 0;
    double worst = 0.0;
    std::string notes;
    for (const auto& p : cfg.panels) {
        const ExponentialTransition tr(p[0], p[1], p[2]);
        const auto scan = scan_singularities(tr, 0.01, 5.0, cfg.lam_ratio);
        ok = ok && scan.continuous;
        if (!scan.continuous) notes += fmt(" [discontinuous (%.1f,%.1f,%.0f)]", p[0], p[1], p[2]);
        for (const auto& sl : scan.slices) {
            ++slices;
            for (const auto& r : sl.roots) {
                ++roots;
                const double g = std::abs(relaxation_denominator(tr, sl.lam, r.s));
                worst = std::max(worst, g);
                const bool pair = std::any_of(sl.roots.begin(), sl.roots.end(), [&](const Root& q) {
                    return std::abs(q.s - std::conj(r.s)) <= 1e-8 * std::max(1.0, std::abs(r.s));
                });
                if (!pair) {
                    ok = false;
                    notes += fmt(" [unpaired root %.6g%+.6gi at lambda %.4g]", r.s.real(), r.s.imag(), sl.lam);
                }
            }
        }
    }
    ok = ok && worst < 1e-10;
    return {ok, fmt("%zu panels, %zu slices, %zu roots, max |1 + lambda Psi| = %.3g (tol 1e-10), all "
                    "conjugate-paired and continuous: %s",
                    cfg.panels.size(), slices, roots, worst, ok ? "yes" : "no") +
                    notes};
}

Verdict criterion10() {
    const auto p = preset_problem("relaxation", ExponentialTransition(0.6, 0.6, 2.0), {{"lambda", 1.0}}, {1.0}, 4.0);
    const double h = 1.0 / 64;
    const auto vo = solve_gl(p, h);
    const auto co = solve_co_gl(0.6, p, h);
    double worst = 0.0;
    for (std::size_t n = 0; n < vo.ys.size(); ++n) worst = std::max(worst, std::abs(vo.ys[n] - co.ys[n]));
    return {worst < 1e-10 && vo.size() == 257,
            fmt("%zu nodes, max |y_VO - y_CO| = %.3g (tol 1e-10)", vo.size(), worst)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::array<std::function<Verdict()>, 10> criteria{criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8,
                                                            criterion9, criterion10};
    std::vector<int> which;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 10) {
            std::fprintf(stderr, "usage: vofc_acceptance [1-10]\n");
            return 2;
        }
        which.push_back(n);
    } else {
        for (int n = 1; n <= 10; ++n) which.push_back(n);
    }
    int failed = 0;
    for (int n : which) {
        Verdict v;
        try {
            v = criteria[n - 1]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", n, v.detail.c_str());
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed ? 1 : 0;
}
