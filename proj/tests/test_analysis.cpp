#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "support.hpp"
#include "vofc/analysis.hpp"
#include "vofc/mittag_leffler.hpp"

using namespace vofc;

TEST_SUITE("analysis") {

TEST_CASE("relaxation transform") {
    const RelaxationSpec spec{ExponentialTransition(0.6, 0.8, 2.0), 1.0, 1.0};
    CHECK(std::abs(transform_H(spec, Complex(1.0)) - 0.5) < 1e-15);

    const RelaxationSpec co{ExponentialTransition(0.7, 0.7, 1.0), 2.0, 1.0};
    for (Complex s : {Complex(0.5, 1.0), Complex(3.0, -2.0)}) {
        const Complex want = std::pow(s, 0.7 - 1.0) / (std::pow(s, 0.7) + 2.0);
        CHECK(std::abs(transform_H(co, s) - want) < 1e-14 * std::abs(want));
    }
}

TEST_CASE("denominator derivative") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    for (Complex s : {Complex(0.7, 0.4), Complex(-0.5, 2.0), Complex(3.0, -1.0)}) {
        const double d = 1e-6;
        const Complex fd = (relaxation_denominator(tr, 1.5, s + d) - relaxation_denominator(tr, 1.5, s - d)) / (2 * d);
        CHECK(std::abs(relaxation_denominator_derivative(tr, 1.5, s) - fd) < 1e-8 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("constant order kernels") {
    CHECK(rel_err(co_kernel_psi(0.4, 2.0), std::pow(2.0, -0.6) / std::tgamma(0.4)) < 1e-15);
    CHECK(rel_err(co_kernel_phi(0.4, 2.0), std::pow(2.0, -0.4) / std::tgamma(0.6)) < 1e-15);
}

TEST_CASE("reference relaxation") {
    const RelaxationSpec spec{ExponentialTransition(0.6, 0.8, 2.0), 1.0, 1.0};
    const std::vector<double> ts{0.0, 1e-3, 1.0, 50.0};
    const auto y = reference_relaxation(spec, ts);
    CHECK(y[0] == 1.0);
    CHECK(rel_err(y[1], 0.982521165327612854) < 1e-8);
    CHECK(rel_err(y[2], 0.42120130032693772532) < 1e-8);
    CHECK(rel_err(y[3], 0.0099395080914544660944) < 1e-8);

    struct Row { double a1, a2, c, lam, want; };
    const Row rows[] = {{0.6, 0.8, 2.0, 1.0, 0.11219152944468151534},
                        {0.5, 0.9, 1.0, 2.0, 0.011579296841272853506},
                        {0.9, 0.6, 1.0, 0.5, 0.34137463275608713011}};
    const std::vector<double> t4{4.0};
    for (const auto& r : rows) {
        const RelaxationSpec s{ExponentialTransition(r.a1, r.a2, r.c), r.lam, 1.0};
        CHECK(rel_err(reference_relaxation(s, t4)[0], r.want) < 1e-9);
    }
}

TEST_CASE("equal orders reduce to the Mittag-Leffler relaxation") {
    const RelaxationSpec spec{ExponentialTransition(0.6, 0.6, 3.0), 1.0, 2.0};
    const auto ts = linspace(0.1, 10.0, 25);
    const auto vo = reference_relaxation(spec, ts);
    const auto co = relaxation_co(0.6, 1.0, 2.0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(vo[i] - co[i]) < 1e-8);
}

TEST_CASE("roots of the denominator") {
    for (auto [a1, a2, c] : std::vector<std::array<double, 3>>{{0.6, 0.8, 2.0}, {0.9, 0.6, 1.0}}) {
        const ExponentialTransition tr(a1, a2, c);
        for (double lam : {0.05, 1.0, 4.0}) {
            const auto roots = find_singularities(tr, lam);
            for (const auto& r : roots) {
                CHECK(r.residual < 1e-10);
                CHECK(std::abs(relaxation_denominator(tr, lam, r.s)) < 1e-10);
                const bool has_conj = std::any_of(roots.begin(), roots.end(), [&](const Root& q) {
                    return std::abs(q.s - std::conj(r.s)) < 1e-8 * std::max(1.0, std::abs(r.s));
                });
                CHECK(has_conj);
            }
            for (std::size_t i = 1; i < roots.size(); ++i)
                CHECK(roots[i - 1].s.imag() <= roots[i].s.imag());
        }
    }
}

TEST_CASE("singularity scan") {
    const ExponentialTransition tr(0.9, 0.6, 1.0);
    const auto scan = scan_singularities(tr, 0.1, 2.0, 1.2);
    CHECK(scan.continuous);
    REQUIRE(scan.slices.size() >= 2);
    CHECK(scan.slices.front().lam == doctest::Approx(0.1));
    CHECK(scan.slices.back().lam == doctest::Approx(2.0));
    for (std::size_t i = 1; i < scan.slices.size(); ++i)
        CHECK(scan.slices[i].lam / scan.slices[i - 1].lam <= 1.2 * (1 + 1e-12));
}

TEST_CASE("kernel ratio study") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    const std::vector<double> small{1e-4, 1e-3}, large{30.0, 50.0};
    const auto k = kernel_ratio_study(tr, small, large);
    for (double v : k.psi_small) CHECK(std::abs(v - 1.0) < 0.02);
    for (double v : k.psi_large) CHECK(std::abs(v - 1.0) < 0.02);
}

}
