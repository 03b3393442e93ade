#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "vofc/errors.hpp"
#include "vofc/laplace_inversion.hpp"

using namespace vofc;

TEST_SUITE("laplace_inversion") {

TEST_CASE("elementary transforms") {
    const auto ts = linspace(0.1, 10.0, 40);
    const auto one = invert([](Complex s) { return 1.0 / s; }, ts);
    const auto ramp = invert([](Complex s) { return 1.0 / (s * s); }, ts);
    const auto dec = invert([](Complex s) { return 1.0 / (s + 2.0); }, ts);
    const auto pw = invert([](Complex s) { return std::pow(s, -0.7); }, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        CHECK(std::abs(one[i] - 1.0) < 1e-9);
        CHECK(std::abs(ramp[i] - t) < 1e-9 * t);
        CHECK(std::abs(dec[i] - std::exp(-2 * t)) < 1e-9);
        const double want = std::pow(t, -0.3) / std::tgamma(0.7);
        CHECK(std::abs(pw[i] - want) < 1e-9 * want);
    }
}

TEST_CASE("doubling check reports small changes") {
    const auto ts = linspace(0.1, 10.0, 20);
    const auto r = invert_detailed([](Complex s) { return std::pow(s, -0.3); }, ts, {}, {}, true);
    REQUIRE(r.doubling_change.size() == ts.size());
    for (double d : r.doubling_change) CHECK(d < 1e-8);
    CHECK(r.warnings.empty());
    for (double im : r.imag_residue) CHECK(im < 1e-8);
}

TEST_CASE("pole outside the contour is added through its residue") {
    const auto ts = linspace(0.5, 5.0, 10);
    const Singularity pole{Complex(0.5), Complex(1.0)};
    const auto r = invert([](Complex s) { return 1.0 / (s - 0.5); }, ts, {},
                          std::span<const Singularity>(&pole, 1));
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(rel_err(r[i], std::exp(0.5 * ts[i])) < 1e-9);
}

TEST_CASE("unenclosed singularity without residue is rejected") {
    const std::vector<double> ts{1.0};
    const Singularity sing{Complex(3.0, 0.0), std::nullopt};
    CHECK_THROWS_AS(invert([](Complex s) { return 1.0 / (s - 3.0); }, ts, {},
                           std::span<const Singularity>(&sing, 1)),
                    ContourError);
    const Singularity cut{Complex(-4.0, 0.0), std::nullopt};
    CHECK_NOTHROW(invert([](Complex s) { return 1.0 / s; }, ts, {},
                         std::span<const Singularity>(&cut, 1)));
}

TEST_CASE("contour validation") {
    const std::vector<double> ts{1.0};
    auto F = [](Complex s) { return 1.0 / s; };
    ContourSpec even;
    even.node_count = 128;
    CHECK_THROWS_AS(invert(F, ts, even), ParameterError);
    ContourSpec ok;
    CHECK_THROWS_AS(invert(F, std::vector<double>{0.0}, ok), ParameterError);
    CHECK_THROWS_AS(invert(F, std::vector<double>{1e7}, ok), ParameterError);
}

TEST_CASE("hyperbolic contour agrees") {
    ContourSpec hyp;
    hyp.shape = ContourShape::hyperbolic;
    hyp.node_count = 41;
    const auto ts = linspace(0.2, 8.0, 12);
    const auto r = invert([](Complex s) { return 1.0 / (s + 1.0); }, ts, hyp);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(r[i] - std::exp(-ts[i])) < 1e-9);
}

TEST_CASE("time-domain kernels") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    const std::vector<double> ts{0.1, 1.0, 5.0};
    const auto psi = kernel_psi(tr, ts);
    const auto phi = kernel_phi(tr, ts);
    const double psi_ref[] = {1.4630418901845086345, 0.75077324636186892041, 0.61436562810416153207};
    const double phi_ref[] = {2.1452168464261329674, 0.28344063484691238524, 0.053128553580464718544};
    for (int i = 0; i < 3; ++i) {
        CHECK(rel_err(psi[i], psi_ref[i]) < 1e-9);
        CHECK(rel_err(phi[i], phi_ref[i]) < 1e-9);
    }
    const ExponentialTransition co(0.4, 0.4, 1.0);
    const auto pco = kernel_psi(co, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
        CHECK(rel_err(pco[i], std::pow(ts[i], -0.6) / std::tgamma(0.4)) < 1e-9);
}

}
