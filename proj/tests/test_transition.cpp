#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "vofc/errors.hpp"
#include "vofc/transition.hpp"

using namespace vofc;

TEST_SUITE("transition") {

TEST_CASE("order transition endpoints and range") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    CHECK(tr.order_at(0.0) == 0.6);
    for (double t : {20.0, 50.0, 1e3}) CHECK(std::abs(tr.order_at(t) - 0.8) < 1e-12);
    for (double t = 0.0; t < 30.0; t += 0.37) {
        const double a = tr.order_at(t);
        CHECK(a >= 0.6);
        CHECK(a <= 0.8);
    }
    const ExponentialTransition co(0.5, 0.5, 1.0);
    for (double t : {0.0, 0.3, 7.0}) CHECK(co.order_at(t) == 0.5);
}

TEST_CASE("constructor and argument validation") {
    CHECK_THROWS_AS(ExponentialTransition(1.5, 0.8, 2.0), ParameterError);
    CHECK_THROWS_AS(ExponentialTransition(0.6, 0.0, 2.0), ParameterError);
    CHECK_THROWS_AS(ExponentialTransition(0.6, 0.8, 0.0), ParameterError);
    CHECK_THROWS_AS(ExponentialTransition(0.6, 0.8, NAN), ParameterError);
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    CHECK_THROWS_AS(tr.order_at(-1.0), ParameterError);
    CHECK_THROWS_AS(tr.laplace_order(Complex(0.0)), SingularityError);
    CHECK_THROWS_AS(tr.laplace_order(Complex(-2.0)), SingularityError);
    CHECK_THROWS_AS(tr.s_times_laplace_order(Complex(-2.0)), SingularityError);
    CHECK_THROWS(psi_hat(tr, Complex(-1.0, 0.0)));
}

TEST_CASE("laplace transform of the order") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    CHECK(std::abs(tr.laplace_order(Complex(1.0)) - Complex(2.2 / 3.0)) < 1e-15);
    const ExponentialTransition co(0.4, 0.4, 3.0);
    for (Complex s : {Complex(1.0, 2.0), Complex(0.1, -0.5), Complex(-1.0, 1.0)})
        CHECK(std::abs(co.laplace_order(s) - 0.4 / s) < 1e-15 * std::abs(0.4 / s));
    // quadrature of int_0^inf e^{-st} alpha(t) dt at s = 1+i
    const ExponentialTransition q(0.5, 0.9, 1.0);
    const Complex want(0.29, -0.37);
    CHECK(std::abs(q.laplace_order(Complex(1.0, 1.0)) - want) < 1e-14);
}

TEST_CASE("s A(s) decomposition and limits") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    CHECK(std::abs(tr.s_times_laplace_order(Complex(2.0)) - 0.7) < 1e-15);
    CHECK(std::abs(tr.s_times_laplace_order(Complex(0.0)) - 0.8) == 0.0);
    CHECK(std::abs(tr.s_times_laplace_order(Complex(2e9)) - 0.6) < 1e-8);
    for (Complex s : {Complex(0.3, 0.1), Complex(5.0, -7.0), Complex(-1.0, 3.0)}) {
        const auto d = tr.s_alpha_product(s);
        CHECK(std::abs(d.value - (0.6 + d.large_s_part)) < 1e-15);
        CHECK(std::abs(d.value - (0.8 + d.small_s_part)) < 1e-15);
        CHECK(std::abs(d.value - s * tr.laplace_order(s)) < 1e-14);
    }
}

TEST_CASE("kernel transforms") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    const Complex s(2.0, 3.0);
    CHECK(std::abs(psi_hat(tr, s) * phi_hat(tr, s) - 1.0 / s) < 1e-14 * std::abs(1.0 / s));
    CHECK(std::abs(psi_hat(tr, Complex(1.0)) - 1.0) == 0.0);
    const ExponentialTransition co(0.35, 0.35, 1.0);
    CHECK(std::abs(psi_hat(co, s) - std::pow(s, -0.35)) < 1e-14 * std::abs(std::pow(s, -0.35)));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(1e-3, 20.0), im(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const Complex z(re(rng), im(rng));
        CHECK(std::abs(psi_hat(tr, z) * phi_hat(tr, z) - 1.0 / z) < 1e-13 * std::abs(1.0 / z));
    }
}

TEST_CASE("generating function of the weights") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    const double h = 0.1;
    const double c = 2.0;
    const double expo = (0.8 * c * h + 0.6) / (c * h + 1.0);
    CHECK(rel_err(psi_hat_h(tr, h, Complex(0.0)).real(), std::pow(h, expo)) < 1e-14);

    const ExponentialTransition co(0.45, 0.45, 1.0);
    const Complex want = std::pow(h, 0.45) * std::pow(0.7, -0.45);
    CHECK(std::abs(psi_hat_h(co, h, Complex(0.3)) - want) < 1e-14 * std::abs(want));

    const double h4 = 1.0 / 16;
    const Complex xi(0.0, 0.5);
    CHECK(std::abs(psi_hat_h(tr, h4, xi) - psi_hat(tr, (1.0 - xi) / h4)) < 1e-15);
    CHECK_THROWS(psi_hat_h(tr, h4, Complex(1.0)));
}

TEST_CASE("magnitude decomposition") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    const double h = 1.0 / 32;
    const auto d0 = magnitude_decomposition(tr, h, Complex(0.4));
    CHECK(d0.b_xy == 0.0);
    CHECK(rel_err(d0.magnitude, std::abs(psi_hat_h(tr, h, Complex(0.4)))) < 1e-14);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double r = std::sqrt(u(rng)) * 0.999, th = 2 * M_PI * u(rng);
        const Complex xi = std::polar(r, th);
        const auto d = magnitude_decomposition(tr, h, xi);
        CHECK(rel_err(d.magnitude, std::abs(psi_hat_h(tr, h, xi))) < 1e-13);
    }
    const ExponentialTransition co(0.5, 0.5, 1.0);
    const auto dc = magnitude_decomposition(co, h, Complex(0.3, 0.4));
    CHECK(std::abs(dc.a_xy - 0.5) < 1e-15);
    CHECK(std::abs(dc.b_xy) < 1e-15);
}

TEST_CASE("circle bound") {
    const ExponentialTransition tr(0.6, 0.8, 2.0);
    const double h = 1.0 / 64, r = 0.9;
    const double M = circle_bound(tr, h, r);
    CHECK(M == std::abs(psi_hat_h(tr, h, Complex(r))));
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k)
        worst = std::max(worst, std::abs(psi_hat_h(tr, h, std::polar(r, 2 * M_PI * k / 10000.0))));
    CHECK(worst <= M);
    CHECK(circle_bound(tr, h, 0.5) <= M);

    const ExponentialTransition co(0.5, 0.5, 1.0);
    CHECK(rel_err(circle_bound(co, h, r), std::sqrt(h) / std::sqrt(1.0 - r)) < 1e-14);
    CHECK_THROWS_AS(circle_bound(tr, 0.2, 0.9), ParameterError);
}

}
