#include "vofc/transition.hpp"

#include <cmath>
#include <string>

#include "vofc/errors.hpp"

namespace vofc {

namespace {

bool on_branch_cut(Complex s) { return s.imag() == 0.0 && s.real() <= 0.0; }

void require_finite(Complex s, const char* what) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw ParameterError(std::string(what) + ": non-finite complex argument");
}

}  // namespace

ExponentialTransition::ExponentialTransition(double alpha1, double alpha2, double rate)
    : alpha1_(alpha1), alpha2_(alpha2), rate_(rate) {
    if (!(alpha1 > 0.0 && alpha1 < 1.0))
        throw ParameterError("alpha1 must lie in (0,1), got " + std::to_string(alpha1));
    if (!(alpha2 > 0.0 && alpha2 < 1.0))
        throw ParameterError("alpha2 must lie in (0,1), got " + std::to_string(alpha2));
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw ParameterError("transition rate c must be positive, got " + std::to_string(rate));
}

double ExponentialTransition::order_at(double t) const {
    if (!std::isfinite(t) || t < 0.0)
        throw ParameterError("order_at: t must be finite and >= 0");
    return alpha2_ + (alpha1_ - alpha2_) * std::exp(-rate_ * t);
}

Complex ExponentialTransition::laplace_order(Complex s) const {
    require_finite(s, "laplace_order");
    if (s == Complex(0.0) || s == Complex(-rate_))
        throw SingularityError("laplace_order: pole of A(s) at s = 0 or s = -c");
    return (alpha2_ * rate_ + alpha1_ * s) / (s * (rate_ + s));
}

SAlphaDecomposition ExponentialTransition::s_alpha_product(Complex s) const {
    require_finite(s, "s_alpha_product");
    const Complex denom = rate_ + s;
    if (denom == Complex(0.0))
        throw SingularityError("s_alpha_product: pole of s A(s) at s = -c");
    SAlphaDecomposition d;
    d.large_s_part = (alpha2_ - alpha1_) * rate_ / denom;
    d.small_s_part = (alpha1_ - alpha2_) * s / denom;
    d.value = std::abs(s) >= rate_ ? alpha1_ + d.large_s_part : alpha2_ + d.small_s_part;
    return d;
}

Complex ExponentialTransition::s_times_laplace_order(Complex s) const {
    return s_alpha_product(s).value;
}

Complex psi_hat(const OrderTransition& tr, Complex s) {
    require_finite(s, "psi_hat");
    if (on_branch_cut(s)) throw SingularityError("psi_hat: s on the branch cut (-inf, 0]");
    return std::exp(-tr.s_times_laplace_order(s) * std::log(s));
}

Complex phi_hat(const OrderTransition& tr, Complex s) {
    require_finite(s, "phi_hat");
    if (on_branch_cut(s)) throw SingularityError("phi_hat: s on the branch cut (-inf, 0]");
    return std::exp((tr.s_times_laplace_order(s) - 1.0) * std::log(s));
}

Complex psi_hat_h(const OrderTransition& tr, double h, Complex xi) {
    if (!(h > 0.0)) throw ParameterError("psi_hat_h: step h must be positive");
    require_finite(xi, "psi_hat_h");
    if (xi.imag() == 0.0 && xi.real() >= 1.0)
        throw SingularityError("psi_hat_h: xi on the cut [1, +inf)");
    const Complex one_minus = 1.0 - xi;
    // Log((1 - xi)/h) = Log(1 - xi) - ln h exactly, since h > 0.
    const Complex log_s = std::log(one_minus) - std::log(h);
    return std::exp(-tr.s_times_laplace_order(one_minus / h) * log_s);
}

MagnitudeDecomposition magnitude_decomposition(const ExponentialTransition& tr, double h,
                                               Complex xi) {
    if (!(h > 0.0)) throw ParameterError("magnitude_decomposition: step h must be positive");
    require_finite(xi, "magnitude_decomposition");
    if (xi.imag() == 0.0 && xi.real() >= 1.0)
        throw SingularityError("magnitude_decomposition: xi on the cut [1, +inf)");

    const double a1 = tr.alpha1();
    const double a2 = tr.alpha2();
    const double ch = tr.rate() * h;
    const double x = xi.real();
    const double y = xi.imag();
    const double u = ch + (1.0 - x);
    const double den = u * u + y * y;

    MagnitudeDecomposition m;
    m.a_xy = (a1 * y * y + u * (a1 * (1.0 - x) + a2 * ch)) / den;
    m.b_xy = (a2 - a1) * ch * y / den;
    m.theta = std::arg(1.0 - xi);
    const double log_mod = 0.5 * std::log((1.0 - x) * (1.0 - x) + y * y);
    m.magnitude = std::exp(m.a_xy * (std::log(h) - log_mod) + m.theta * m.b_xy);
    return m;
}

double circle_bound(const OrderTransition& tr, double h, double r) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("circle_bound: r must lie in (0,1)");
    if (!(h > 0.0 && h < 1.0 - r))
        throw ParameterError("circle_bound: requires 0 < h < 1 - r");
    return std::abs(psi_hat_h(tr, h, Complex(r, 0.0)));
}

}  // namespace vofc
