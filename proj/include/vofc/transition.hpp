#pragma once

#include <complex>

namespace vofc {

using Complex = std::complex<double>;

/// An order transition t -> alpha(t) together with its Laplace transform A(s).
///
/// Scarpi-type kernels only need s*A(s), so implementers expose that product
/// directly; it is usually better conditioned than forming A(s) and then
/// multiplying by s.
class OrderTransition {
public:
    virtual ~OrderTransition() = default;

    virtual double order_at(double t) const = 0;
    virtual Complex laplace_order(Complex s) const = 0;
    virtual Complex s_times_laplace_order(Complex s) const = 0;

    // Limits of alpha(t) at t -> 0+ and t -> infinity.
    virtual double initial_order() const = 0;
    virtual double final_order() const = 0;
};

/// s*A(s) for the exponential transition in both decomposed forms:
/// value = alpha1 + large_s_part = alpha2 + small_s_part.
struct SAlphaDecomposition {
    Complex value;
    Complex large_s_part;  // (alpha2 - alpha1) c / (c + s), vanishes as |s| -> inf
    Complex small_s_part;  // (alpha1 - alpha2) s / (c + s), vanishes as s -> 0
};

/// alpha(t) = alpha2 + (alpha1 - alpha2) exp(-c t).
class ExponentialTransition final : public OrderTransition {
public:
    ExponentialTransition(double alpha1, double alpha2, double rate);

    double alpha1() const noexcept { return alpha1_; }
    double alpha2() const noexcept { return alpha2_; }
    double rate() const noexcept { return rate_; }
    bool is_constant_order() const noexcept { return alpha1_ == alpha2_; }

    double order_at(double t) const override;

    // A(s) = (alpha2 c + alpha1 s) / (s (c + s)); throws at s = 0 and s = -c.
    Complex laplace_order(Complex s) const override;

    // s A(s); finite at s = 0, throws at s = -c. Switches between the two
    // decomposed forms at |s| = c.
    Complex s_times_laplace_order(Complex s) const override;
    SAlphaDecomposition s_alpha_product(Complex s) const;

    double initial_order() const override { return alpha1_; }
    double final_order() const override { return alpha2_; }

    bool operator==(const ExponentialTransition&) const = default;

private:
    double alpha1_;
    double alpha2_;
    double rate_;
};

/// Psi(s) = s^{-s A(s)}, principal branch; throws on the cut (-inf, 0].
Complex psi_hat(const OrderTransition& tr, Complex s);

/// Phi(s) = s^{s A(s) - 1}, principal branch; throws on the cut (-inf, 0].
Complex phi_hat(const OrderTransition& tr, Complex s);

/// Psi((1 - xi) / h), the generating function of the GL weights.
/// Throws for real xi >= 1 (image of the branch cut).
Complex psi_hat_h(const OrderTransition& tr, double h, Complex xi);

/// Real/imaginary split of the exponent of Psi((1 - xi)/h), so that
/// |Psi^[h](xi)| = exp(a_xy (ln h - ln|1 - xi|) + theta * b_xy).
struct MagnitudeDecomposition {
    double a_xy;
    double b_xy;
    double theta;  // arg(1 - xi)
    double magnitude;
};

MagnitudeDecomposition magnitude_decomposition(const ExponentialTransition& tr, double h,
                                               Complex xi);

/// |Psi^[h](r)|, which bounds |Psi^[h]| on every circle |z| = rho <= r.
/// Requires 0 < r < 1 and 0 < h < 1 - r.
double circle_bound(const OrderTransition& tr, double h, double r);

}  // namespace vofc
