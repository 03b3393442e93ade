#include "vofc/mittag_leffler.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "vofc/errors.hpp"

namespace vofc {

namespace {

struct SeriesShape {
    double log_peak;   // log of the largest |term|
    long last_index;   // first k past the peak whose term is negligible
};

SeriesShape series_shape(double beta, double z, double tol) {
    SeriesShape s{0.0, 0};
    if (z == 0.0) return s;
    const double lz = std::log(std::abs(z));
    const double cutoff = std::log(tol) - 5.0;
    for (long k = 1;; ++k) {
        const double lt = k * lz - std::lgamma(beta * k + 1.0);
        s.log_peak = std::max(s.log_peak, lt);
        // Past the peak the terms decay faster than geometrically.
        const double next = (k + 1) * lz - std::lgamma(beta * (k + 1) + 1.0);
        if (next < lt && lt < cutoff) {
            s.last_index = k;
            return s;
        }
        if (k > 100000000) throw NumericalError("ml_series: series does not terminate");
    }
}

template <class Real>
double sum_series(double beta, double z, long last) {
    using std::exp;
    using std::log;
    const Real lz = log(Real(std::abs(z)));
    Real acc = 1;
    for (long k = 1; k <= last; ++k) {
        Real lt = Real(k) * lz - boost::math::lgamma(Real(beta) * k + 1);
        Real term = exp(lt);
        if (z < 0 && (k & 1)) term = -term;
        acc += term;
    }
    return static_cast<double>(acc);
}

double sum_series_long_double(double beta, double z, long last) {
    // Neumaier compensated summation; terms stay modest on this path.
    long double sum = 1.0L, comp = 0.0L, term = 1.0L;
    for (long k = 1; k <= last; ++k) {
        if (beta == 1.0) {
            term *= static_cast<long double>(z) / k;
        } else {
            term = std::exp(k * std::log(std::abs(static_cast<long double>(z))) -
                            std::lgamma(static_cast<long double>(beta) * k + 1.0L));
            if (z < 0 && (k & 1)) term = -term;
        }
        const long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return static_cast<double>(sum + comp);
}

}  // namespace

double ml_series(double beta, double z, double tol) {
    if (!(beta > 0.0 && beta <= 1.0)) throw ParameterError("ml_series: beta must lie in (0,1]");
    if (!std::isfinite(z)) throw ParameterError("ml_series: z must be finite");
    if (std::abs(z) > 5.0) throw ParameterError("ml_series: |z| > 5 is outside the series range");
    if (!(tol >= 1e-14)) throw ParameterError("ml_series: tol must be >= 1e-14");
    if (z == 0.0) return 1.0;

    const SeriesShape shape = series_shape(beta, z, tol);
    const double peak = std::exp(shape.log_peak);
    // Cancellation loses about log10(peak) digits of the working precision.
    if (peak < 1e2 || z > 0.0) return sum_series_long_double(beta, z, shape.last_index);
    if (peak < 1e33)
        return sum_series<boost::multiprecision::cpp_bin_float_50>(beta, z, shape.last_index);
    if (peak < 1e83)
        return sum_series<boost::multiprecision::cpp_bin_float_100>(beta, z, shape.last_index);
    if (peak < 1e183)
        return sum_series<boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>>(
            beta, z, shape.last_index);
    throw NumericalError("ml_series: cancellation too severe for beta=" + std::to_string(beta) +
                         " at this z; use relaxation_co");
}

std::vector<double> relaxation_co(double alpha, double lam, double y0, std::span<const double> ts,
                                  const ContourSpec& contour) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("relaxation_co: alpha must lie in (0,1]");
    if (!(lam > 0.0) || !std::isfinite(lam)) throw ParameterError("relaxation_co: lambda must be > 0");
    for (double t : ts)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("relaxation_co: t must be >= 0");

    std::vector<double> positive;
    for (double t : ts)
        if (t > 0.0) positive.push_back(t);

    const auto F = [alpha, lam](Complex s) {
        if (alpha == 1.0) return 1.0 / (s + lam);
        const Complex sa = std::exp(alpha * std::log(s));
        return sa / (s * (sa + lam));
    };
    std::vector<double> inv = invert(F, positive, contour);

    std::vector<double> out(ts.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i] == 0.0 ? y0 : y0 * inv[j++];
    return out;
}

}  // namespace vofc
