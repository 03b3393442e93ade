#pragma once

#include <span>
#include <vector>

#include "vofc/laplace_inversion.hpp"

namespace vofc {

/// E_beta(z) = sum_k z^k / Gamma(beta k + 1) for real |z| <= 5.
///
/// For small beta the terms peak at enormous magnitudes before they decay;
/// the sum is then carried in 50, 100 or 200 digit arithmetic. Throws
/// NumericalError when even 200 digits cannot deliver `tol`.
double ml_series(double beta, double z, double tol = 1e-14);

/// y0 * E_alpha(-lam t^alpha), by inverting s^{alpha-1} / (s^alpha + lam).
std::vector<double> relaxation_co(double alpha, double lam, double y0, std::span<const double> ts,
                                  const ContourSpec& contour = {});

}  // namespace vofc
