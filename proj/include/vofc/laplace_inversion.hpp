#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vofc/transition.hpp"

namespace vofc {

enum class ContourShape { parabolic, hyperbolic };

/// Integration contour for the inverse Laplace transform.
///
/// The parabolic contour is tuned per window [t0, window_ratio * t0] with
/// t0 a power of ten, so a request spanning several decades uses one
/// contour per decade. The hyperbolic contour is tuned per time point.
struct ContourSpec {
    ContourShape shape = ContourShape::parabolic;
    int node_count = 129;  // odd, nodes symmetric about the real axis
    double t_min = 1e-6;
    double t_max = 1e6;
    double shift = 0.0;  // F is sampled at s + shift
    double window_ratio = 10.0;

    void validate() const;
};

using TransformFn = std::function<Complex(Complex)>;

/// A singularity of F the caller knows about. Simple poles that carry a
/// residue may sit outside the contour; their contribution exp(p t) * residue
/// is added explicitly. Anything without a residue must be enclosed.
struct Singularity {
    Complex location;
    std::optional<Complex> residue;
};

struct InversionResult {
    std::vector<double> values;
    std::vector<double> imag_residue;      // |Im| of each quadrature sum
    std::vector<double> doubling_change;   // empty unless requested
    std::vector<std::string> warnings;
};

/// f(t) from F(s) by the trapezoidal rule on the contour. With
/// check_doubling the sums are repeated on 2(n-1)+1 nodes and changes above
/// 1e-8 relative are reported as warnings.
InversionResult invert_detailed(const TransformFn& F, std::span<const double> ts,
                                const ContourSpec& contour = {},
                                std::span<const Singularity> singularities = {},
                                bool check_doubling = false);

std::vector<double> invert(const TransformFn& F, std::span<const double> ts,
                           const ContourSpec& contour = {},
                           std::span<const Singularity> singularities = {});

/// Time-domain kernels psi(t) and phi(t) of the Scarpi integral/derivative.
std::vector<double> kernel_psi(const OrderTransition& tr, std::span<const double> ts,
                               const ContourSpec& contour = {});
std::vector<double> kernel_phi(const OrderTransition& tr, std::span<const double> ts,
                               const ContourSpec& contour = {});

// Exposed for tests: nodes z_k and weights dz_k * step / (2 pi i) of the
// parabola tuned to the window starting at t0.
struct ContourNodes {
    std::vector<Complex> z;
    std::vector<Complex> w;
};
ContourNodes parabolic_nodes(int node_count, double t0, double window_ratio,
                             double mu_scale = 1.0);

}  // namespace vofc
