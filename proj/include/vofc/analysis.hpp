#pragma once

#include <span>
#include <string>
#include <vector>

#include "vofc/laplace_inversion.hpp"
#include "vofc/transition.hpp"

namespace vofc {

struct RelaxationSpec {
    ExponentialTransition tr;
    double lam = 1.0;
    double y0 = 1.0;

    void validate() const;
};

/// H(s) = (1/s) (1 + lam s^{-s A(s)})^{-1}.
Complex transform_H(const RelaxationSpec& spec, Complex s);

/// g(s) = 1 + lam Psi(s) and its derivative in s.
Complex relaxation_denominator(const ExponentialTransition& tr, double lam, Complex s);
Complex relaxation_denominator_derivative(const ExponentialTransition& tr, double lam, Complex s);

struct SearchBox {
    double re_min = -3.0, re_max = 2.0;
    double im_min = -6.0, im_max = 6.0;
    int nx = 40, ny = 40;
};

struct Root {
    Complex s;
    double residual;  // |g(s)|
};

/// Roots of g in (and near) the box by Newton's method from a seed grid
/// plus any extra seeds; deduplicated, certified |g| < 1e-10, closed
/// under conjugation and sorted by (Im, Re).
std::vector<Root> find_singularities(const ExponentialTransition& tr, double lam,
                                     const SearchBox& box = {},
                                     std::span<const Complex> extra_seeds = {});

struct LambdaSlice {
    double lam;
    std::vector<Root> roots;
};

struct SingularityScan {
    SearchBox box;
    std::vector<LambdaSlice> slices;
    bool continuous = true;
    std::vector<std::string> notes;
};

/// Sweeps lam geometrically over [lam_min, lam_max] with consecutive ratio
/// at most max_ratio, seeding each slice with the previous roots. Steps
/// whose roots cannot be matched to their predecessors are bisected.
SingularityScan scan_singularities(const ExponentialTransition& tr, double lam_min = 0.01,
                                   double lam_max = 5.0, double max_ratio = 1.2,
                                   const SearchBox& box = {});

/// Poles of H (with residues) and its branch points, as needed by invert.
std::vector<Singularity> relaxation_singularities(const RelaxationSpec& spec);

/// y*(t) = y0 L^{-1}[H](t); t = 0 gives y0.
std::vector<double> reference_relaxation(const RelaxationSpec& spec, std::span<const double> ts,
                                         const ContourSpec& contour = {});

struct KernelRatios {
    std::vector<double> t_small, psi_small, phi_small;  // VO / CO(alpha1)
    std::vector<double> t_large, psi_large, phi_large;  // VO / CO(alpha2)
};

KernelRatios kernel_ratio_study(const ExponentialTransition& tr, std::span<const double> t_small,
                                std::span<const double> t_large, const ContourSpec& contour = {});

struct RelaxationDifference {
    std::vector<double> ts, vo, co1, co2;
    std::vector<double> diff1, diff2;  // vo - co1, vo - co2
};

RelaxationDifference relaxation_difference_study(const RelaxationSpec& spec,
                                                 std::span<const double> ts,
                                                 const ContourSpec& contour = {});

/// Constant-order kernels t^{a-1}/Gamma(a) and t^{-a}/Gamma(1-a).
double co_kernel_psi(double alpha, double t);
double co_kernel_phi(double alpha, double t);

}  // namespace vofc
