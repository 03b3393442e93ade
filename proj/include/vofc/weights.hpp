#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vofc/transition.hpp"

namespace vofc {

struct WeightOptions {
    double tau = 1e-13;
    double safety = 0.1;                   // F_s
    double eps = 2.220446049250313e-16;    // unit roundoff model
    double r_default = 0.99;
    std::size_t m_samples = 4096;          // circle samples for M
    std::size_t max_nodes = std::size_t{1} << 26;

    void validate() const;
};

struct WeightPlan {
    double h = 0.0;
    std::size_t N = 0;
    double tau = 0.0;
    double safety = 0.0;
    double r = 0.0;
    double rho = 0.0;
    std::size_t L = 0;
    double eps = 0.0;
    double M_r = 0.0;         // |Psi^[h](r)|
    double M_estimate = 0.0;  // sampled max of |Psi^[h]| on |xi| = r
    // h < 1 - r: the real point r is provably the maximizer on the circle.
    bool lemma_applicable = false;
    // false when no r admits rho < r with eps M rho^-N <= F_s tau; the
    // plan then minimizes M r^-N instead and reports the expected round-off.
    bool roundoff_target_met = true;
    double roundoff_estimate = 0.0;  // eps * M * rho^-N

    double discretization_bound(std::size_t n) const;
    // eps M rho^-n, the floating-point part of the error in weight n.
    double roundoff_bound(std::size_t n) const;
    std::string summary() const;
};

struct WeightTable {
    ExponentialTransition tr;
    WeightPlan plan;
    std::vector<double> omegas;       // omega_0 .. omega_N
    std::vector<double> error_bound;  // discretization plus round-off bound per index
    double max_imag = 0.0;            // largest |Im| discarded

    std::uint64_t checksum() const;
};

/// rho = exp(-(1/N) log(F_s tau / (M_r eps))). May return rho >= 1.
double select_radius(std::size_t N, double tau, double safety, double M_r, double eps);

struct MEstimate {
    double sampled;       // max over the sampled points
    double circle_bound;  // |Psi^[h](r)|
};

/// Max of |Psi^[h]| over |xi| = r by dense sampling. With strip_rows > 0 the
/// strip {Im z >= -log(r/rho)} of the map xi = rho e^{iz} is sampled as well
/// (rows between the circles rho and r), as a verification of the circle
/// reduction.
MEstimate estimate_M(const OrderTransition& tr, double h, double r, double rho,
                     std::size_t samples, std::size_t strip_rows = 0);

/// Smallest power of two >= max(N+1, (log(M rho^-N + tau) - log tau)/(log r - log rho)).
std::size_t select_node_count(double M, double rho, double r, double tau, std::size_t N,
                              std::size_t max_nodes = std::size_t{1} << 26);

/// M rho^-n / ((r/rho)^L - 1).
double error_bound(double M, double rho, double r, std::size_t L, std::size_t n);

WeightPlan plan_weights(const ExponentialTransition& tr, double h, std::size_t N,
                        const WeightOptions& opts = {});

WeightTable compute_weights(const ExponentialTransition& tr, double h, std::size_t N,
                            const WeightOptions& opts = {});

/// Runs the Fourier pass for a given plan (used to refine L in tests).
WeightTable compute_weights_with_plan(const ExponentialTransition& tr, const WeightPlan& plan);

/// Serial reference of the sampling step; same result bit for bit.
WeightTable serial_compute_weights_with_plan(const ExponentialTransition& tr,
                                             const WeightPlan& plan);

/// Process-wide memoized compute_weights.
std::shared_ptr<const WeightTable> cached_weights(const ExponentialTransition& tr, double h,
                                                  std::size_t N, const WeightOptions& opts = {});

/// Coefficients of (1 - xi)^{-alpha}: w_0 = 1, w_j = w_{j-1} (j - 1 + alpha) / j.
std::vector<double> co_weights(double alpha, std::size_t N);

/// FNV-1a over the little-endian bytes of the values.
std::uint64_t fnv1a(std::span<const double> values);

// Binary table: alpha1, alpha2, c, h, N, tau as little-endian binary64,
// then N+1 binary64 weights.
struct StoredWeights {
    double alpha1, alpha2, c, h;
    std::size_t N;
    double tau;
    std::vector<double> omegas;
};

void write_weights(const std::filesystem::path& path, const WeightTable& table);
StoredWeights read_weights(const std::filesystem::path& path);

/// File name used for a table in a cache directory.
std::string cache_file_name(const ExponentialTransition& tr, double h, std::size_t N, double tau);

}  // namespace vofc
