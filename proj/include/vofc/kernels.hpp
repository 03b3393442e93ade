#pragma once

// Data-parallel inner loops shared by the weight engine, the Laplace
// inversion and the GL stepper. Each OpenMP kernel has a plain serial
// counterpart (serial_*) that is kept as the reference for tests and the
// benchmark. The parallel kernels are deterministic: their results do not
// depend on the number of threads.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vofc/transition.hpp"

namespace vofc::kernels {

/// out[k] = Psi^[h](rho * exp(2 pi i k / L)), L = out.size().
void sample_psi_h_circle(const OrderTransition& tr, double h, double rho, std::span<Complex> out);
void serial_sample_psi_h_circle(const OrderTransition& tr, double h, double rho,
                                std::span<Complex> out);

/// max_k |Psi^[h](r exp(2 pi i k / samples))|.
double max_abs_psi_h_circle(const OrderTransition& tr, double h, double r, std::size_t samples);
double serial_max_abs_psi_h_circle(const OrderTransition& tr, double h, double r,
                                   std::size_t samples);

/// out[k] = fn(nodes[k]).
void evaluate(const std::function<Complex(Complex)>& fn, std::span<const Complex> nodes,
              std::span<Complex> out);
void serial_evaluate(const std::function<Complex(Complex)>& fn, std::span<const Complex> nodes,
                     std::span<Complex> out);

/// out[i] = sum_k exp(nodes[k] * ts[i]) * coeffs[k]; the trapezoidal sum of a
/// contour integral for every requested time.
void contour_sums(std::span<const Complex> nodes, std::span<const Complex> coeffs,
                  std::span<const double> ts, std::span<Complex> out);
void serial_contour_sums(std::span<const Complex> nodes, std::span<const Complex> coeffs,
                         std::span<const double> ts, std::span<Complex> out);

/// GL history term for step n of a d-dimensional system:
///   out[k] = sum_{j=1}^{n-1} omega[n-j] * f[j*d + k],  k = 0..d-1.
/// `f` holds rhs values row-major, one row of length d per grid node.
/// The parallel version sums fixed-size blocks and combines them in order.
void history_sum(std::span<const double> omega, std::span<const double> f, std::size_t n,
                 std::size_t d, std::span<double> out);
void serial_history_sum(std::span<const double> omega, std::span<const double> f, std::size_t n,
                        std::size_t d, std::span<double> out);

inline constexpr std::size_t kHistoryBlock = 2048;

}  // namespace vofc::kernels
