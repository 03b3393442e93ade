#include "vofc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

namespace vofc::kernels {

namespace {

// Exceptions must not leave an OpenMP region; keep the first one and rethrow.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
#pragma omp critical(vofc_exception_slot)
            if (!ptr_) ptr_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (ptr_) std::rethrow_exception(ptr_);
    }

private:
    std::exception_ptr ptr_;
};

Complex circle_node(double radius, std::size_t k, std::size_t count) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    return std::polar(radius, theta);
}

void accumulate_block(std::span<const double> omega, std::span<const double> f, std::size_t n,
                      std::size_t d, std::size_t j_begin, std::size_t j_end, double* acc) {
    if (d == 1) {
        double s = 0.0;
        for (std::size_t j = j_begin; j < j_end; ++j) s += omega[n - j] * f[j];
        acc[0] = s;
        return;
    }
    for (std::size_t k = 0; k < d; ++k) acc[k] = 0.0;
    for (std::size_t j = j_begin; j < j_end; ++j) {
        const double w = omega[n - j];
        const double* row = f.data() + j * d;
        for (std::size_t k = 0; k < d; ++k) acc[k] += w * row[k];
    }
}

}  // namespace

void sample_psi_h_circle(const OrderTransition& tr, double h, double rho, std::span<Complex> out) {
    const std::size_t count = out.size();
    ExceptionSlot slot;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < count; ++k)
        slot.run([&] { out[k] = psi_hat_h(tr, h, circle_node(rho, k, count)); });
    slot.rethrow();
}

void serial_sample_psi_h_circle(const OrderTransition& tr, double h, double rho,
                                std::span<Complex> out) {
    const std::size_t count = out.size();
    for (std::size_t k = 0; k < count; ++k) out[k] = psi_hat_h(tr, h, circle_node(rho, k, count));
}

double max_abs_psi_h_circle(const OrderTransition& tr, double h, double r, std::size_t samples) {
    double best = 0.0;
    ExceptionSlot slot;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (std::size_t k = 0; k < samples; ++k)
        slot.run([&] { best = std::max(best, std::abs(psi_hat_h(tr, h, circle_node(r, k, samples)))); });
    slot.rethrow();
    return best;
}

double serial_max_abs_psi_h_circle(const OrderTransition& tr, double h, double r,
                                   std::size_t samples) {
    double best = 0.0;
    for (std::size_t k = 0; k < samples; ++k)
        best = std::max(best, std::abs(psi_hat_h(tr, h, circle_node(r, k, samples))));
    return best;
}

void evaluate(const std::function<Complex(Complex)>& fn, std::span<const Complex> nodes,
              std::span<Complex> out) {
    const std::size_t count = nodes.size();
    ExceptionSlot slot;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < count; ++k) slot.run([&] { out[k] = fn(nodes[k]); });
    slot.rethrow();
}

void serial_evaluate(const std::function<Complex(Complex)>& fn, std::span<const Complex> nodes,
                     std::span<Complex> out) {
    for (std::size_t k = 0; k < nodes.size(); ++k) out[k] = fn(nodes[k]);
}

void contour_sums(std::span<const Complex> nodes, std::span<const Complex> coeffs,
                  std::span<const double> ts, std::span<Complex> out) {
    const std::size_t nt = ts.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nt; ++i) {
        Complex acc(0.0);
        for (std::size_t k = 0; k < nodes.size(); ++k) acc += std::exp(nodes[k] * ts[i]) * coeffs[k];
        out[i] = acc;
    }
}

void serial_contour_sums(std::span<const Complex> nodes, std::span<const Complex> coeffs,
                         std::span<const double> ts, std::span<Complex> out) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
        Complex acc(0.0);
        for (std::size_t k = 0; k < nodes.size(); ++k) acc += std::exp(nodes[k] * ts[i]) * coeffs[k];
        out[i] = acc;
    }
}

void history_sum(std::span<const double> omega, std::span<const double> f, std::size_t n,
                 std::size_t d, std::span<double> out) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(d), 0.0);
    if (n < 2) return;
    const std::size_t terms = n - 1;  // j = 1 .. n-1
    const std::size_t blocks = (terms + kHistoryBlock - 1) / kHistoryBlock;
    if (blocks == 1) {
        accumulate_block(omega, f, n, d, 1, n, out.data());
        return;
    }
    std::vector<double> partial(blocks * d);
#pragma omp parallel for schedule(static) if (blocks >= 4)
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t j0 = 1 + b * kHistoryBlock;
        const std::size_t j1 = std::min(n, j0 + kHistoryBlock);
        accumulate_block(omega, f, n, d, j0, j1, partial.data() + b * d);
    }
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t k = 0; k < d; ++k) out[k] += partial[b * d + k];
}

void serial_history_sum(std::span<const double> omega, std::span<const double> f, std::size_t n,
                        std::size_t d, std::span<double> out) {
    for (std::size_t k = 0; k < d; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j < n; ++j) s += omega[n - j] * f[j * d + k];
        out[k] = s;
    }
}

}  // namespace vofc::kernels
