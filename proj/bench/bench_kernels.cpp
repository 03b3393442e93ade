// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to the
// thread count of interest.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "vofc/kernels.hpp"
#include "vofc/laplace_inversion.hpp"

namespace {

const vofc::ExponentialTransition kTr(0.6, 0.8, 2.0);

void BM_SampleCircle(benchmark::State& st) {
    std::vector<vofc::Complex> out(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        vofc::kernels::sample_psi_h_circle(kTr, 1.0 / 64, 0.999, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SampleCircleSerial(benchmark::State& st) {
    std::vector<vofc::Complex> out(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        vofc::kernels::serial_sample_psi_h_circle(kTr, 1.0 / 64, 0.999, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

struct ContourData {
    vofc::ContourNodes nodes;
    std::vector<vofc::Complex> coeffs;
    std::vector<double> ts;

    explicit ContourData(std::size_t nt) : nodes(vofc::parabolic_nodes(129, 1.0, 10.0)) {
        for (std::size_t k = 0; k < nodes.z.size(); ++k)
            coeffs.push_back(vofc::psi_hat(kTr, nodes.z[k]) * nodes.w[k]);
        for (std::size_t i = 0; i < nt; ++i) ts.push_back(1.0 + 9.0 * static_cast<double>(i) / nt);
    }
};

void BM_ContourSums(benchmark::State& st) {
    ContourData d(static_cast<std::size_t>(st.range(0)));
    std::vector<vofc::Complex> out(d.ts.size());
    for (auto _ : st) {
        vofc::kernels::contour_sums(d.nodes.z, d.coeffs, d.ts, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_ContourSumsSerial(benchmark::State& st) {
    ContourData d(static_cast<std::size_t>(st.range(0)));
    std::vector<vofc::Complex> out(d.ts.size());
    for (auto _ : st) {
        vofc::kernels::serial_contour_sums(d.nodes.z, d.coeffs, d.ts, out);
        benchmark::DoNotOptimize(out.data());
    }
}

struct HistoryData {
    std::vector<double> omega, f;
    explicit HistoryData(std::size_t n) : omega(n + 1), f(2 * (n + 1)) {
        for (std::size_t j = 0; j <= n; ++j) {
            omega[j] = std::pow(static_cast<double>(j) + 1.0, -0.4);
            f[2 * j] = std::sin(0.01 * static_cast<double>(j));
            f[2 * j + 1] = std::cos(0.01 * static_cast<double>(j));
        }
    }
};

void BM_HistorySum(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    HistoryData d(n);
    double out[2];
    for (auto _ : st) {
        vofc::kernels::history_sum(d.omega, d.f, n, 2, out);
        benchmark::DoNotOptimize(out);
    }
}

void BM_HistorySumSerial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    HistoryData d(n);
    double out[2];
    for (auto _ : st) {
        vofc::kernels::serial_history_sum(d.omega, d.f, n, 2, out);
        benchmark::DoNotOptimize(out);
    }
}

}  // namespace

BENCHMARK(BM_SampleCircle)->RangeMultiplier(8)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_SampleCircleSerial)->RangeMultiplier(8)->Range(1 << 12, 1 << 18);
BENCHMARK(BM_ContourSums)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_ContourSumsSerial)->RangeMultiplier(4)->Range(16, 1024);
BENCHMARK(BM_HistorySum)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_HistorySumSerial)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

BENCHMARK_MAIN();
