#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vofc/transition.hpp"
#include "vofc/weights.hpp"

namespace vofc {

/// f(t, y) written into `out`; y and out have the problem dimension.
using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> out)>;

struct VofdeProblem {
    ExponentialTransition tr;
    RhsFn rhs;
    std::vector<double> y0;
    double T = 0.0;
    std::string name;

    std::size_t dim() const { return y0.size(); }
    void validate() const;
};

enum class StepMode { newton, fixed_point };

struct StepSolverOptions {
    StepMode mode = StepMode::newton;
    double tol = 1e-12;   // on max_k |residual_k| / max(1, |y|_inf)
    int max_iter = 50;
    double fd_step = 1e-7;  // scaled by max(1, |y_k|)

    void validate() const;
};

struct TrajectoryMeta {
    double h = 0.0;
    std::uint64_t weights_checksum = 0;
    std::string weights_plan;
    std::vector<int> iterations;  // per step, index 0 unused
    double max_residual = 0.0;
};

struct Trajectory {
    std::vector<double> ts;
    std::vector<double> ys;  // row-major, ts.size() rows of length dim
    std::size_t dim = 0;
    TrajectoryMeta meta;

    std::size_t size() const { return ts.size(); }
    std::span<const double> state(std::size_t n) const { return {ys.data() + n * dim, dim}; }
    std::span<const double> final_state() const { return state(ts.size() - 1); }
};

/// Number of steps ceil(T/h), tolerant to T being an exact multiple of h.
std::size_t step_count(double T, double h);

/// Runs y_n = y_0 + sum_{j=1}^{n} omega_{n-j} f(t_j, y_j) with caller weights.
Trajectory solve_with_weights(const VofdeProblem& problem, double h, std::span<const double> omega,
                              const StepSolverOptions& opts = {});

/// VO Grunwald-Letnikov scheme with weights from the FFT pipeline.
Trajectory solve_gl(const VofdeProblem& problem, double h, const StepSolverOptions& opts = {},
                    const WeightOptions& wopts = {});

/// Same stepper with the constant-order weights h^alpha (1 - xi)^{-alpha}.
Trajectory solve_co_gl(double alpha, const VofdeProblem& problem, double h,
                       const StepSolverOptions& opts = {});

/// log2(err_h / err_h2).
double eoc(double err_h, double err_h2);

/// Named problems. Parameters read from `params` with defaults:
///   relaxation:    lambda (1)
///   nonlinear13y2: (none)
///   brusselator:   a (1), mu (4)
/// and y0 given separately.
VofdeProblem preset_problem(const std::string& name, const ExponentialTransition& tr,
                            const std::map<std::string, double>& params, std::vector<double> y0,
                            double T);

}  // namespace vofc
