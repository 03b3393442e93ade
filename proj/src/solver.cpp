#include "vofc/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "vofc/errors.hpp"
#include "vofc/kernels.hpp"

namespace vofc {

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void eval_rhs(const RhsFn& f, double t, std::span<const double> y, std::span<double> out,
              std::size_t step) {
    f(t, y, out);
    for (double v : out)
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "solver: non-finite right-hand side at step " << step << " (t=" << t << ")";
            throw NumericalError(os.str());
        }
}

constexpr double kMonotone = 0x1p-29;
constexpr std::array<double, 3> kFloors{0x1p-30, 0.125, 1.0 / 64};

class StepSolver {
public:
    StepSolver(const RhsFn& f, std::size_t d, const StepSolverOptions& o)
        : f_(f), d_(d), o_(o), r_(d), fp_(d), ytmp_(d), jac_(d, d), rhs_(d) {}

    // Solves y - w0 f(t, y) = known in place; f_out receives f(t, y).
    // Returns the iteration count and stores the final scaled residual.
    // Damped Newton from the previous state comes first. If it stalls, the
    // Newton homotopy G(y) = (1 - s) G(y_prev) is traced in arclength, which
    // passes the folds where the nearby root disappears. Restarts with coarse
    // damping floors are the last resort.
    int solve(double t, double w0, std::span<const double> known, std::span<double> y,
              std::span<double> f_out, std::size_t step, double& residual) {
        const std::vector<double> start(y.begin(), y.end());
        double best = std::numeric_limits<double>::infinity();
        int total = 0;
        auto run = [&](double floor) {
            int it = 0;
            const bool ok = attempt(t, w0, known, y, f_out, step, floor, residual, it);
            total += it;
            if (!ok && std::isfinite(residual)) best = std::min(best, residual);
            return ok;
        };
        if (run(kFloors[0]) || o_.mode != StepMode::newton) {
            if (residual <= o_.tol) return total;
        } else {
            std::copy(start.begin(), start.end(), y.begin());
            if (homotopy(t, w0, known, y, total) && run(kFloors[0])) return total;
            for (std::size_t a = 1; a < 2 * kFloors.size(); ++a) {
                const auto& from = a < kFloors.size() ? start : std::vector<double>(known.begin(), known.end());
                std::copy(from.begin(), from.end(), y.begin());
                if (run(kFloors[a % kFloors.size()])) return total;
            }
        }
        residual = best;
        std::ostringstream os;
        os << "solver: step " << step << " did not converge (residual " << best << ")";
        throw ConvergenceError(step, best, os.str());
    }

private:
    bool attempt(double t, double w0, std::span<const double> known, std::span<double> y,
                 std::span<double> f_out, std::size_t step, double floor, double& residual, int& it) {
        bool newton = o_.mode == StepMode::newton;
        residual = std::numeric_limits<double>::infinity();
        for (it = 0;; ++it) {
            if (!try_rhs(t, y, f_out)) {
                if (o_.mode == StepMode::newton) return false;
                eval_rhs(f_, t, y, f_out, step);
            }
            for (std::size_t k = 0; k < d_; ++k) r_[k] = y[k] - w0 * f_out[k] - known[k];
            residual = inf_norm(r_) / std::max(1.0, inf_norm(y));
            if (residual <= o_.tol) return true;
            if (it == o_.max_iter) return false;
            if (newton && newton_update(t, w0, known, y, f_out, floor)) continue;
            newton = false;
            for (std::size_t k = 0; k < d_; ++k) y[k] = known[k] + w0 * f_out[k];
        }
    }

    bool newton_update(double t, double w0, std::span<const double> known, std::span<double> y,
                       std::span<const double> fy, double floor) {
        if (!jacobian(t, w0, y, fy)) return false;
        for (std::size_t i = 0; i < d_; ++i) rhs_(i) = -r_[i];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac_);
        if (!(lu.rcond() > 1e-14)) return false;
        const Eigen::VectorXd dy = lu.solve(rhs_);
        if (!dy.allFinite()) return false;
        const double r0 = inf_norm(r_);
        double lambda = 1.0;
        for (; lambda >= floor; lambda *= 0.5) {
            for (std::size_t i = 0; i < d_; ++i) ytmp_[i] = y[i] + lambda * dy(i);
            if (!try_rhs(t, ytmp_, fp_)) continue;
            double rt = 0.0;
            for (std::size_t i = 0; i < d_; ++i) rt = std::max(rt, std::abs(ytmp_[i] - w0 * fp_[i] - known[i]));
            if (rt < r0) break;
        }
        if (lambda < floor) lambda = floor < kMonotone ? floor : 1.0;
        for (std::size_t k = 0; k < d_; ++k) y[k] += lambda * dy(k);
        return true;
    }

    // jac_ = I - w0 df/dy by forward differences.
    bool jacobian(double t, double w0, std::span<const double> y, std::span<const double> fy) {
        for (std::size_t k = 0; k < d_; ++k) {
            std::copy(y.begin(), y.end(), ytmp_.begin());
            const double dk = o_.fd_step * std::max(1.0, std::abs(y[k]));
            ytmp_[k] += dk;
            if (!try_rhs(t, ytmp_, fp_)) return false;
            for (std::size_t i = 0; i < d_; ++i)
                jac_(i, k) = (i == k ? 1.0 : 0.0) - w0 * (fp_[i] - fy[i]) / dk;
        }
        return true;
    }

    bool residual_at(double t, double w0, std::span<const double> known, std::span<const double> y,
                     std::span<double> fy, Eigen::Ref<Eigen::VectorXd> g) {
        if (!try_rhs(t, y, fy)) return false;
        for (std::size_t i = 0; i < d_; ++i) g(static_cast<Eigen::Index>(i)) = y[i] - w0 * fy[i] - known[i];
        return true;
    }

    // Leaves y near the root reached at s = 1; the caller polishes it.
    bool homotopy(double t, double w0, std::span<const double> known, std::span<double> y, int& evals) {
        const auto n = static_cast<Eigen::Index>(d_);
        std::vector<double> fy(d_), yc(d_);
        Eigen::VectorXd g0(n), g(n);
        if (!residual_at(t, w0, known, y, fy, g0)) return false;
        Eigen::VectorXd z(n + 1), tan = Eigen::VectorXd::Unit(n + 1, n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = y[static_cast<std::size_t>(i)];
        z(n) = 0.0;
        Eigen::MatrixXd A(n + 1, n + 1);
        Eigen::VectorXd b(n + 1);

        auto load = [&](const Eigen::VectorXd& zz, Eigen::VectorXd& row) {
            for (std::size_t i = 0; i < d_; ++i) yc[i] = zz(static_cast<Eigen::Index>(i));
            if (!residual_at(t, w0, known, yc, fy, g) || !jacobian(t, w0, yc, fy)) return false;
            A.topLeftCorner(n, n) = jac_;
            A.topRightCorner(n, 1) = g0;
            A.bottomRows(1) = row.transpose();
            return true;
        };
        auto tangent = [&]() {
            if (!load(z, tan)) return false;
            b.setZero();
            b(n) = 1.0;
            Eigen::VectorXd next = A.partialPivLu().solve(b);
            if (!next.allFinite() || next.norm() == 0.0) return false;
            tan = next.normalized();
            return true;
        };
        if (!tangent()) return false;

        double ds = 0.05 * std::max(1.0, z.head(n).lpNorm<Eigen::Infinity>());
        const int budget = 40 * o_.max_iter;
        while (evals < budget) {
            const Eigen::VectorXd zp = z + ds * tan;
            Eigen::VectorXd zn = zp;
            bool ok = false;
            for (int k = 0; k < 8 && evals < budget; ++k, ++evals) {
                if (!load(zn, tan)) break;
                const double scale = std::max(1.0, zn.head(n).lpNorm<Eigen::Infinity>());
                b.head(n) = g - (1.0 - zn(n)) * g0;
                b(n) = tan.dot(zn - zp);
                if (b.lpNorm<Eigen::Infinity>() <= 1e-10 * scale) {
                    ok = true;
                    break;
                }
                const Eigen::VectorXd dz = A.partialPivLu().solve(-b);
                if (!dz.allFinite()) break;
                zn += dz;
            }
            if (!ok) {
                ds *= 0.5;
                if (ds < 1e-10) return false;
                continue;
            }
            if (zn(n) >= 1.0) {
                const double w = (1.0 - z(n)) / (zn(n) - z(n));
                for (std::size_t i = 0; i < d_; ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    y[i] = z(ii) + w * (zn(ii) - z(ii));
                }
                return true;
            }
            const Eigen::VectorXd prev = tan;
            z = zn;
            if (!tangent()) return false;
            if (tan.dot(prev) < 0.0) tan = -tan;
            ds = std::min(1.5 * ds, 0.5 * std::max(1.0, z.head(n).lpNorm<Eigen::Infinity>()));
        }
        return false;
    }

    bool try_rhs(double t, std::span<const double> y, std::span<double> out) {
        f_(t, y, out);
        for (double v : out)
            if (!std::isfinite(v)) return false;
        return true;
    }

    const RhsFn& f_;
    std::size_t d_;
    StepSolverOptions o_;
    std::vector<double> r_, fp_, ytmp_;
    Eigen::MatrixXd jac_;
    Eigen::VectorXd rhs_;
};

}  // namespace

void VofdeProblem::validate() const {
    if (y0.empty()) throw ParameterError("problem: y0 must have dimension >= 1");
    if (!rhs) throw ParameterError("problem: missing right-hand side");
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("problem: T must be > 0");
    for (double v : y0)
        if (!std::isfinite(v)) throw ParameterError("problem: y0 must be finite");
}

void StepSolverOptions::validate() const {
    if (!(tol > 0.0)) throw ParameterError("solver: tol must be > 0");
    if (max_iter < 1) throw ParameterError("solver: max_iter must be >= 1");
    if (!(fd_step > 0.0)) throw ParameterError("solver: finite-difference step must be > 0");
}

std::size_t step_count(double T, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("solver: h must be > 0");
    const double q = T / h;
    const double nearest = std::round(q);
    const double n = std::abs(q - nearest) <= 1e-9 * std::max(1.0, q) ? nearest : std::ceil(q);
    if (n > 1e8) throw ParameterError("solver: too many steps");
    return static_cast<std::size_t>(n);
}

Trajectory solve_with_weights(const VofdeProblem& problem, double h, std::span<const double> omega,
                              const StepSolverOptions& opts) {
    problem.validate();
    opts.validate();
    const std::size_t N = step_count(problem.T, h);
    if (omega.size() < N + 1) throw ParameterError("solver: need N + 1 weights");
    const std::size_t d = problem.dim();

    Trajectory tr;
    tr.dim = d;
    tr.ts.resize(N + 1);
    tr.ys.assign((N + 1) * d, 0.0);
    tr.meta.h = h;
    tr.meta.weights_checksum = fnv1a(omega.first(N + 1));
    tr.meta.iterations.assign(N + 1, 0);

    std::vector<double> F((N + 1) * d, 0.0);
    std::vector<double> known(d), hist(d);
    std::copy(problem.y0.begin(), problem.y0.end(), tr.ys.begin());
    StepSolver stepper(problem.rhs, d, opts);

    for (std::size_t n = 0; n <= N; ++n) tr.ts[n] = static_cast<double>(n) * h;
    for (std::size_t n = 1; n <= N; ++n) {
        kernels::history_sum(omega, F, n, d, hist);
        for (std::size_t k = 0; k < d; ++k) known[k] = problem.y0[k] + hist[k];
        std::span<double> y(tr.ys.data() + n * d, d);
        std::copy_n(tr.ys.data() + (n - 1) * d, d, y.begin());
        double residual = 0.0;
        tr.meta.iterations[n] = stepper.solve(tr.ts[n], omega[0], known, y,
                                              std::span<double>(F.data() + n * d, d), n, residual);
        tr.meta.max_residual = std::max(tr.meta.max_residual, residual);
    }
    return tr;
}

Trajectory solve_gl(const VofdeProblem& problem, double h, const StepSolverOptions& opts,
                    const WeightOptions& wopts) {
    problem.validate();
    const std::size_t N = step_count(problem.T, h);
    const auto table = cached_weights(problem.tr, h, N, wopts);
    Trajectory t = solve_with_weights(problem, h, table->omegas, opts);
    t.meta.weights_plan = table->plan.summary();
    return t;
}

Trajectory solve_co_gl(double alpha, const VofdeProblem& problem, double h,
                       const StepSolverOptions& opts) {
    problem.validate();
    const std::size_t N = step_count(problem.T, h);
    std::vector<double> w = co_weights(alpha, N);
    const double scale = std::pow(h, alpha);
    for (double& v : w) v *= scale;
    Trajectory t = solve_with_weights(problem, h, w, opts);
    t.meta.weights_plan = "constant order alpha=" + std::to_string(alpha);
    return t;
}

double eoc(double err_h, double err_h2) {
    if (!(err_h > 0.0) || !(err_h2 > 0.0)) throw ParameterError("eoc: errors must be > 0");
    return std::log2(err_h / err_h2);
}

VofdeProblem preset_problem(const std::string& name, const ExponentialTransition& tr,
                            const std::map<std::string, double>& params, std::vector<double> y0,
                            double T) {
    auto param = [&params](const char* key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    VofdeProblem p{tr, {}, std::move(y0), T, name};
    if (name == "relaxation") {
        const double lam = param("lambda", 1.0);
        if (!(lam > 0.0)) throw ParameterError("relaxation: lambda must be > 0");
        if (p.y0.size() != 1) throw ParameterError("relaxation: y0 must be scalar");
        p.rhs = [lam](double, std::span<const double> y, std::span<double> out) { out[0] = -lam * y[0]; };
    } else if (name == "nonlinear13y2") {
        if (p.y0.size() != 1) throw ParameterError("nonlinear13y2: y0 must be scalar");
        p.rhs = [](double, std::span<const double> y, std::span<double> out) {
            out[0] = 1.0 - 3.0 * y[0] * y[0];
        };
    } else if (name == "brusselator") {
        const double a = param("a", 1.0);
        const double mu = param("mu", 4.0);
        if (p.y0.size() != 2) throw ParameterError("brusselator: y0 must have two components");
        p.rhs = [a, mu](double, std::span<const double> y, std::span<double> out) {
            const double x2y = y[0] * y[0] * y[1];
            out[0] = a - (mu + 1.0) * y[0] + x2y;
            out[1] = mu * y[0] - x2y;
        };
    } else {
        throw ParameterError("unknown preset '" + name + "'");
    }
    p.validate();
    return p;
}

}  // namespace vofc
