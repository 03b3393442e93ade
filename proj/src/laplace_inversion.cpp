#include "vofc/laplace_inversion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "vofc/errors.hpp"
#include "vofc/kernels.hpp"

namespace vofc {

namespace {

constexpr double kPi = std::numbers::pi;

// Poles closer than this to the parabola (measured in the parameter plane
// u, where the nodes are spaced by `step`) trigger a rescaling of mu.
constexpr double kPoleClearance = 0.7;
constexpr double kMuScales[] = {1.0, 1.3, 1.0 / 1.3, 1.6, 1.0 / 1.6, 2.0, 0.5, 2.5, 0.4, 3.0};

// Hyperbola parameters for M nodes on each side of the real axis.
constexpr double kHypMu = 4.4921;
constexpr double kHypStep = 1.0818;
constexpr double kHypAngle = 1.1721;

int decade_of(double t) {
    int k = static_cast<int>(std::floor(std::log10(t)));
    if (std::pow(10.0, k) > t) --k;
    if (std::pow(10.0, k + 1) <= t) ++k;
    return k;
}

double parabola_mu(int node_count, double t0, double window_ratio) {
    const double M = (node_count - 1) / 2;
    const double b = std::sqrt(1.0 + 8.0 * window_ratio);
    return kPi * M / (4.0 * b * window_ratio * t0);
}

// Signed distance of p from the parabola s = mu (1 + i u)^2 in the u plane;
// positive means p is enclosed (left of the contour).
double parabola_clearance(Complex p, double mu) {
    return 1.0 - std::sqrt(p / mu).real();
}

bool hyperbola_encloses(Complex p, double mu) {
    const double sh = p.imag() / (mu * std::cos(kHypAngle));
    const double xc = mu * (1.0 - std::sin(kHypAngle) * std::sqrt(1.0 + sh * sh));
    return p.real() < xc;
}

std::string describe(Complex p) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << p.real() << (p.imag() < 0 ? " - " : " + ") << std::abs(p.imag()) << "i)";
    return os.str();
}

struct WindowPlan {
    double mu_scale = 1.0;
    double clearance = 0.0;
};

WindowPlan plan_window(int node_count, double t0, double window_ratio, double shift,
                       std::span<const Singularity> sing, std::vector<std::string>& warnings) {
    const double base_mu = parabola_mu(node_count, t0, window_ratio);
    WindowPlan best{1.0, -1.0};
    bool have_best = false;
    for (double scale : kMuScales) {
        const double mu = base_mu * scale;
        double worst = 1.0;
        bool admissible = true;
        for (const auto& s : sing) {
            const double d = parabola_clearance(s.location - shift, mu);
            if (!s.residue && d <= 0.0) admissible = false;
            worst = std::min(worst, std::abs(d));
        }
        if (!admissible) continue;
        if (worst >= kPoleClearance) return {scale, worst};
        if (!have_best || worst > best.clearance) {
            best = {scale, worst};
            have_best = true;
        }
    }
    if (!have_best) {
        for (const auto& s : sing)
            if (!s.residue && parabola_clearance(s.location - shift, base_mu) <= 0.0)
                throw ContourError("invert: singularity " + describe(s.location) +
                                   " lies right of the contour and has no residue; increase shift");
    }
    std::ostringstream os;
    os << "invert: a pole lies within " << best.clearance
       << " of the contour in the parameter plane (window t0=" << t0 << ")";
    warnings.push_back(os.str());
    return best;
}

void add_residues(std::span<const Singularity> sing, double shift,
                  const std::function<bool(Complex)>& enclosed, double t, Complex& acc) {
    for (const auto& s : sing) {
        if (!s.residue || enclosed(s.location - shift)) continue;
        acc += std::exp(s.location * t) * *s.residue;
    }
}

// Quadrature sums (complex, before taking the real part) for one node count.
std::vector<Complex> contour_values(const TransformFn& F, std::span<const double> ts,
                                    const ContourSpec& c, std::span<const Singularity> sing,
                                    std::vector<std::string>& warnings) {
    std::vector<Complex> out(ts.size());
    const double sigma = c.shift;

    if (c.shape == ContourShape::hyperbolic) {
        const int M = (c.node_count - 1) / 2;
        const double step = kHypStep / M;
        std::vector<Complex> z(c.node_count), w(c.node_count), fz(c.node_count), shifted(c.node_count);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double t = ts[i];
            const double mu = kHypMu * M / t;
            for (const auto& s : sing)
                if (!s.residue && !hyperbola_encloses(s.location - sigma, mu))
                    throw ContourError("invert: singularity " + describe(s.location) +
                                       " lies right of the hyperbolic contour");
            for (int k = -M; k <= M; ++k) {
                const Complex arg(-kHypAngle, k * step);  // i u - angle
                z[k + M] = mu * (1.0 + std::sin(arg));
                w[k + M] = mu * std::cos(arg) * step / (2.0 * kPi);
                shifted[k + M] = z[k + M] + sigma;
            }
            kernels::evaluate(F, shifted, fz);
            for (int k = 0; k < c.node_count; ++k) fz[k] *= w[k];
            Complex acc;
            kernels::contour_sums(z, fz, std::span<const double>(&ts[i], 1),
                                  std::span<Complex>(&acc, 1));
            acc *= std::exp(sigma * t);
            add_residues(sing, sigma, [mu](Complex p) { return hyperbola_encloses(p, mu); }, t, acc);
            out[i] = acc;
        }
        return out;
    }

    std::map<int, std::vector<std::size_t>> windows;
    for (std::size_t i = 0; i < ts.size(); ++i) windows[decade_of(ts[i])].push_back(i);

    std::vector<Complex> fz(c.node_count), shifted(c.node_count);
    for (const auto& [decade, idx] : windows) {
        const double t0 = std::pow(10.0, decade);
        const WindowPlan wp = plan_window(c.node_count, t0, c.window_ratio, sigma, sing, warnings);
        const ContourNodes nodes = parabolic_nodes(c.node_count, t0, c.window_ratio, wp.mu_scale);
        const double mu = parabola_mu(c.node_count, t0, c.window_ratio) * wp.mu_scale;

        for (int k = 0; k < c.node_count; ++k) shifted[k] = nodes.z[k] + sigma;
        kernels::evaluate(F, shifted, fz);
        for (int k = 0; k < c.node_count; ++k) fz[k] *= nodes.w[k];

        std::vector<double> tw(idx.size());
        std::vector<Complex> sums(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) tw[j] = ts[idx[j]];
        kernels::contour_sums(nodes.z, fz, tw, sums);

        for (std::size_t j = 0; j < idx.size(); ++j) {
            Complex acc = sums[j] * std::exp(sigma * tw[j]);
            add_residues(sing, sigma, [mu](Complex p) { return parabola_clearance(p, mu) > 0.0; },
                         tw[j], acc);
            out[idx[j]] = acc;
        }
    }
    return out;
}

}  // namespace

void ContourSpec::validate() const {
    if (node_count < 9 || node_count % 2 == 0)
        throw ParameterError("contour: node_count must be odd and >= 9");
    if (!(t_min > 0.0) || !(t_max >= t_min) || !std::isfinite(t_max))
        throw ParameterError("contour: need 0 < t_min <= t_max < inf");
    if (!(shift >= 0.0) || !std::isfinite(shift))
        throw ParameterError("contour: shift must be finite and >= 0");
    if (!(window_ratio > 1.0) || !std::isfinite(window_ratio))
        throw ParameterError("contour: window_ratio must exceed 1");
    if (shape == ContourShape::parabolic && window_ratio < 10.0)
        throw ParameterError("contour: parabolic windows must cover a decade (window_ratio >= 10)");
}

ContourNodes parabolic_nodes(int node_count, double t0, double window_ratio, double mu_scale) {
    const int M = (node_count - 1) / 2;
    const double step = std::sqrt(1.0 + 8.0 * window_ratio) / M;
    const double mu = parabola_mu(node_count, t0, window_ratio) * mu_scale;
    ContourNodes n;
    n.z.resize(node_count);
    n.w.resize(node_count);
    for (int k = -M; k <= M; ++k) {
        const Complex v(1.0, k * step);
        n.z[k + M] = mu * v * v;
        // dz = 2 i mu (1 + i u) du, divided by 2 pi i.
        n.w[k + M] = mu * v * step / kPi;
    }
    return n;
}

InversionResult invert_detailed(const TransformFn& F, std::span<const double> ts,
                                const ContourSpec& contour, std::span<const Singularity> singularities,
                                bool check_doubling) {
    contour.validate();
    for (double t : ts) {
        if (!std::isfinite(t) || !(t > 0.0))
            throw ParameterError("invert: times must be finite and > 0");
        if (t < contour.t_min || t > contour.t_max)
            throw ParameterError("invert: t outside the contour window [t_min, t_max]");
    }
    for (const auto& s : singularities)
        if (!std::isfinite(s.location.real()) || !std::isfinite(s.location.imag()))
            throw ParameterError("invert: non-finite singularity location");

    InversionResult res;
    const auto sums = contour_values(F, ts, contour, singularities, res.warnings);
    res.values.resize(ts.size());
    res.imag_residue.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(sums[i].real()) || !std::isfinite(sums[i].imag()))
            throw NumericalError("invert: non-finite quadrature sum");
        res.values[i] = sums[i].real();
        res.imag_residue[i] = std::abs(sums[i].imag());
        if (res.imag_residue[i] > 1e-8 * (1.0 + std::abs(res.values[i]))) {
            std::ostringstream os;
            os << "invert: imaginary residue " << res.imag_residue[i] << " at t=" << ts[i];
            res.warnings.push_back(os.str());
        }
    }

    if (check_doubling) {
        ContourSpec fine = contour;
        fine.node_count = 2 * (contour.node_count - 1) + 1;
        std::vector<std::string> ignored;
        const auto fine_sums = contour_values(F, ts, fine, singularities, ignored);
        res.doubling_change.resize(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double v = res.values[i];
            const double change = std::abs(fine_sums[i].real() - v) / std::max(1.0, std::abs(v));
            res.doubling_change[i] = change;
            if (change > 1e-8) {
                std::ostringstream os;
                os << "invert: doubling node_count changes f(" << ts[i] << ") by " << change
                   << " (relative)";
                res.warnings.push_back(os.str());
            }
        }
    }
    return res;
}

std::vector<double> invert(const TransformFn& F, std::span<const double> ts,
                           const ContourSpec& contour, std::span<const Singularity> singularities) {
    return invert_detailed(F, ts, contour, singularities).values;
}

std::vector<double> kernel_psi(const OrderTransition& tr, std::span<const double> ts,
                               const ContourSpec& contour) {
    return invert([&tr](Complex s) { return psi_hat(tr, s); }, ts, contour);
}

std::vector<double> kernel_phi(const OrderTransition& tr, std::span<const double> ts,
                               const ContourSpec& contour) {
    return invert([&tr](Complex s) { return phi_hat(tr, s); }, ts, contour);
}

}  // namespace vofc
