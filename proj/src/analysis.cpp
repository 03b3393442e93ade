#include "vofc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vofc/errors.hpp"
#include "vofc/kernels.hpp"
#include "vofc/mittag_leffler.hpp"

namespace vofc {

namespace {

constexpr double kRootResidual = 1e-10;
constexpr double kDedupDistance = 1e-6;
constexpr int kNewtonIters = 60;
constexpr int kMaxBisections = 8;

const Complex kNoRoot(std::numeric_limits<double>::quiet_NaN(), 0.0);

bool on_cut(Complex s) { return s.imag() == 0.0 && s.real() <= 0.0; }

// Newton iterates that settle onto the negative axis are limits of the cut,
// where the two sides of g happen to agree, not roots of the principal branch.
bool touches_cut(Complex s) { return s.real() <= 0.0 && std::abs(s.imag()) <= 1e-8 * std::max(1.0, std::abs(s)); }

Complex newton_root(const ExponentialTransition& tr, double lam, Complex s) {
    for (int it = 0; it < kNewtonIters; ++it) {
        if (on_cut(s) || std::abs(s) > 1e4 || s == Complex(-tr.rate())) return kNoRoot;
        const Complex g = relaxation_denominator(tr, lam, s);
        const Complex dg = relaxation_denominator_derivative(tr, lam, s);
        if (!std::isfinite(std::abs(g)) || !std::isfinite(std::abs(dg)) || dg == Complex(0.0))
            return kNoRoot;
        const Complex step = g / dg;
        s -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    if (on_cut(s) || !std::isfinite(s.real()) || !std::isfinite(s.imag())) return kNoRoot;
    return s;
}

bool near_cut(Complex s, const SearchBox& box) {
    const double tol = 0.02 * (box.im_max - box.im_min);
    return s.real() < 0.0 && std::abs(s.imag()) < tol;
}

bool near_edge(Complex s, const SearchBox& box) {
    const double dx = 0.05 * (box.re_max - box.re_min);
    const double dy = 0.05 * (box.im_max - box.im_min);
    return s.real() < box.re_min + dx || s.real() > box.re_max - dx || s.imag() < box.im_min + dy ||
           s.imag() > box.im_max - dy;
}

// Every root of `to` continues a root of `from` (and vice versa), except
// roots entering or leaving through the branch cut or the box boundary.
bool roots_continuous(const ExponentialTransition& tr, const LambdaSlice& from,
                      const LambdaSlice& to, const SearchBox& box, std::string& why) {
    const double dlam = std::abs(to.lam - from.lam);
    auto allowance = [&](const Root& r, double lam) {
        const Complex dg = relaxation_denominator_derivative(tr, lam, r.s);
        return 3.0 * dlam / (lam * std::abs(dg)) + 1e-8;
    };
    auto covered = [&](const std::vector<Root>& src, double lam_src, const std::vector<Root>& dst) {
        for (const auto& r : src) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : dst) best = std::min(best, std::abs(q.s - r.s));
            if (best <= allowance(r, lam_src)) continue;
            if (near_cut(r.s, box) || near_edge(r.s, box)) continue;
            std::ostringstream os;
            os << "root (" << r.s.real() << "," << r.s.imag() << ") at lambda=" << lam_src
               << " has no continuation (nearest " << best << ")";
            why = os.str();
            return false;
        }
        return true;
    };
    return covered(from.roots, from.lam, to.roots) && covered(to.roots, to.lam, from.roots);
}

bool inside_box(Complex s, const SearchBox& b) {
    return s.real() >= b.re_min && s.real() <= b.re_max && s.imag() >= b.im_min &&
           s.imag() <= b.im_max;
}

}  // namespace

void RelaxationSpec::validate() const {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw ParameterError("relaxation: lambda must be > 0");
    if (!std::isfinite(y0)) throw ParameterError("relaxation: y0 must be finite");
}

Complex relaxation_denominator(const ExponentialTransition& tr, double lam, Complex s) {
    return 1.0 + lam * psi_hat(tr, s);
}

Complex relaxation_denominator_derivative(const ExponentialTransition& tr, double lam, Complex s) {
    const double c = tr.rate();
    const Complex dsa = (tr.alpha1() - tr.alpha2()) * c / ((c + s) * (c + s));
    return -lam * psi_hat(tr, s) * (dsa * std::log(s) + tr.laplace_order(s));
}

Complex transform_H(const RelaxationSpec& spec, Complex s) {
    spec.validate();
    if (s == Complex(0.0)) throw SingularityError("transform_H: pole at s = 0");
    const Complex g = relaxation_denominator(spec.tr, spec.lam, s);
    if (g == Complex(0.0)) throw SingularityError("transform_H: s is a root of 1 + lambda Psi(s)");
    return 1.0 / (s * g);
}

std::vector<Root> find_singularities(const ExponentialTransition& tr, double lam,
                                     const SearchBox& box, std::span<const Complex> extra_seeds) {
    if (!(lam > 0.0)) throw ParameterError("find_singularities: lambda must be > 0");
    if (box.nx < 2 || box.ny < 2 || !(box.re_min < box.re_max) || !(box.im_min < box.im_max))
        throw ParameterError("find_singularities: degenerate search box");

    std::vector<Complex> seeds;
    seeds.reserve(static_cast<std::size_t>(box.nx) * box.ny + extra_seeds.size());
    for (int i = 0; i < box.nx; ++i)
        for (int j = 0; j < box.ny; ++j)
            seeds.emplace_back(box.re_min + (box.re_max - box.re_min) * i / (box.nx - 1),
                               box.im_min + (box.im_max - box.im_min) * j / (box.ny - 1));
    seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());

    std::vector<Complex> found(seeds.size());
    kernels::evaluate(
        [&](Complex s0) {
            try {
                return newton_root(tr, lam, s0);
            } catch (const NumericalError&) {
                return kNoRoot;
            }
        },
        seeds, found);

    std::vector<Root> roots;
    auto add = [&](Complex s) {
        for (const auto& r : roots)
            if (std::abs(r.s - s) < kDedupDistance) return;
        const double res = std::abs(relaxation_denominator(tr, lam, s));
        if (res < kRootResidual) roots.push_back({s, res});
    };
    for (Complex s : found) {
        if (std::isnan(s.real()) || touches_cut(s)) continue;
        add(s);
        add(std::conj(s));
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        return a.s.imag() != b.s.imag() ? a.s.imag() < b.s.imag() : a.s.real() < b.s.real();
    });
    return roots;
}

SingularityScan scan_singularities(const ExponentialTransition& tr, double lam_min, double lam_max,
                                   double max_ratio, const SearchBox& box) {
    if (!(lam_min > 0.0 && lam_max >= lam_min)) throw ParameterError("scan: need 0 < lam_min <= lam_max");
    if (!(max_ratio > 1.0)) throw ParameterError("scan: step ratio must exceed 1");

    SingularityScan scan;
    scan.box = box;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::log(lam_max / lam_min) / std::log(max_ratio))));

    auto slice_at = [&](double lam, const std::vector<Root>& prev) {
        std::vector<Complex> seeds;
        for (const auto& r : prev) seeds.push_back(r.s);
        auto roots = find_singularities(tr, lam, box, seeds);
        std::erase_if(roots, [&](const Root& r) { return !inside_box(r.s, box); });
        return LambdaSlice{lam, std::move(roots)};
    };

    // Grid seeds can miss a root that the next slice finds; continue such
    // roots backward through the slices that lack them.
    auto backfill = [&](const LambdaSlice& next) {
        std::vector<Root> carry = next.roots;
        for (auto it = scan.slices.rbegin(); it != scan.slices.rend(); ++it) {
            std::vector<Root> seeds = it->roots;
            seeds.insert(seeds.end(), carry.begin(), carry.end());
            LambdaSlice redo = slice_at(it->lam, seeds);
            if (redo.roots.size() <= it->roots.size()) break;
            *it = std::move(redo);
            carry = it->roots;
        }
    };

    scan.slices.push_back(slice_at(lam_min, {}));
    for (int k = 1; k <= steps; ++k) {
        const double target = k == steps ? lam_max : lam_min * std::pow(lam_max / lam_min, double(k) / steps);
        // Advance to `target`, halving the step (in log lambda) while the
        // roots cannot be matched.
        std::vector<double> pending{target};
        int depth = 0;
        while (!pending.empty()) {
            const double lam = pending.back();
            LambdaSlice next = slice_at(lam, scan.slices.back().roots);
            backfill(next);
            const LambdaSlice& prev = scan.slices.back();
            std::string why;
            if (roots_continuous(tr, prev, next, box, why)) {
                scan.slices.push_back(std::move(next));
                pending.pop_back();
                continue;
            }
            if (depth >= kMaxBisections * 4) {
                scan.continuous = false;
                scan.notes.push_back(why);
                scan.slices.push_back(std::move(next));
                pending.pop_back();
                continue;
            }
            ++depth;
            pending.push_back(std::sqrt(prev.lam * lam));
        }
    }
    return scan;
}

std::vector<Singularity> relaxation_singularities(const RelaxationSpec& spec) {
    spec.validate();
    const double amin = std::min(spec.tr.alpha1(), spec.tr.alpha2());
    const double S = std::max({1.0, spec.tr.rate() / 2.0, std::pow(spec.lam, 1.0 / amin)});
    SearchBox box{-3.0 * S, 2.0, -6.0 * S, 6.0 * S, 48, 48};

    std::vector<Singularity> out;
    out.push_back({Complex(0.0), std::nullopt});
    out.push_back({Complex(-spec.tr.rate()), std::nullopt});
    for (const auto& r : find_singularities(spec.tr, spec.lam, box)) {
        const Complex dg = relaxation_denominator_derivative(spec.tr, spec.lam, r.s);
        out.push_back({r.s, 1.0 / (r.s * dg)});
    }
    return out;
}

std::vector<double> reference_relaxation(const RelaxationSpec& spec, std::span<const double> ts,
                                         const ContourSpec& contour) {
    spec.validate();
    for (double t : ts)
        if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("reference_relaxation: t must be >= 0");
    std::vector<double> positive;
    for (double t : ts)
        if (t > 0.0) positive.push_back(t);

    const auto sing = relaxation_singularities(spec);
    const RelaxationSpec unit{spec.tr, spec.lam, 1.0};
    const auto inv = invert([&unit](Complex s) { return transform_H(unit, s); }, positive, contour, sing);

    std::vector<double> out(ts.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) out[i] = ts[i] == 0.0 ? spec.y0 : spec.y0 * inv[j++];
    return out;
}

double co_kernel_psi(double alpha, double t) { return std::pow(t, alpha - 1.0) / std::tgamma(alpha); }

double co_kernel_phi(double alpha, double t) { return std::pow(t, -alpha) / std::tgamma(1.0 - alpha); }

KernelRatios kernel_ratio_study(const ExponentialTransition& tr, std::span<const double> t_small,
                                std::span<const double> t_large, const ContourSpec& contour) {
    KernelRatios k;
    k.t_small.assign(t_small.begin(), t_small.end());
    k.t_large.assign(t_large.begin(), t_large.end());
    const auto ps = kernel_psi(tr, t_small, contour);
    const auto fs = kernel_phi(tr, t_small, contour);
    const auto pl = kernel_psi(tr, t_large, contour);
    const auto fl = kernel_phi(tr, t_large, contour);
    for (std::size_t i = 0; i < t_small.size(); ++i) {
        k.psi_small.push_back(ps[i] / co_kernel_psi(tr.alpha1(), t_small[i]));
        k.phi_small.push_back(fs[i] / co_kernel_phi(tr.alpha1(), t_small[i]));
    }
    for (std::size_t i = 0; i < t_large.size(); ++i) {
        k.psi_large.push_back(pl[i] / co_kernel_psi(tr.alpha2(), t_large[i]));
        k.phi_large.push_back(fl[i] / co_kernel_phi(tr.alpha2(), t_large[i]));
    }
    return k;
}

RelaxationDifference relaxation_difference_study(const RelaxationSpec& spec,
                                                 std::span<const double> ts,
                                                 const ContourSpec& contour) {
    RelaxationDifference d;
    d.ts.assign(ts.begin(), ts.end());
    d.vo = reference_relaxation(spec, ts, contour);
    d.co1 = relaxation_co(spec.tr.alpha1(), spec.lam, spec.y0, ts, contour);
    d.co2 = relaxation_co(spec.tr.alpha2(), spec.lam, spec.y0, ts, contour);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        d.diff1.push_back(d.vo[i] - d.co1[i]);
        d.diff2.push_back(d.vo[i] - d.co2[i]);
    }
    return d;
}

}  // namespace vofc
