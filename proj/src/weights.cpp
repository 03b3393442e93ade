#include "vofc/weights.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "vofc/errors.hpp"
#include "vofc/kernels.hpp"

namespace vofc {

namespace {

constexpr int kRadiusCandidates = 40;
constexpr std::size_t kZoomSamples = 1024;

double log_add_exp(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

std::size_t effective_N(std::size_t N) { return std::max<std::size_t>(N, 1); }

// Fine sampling of the arc near xi = r, where the maximum sits (or nearly
// sits when h >= 1 - r).
double zoom_max(const OrderTransition& tr, double h, double r) {
    const double span = std::min(std::numbers::pi, 50.0 * std::max(1.0 - r, h));
    double best = 0.0;
    for (std::size_t j = 0; j <= kZoomSamples; ++j) {
        const double th = span * static_cast<double>(j) / kZoomSamples;
        best = std::max(best, std::abs(psi_hat_h(tr, h, std::polar(r, th))));
    }
    return best;
}

struct Candidate {
    double r, M_r, M;
};

std::vector<Candidate> radius_candidates(const ExponentialTransition& tr, double h,
                                         const WeightOptions& o) {
    std::vector<double> rs;
    for (int k = 0; k <= kRadiusCandidates; ++k) {
        const double r = 1.0 - (1.0 - o.r_default) * std::ldexp(1.0, -k);
        if (1.0 - r < 64.0 * o.eps) break;
        rs.push_back(r);
    }
    if (1.0 - 2.0 * h > 0.0 && 1.0 - 2.0 * h < o.r_default) rs.push_back(1.0 - 2.0 * h);
    std::vector<Candidate> out;
    for (double r : rs) {
        const MEstimate m = estimate_M(tr, h, r, r, o.m_samples);
        out.push_back({r, m.circle_bound, std::max(m.sampled, m.circle_bound)});
    }
    return out;
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!p) throw NumericalError("weights: cannot allocate Fourier buffer");
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* p;
};

using Sampler = void (*)(const OrderTransition&, double, double, std::span<Complex>);

WeightTable run_pipeline(const ExponentialTransition& tr, const WeightPlan& plan, Sampler sample) {
    if (!(plan.rho > 0.0 && plan.rho < plan.r && plan.r < 1.0))
        throw InfeasiblePlan("weights: plan must satisfy 0 < rho < r < 1");
    if (plan.L < plan.N + 1) throw InfeasiblePlan("weights: plan needs L >= N + 1");

    const std::size_t L = plan.L;
    FftwBuffer in(L), out(L);
    static_assert(sizeof(Complex) == sizeof(fftw_complex));
    sample(tr, plan.h, plan.rho, std::span<Complex>(reinterpret_cast<Complex*>(in.p), L));

    fftw_plan fp;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fp = fftw_plan_dft_1d(static_cast<int>(L), in.p, out.p, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (!fp) throw NumericalError("weights: FFTW planning failed");
    fftw_execute(fp);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fp);
    }

    WeightTable t{tr, plan, {}, {}, 0.0};
    t.omegas.resize(plan.N + 1);
    t.error_bound.resize(plan.N + 1);
    const double log_rho = std::log(plan.rho);
    const double inv_L = 1.0 / static_cast<double>(L);
    for (std::size_t n = 0; n <= plan.N; ++n) {
        const double scale = std::exp(-static_cast<double>(n) * log_rho) * inv_L;
        const double re = out.p[n][0] * scale;
        const double im = out.p[n][1] * scale;
        if (!std::isfinite(re) || !std::isfinite(im))
            throw NumericalError("weights: non-finite coefficient");
        t.omegas[n] = re;
        t.max_imag = std::max(t.max_imag, std::abs(im));
        t.error_bound[n] = plan.discretization_bound(n) + plan.roundoff_bound(n);
    }
    const double limit =
        plan.roundoff_target_met ? plan.tau : std::max(plan.tau, 10.0 * plan.roundoff_estimate);
    if (t.max_imag > limit) {
        std::ostringstream os;
        os << "weights: imaginary residue " << t.max_imag << " exceeds " << limit;
        throw NumericalError(os.str());
    }
    return t;
}

void put_le(std::ostream& os, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("weights: truncated file");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void WeightOptions::validate() const {
    if (!(tau > 0.0)) throw ParameterError("weights: tau must be > 0");
    if (!(safety > 0.0 && safety < 1.0)) throw ParameterError("weights: F_s must lie in (0,1)");
    if (!(eps > 0.0 && eps < 1e-3)) throw ParameterError("weights: eps must lie in (0,1e-3)");
    if (!(r_default > 0.0 && r_default < 1.0))
        throw ParameterError("weights: default radius must lie in (0,1)");
    if (m_samples < 16) throw ParameterError("weights: need at least 16 samples for M");
}

double WeightPlan::discretization_bound(std::size_t n) const {
    return error_bound(M_estimate, rho, r, L, n);
}

double WeightPlan::roundoff_bound(std::size_t n) const {
    return eps * M_estimate * std::exp(-static_cast<double>(n) * std::log(rho));
}

std::string WeightPlan::summary() const {
    std::ostringstream os;
    os.precision(17);
    os << "h=" << h << " N=" << N << " r=" << r << " rho=" << rho << " L=" << L
       << " M_r=" << M_r << " M=" << M_estimate << " tau=" << tau << " F_s=" << safety
       << " lemma=" << (lemma_applicable ? "yes" : "no")
       << " roundoff_target=" << (roundoff_target_met ? "met" : "missed")
       << " roundoff_estimate=" << roundoff_estimate
       << " max_bound=" << discretization_bound(N);
    return os.str();
}

std::uint64_t WeightTable::checksum() const { return fnv1a(omegas); }

double select_radius(std::size_t N, double tau, double safety, double M_r, double eps) {
    if (!(tau > 0.0 && safety > 0.0 && M_r > 0.0 && eps > 0.0))
        throw ParameterError("select_radius: inputs must be positive");
    const double n = static_cast<double>(effective_N(N));
    return std::exp(-std::log(safety * tau / (M_r * eps)) / n);
}

MEstimate estimate_M(const OrderTransition& tr, double h, double r, double rho, std::size_t samples,
                     std::size_t strip_rows) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("estimate_M: r must lie in (0,1)");
    if (!(rho > 0.0 && rho <= r)) throw ParameterError("estimate_M: need 0 < rho <= r");
    if (!(h > 0.0)) throw ParameterError("estimate_M: h must be > 0");
    if (samples < 16) throw ParameterError("estimate_M: too few samples");

    MEstimate m;
    m.circle_bound = std::abs(psi_hat_h(tr, h, Complex(r, 0.0)));
    m.sampled = std::max(kernels::max_abs_psi_h_circle(tr, h, r, samples), zoom_max(tr, h, r));
    if (strip_rows > 0 && rho < r) {
        for (std::size_t j = 0; j < strip_rows; ++j) {
            const double radius = rho + (r - rho) * static_cast<double>(j) / strip_rows;
            m.sampled = std::max(m.sampled, kernels::max_abs_psi_h_circle(tr, h, radius, samples));
        }
    }
    return m;
}

std::size_t select_node_count(double M, double rho, double r, double tau, std::size_t N,
                              std::size_t max_nodes) {
    if (!(M > 0.0 && rho > 0.0 && r > 0.0 && tau > 0.0))
        throw ParameterError("select_node_count: inputs must be positive");
    if (!(rho < r)) throw ParameterError("select_node_count: need rho < r");
    const double a = std::log(r) - std::log(rho);
    const double log_num =
        log_add_exp(std::log(M) - static_cast<double>(N) * std::log(rho), std::log(tau));
    const double need = (log_num - std::log(tau)) / a;
    const double floor_nodes = static_cast<double>(N + 1);
    const double target = std::max(floor_nodes, std::ceil(need));
    if (!std::isfinite(target) || target > static_cast<double>(max_nodes))
        throw InfeasiblePlan("select_node_count: required L exceeds the node budget");
    const std::size_t L = next_pow2(static_cast<std::size_t>(target));
    if (L > max_nodes) throw InfeasiblePlan("select_node_count: required L exceeds the node budget");
    return L;
}

double error_bound(double M, double rho, double r, std::size_t L, std::size_t n) {
    if (!(rho > 0.0 && rho < r && r < 1.0)) throw ParameterError("error_bound: need 0 < rho < r < 1");
    if (L == 0) throw ParameterError("error_bound: L must be > 0");
    const double la = static_cast<double>(L) * (std::log(r) - std::log(rho));
    const double log_num = std::log(M) - static_cast<double>(n) * std::log(rho);
    if (la > 700.0) return std::exp(log_num - la);
    return std::exp(log_num) / std::expm1(la);
}

WeightPlan plan_weights(const ExponentialTransition& tr, double h, std::size_t N,
                        const WeightOptions& opts) {
    opts.validate();
    if (!(h > 0.0) || !std::isfinite(h)) throw ParameterError("weights: h must be > 0");

    const std::vector<Candidate> cands = radius_candidates(tr, h, opts);
    const double n_eff = static_cast<double>(effective_N(N));

    WeightPlan base;
    base.h = h;
    base.N = N;
    base.tau = opts.tau;
    base.safety = opts.safety;
    base.eps = opts.eps;

    std::optional<WeightPlan> best_lemma, best_any;
    for (const auto& c : cands) {
        const double rho = select_radius(N, opts.tau, opts.safety, c.M, opts.eps);
        if (!(rho < c.r)) continue;
        std::size_t L;
        try {
            L = select_node_count(c.M, rho, c.r, opts.tau, N, opts.max_nodes);
        } catch (const InfeasiblePlan&) {
            continue;
        }
        WeightPlan p = base;
        p.r = c.r;
        p.rho = rho;
        p.L = L;
        p.M_r = c.M_r;
        p.M_estimate = c.M;
        p.lemma_applicable = h < 1.0 - c.r;
        p.roundoff_target_met = true;
        p.roundoff_estimate = opts.eps * c.M * std::exp(-n_eff * std::log(rho));
        auto& slot = p.lemma_applicable ? best_lemma : best_any;
        if (!slot || p.L < slot->L) slot = p;
    }
    if (best_lemma) return *best_lemma;
    if (best_any) return *best_any;

    // Round-off target unattainable: minimize the amplification M r^-N.
    const Candidate* pick = nullptr;
    double best_score = 0.0;
    for (const auto& c : cands) {
        const double score = std::log(c.M) - n_eff * std::log(c.r);
        if (!pick || score < best_score) {
            pick = &c;
            best_score = score;
        }
    }
    if (!pick) throw InfeasiblePlan("weights: no admissible radius");
    WeightPlan p = base;
    p.r = pick->r;
    p.rho = pick->r * std::exp(-1.0 / n_eff);
    p.M_r = pick->M_r;
    p.M_estimate = pick->M;
    p.lemma_applicable = h < 1.0 - p.r;
    p.roundoff_target_met = false;
    p.roundoff_estimate = opts.eps * p.M_estimate * std::exp(-n_eff * std::log(p.rho));
    p.L = select_node_count(p.M_estimate, p.rho, p.r, opts.tau, N, opts.max_nodes);
    return p;
}

WeightTable compute_weights_with_plan(const ExponentialTransition& tr, const WeightPlan& plan) {
    return run_pipeline(tr, plan, &kernels::sample_psi_h_circle);
}

WeightTable serial_compute_weights_with_plan(const ExponentialTransition& tr,
                                             const WeightPlan& plan) {
    return run_pipeline(tr, plan, &kernels::serial_sample_psi_h_circle);
}

WeightTable compute_weights(const ExponentialTransition& tr, double h, std::size_t N,
                            const WeightOptions& opts) {
    return compute_weights_with_plan(tr, plan_weights(tr, h, N, opts));
}

std::shared_ptr<const WeightTable> cached_weights(const ExponentialTransition& tr, double h,
                                                  std::size_t N, const WeightOptions& opts) {
    using Key = std::tuple<double, double, double, double, std::size_t, double, double, double,
                           double, std::size_t>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const WeightTable>> cache;
    const Key key{tr.alpha1(), tr.alpha2(), tr.rate(), h,         N,
                  opts.tau,    opts.safety, opts.eps,  opts.r_default, opts.m_samples};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<const WeightTable>(compute_weights(tr, h, N, opts));
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(table)).first->second;
}

std::vector<double> co_weights(double alpha, std::size_t N) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("co_weights: alpha must lie in (0,1]");
    std::vector<double> w(N + 1);
    w[0] = 1.0;
    for (std::size_t j = 1; j <= N; ++j)
        w[j] = w[j - 1] * (static_cast<double>(j) - 1.0 + alpha) / static_cast<double>(j);
    return w;
}

std::uint64_t fnv1a(std::span<const double> values) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (double v : values) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            hash ^= (bits >> (8 * i)) & 0xffu;
            hash *= 0x100000001b3ull;
        }
    }
    return hash;
}

void write_weights(const std::filesystem::path& path, const WeightTable& table) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("weights: cannot open " + tmp.string());
        put_le(os, table.tr.alpha1());
        put_le(os, table.tr.alpha2());
        put_le(os, table.tr.rate());
        put_le(os, table.plan.h);
        put_le(os, static_cast<double>(table.plan.N));
        put_le(os, table.plan.tau);
        for (double w : table.omegas) put_le(os, w);
        if (!os) throw std::runtime_error("weights: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

StoredWeights read_weights(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("weights: cannot open " + path.string());
    StoredWeights s;
    s.alpha1 = get_le(is);
    s.alpha2 = get_le(is);
    s.c = get_le(is);
    s.h = get_le(is);
    const double n = get_le(is);
    if (!(n >= 0.0) || n != std::floor(n) || n > 1e9)
        throw std::runtime_error("weights: corrupt header in " + path.string());
    s.N = static_cast<std::size_t>(n);
    s.tau = get_le(is);
    s.omegas.resize(s.N + 1);
    for (auto& w : s.omegas) w = get_le(is);
    if (is.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("weights: trailing bytes in " + path.string());
    return s;
}

std::string cache_file_name(const ExponentialTransition& tr, double h, std::size_t N, double tau) {
    const double key[] = {tr.alpha1(), tr.alpha2(), tr.rate(), h, static_cast<double>(N), tau};
    std::ostringstream os;
    os << "w_" << std::hex << fnv1a(key) << ".bin";
    return os.str();
}

}  // namespace vofc
