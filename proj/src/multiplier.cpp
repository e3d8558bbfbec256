#include "pcl/multiplier.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcl/errors.hpp"
#include "pcl/fft.hpp"

namespace pcl::multiplier {

using ntheory::gcd;

std::string to_string(Mode m) { return m == Mode::GRH ? "grh" : "uncond"; }

Mode parse_mode(const std::string& s) {
    if (s == "grh" || s == "GRH") return Mode::GRH;
    if (s == "uncond" || s == "unconditional") return Mode::Unconditional;
    throw DomainError("unknown mode '" + s + "'");
}

double CutoffParams::n_tilde(std::uint64_t N) const {
    const double n = std::log2(static_cast<double>(N));
    if (mode == Mode::GRH) return std::pow(static_cast<double>(N), 0.2);
    return std::exp(c * std::sqrt(n) / 4.0);
}

double CutoffParams::level_cutoff(std::uint64_t N) const { return std::pow(n_tilde(N), alpha_cut); }

void CutoffParams::validate(std::uint64_t N) const {
    if (N < 1) throw DomainError("N must be positive");
    if (!(c > 0.0)) throw DomainError("c must be positive");
    if (!(epsilon > 0.0 && epsilon < 0.25)) throw DomainError("epsilon must lie in (0, 0.25)");
    if (!(alpha_cut > 0.0)) throw DomainError("alpha_cut must be positive");
    if (Q < 1) throw DomainError("Q must be positive");
    if (lo_level_cap < 0 || lo_level_cap > 20) throw DomainError("lo_level_cap must lie in [0, 20]");
    if (enforce_q_bound && static_cast<double>(Q) > n_tilde(N))
        throw DomainError("Q exceeds N-tilde for this mode");
}

CutoffParams scaled_grh_preset(std::int64_t Q) {
    CutoffParams p;
    p.mode = Mode::GRH;
    p.alpha_cut = 2.45;
    p.Q = Q;
    return p;
}

double bump(double xi) {
    const double a = std::abs(xi);
    if (a <= 0.25) return 1.0;
    if (a >= 0.5) return 0.0;
    return 2.0 - 4.0 * a;
}

double bump_inv_kernel(double x) {
    constexpr double pi = std::numbers::pi;
    if (std::abs(x) < 1e-6) {
        // Taylor: 3/4 - (5 pi^2 / 96) x^2
        return 0.75 - 5.0 * pi * pi / 96.0 * x * x;
    }
    return 4.0 * std::sin(0.75 * pi * x) * std::sin(0.25 * pi * x) / (pi * pi * x * x);
}

double eta(double xi, int s) { return bump(std::ldexp(xi, 2 * s)); }

double kernel(double y, int s) { return std::ldexp(bump_inv_kernel(std::ldexp(y, -2 * s)), -2 * s); }

double circle_diff(double xi, double r) {
    double d = xi - r;
    d -= std::floor(d + 0.5);
    return d;
}

double circle_diff(double xi, const Rational& r) {
    const long double x = xi;
    long double d = x - static_cast<long double>(r.a) / static_cast<long double>(r.q);
    d -= std::floor(d + 0.5L);
    return static_cast<double>(d);
}

namespace {

double reduce(double xi) {
    double x = xi - std::floor(xi);
    return x >= 1.0 ? 0.0 : x;
}

cplx phase(std::uint64_t n, double xi) {
    long double t = static_cast<long double>(n) * static_cast<long double>(xi);
    t -= std::floor(t);
    return expi(-static_cast<double>(t));
}

}  // namespace

cplx a_hat(double xi, std::uint64_t N, const ArithmeticTables& t) {
    if (N > t.limit) throw RangeError("a_hat: N beyond table limit");
    cplx acc{0.0, 0.0};
    for (std::uint64_t n = 2; n <= N; ++n)
        if (t.mangoldt[n] != 0.0) acc += t.mangoldt[n] * phase(n, xi);
    return acc / static_cast<double>(N);
}

std::vector<cplx> a_hat_grid(std::uint64_t N, std::size_t M, const ArithmeticTables& t) {
    if (N > t.limit) throw RangeError("a_hat_grid: N beyond table limit");
    if (M == 0) throw DomainError("a_hat_grid: empty grid");
    std::vector<cplx> x(M, cplx{0.0, 0.0});
    for (std::uint64_t n = 2; n <= N; ++n) x[n % M] += t.mangoldt[n];
    auto X = fft::forward(x);
    const double s = 1.0 / static_cast<double>(N);
    for (auto& v : X) v *= s;
    return X;
}

cplx m_hat(double xi, std::uint64_t N) {
    const double d = circle_diff(xi, 0.0);
    if (d == 0.0) return {1.0, 0.0};
    constexpr double pi = std::numbers::pi;
    const double Nd = static_cast<double>(N);
    const double ratio = std::sin(pi * std::fmod(Nd * d, 2.0)) / std::sin(pi * d);
    // e(-(N+1) d / 2), with the phase reduced before scaling
    long double ph = (static_cast<long double>(N) + 1.0L) * static_cast<long double>(d) / 2.0L;
    ph -= std::floor(ph);
    return expi(-static_cast<double>(ph)) * (ratio / Nd);
}

cplx m_beta_hat(double xi, std::uint64_t N, double beta) {
    if (!(beta >= 0.5 && beta <= 1.0)) throw DomainError("m_beta_hat: beta must lie in [1/2, 1]");
    const double d = circle_diff(xi, 0.0);
    cplx acc{0.0, 0.0};
    cplx z{1.0, 0.0};
    const cplx step = expi(-d);
    double prev = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        z = (n % 256 == 1) ? phase(n, d) : z * step;
        const double cur = std::pow(static_cast<double>(n), beta);
        acc += (cur - prev) * z;
        prev = cur;
    }
    return acc / (static_cast<double>(N) * beta);
}

cplx l_aq_hat(double xi, const Rational& aq, std::uint64_t N, const ExceptionalRegistry& registry) {
    if (gcd(aq.a, aq.q) != 1) throw DomainError("l_aq_hat: a/q must be reduced");
    cplx out = ntheory::principal_gauss_sum(aq.q, aq.a) * m_hat(xi, N);
    if (const auto* e = registry.find(aq.q))
        out -= ntheory::gauss_sum(e->character, aq.a) * m_beta_hat(xi, N, e->beta);
    return out;
}

cplx atom_hat(double xi, int s, std::uint64_t N, AtomFilter filter, const CutoffParams& params,
              const ExceptionalRegistry& registry) {
    CutoffParams p = params;
    p.enforce_q_bound = false;
    return MultiplierModel(ModelKind::One, N, p, registry).atom(xi, s, filter);
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::A_hat: return "A_hat";
        case ModelKind::M_hat: return "M_hat";
        case ModelKind::B: return "B";
        case ModelKind::Lo: return "Lo";
        case ModelKind::Hi: return "Hi";
        case ModelKind::Ex: return "Ex";
        case ModelKind::Err: return "Err";
        case ModelKind::ErrPrime: return "ErrPrime";
        case ModelKind::One: return "One";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    for (auto k : {ModelKind::A_hat, ModelKind::M_hat, ModelKind::B, ModelKind::Lo, ModelKind::Hi,
                   ModelKind::Ex, ModelKind::Err, ModelKind::ErrPrime, ModelKind::One})
        if (to_string(k) == s) return k;
    throw DomainError("unknown model kind '" + s + "'");
}

namespace {

bool needs_tables(ModelKind k) { return k == ModelKind::A_hat || k == ModelKind::Err; }

bool needs_q_bound(ModelKind k) {
    return k == ModelKind::Lo || k == ModelKind::Hi || k == ModelKind::Ex || k == ModelKind::ErrPrime;
}

int floor_log2(double x) {
    int s = 0;
    while (std::ldexp(1.0, s + 1) <= x) ++s;
    return s;
}

}  // namespace

MultiplierModel::MultiplierModel(ModelKind kind, std::uint64_t N, CutoffParams params,
                                 ExceptionalRegistry registry,
                                 std::shared_ptr<const ArithmeticTables> tables)
    : kind_(kind), N_(N), params_(params), registry_(std::move(registry)), tables_(std::move(tables)) {
    CutoffParams check = params_;
    if (!needs_q_bound(kind_)) check.enforce_q_bound = false;
    check.validate(N_);
    if (needs_tables(kind_)) {
        if (!tables_) throw DomainError("model " + to_string(kind_) + " needs arithmetic tables");
        tables_->prime_powers(N_, pp_n_, pp_w_);
    }
    for (const auto& e : registry_.entries()) {
        std::vector<cplx> g(static_cast<std::size_t>(e.q));
        for (std::int64_t a = 0; a < e.q; ++a) g[static_cast<std::size_t>(a)] = ntheory::gauss_sum(e.character, a);
        ex_gauss_.push_back(std::move(g));
    }
    int top = -1;
    switch (kind_) {
        case ModelKind::B:
        case ModelKind::Err: top = b_levels().last; break;
        case ModelKind::Lo: top = lo_levels().last; break;
        case ModelKind::Hi: top = hi_levels().last; break;
        case ModelKind::Ex: top = ex_levels().last; break;
        case ModelKind::ErrPrime:
            top = std::max({b_levels().last, lo_levels().last, hi_levels().last, ex_levels().last});
            break;
        default: break;
    }
    if (top >= 0) coeff_ = std::make_shared<ArithmeticTables>(ntheory::build_tables(std::uint64_t{2} << top | 2));
}

MultiplierModel::LevelRange MultiplierModel::b_levels() const {
    const double C = params_.level_cutoff(N_);
    LevelRange r;
    while (std::ldexp(1.0, r.last + 1) < C) ++r.last;
    return r;
}

MultiplierModel::LevelRange MultiplierModel::lo_levels() const {
    double log2_primorial = 0.0;
    for (auto p : ntheory::primes_below(params_.Q)) log2_primorial += std::log2(static_cast<double>(p));
    return {0, std::min(params_.lo_level_cap, floor_log2(std::exp2(log2_primorial)))};
}

MultiplierModel::LevelRange MultiplierModel::hi_levels() const {
    const double C = params_.level_cutoff(N_);
    LevelRange r;
    r.first = 0;
    while (std::ldexp(1.0, r.first) < static_cast<double>(params_.Q)) ++r.first;
    r.last = r.first - 1;
    while (std::ldexp(1.0, r.last + 1) <= C) ++r.last;
    return r;
}

MultiplierModel::LevelRange MultiplierModel::ex_levels() const {
    return {0, floor_log2(static_cast<double>(params_.Q))};
}

double MultiplierModel::principal_coeff(std::int64_t q) const {
    if (coeff_ && static_cast<std::uint64_t>(q) <= coeff_->limit)
        return coeff_->moebius[static_cast<std::size_t>(q)] /
               static_cast<double>(coeff_->totient[static_cast<std::size_t>(q)]);
    return ntheory::moebius(q) / static_cast<double>(ntheory::totient(q));
}

bool MultiplierModel::smooth(std::int64_t q) const {
    if (coeff_ && static_cast<std::uint64_t>(q) <= coeff_->limit) {
        if (coeff_->moebius[static_cast<std::size_t>(q)] == 0) return false;
        std::int64_t m = q;
        while (m > 1) {
            const std::int64_t p = coeff_->spf[static_cast<std::size_t>(m)];
            if (p >= params_.Q) return false;
            m /= p;
        }
        return true;
    }
    return ntheory::in_smooth_squarefree(q, params_.Q);
}

cplx MultiplierModel::atom(double xi_in, int s, AtomFilter filter) const {
    const double xi = reduce(xi_in);
    const double radius = std::ldexp(1.0, -2 * s - 1);
    cplx out{0.0, 0.0};
    for (const auto& r : ntheory::level_rationals_near(xi, s, radius)) {
        const double d = circle_diff(xi, r);
        const double w = eta(d, s);
        if (w == 0.0) continue;
        if (filter == AtomFilter::Exceptional) {
            const auto& entries = registry_.entries();
            for (std::size_t i = 0; i < entries.size(); ++i) {
                if (entries[i].q != r.q) continue;
                out += ex_gauss_[i][static_cast<std::size_t>(r.a)] * m_beta_hat(d, N_, entries[i].beta) * w;
            }
            continue;
        }
        if (filter == AtomFilter::Lo && !smooth(r.q)) continue;
        if (filter == AtomFilter::Hi && smooth(r.q)) continue;
        const double g = principal_coeff(r.q);
        if (g != 0.0) out += g * m_hat(d, N_) * w;
    }
    return out;
}

cplx MultiplierModel::sum_atoms(double xi, LevelRange r, AtomFilter filter) const {
    cplx out{0.0, 0.0};
    for (int s = r.first; s <= r.last; ++s) out += atom(xi, s, filter);
    return out;
}

cplx MultiplierModel::a_hat_sparse(double xi) const {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < pp_n_.size(); ++i) acc += pp_w_[i] * phase(pp_n_[i], xi);
    return acc / static_cast<double>(N_);
}

cplx MultiplierModel::eval_kind(ModelKind k, double xi) const {
    const bool ex = !registry_.empty();
    switch (k) {
        case ModelKind::One: return {1.0, 0.0};
        case ModelKind::M_hat: return m_hat(xi, N_);
        case ModelKind::A_hat: return a_hat_sparse(xi);
        case ModelKind::B: {
            cplx v = sum_atoms(xi, b_levels(), AtomFilter::All);
            if (ex) v -= sum_atoms(xi, b_levels(), AtomFilter::Exceptional);
            return v;
        }
        case ModelKind::Lo: return sum_atoms(xi, lo_levels(), AtomFilter::Lo);
        case ModelKind::Hi: {
            cplx v = sum_atoms(xi, hi_levels(), AtomFilter::Hi);
            if (ex) v -= sum_atoms(xi, hi_levels(), AtomFilter::Exceptional);
            return v;
        }
        case ModelKind::Ex: return ex ? sum_atoms(xi, ex_levels(), AtomFilter::Exceptional) : cplx{0.0, 0.0};
        case ModelKind::Err: return a_hat_sparse(xi) - eval_kind(ModelKind::B, xi);
        case ModelKind::ErrPrime:
            return eval_kind(ModelKind::B, xi) - eval_kind(ModelKind::Lo, xi) - eval_kind(ModelKind::Hi, xi) +
                   eval_kind(ModelKind::Ex, xi);
    }
    return {0.0, 0.0};
}

cplx MultiplierModel::operator()(double xi) const { return eval_kind(kind_, xi); }

std::vector<cplx> MultiplierModel::on_grid(std::size_t M, Exec exec) const {
    std::vector<cplx> out(M);
    const bool fft_part = needs_tables(kind_);
    const ModelKind rest = kind_ == ModelKind::Err ? ModelKind::B : kind_;
    const auto n = static_cast<std::int64_t>(M);
    if (fft_part && kind_ == ModelKind::A_hat) return a_hat_grid(N_, M, *tables_);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1024)
        for (std::int64_t j = 0; j < n; ++j)
            out[static_cast<std::size_t>(j)] = eval_kind(rest, static_cast<double>(j) / static_cast<double>(M));
    } else {
        for (std::int64_t j = 0; j < n; ++j)
            out[static_cast<std::size_t>(j)] = eval_kind(rest, static_cast<double>(j) / static_cast<double>(M));
    }
    if (fft_part) {
        const auto a = a_hat_grid(N_, M, *tables_);
        for (std::size_t j = 0; j < M; ++j) out[j] = a[j] - out[j];
    }
    return out;
}

std::vector<cplx> MultiplierModel::on_window(double xi0, double h, std::size_t count) const {
    std::vector<cplx> out(count, cplx{0.0, 0.0});
    if (!needs_tables(kind_)) {
        for (std::size_t k = 0; k < count; ++k) out[k] = eval_kind(kind_, xi0 + static_cast<double>(k) * h);
        return out;
    }
    // Phase state per prime power, advanced one step of h at a time; restarted
    // from exact phases every 128 steps to keep the drift near machine precision.
    constexpr std::size_t kBlock = 128;
    const std::size_t m = pp_n_.size();
    std::vector<double> zr(m), zi(m), rr(m), ri(m);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx r = phase(pp_n_[i], h);
        rr[i] = r.real();
        ri[i] = r.imag();
    }
    for (std::size_t k0 = 0; k0 < count; k0 += kBlock) {
        const double start = xi0 + static_cast<double>(k0) * h;
        for (std::size_t i = 0; i < m; ++i) {
            const cplx z = pp_w_[i] * phase(pp_n_[i], start);
            zr[i] = z.real();
            zi[i] = z.imag();
        }
        const std::size_t k1 = std::min(count, k0 + kBlock);
        for (std::size_t k = k0; k < k1; ++k) {
            double sr = 0.0, si = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                sr += zr[i];
                si += zi[i];
                const double t = zr[i] * rr[i] - zi[i] * ri[i];
                zi[i] = zr[i] * ri[i] + zi[i] * rr[i];
                zr[i] = t;
            }
            out[k] = {sr, si};
        }
    }
    const double inv = 1.0 / static_cast<double>(N_);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] *= inv;
        if (kind_ == ModelKind::Err) out[k] -= eval_kind(ModelKind::B, xi0 + static_cast<double>(k) * h);
    }
    return out;
}

cplx model_hat(ModelKind kind, double xi, std::uint64_t N, const CutoffParams& params,
               const ExceptionalRegistry& registry, std::shared_ptr<const ArithmeticTables> tables) {
    return MultiplierModel(kind, N, params, registry, std::move(tables))(xi);
}

double vinogradov_curve(double q, std::uint64_t N) {
    const double n = static_cast<double>(N);
    const double l = std::log(n);
    return (1.0 / std::sqrt(q) + std::sqrt(q / n) + std::pow(n, -0.2)) * l * l * l;
}

namespace {

struct Best {
    double value = -1.0;
    double xi = 0.0;
    std::size_t index = 0;

    void offer(double v, double x, std::size_t i) {
        if (v > value || (v == value && i < index)) {
            value = v;
            xi = x;
            index = i;
        }
    }
};

}  // namespace

SupReport sup_scan(const MultiplierModel& A, const MultiplierModel& B, const GridSpec& grid, Exec exec) {
    const std::uint64_t N = A.N();
    const std::size_t M = grid.base_points ? grid.base_points : static_cast<std::size_t>(4 * N);
    if (M < 4 * N) throw DomainError("sup_scan: base grid needs at least 4N points");
    if (grid.refine_factor < 1 || grid.refine_halfwidth < 0) throw DomainError("sup_scan: bad refinement");

    SupReport rep;
    rep.kindA = to_string(A.kind());
    rep.kindB = to_string(B.kind());
    rep.N = N;
    rep.Q = A.params().Q;
    rep.mode = to_string(A.params().mode);

    const auto ga = A.on_grid(M, exec);
    const auto gb = B.on_grid(M, exec);
    Best best;
    for (std::size_t j = 0; j < M; ++j)
        best.offer(std::abs(ga[j] - gb[j]), static_cast<double>(j) / static_cast<double>(M), j);

    // Fine windows around low-denominator rationals.
    std::vector<double> centers;
    for (std::int64_t q = 1; q <= grid.refine_q_cap; ++q)
        for (std::int64_t a = 0; a < q; ++a)
            if (gcd(a, q) == 1) centers.push_back(static_cast<double>(a) / static_cast<double>(q));
    const double h = 1.0 / (static_cast<double>(M) * grid.refine_factor);
    const int K = grid.refine_factor * grid.refine_halfwidth;
    const std::size_t width = static_cast<std::size_t>(2 * K + 1);
    const auto nc = static_cast<std::int64_t>(centers.size());
    std::vector<double> diff(centers.size() * width);
    auto window = [&](std::int64_t c) {
        const double x0 = centers[static_cast<std::size_t>(c)] - K * h;
        const auto va = A.on_window(x0, h, width);
        const auto vb = B.on_window(x0, h, width);
        for (std::size_t k = 0; k < width; ++k) diff[static_cast<std::size_t>(c) * width + k] = std::abs(va[k] - vb[k]);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < nc; ++c) window(c);
    } else {
        for (std::int64_t c = 0; c < nc; ++c) window(c);
    }
    std::size_t refined = 0;
    for (std::size_t c = 0; c < centers.size(); ++c)
        for (std::size_t k = 0; k < width; ++k) {
            const double x = reduce(centers[c] + (static_cast<double>(k) - K) * h);
            const double pos = x * static_cast<double>(M);
            if (pos == std::floor(pos)) continue;  // already on the base grid
            ++refined;
            best.offer(diff[c * width + k], x, M + c * width + k);
        }

    rep.sup = best.value;
    rep.argmax_xi = best.xi;
    rep.grid_points = M;
    rep.refined_points = refined;
    return rep;
}

}  // namespace pcl::multiplier
