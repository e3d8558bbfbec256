#include "pcl/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <ostream>

#include "json.hpp"

#include "pcl/errors.hpp"
#include "pcl/fft.hpp"

namespace pcl::operators {

using ntheory::gcd;

LatticeFunction LatticeFunction::zeros(std::int64_t offset, std::size_t len) {
    return {offset, std::vector<double>(len, 0.0)};
}

LatticeFunction LatticeFunction::delta(std::int64_t x, double mass) { return {x, {mass}}; }

LatticeFunction LatticeFunction::indicator(const std::vector<std::int64_t>& set) {
    if (set.empty()) return {};
    const auto [lo, hi] = std::minmax_element(set.begin(), set.end());
    LatticeFunction f = zeros(*lo, static_cast<std::size_t>(*hi - *lo + 1));
    for (auto x : set) f.ref(x) = 1.0;
    return f;
}

double LatticeFunction::at(std::int64_t x) const {
    if (x < offset || x >= end()) return 0.0;
    return values[static_cast<std::size_t>(x - offset)];
}

double& LatticeFunction::ref(std::int64_t x) {
    if (x < offset || x >= end()) throw RangeError("LatticeFunction: index outside support");
    return values[static_cast<std::size_t>(x - offset)];
}

double LatticeFunction::l1() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s;
}

double LatticeFunction::l2() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double LatticeFunction::linf() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double LatticeFunction::sum_over(const Interval& I) const {
    double s = 0.0;
    for (std::int64_t x = std::max(I.start, offset); x < std::min(I.end(), end()); ++x)
        s += values[static_cast<std::size_t>(x - offset)];
    return s;
}

double LatticeFunction::bracket(const Interval& I, double r) const {
    if (I.length <= 0) throw DomainError("bracket: empty interval");
    if (!(r > 0.0)) throw DomainError("bracket: r must be positive");
    double s = 0.0;
    for (std::int64_t x = std::max(I.start, offset); x < std::min(I.end(), end()); ++x)
        s += std::pow(std::abs(values[static_cast<std::size_t>(x - offset)]), r);
    return std::pow(s / static_cast<double>(I.length), 1.0 / r);
}

double LatticeFunction::pairing(const LatticeFunction& g) const {
    double s = 0.0;
    for (std::int64_t x = std::max(offset, g.offset); x < std::min(end(), g.end()); ++x) s += at(x) * g.at(x);
    return s;
}

void LatticeFunction::write_csv(std::ostream& os) const {
    os << "x,value\n";
    char buf[64];
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", values[k]);
        os << offset + static_cast<std::int64_t>(k) << ',' << buf << '\n';
    }
}

std::string LatticeFunction::to_json() const {
    nlohmann::json j;
    j["offset"] = offset;
    j["values"] = values;
    return j.dump();
}

LatticeFunction LatticeFunction::from_json(const std::string& s) {
    try {
        const auto j = nlohmann::json::parse(s);
        return {j.at("offset").get<std::int64_t>(), j.at("values").get<std::vector<double>>()};
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("LatticeFunction JSON: ") + e.what());
    }
}

DyadicScaleSet DyadicScaleSet::up_to(std::uint64_t n_max, std::uint64_t n_min) {
    if (!std::has_single_bit(n_max) || !std::has_single_bit(n_min))
        throw DomainError("DyadicScaleSet: bounds must be powers of two");
    DyadicScaleSet s;
    for (std::uint64_t N = n_min; N <= n_max; N <<= 1) s.scales_.push_back(N);
    return s;
}

void DyadicScaleSet::add(std::uint64_t N) {
    if (!std::has_single_bit(N)) throw DomainError("DyadicScaleSet: scale must be a power of two");
    if (!contains(N)) {
        scales_.push_back(N);
        std::sort(scales_.begin(), scales_.end());
    }
}

bool DyadicScaleSet::contains(std::uint64_t N) const {
    return std::binary_search(scales_.begin(), scales_.end(), N);
}

namespace {

// Full linear convolution of two real sequences.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t n = a.size() + b.size() - 1;
    const std::size_t L = fft::next_pow2(n);
    std::vector<cplx> A(L), B(L);
    for (std::size_t i = 0; i < a.size(); ++i) A[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) B[i] = b[i];
    A = fft::forward(A);
    B = fft::forward(B);
    for (std::size_t i = 0; i < L; ++i) A[i] *= B[i];
    A = fft::inverse(A);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = A[i].real();
    return out;
}

// f convolved with a kernel supported on n = 1..K (kernel[n-1]); result on
// [f.offset + 1, f.end() + K - 1].
LatticeFunction convolve_causal(const LatticeFunction& f, const std::vector<double>& kernel, Method method) {
    if (f.values.empty() || kernel.empty()) return {f.offset + 1, {}};
    const std::size_t len = f.size() + kernel.size() - 1;
    std::size_t nnz = 0;
    for (double k : kernel) nnz += k != 0.0;
    if (method == Method::Auto)
        method = static_cast<double>(nnz) * static_cast<double>(f.size()) < 4e6 ? Method::Direct : Method::FFT;
    LatticeFunction out{f.offset + 1, {}};
    if (method == Method::FFT) {
        out.values = convolve(f.values, kernel);
        return out;
    }
    out.values.assign(len, 0.0);
    for (std::size_t n = 0; n < kernel.size(); ++n) {
        const double w = kernel[n];
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < f.size(); ++k) out.values[k + n] += w * f.values[k];
    }
    return out;
}

std::vector<double> mangoldt_kernel(std::uint64_t N, const ArithmeticTables& t) {
    if (N > t.limit) throw RangeError("average: N beyond table limit");
    std::vector<double> k(N);
    for (std::uint64_t n = 1; n <= N; ++n) k[n - 1] = t.mangoldt[n] / static_cast<double>(N);
    return k;
}

}  // namespace

LatticeFunction average(const LatticeFunction& f, std::uint64_t N, const ArithmeticTables& t, Method method) {
    if (N < 1) throw DomainError("average: N must be positive");
    return convolve_causal(f, mangoldt_kernel(N, t), method);
}

LatticeFunction mobius_average(const LatticeFunction& f, std::uint64_t N, double beta, Method method) {
    if (N < 1) throw DomainError("mobius_average: N must be positive");
    if (!(beta >= 0.5 && beta <= 1.0)) throw DomainError("mobius_average: beta must lie in [1/2, 1]");
    std::vector<double> k(N);
    double prev = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) {
        const double cur = std::pow(static_cast<double>(n), beta);
        k[n - 1] = (cur - prev) / (static_cast<double>(N) * beta);
        prev = cur;
    }
    return convolve_causal(f, k, method);
}

LatticeFunction maximal(const LatticeFunction& f, const DyadicScaleSet& scales, const ArithmeticTables& t,
                        Exec exec) {
    const std::uint64_t top = scales.max();
    if (top > t.limit) throw RangeError("maximal: scale beyond table limit");
    LatticeFunction out{f.offset + 1, {}};
    if (f.values.empty() || top == 0) return out;
    const std::size_t len = f.size() + top - 1;
    out.values.assign(len, 0.0);

    // A_{2^j} f = 2^{-j} sum_{k <= j} (Lambda 1_{(2^{k-1}, 2^k]}) * f
    const int K = std::countr_zero(top);
    std::vector<std::vector<double>> blocks(static_cast<std::size_t>(K) + 1);
    auto block = [&](int k) {
        const std::uint64_t lo = (std::uint64_t{1} << k) / 2 + 1;
        const std::uint64_t hi = std::uint64_t{1} << k;
        std::vector<double> kern(hi, 0.0);
        for (std::uint64_t n = lo; n <= hi; ++n) kern[n - 1] = t.mangoldt[n];
        blocks[static_cast<std::size_t>(k)] = convolve_causal(f, kern, Method::Auto).values;
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (int k = K; k >= 1; --k) block(k);
    } else {
        for (int k = 1; k <= K; ++k) block(k);
    }

    std::vector<double> acc(len, 0.0);
    for (int k = 1; k <= K; ++k) {
        const auto& b = blocks[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < b.size(); ++i) acc[i] += b[i];
        const std::uint64_t N = std::uint64_t{1} << k;
        if (!scales.contains(N)) continue;
        const double inv = 1.0 / static_cast<double>(N);
        const std::size_t reach = std::min(len, f.size() + N - 1);
        for (std::size_t i = 0; i < reach; ++i) out.values[i] = std::max(out.values[i], std::abs(acc[i] * inv));
    }
    return out;
}

LatticeFunction maximal_reference(const LatticeFunction& f, const DyadicScaleSet& scales,
                                  const ArithmeticTables& t) {
    const std::uint64_t top = scales.max();
    if (top > t.limit) throw RangeError("maximal_reference: scale beyond table limit");
    LatticeFunction out{f.offset + 1, {}};
    if (f.values.empty() || top == 0) return out;
    out.values.assign(f.size() + top - 1, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int64_t x = out.offset + static_cast<std::int64_t>(i);
        for (std::uint64_t N : scales.scales()) {
            double s = 0.0;
            for (std::uint64_t n = 1; n <= N; ++n)
                if (t.mangoldt[n] != 0.0) s += f.at(x - static_cast<std::int64_t>(n)) * t.mangoldt[n];
            out.values[i] = std::max(out.values[i], std::abs(s / static_cast<double>(N)));
        }
    }
    return out;
}

LatticeFunction maximal_window(const LatticeFunction& f, const DyadicScaleSet& scales, const ArithmeticTables& t,
                               const Interval& window, Exec exec) {
    LatticeFunction out = LatticeFunction::zeros(window.start, static_cast<std::size_t>(std::max<std::int64_t>(window.length, 0)));
    if (f.values.empty() || window.length <= 0) return out;
    const std::int64_t span = window.end() - 1 - f.offset;
    if (span < 1) return out;
    DyadicScaleSet clamped;
    for (std::uint64_t N : scales.scales()) {
        clamped.add(N);
        if (N >= static_cast<std::uint64_t>(span)) break;
    }
    const auto full = maximal(f, clamped, t, exec);
    for (std::int64_t x = window.start; x < window.end(); ++x) out.ref(x) = full.at(x);
    return out;
}

namespace {

std::uint64_t largest_pow2_le(std::uint64_t n) { return std::bit_floor(n); }

void check_tau_input(const LatticeFunction& f, const Interval& I0) {
    if (I0.length < 1) throw DomainError("admissible_tau: empty interval");
    const Interval big = I0.tripled();
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double v = f.values[k];
        if (v < 0.0) throw DomainError("admissible_tau: f must be nonnegative");
        if (v != 0.0 && !big.contains(f.offset + static_cast<std::int64_t>(k)))
            throw DomainError("admissible_tau: f must be supported on 3 I0");
    }
}

}  // namespace

ScaleMap admissible_tau(const LatticeFunction& f, const Interval& I0) {
    check_tau_input(f, I0);
    const Interval big = I0.tripled();
    const double threshold = 10.0 * f.bracket(big, 1.0);
    // prefix[k] = sum of f over [big.start, big.start + k)
    std::vector<double> prefix(static_cast<std::size_t>(big.length) + 1, 0.0);
    for (std::int64_t k = 0; k < big.length; ++k)
        prefix[static_cast<std::size_t>(k) + 1] = prefix[static_cast<std::size_t>(k)] + f.at(big.start + k);
    auto F = [&](std::int64_t y) {  // sum of f over (-inf, y]
        const std::int64_t k = std::clamp<std::int64_t>(y - big.start + 1, 0, big.length);
        return prefix[static_cast<std::size_t>(k)];
    };
    const std::uint64_t top = largest_pow2_le(static_cast<std::uint64_t>(I0.length));
    ScaleMap m{I0.start, std::vector<std::uint64_t>(static_cast<std::size_t>(I0.length), top)};
    for (std::int64_t x = I0.start; x < I0.end(); ++x) {
        std::uint64_t tau = top;
        for (std::uint64_t N = top; N >= 1; N >>= 1) {
            const double avg = (F(x - 1) - F(x - 1 - static_cast<std::int64_t>(N))) / static_cast<double>(N);
            if (avg > threshold) break;
            tau = N;
        }
        m.tau[static_cast<std::size_t>(x - I0.start)] = tau;
    }
    return m;
}

bool is_admissible(const LatticeFunction& f, const Interval& I0, const ScaleMap& tau) {
    const double threshold = 10.0 * f.bracket(I0.tripled(), 1.0);
    const std::uint64_t stop = 8 * std::bit_ceil(static_cast<std::uint64_t>(I0.length));
    for (std::int64_t x = I0.start; x < I0.end(); ++x) {
        const std::uint64_t t = tau.tau.at(static_cast<std::size_t>(x - tau.offset));
        if (!std::has_single_bit(t) || t > static_cast<std::uint64_t>(I0.length)) return false;
        for (std::uint64_t N = t; N <= stop; N <<= 1) {
            double s = 0.0;
            for (std::uint64_t n = 1; n <= N; ++n) s += f.at(x - static_cast<std::int64_t>(n));
            if (s / static_cast<double>(N) > threshold) return false;
        }
    }
    return true;
}

LatticeFunction linearized(const LatticeFunction& f, const ScaleMap& tau, const ArithmeticTables& t) {
    LatticeFunction out = LatticeFunction::zeros(tau.offset, tau.tau.size());
    std::map<std::uint64_t, LatticeFunction> by_scale;
    for (auto N : tau.tau)
        if (!by_scale.count(N)) by_scale.emplace(N, average(f, N, t));
    for (std::size_t i = 0; i < tau.tau.size(); ++i)
        out.values[i] = by_scale.at(tau.tau[i]).at(tau.offset + static_cast<std::int64_t>(i));
    return out;
}

ScaleMap argmax_scales(const LatticeFunction& f, const DyadicScaleSet& scales, const ArithmeticTables& t,
                       const Interval& on) {
    if (scales.scales().empty()) throw DomainError("argmax_scales: empty scale set");
    ScaleMap m{on.start, std::vector<std::uint64_t>(static_cast<std::size_t>(on.length), scales.scales().front())};
    std::vector<double> best(static_cast<std::size_t>(on.length), -1.0);
    for (std::uint64_t N : scales.scales()) {
        const auto a = average(f, N, t);
        for (std::int64_t x = on.start; x < on.end(); ++x) {
            const double v = std::abs(a.at(x));
            auto& b = best[static_cast<std::size_t>(x - on.start)];
            if (v > b) {
                b = v;
                m.tau[static_cast<std::size_t>(x - on.start)] = N;
            }
        }
    }
    return m;
}

LatticeFunction apply_multiplier(const LatticeFunction& f, const multiplier::MultiplierModel& model, std::size_t L) {
    if (L < 2 * (f.size() + model.N())) throw DomainError("apply_multiplier: L must be at least 2 (len + N)");
    std::vector<cplx> a(L, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < f.size(); ++k) a[k] = f.values[k];
    auto A = fft::forward(a);
    const auto m = model.on_grid(L);
    for (std::size_t j = 0; j < L; ++j) A[j] *= m[j];
    const auto y = fft::inverse(A);
    const auto quarter = static_cast<std::int64_t>(L / 4);
    LatticeFunction out = LatticeFunction::zeros(f.offset - quarter, L);
    for (std::size_t i = 0; i < L; ++i) {
        const std::int64_t rel = static_cast<std::int64_t>(i) - quarter;
        const auto k = static_cast<std::size_t>(ntheory::mod(rel, static_cast<std::int64_t>(L)));
        out.values[i] = y[k].real();
    }
    return out;
}

double s_function(std::int64_t x, std::int64_t Q) {
    double prod = 1.0;
    for (auto p : ntheory::primes_below(Q)) {
        if (x % p == 0) return 0.0;
        prod *= static_cast<double>(p) / static_cast<double>(p - 1);
    }
    return prod;
}

namespace {

struct ExactS {
    __int128 num = 0;
    __int128 den = 1;
};

// sum over square-free q with prime factors below Q of mu(q) c_q(x) / phi(q),
// with c_q from Kluyver's divisor formula, over the common denominator
// prod (p - 1).
ExactS s_exact(std::int64_t x, std::int64_t Q) {
    const auto primes = ntheory::primes_below(Q);
    const std::size_t r = primes.size();
    if (r > ntheory::kDefaultSmoothCapBits) throw CapacityError("s_function_oracle: S_Q above cap");
    unsigned xmask = 0;
    for (std::size_t i = 0; i < r; ++i)
        if (x % primes[i] == 0) xmask |= 1u << i;
    ExactS out;
    for (auto p : primes) out.den *= p - 1;
    const unsigned full = (1u << r) - 1;
    for (unsigned qm = 0; qm <= full; ++qm) {
        // D / phi(q) = prod over primes not dividing q of (p - 1)
        __int128 scale = 1;
        for (std::size_t i = 0; i < r; ++i)
            if (!(qm >> i & 1u)) scale *= primes[i] - 1;
        const int omega = std::popcount(qm);
        const unsigned g = qm & xmask;
        __int128 c = 0;
        for (unsigned d = g;; d = (d - 1) & g) {
            __int128 dv = 1;
            for (std::size_t i = 0; i < r; ++i)
                if (d >> i & 1u) dv *= primes[i];
            const int sign = ((omega - std::popcount(d)) & 1) ? -1 : 1;
            c += sign * dv;
            if (d == 0) break;
        }
        const int mu = (omega & 1) ? -1 : 1;
        out.num += mu * c * scale;
    }
    return out;
}

}  // namespace

double s_function_oracle(std::int64_t x, std::int64_t Q) {
    const auto e = s_exact(x, Q);
    return static_cast<double>(static_cast<long double>(e.num) / static_cast<long double>(e.den));
}

bool s_function_agrees(std::int64_t x, std::int64_t Q) {
    const auto e = s_exact(x, Q);
    // closed form: prod p / prod (p - 1) if no p < Q divides x, else 0
    __int128 primorial = 1;
    bool divisible = false;
    for (auto p : ntheory::primes_below(Q)) {
        primorial *= p;
        divisible = divisible || x % p == 0;
    }
    return divisible ? e.num == 0 : e.num == primorial;
}

namespace {

ntheory::DirichletCharacter principal_character(std::int64_t q) {
    ntheory::DirichletCharacter chi;
    chi.modulus = q;
    chi.values.assign(static_cast<std::size_t>(q), cplx{0.0, 0.0});
    for (std::int64_t n = 0; n < q; ++n)
        if (gcd(n, q) == 1) chi.values[static_cast<std::size_t>(n)] = 1.0;
    chi.is_principal = true;
    chi.is_primitive = q == 1;
    return chi;
}

}  // namespace

std::vector<cplx> principal_inner_sums(std::int64_t q, std::int64_t x_lo, std::int64_t x_hi) {
    if (q < 1) throw DomainError("principal_inner_sums: q must be positive");
    const auto chi = principal_character(q);
    std::vector<std::pair<std::int64_t, cplx>> g;
    for (std::int64_t a = 0; a < q; ++a)
        if (gcd(a, q) == 1) g.emplace_back(a, ntheory::gauss_sum(chi, a));
    std::vector<cplx> out;
    for (std::int64_t x = x_lo; x <= x_hi; ++x) {
        cplx s{0.0, 0.0};
        for (const auto& [a, ga] : g)
            s += ga * expi(static_cast<double>(ntheory::mod(x * a, q)) / static_cast<double>(q));
        out.push_back(s);
    }
    return out;
}

cplx principal_inner_sum(std::int64_t q, std::int64_t x) { return principal_inner_sums(q, x, x).front(); }

cplx character_inner_sum(const ntheory::DirichletCharacter& chi, std::int64_t x) {
    const std::int64_t q = chi.modulus;
    cplx s{0.0, 0.0};
    for (std::int64_t a = 0; a < q; ++a) {
        if (gcd(a, q) != 1) continue;
        s += ntheory::gauss_sum(chi, a) * expi(static_cast<double>(ntheory::mod(x * a, q)) / static_cast<double>(q));
    }
    return s;
}

double smoothed_average_kernel(std::int64_t x, std::uint64_t N, int s, double beta) {
    if (!(beta >= 0.5 && beta <= 1.0)) throw DomainError("smoothed_average_kernel: beta must lie in [1/2, 1]");
    double acc = 0.0;
    double prev = 0.0;
    for (std::uint64_t m = 1; m <= N; ++m) {
        const double cur = beta == 1.0 ? static_cast<double>(m) : std::pow(static_cast<double>(m), beta);
        acc += (cur - prev) * multiplier::kernel(static_cast<double>(x - static_cast<std::int64_t>(m)), s);
        prev = cur;
    }
    return acc / (static_cast<double>(N) * beta);
}

namespace {

int level_of(std::int64_t q) { return std::bit_width(static_cast<std::uint64_t>(q)) - 1; }

struct LowTerms {
    std::vector<std::int64_t> q;
    std::vector<int> level;
    int top = 0;
};

LowTerms low_terms(std::int64_t Q) {
    LowTerms t;
    t.q = ntheory::smooth_squarefree(Q);
    for (auto q : t.q) {
        t.level.push_back(level_of(q));
        t.top = std::max(t.top, t.level.back());
    }
    return t;
}

double low_kernel_with(const LowTerms& terms, std::int64_t x, std::uint64_t N) {
    std::vector<double> coef(static_cast<std::size_t>(terms.top) + 1, 0.0);
    for (std::size_t i = 0; i < terms.q.size(); ++i) {
        const std::int64_t q = terms.q[i];
        coef[static_cast<std::size_t>(terms.level[i])] +=
            ntheory::moebius(q) * static_cast<double>(ntheory::ramanujan_sum(q, -x)) / static_cast<double>(ntheory::totient(q));
    }
    double out = 0.0;
    for (int s = 0; s <= terms.top; ++s)
        if (coef[static_cast<std::size_t>(s)] != 0.0) out += coef[static_cast<std::size_t>(s)] * smoothed_average_kernel(x, N, s);
    return out;
}

}  // namespace

double low_kernel(std::int64_t x, std::int64_t Q, std::uint64_t N) { return low_kernel_with(low_terms(Q), x, N); }

std::vector<double> low_kernel_range(std::int64_t x_lo, std::int64_t x_hi, std::int64_t Q, std::uint64_t N, Exec exec) {
    const auto terms = low_terms(Q);
    std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(x_hi - x_lo + 1, 0)));
    const auto n = static_cast<std::int64_t>(out.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = low_kernel_with(terms, x_lo + i, N);
    } else {
        for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = low_kernel_with(terms, x_lo + i, N);
    }
    return out;
}

cplx ex_kernel(std::int64_t x, std::int64_t Q, std::uint64_t N, const ntheory::ExceptionalRegistry& registry) {
    cplx out{0.0, 0.0};
    for (const auto& e : registry.entries()) {
        if (e.q >= Q) continue;
        out += character_inner_sum(e.character, x) * smoothed_average_kernel(x, N, level_of(e.q), e.beta);
    }
    return out;
}

}  // namespace pcl::operators
