#include "pcl/ntheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcl/errors.hpp"

namespace pcl {

cplx expi(double x) {
    const double frac = x - std::floor(x);
    return std::polar(1.0, kTwoPi * frac);
}

namespace ntheory {

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
    if (n < 1) throw DomainError("factorize: n must be positive");
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

int moebius(std::int64_t n) {
    int mu = 1;
    for (auto [p, e] : factorize(n)) {
        if (e > 1) return 0;
        mu = -mu;
    }
    return mu;
}

std::int64_t totient(std::int64_t n) {
    std::int64_t phi = n;
    for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
    return phi;
}

bool is_squarefree(std::int64_t n) { return moebius(n) != 0; }

// ---------------------------------------------------------------------------
// Sieve

double ArithmeticTables::psi(std::uint64_t x) const {
    if (x > limit) throw RangeError("psi: x beyond table limit");
    return psi_prefix[x];
}

void ArithmeticTables::prime_powers(std::uint64_t upto, std::vector<std::uint32_t>& n,
                                    std::vector<double>& weight) const {
    if (upto > limit) throw RangeError("prime_powers: beyond table limit");
    n.clear();
    weight.clear();
    for (std::uint64_t k = 2; k <= upto; ++k) {
        if (mangoldt[k] != 0.0) {
            n.push_back(static_cast<std::uint32_t>(k));
            weight.push_back(mangoldt[k]);
        }
    }
}

ArithmeticTables build_tables(std::uint64_t limit, std::uint64_t budget) {
    if (limit < 2) throw DomainError("build_tables: limit must be >= 2");
    if (limit > budget) throw CapacityError("build_tables: limit exceeds memory budget");
    if (limit >= std::numeric_limits<std::uint32_t>::max())
        throw CapacityError("build_tables: limit exceeds 32-bit table entries");

    ArithmeticTables t;
    t.limit = limit;
    const std::size_t size = limit + 1;
    t.spf.assign(size, 0);
    t.moebius.assign(size, 0);
    t.totient.assign(size, 0);
    t.mangoldt.assign(size, 0.0);
    // base[n] = p when n is a power of the prime p, else 0.
    std::vector<std::uint32_t> base(size, 0);
    std::vector<std::uint32_t> primes;

    t.moebius[1] = 1;
    t.totient[1] = 1;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (t.spf[i] == 0) {
            t.spf[i] = static_cast<std::uint32_t>(i);
            t.moebius[i] = -1;
            t.totient[i] = static_cast<std::uint32_t>(i - 1);
            base[i] = static_cast<std::uint32_t>(i);
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            const std::uint64_t ip = i * p;
            if (p > t.spf[i] || ip > limit) break;
            t.spf[ip] = p;
            if (p == t.spf[i]) {
                t.moebius[ip] = 0;
                t.totient[ip] = t.totient[i] * p;
                base[ip] = base[i] == p ? p : 0;
            } else {
                t.moebius[ip] = static_cast<std::int8_t>(-t.moebius[i]);
                t.totient[ip] = t.totient[i] * (p - 1);
                base[ip] = 0;
            }
        }
    }
    for (std::uint64_t n = 2; n <= limit; ++n)
        if (base[n] != 0) t.mangoldt[n] = std::log(static_cast<double>(base[n]));
    t.primes = std::move(primes);
    t.psi_prefix.assign(size, 0.0);
    double acc = 0.0;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        acc += t.mangoldt[n];
        t.psi_prefix[n] = acc;
    }
    return t;
}

double psi_count(const ArithmeticTables& t, std::uint64_t x, std::int64_t q, std::int64_t a) {
    if (q < 1 || a < 0 || a >= q) throw DomainError("psi_count: need q >= 1 and 0 <= a < q");
    if (x > t.limit) throw RangeError("psi_count: x beyond table limit");
    double acc = 0.0;
    const auto step = static_cast<std::uint64_t>(q);
    for (std::uint64_t n = a == 0 ? step : static_cast<std::uint64_t>(a); n <= x; n += step)
        acc += t.mangoldt[n];
    return acc;
}

// ---------------------------------------------------------------------------
// Exceptional registry, Page

void ExceptionalRegistry::add(std::int64_t q, double beta, DirichletCharacter character) {
    if (!(beta > 0.5 && beta < 1.0)) throw DomainError("exceptional beta must lie in (1/2, 1)");
    if (character.modulus != q) throw DomainError("exceptional character modulus mismatch");
    if (!character.is_real || !character.is_primitive || character.is_principal)
        throw DomainError("exceptional character must be real, primitive and non-principal");
    if (!entries_.empty() && entries_.back().q >= q)
        throw DomainError("exceptional moduli must be strictly increasing");
    entries_.push_back({q, beta, std::move(character)});
}

const ExceptionalEntry* ExceptionalRegistry::find(std::int64_t q) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), q,
                               [](const ExceptionalEntry& e, std::int64_t v) { return e.q < v; });
    return (it != entries_.end() && it->q == q) ? &*it : nullptr;
}

double page_prediction(std::uint64_t x, std::int64_t q, std::int64_t a,
                       const ExceptionalRegistry& registry) {
    if (q < 1) throw DomainError("page_prediction: q must be positive");
    if (gcd(a, q) != 1) throw DomainError("page_prediction: gcd(a, q) must be 1");
    const double phi = static_cast<double>(totient(q));
    const double xd = static_cast<double>(x);
    double main = xd / phi;
    if (const auto* e = registry.find(q)) {
        const double chi = e->character(a).real();
        main -= chi * std::pow(xd, e->beta) / (e->beta * phi);
    }
    return main;
}

// ---------------------------------------------------------------------------
// Ramanujan sums

std::int64_t ramanujan_sum(std::int64_t q, std::int64_t n) {
    if (q < 1) throw DomainError("ramanujan_sum: q must be positive");
    const std::int64_t g = gcd(mod(n, q), q);  // gcd(0, q) = q
    const std::int64_t r = q / g;
    return moebius(r) * (totient(q) / totient(r));
}

std::int64_t ramanujan_sum_oracle(std::int64_t q, std::int64_t n) {
    if (q < 1) throw DomainError("ramanujan_sum_oracle: q must be positive");
    cplx acc{0.0, 0.0};
    const std::int64_t nm = mod(n, q);
    for (std::int64_t r = 0; r < q; ++r) {
        if (gcd(r, q) != 1) continue;
        const std::int64_t phase = static_cast<std::int64_t>((static_cast<__int128>(r) * nm) % q);
        acc += expi(static_cast<double>(phase) / static_cast<double>(q));
    }
    const double rounded = std::round(acc.real());
    if (std::abs(acc.imag()) >= 1e-9 || std::abs(acc.real() - rounded) > 1e-6)
        throw NumericalConsistencyError("ramanujan_sum_oracle: sum is not an integer");
    return static_cast<std::int64_t>(rounded);
}

// ---------------------------------------------------------------------------
// Gauss sums

cplx gauss_sum(const DirichletCharacter& chi, std::int64_t a) {
    const std::int64_t q = chi.modulus;
    const std::int64_t am = mod(a, q);
    cplx acc{0.0, 0.0};
    std::int64_t units = 0;
    for (std::int64_t r = 0; r < q; ++r) {
        if (gcd(r, q) != 1) continue;
        ++units;
        const std::int64_t phase = static_cast<std::int64_t>((static_cast<__int128>(r) * am) % q);
        acc += chi.values[static_cast<std::size_t>(r)] *
               expi(static_cast<double>(phase) / static_cast<double>(q));
    }
    return acc / static_cast<double>(units);
}

double principal_gauss_sum(std::int64_t q, std::int64_t a) {
    return static_cast<double>(ramanujan_sum(q, a)) / static_cast<double>(totient(q));
}

// ---------------------------------------------------------------------------
// Smooth square-free integers

std::vector<std::int64_t> primes_below(std::int64_t Q) {
    std::vector<std::int64_t> out;
    if (Q <= 2) return out;
    std::vector<bool> composite(static_cast<std::size_t>(Q), false);
    for (std::int64_t p = 2; p < Q; ++p) {
        if (composite[static_cast<std::size_t>(p)]) continue;
        out.push_back(p);
        for (std::int64_t m = p * p; m < Q; m += p) composite[static_cast<std::size_t>(m)] = true;
    }
    return out;
}

bool in_smooth_squarefree(std::int64_t q, std::int64_t Q) {
    if (q < 1) return false;
    for (std::int64_t p = 2; p < Q && q > 1; ++p) {
        if (q % p != 0) continue;
        q /= p;
        if (q % p == 0) return false;
    }
    return q == 1;
}

std::vector<std::int64_t> smooth_squarefree(std::int64_t Q, std::size_t cap_bits) {
    if (Q < 1) throw DomainError("smooth_squarefree: Q must be positive");
    const auto primes = primes_below(Q);
    if (primes.size() > cap_bits)
        throw CapacityError("smooth_squarefree: 2^pi(Q-1) exceeds the configured cap");
    std::vector<std::int64_t> out{1};
    for (std::int64_t p : primes) {
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] * p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Farey machinery

namespace {

struct Frac {
    std::int64_t p;
    std::int64_t q;
};

// p/q <= xi, compared in extended precision (exact for q < 2^{11} * 2^{53}/2^{53}).
bool frac_le(std::int64_t p, std::int64_t q, long double xi) {
    return static_cast<long double>(p) <= xi * static_cast<long double>(q);
}

}  // namespace

FareyBracket farey_bracket(double xi_in, std::int64_t n) {
    if (n < 1) throw DomainError("farey_bracket: order must be positive");
    if (!(xi_in >= 0.0 && xi_in < 1.0)) throw DomainError("farey_bracket: xi must lie in [0,1)");
    const long double xi = xi_in;
    Frac lo{0, 1};
    Frac hi{1, 1};
    while (lo.q + hi.q <= n) {
        const Frac med{lo.p + hi.p, lo.q + hi.q};
        if (frac_le(med.p, med.q, xi)) {
            // Advance lo toward hi: largest k with lo + k*hi <= xi.
            const std::int64_t kmax = (n - lo.q) / hi.q;
            const long double num = xi * lo.q - lo.p;
            const long double den = hi.p - xi * hi.q;
            std::int64_t k = den > 0 ? static_cast<std::int64_t>(std::min<long double>(num / den, kmax)) : kmax;
            k = std::clamp<std::int64_t>(k, 1, kmax);
            while (k > 1 && !frac_le(lo.p + k * hi.p, lo.q + k * hi.q, xi)) --k;
            while (k < kmax && frac_le(lo.p + (k + 1) * hi.p, lo.q + (k + 1) * hi.q, xi)) ++k;
            lo = {lo.p + k * hi.p, lo.q + k * hi.q};
        } else {
            // Advance hi toward lo: largest k with hi + k*lo > xi.
            const std::int64_t kmax = (n - hi.q) / lo.q;
            const long double num = hi.p - xi * hi.q;
            const long double den = xi * lo.q - lo.p;
            std::int64_t k = den > 0 ? static_cast<std::int64_t>(std::min<long double>(num / den, kmax)) : kmax;
            k = std::clamp<std::int64_t>(k, 1, kmax);
            while (k > 1 && frac_le(hi.p + k * lo.p, hi.q + k * lo.q, xi)) --k;
            while (k < kmax && !frac_le(hi.p + (k + 1) * lo.p, hi.q + (k + 1) * lo.q, xi)) ++k;
            hi = {hi.p + k * lo.p, hi.q + k * lo.q};
        }
    }
    return {{lo.p, lo.q}, {hi.p, hi.q}};
}

Rational dirichlet_approx(double xi, std::int64_t Q) {
    if (Q < 1) throw DomainError("dirichlet_approx: Q must be positive");
    double x = xi - std::floor(xi);
    if (x >= 1.0) x = 0.0;
    const auto [lo, hi] = farey_bracket(x, Q);
    // xi sits on one side of the mediant (denominator > Q); that side's
    // endpoint is within 1/(q(Q+1)).
    const std::int64_t mp = lo.a + hi.a;
    const std::int64_t mq = lo.q + hi.q;
    const long double lhs = static_cast<long double>(x) * mq;
    Rational pick;
    if (lhs < mp) {
        pick = lo;
    } else if (lhs > mp) {
        pick = hi;
    } else {
        pick = (lo.q < hi.q || (lo.q == hi.q && lo.a <= hi.a)) ? lo : hi;
    }
    pick.a = mod(pick.a, pick.q);
    return pick;
}

std::vector<Rational> farey_level(int s, std::int64_t denominator_cap) {
    if (s < 0) throw DomainError("farey_level: s must be nonnegative");
    if (s >= 62 || (std::int64_t{2} << s) > denominator_cap)
        throw CapacityError("farey_level: 2^{s+1} exceeds the denominator cap");
    if (s == 0) return {Rational{0, 1}};
    std::vector<Rational> out;
    const std::int64_t qlo = std::int64_t{1} << s;
    for (std::int64_t q = qlo; q < 2 * qlo; ++q)
        for (std::int64_t a = 1; a < q; ++a)
            if (gcd(a, q) == 1) out.push_back({a, q});
    std::sort(out.begin(), out.end(), [](const Rational& x, const Rational& y) {
        return static_cast<__int128>(x.a) * y.q < static_cast<__int128>(y.a) * x.q;
    });
    return out;
}

std::vector<Rational> level_rationals_near(double xi, int s, double radius) {
    std::vector<Rational> out;
    if (s == 0) {
        if (std::min(xi, 1.0 - xi) < radius) out.push_back({0, 1});
        return out;
    }
    const std::int64_t qlo = std::int64_t{1} << s;
    const std::int64_t n = 2 * qlo - 1;
    auto keep = [&](std::int64_t p, std::int64_t q) {
        if (q >= qlo && q <= n && p > 0 && p < q) out.push_back({p, q});
    };
    const auto [lo, hi] = farey_bracket(xi, n);

    // Walk left: predecessor of a/b given successor c/d is (k a - c)/(k b - d), k = floor((n + d)/b).
    Frac cur{lo.a, lo.q};
    Frac next{hi.a, hi.q};
    while (xi - static_cast<double>(cur.p) / static_cast<double>(cur.q) < radius) {
        keep(cur.p, cur.q);
        if (cur.p == 0) break;
        const std::int64_t k = (n + next.q) / cur.q;
        const Frac prev{k * cur.p - next.p, k * cur.q - next.q};
        next = cur;
        cur = prev;
    }
    // Walk right: successor of c/d given predecessor a/b is (k c - a)/(k d - b), k = floor((n + b)/d).
    Frac prev{lo.a, lo.q};
    cur = {hi.a, hi.q};
    while (static_cast<double>(cur.p) / static_cast<double>(cur.q) - xi < radius) {
        keep(cur.p, cur.q);
        if (cur.p == cur.q) break;
        const std::int64_t k = (n + prev.q) / cur.q;
        const Frac succ{k * cur.p - prev.p, k * cur.q - prev.q};
        prev = cur;
        cur = succ;
    }
    return out;
}

}  // namespace ntheory
}  // namespace pcl
