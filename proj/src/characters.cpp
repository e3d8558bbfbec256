#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcl/errors.hpp"
#include "pcl/ntheory.hpp"

namespace pcl::ntheory {

namespace {

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
    __int128 r = 1 % m;
    __int128 x = mod(b, m);
    while (e > 0) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<std::int64_t>(r);
}

std::int64_t primitive_root_mod_prime(std::int64_t p) {
    if (p == 2) return 1;
    const auto fac = factorize(p - 1);
    for (std::int64_t g = 2;; ++g) {
        bool ok = true;
        for (auto [r, e] : fac) {
            if (powmod(g, (p - 1) / r, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

// One cyclic factor of (Z/p^k)^*: generator and order, with the discrete log of
// every residue mod p^k (or -1 for non-units).
struct CyclicFactor {
    std::int64_t modulus;  // p^k of the owning prime power
    std::int64_t order;
    std::vector<std::int64_t> dlog;
};

std::vector<CyclicFactor> unit_group_factors(std::int64_t p, int k) {
    std::int64_t m = 1;
    for (int i = 0; i < k; ++i) m *= p;
    std::vector<CyclicFactor> out;
    if (p == 2) {
        if (k == 1) return out;  // trivial group
        if (k == 2) {
            CyclicFactor f{m, 2, std::vector<std::int64_t>(static_cast<std::size_t>(m), -1)};
            f.dlog[1] = 0;
            f.dlog[3] = 1;
            out.push_back(std::move(f));
            return out;
        }
        // (Z/2^k)^* = <-1> x <5>
        const std::int64_t half = m / 4;
        CyclicFactor sign{m, 2, std::vector<std::int64_t>(static_cast<std::size_t>(m), -1)};
        CyclicFactor five{m, half, std::vector<std::int64_t>(static_cast<std::size_t>(m), -1)};
        std::int64_t u = 1;
        for (std::int64_t e = 0; e < half; ++e) {
            sign.dlog[static_cast<std::size_t>(u)] = 0;
            five.dlog[static_cast<std::size_t>(u)] = e;
            const std::int64_t neg = m - u;
            sign.dlog[static_cast<std::size_t>(neg)] = 1;
            five.dlog[static_cast<std::size_t>(neg)] = e;
            u = u * 5 % m;
        }
        out.push_back(std::move(sign));
        out.push_back(std::move(five));
        return out;
    }
    std::int64_t g = primitive_root_mod_prime(p);
    if (k > 1 && powmod(g, p - 1, p * p) == 1) g += p;
    const std::int64_t order = m / p * (p - 1);
    CyclicFactor f{m, order, std::vector<std::int64_t>(static_cast<std::size_t>(m), -1)};
    std::int64_t u = 1;
    for (std::int64_t e = 0; e < order; ++e) {
        f.dlog[static_cast<std::size_t>(u)] = e;
        u = static_cast<std::int64_t>(static_cast<__int128>(u) * g % m);
    }
    out.push_back(std::move(f));
    return out;
}

// e(k/L) with the eighth roots of unity snapped to exact values.
cplx root_of_unity(std::int64_t k, std::int64_t L) {
    k = mod(k, L);
    if (k == 0) return {1.0, 0.0};
    if (2 * k == L) return {-1.0, 0.0};
    if (4 * k == L) return {0.0, 1.0};
    if (4 * k == 3 * L) return {0.0, -1.0};
    return expi(static_cast<double>(k) / static_cast<double>(L));
}

bool is_one(const cplx& z) { return std::abs(z - cplx{1.0, 0.0}) < 1e-9; }

bool primitive(const DirichletCharacter& chi, const std::vector<std::pair<std::int64_t, int>>& fac) {
    const std::int64_t q = chi.modulus;
    for (auto [p, e] : fac) {
        const std::int64_t d = q / p;
        bool nontrivial = false;
        for (std::int64_t t = 0; t < p && !nontrivial; ++t) {
            const std::int64_t m = mod(1 + d * t, q);
            if (gcd(m, q) != 1) continue;
            if (!is_one(chi(m))) nontrivial = true;
        }
        if (!nontrivial) return false;
    }
    return true;
}

}  // namespace

std::vector<DirichletCharacter> characters_mod(std::int64_t q, std::int64_t bound) {
    if (q < 1) throw DomainError("characters_mod: q must be positive");
    if (q > bound) throw CapacityError("characters_mod: modulus above configured bound");

    const auto fac = factorize(q);
    std::vector<CyclicFactor> factors;
    for (auto [p, e] : fac)
        for (auto& f : unit_group_factors(p, e)) factors.push_back(std::move(f));

    std::int64_t L = 1;
    for (const auto& f : factors) L = std::lcm(L, f.order);

    // Exponent of n in each cyclic factor, scaled to the common order L.
    const std::size_t nf = factors.size();
    std::vector<std::int64_t> scaled(static_cast<std::size_t>(q) * nf, 0);
    std::vector<bool> unit(static_cast<std::size_t>(q), false);
    for (std::int64_t n = 0; n < q; ++n) {
        if (gcd(n, q) != 1) continue;
        unit[static_cast<std::size_t>(n)] = true;
        for (std::size_t c = 0; c < nf; ++c) {
            const auto& f = factors[c];
            const std::int64_t lg = f.dlog[static_cast<std::size_t>(n % f.modulus)];
            scaled[static_cast<std::size_t>(n) * nf + c] = lg * (L / f.order);
        }
    }

    std::vector<DirichletCharacter> out;
    std::vector<std::int64_t> index(nf, 0);
    while (true) {
        DirichletCharacter chi;
        chi.modulus = q;
        chi.values.assign(static_cast<std::size_t>(q), cplx{0.0, 0.0});
        chi.is_principal = std::all_of(index.begin(), index.end(), [](std::int64_t j) { return j == 0; });
        chi.is_real = true;
        for (std::size_t c = 0; c < nf; ++c)
            if ((2 * index[c]) % factors[c].order != 0) chi.is_real = false;
        for (std::int64_t n = 0; n < q; ++n) {
            if (!unit[static_cast<std::size_t>(n)]) continue;
            std::int64_t k = 0;
            for (std::size_t c = 0; c < nf; ++c)
                k = (k + index[c] * scaled[static_cast<std::size_t>(n) * nf + c]) % L;
            chi.values[static_cast<std::size_t>(n)] = root_of_unity(k, L);
        }
        chi.is_primitive = primitive(chi, fac);
        out.push_back(std::move(chi));

        std::size_t c = 0;
        while (c < nf && ++index[c] == factors[c].order) index[c++] = 0;
        if (c == nf) break;
    }
    return out;
}

bool is_fundamental_discriminant(std::int64_t d) {
    if (d == 0) return false;
    if (mod(d, 4) == 1) return is_squarefree(std::abs(d));
    if (mod(d, 4) != 0) return false;
    const std::int64_t m = d / 4;
    const std::int64_t r = mod(m, 4);
    return (r == 2 || r == 3) && is_squarefree(std::abs(m));
}

int kronecker_symbol(std::int64_t d, std::int64_t n) {
    if (n < 0) throw DomainError("kronecker_symbol: n must be nonnegative");
    if (n == 0) return std::abs(d) == 1 ? 1 : 0;
    int result = 1;
    for (auto [p, e] : factorize(n)) {
        int s;
        if (p == 2) {
            if (d % 2 == 0) {
                s = 0;
            } else {
                const std::int64_t r = mod(d, 8);
                s = (r == 1 || r == 7) ? 1 : -1;
            }
        } else {
            const std::int64_t dm = mod(d, p);
            if (dm == 0) {
                s = 0;
            } else {
                s = powmod(dm, (p - 1) / 2, p) == 1 ? 1 : -1;
            }
        }
        if (s == 0) return 0;
        if (s == -1 && (e % 2 == 1)) result = -result;
    }
    return result;
}

DirichletCharacter kronecker_character(std::int64_t d) {
    if (!is_fundamental_discriminant(d)) throw DomainError("kronecker_character: d is not a fundamental discriminant");
    DirichletCharacter chi;
    chi.modulus = std::abs(d);
    chi.values.resize(static_cast<std::size_t>(chi.modulus));
    for (std::int64_t n = 0; n < chi.modulus; ++n)
        chi.values[static_cast<std::size_t>(n)] = {static_cast<double>(kronecker_symbol(d, n)), 0.0};
    chi.is_principal = (d == 1);
    chi.is_real = true;
    chi.is_primitive = true;
    return chi;
}

}  // namespace pcl::ntheory
