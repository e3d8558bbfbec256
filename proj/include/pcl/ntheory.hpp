#pragma once

// Exact arithmetic-function infrastructure: sieved tables, Dirichlet characters,
// Gauss and Ramanujan sums, smooth square-free sets, Farey levels and rational
// approximation.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace pcl {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// e(x) = exp(2 pi i x)
cplx expi(double x);

namespace ntheory {

inline constexpr std::uint64_t kDefaultTableBudget = std::uint64_t{1} << 27;
inline constexpr std::int64_t kDefaultCharacterBound = 10'000;
inline constexpr std::size_t kDefaultSmoothCapBits = 15;
inline constexpr std::int64_t kDefaultFareyDenominatorCap = std::int64_t{1} << 12;

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t mod(std::int64_t a, std::int64_t m);

// Trial-division factorisation into (prime, exponent) pairs; n >= 1.
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);
int moebius(std::int64_t n);
std::int64_t totient(std::int64_t n);
bool is_squarefree(std::int64_t n);

// Sieved tables indexed 0..limit (index 0 is unused and holds zeros).
struct ArithmeticTables {
    std::uint64_t limit = 0;
    std::vector<double> mangoldt;
    std::vector<std::int8_t> moebius;
    std::vector<std::uint32_t> totient;
    std::vector<std::uint32_t> spf;
    std::vector<std::uint32_t> primes;
    std::vector<double> psi_prefix;

    // Chebyshev psi(x) = sum_{n <= x} Lambda(n).
    double psi(std::uint64_t x) const;

    // Prime powers n <= limit with their Lambda(n), ascending. Used by the
    // sparse exponential sums of the multiplier engine.
    void prime_powers(std::uint64_t upto, std::vector<std::uint32_t>& n,
                      std::vector<double>& weight) const;
};

ArithmeticTables build_tables(std::uint64_t limit,
                              std::uint64_t budget = kDefaultTableBudget);

// Binary cache: "PCL1", limit as u64 LE, then mangoldt (f64 LE), moebius (i8),
// totient (u32 LE), spf (u32 LE), each limit+1 entries.
void save_tables(const ArithmeticTables& t, const std::filesystem::path& path);
ArithmeticTables load_tables(const std::filesystem::path& path);

// FNV-1a over the bit patterns of psi_prefix.
std::uint64_t psi_checksum(const ArithmeticTables& t);

double psi_count(const ArithmeticTables& t, std::uint64_t x, std::int64_t q, std::int64_t a);

struct Rational {
    std::int64_t a = 0;
    std::int64_t q = 1;

    double value() const { return static_cast<double>(a) / static_cast<double>(q); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

struct DirichletCharacter {
    std::int64_t modulus = 1;
    std::vector<cplx> values;
    bool is_principal = true;
    bool is_real = true;
    bool is_primitive = true;

    cplx operator()(std::int64_t n) const { return values[static_cast<std::size_t>(mod(n, modulus))]; }
};

struct ExceptionalEntry {
    std::int64_t q;
    double beta;
    DirichletCharacter character;
};

// Hypothetical exceptional characters, keyed by modulus. Empty by default;
// a missing modulus means chi_q = 0 and beta_q = 1.
class ExceptionalRegistry {
public:
    void add(std::int64_t q, double beta, DirichletCharacter character);
    const ExceptionalEntry* find(std::int64_t q) const;
    const std::vector<ExceptionalEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    std::vector<ExceptionalEntry> entries_;
};

double page_prediction(std::uint64_t x, std::int64_t q, std::int64_t a,
                       const ExceptionalRegistry& registry);

// c_q(n) via mu(q/g) phi(q) / phi(q/g), g = gcd(n, q).
std::int64_t ramanujan_sum(std::int64_t q, std::int64_t n);
// c_q(n) as the literal exponential sum over A_q, rounded.
std::int64_t ramanujan_sum_oracle(std::int64_t q, std::int64_t n);

std::vector<DirichletCharacter> characters_mod(std::int64_t q,
                                               std::int64_t bound = kDefaultCharacterBound);
bool is_fundamental_discriminant(std::int64_t d);
int kronecker_symbol(std::int64_t d, std::int64_t n);
DirichletCharacter kronecker_character(std::int64_t d);

// (1/phi(q)) sum_{r in A_q} chi(r) e(ra/q)
cplx gauss_sum(const DirichletCharacter& chi, std::int64_t a);
// G(1_{A_q}, a) = c_q(a) / phi(q), exact closed form.
double principal_gauss_sum(std::int64_t q, std::int64_t a);

std::vector<std::int64_t> primes_below(std::int64_t Q);
// True when q is square-free and every prime factor is < Q.
bool in_smooth_squarefree(std::int64_t q, std::int64_t Q);
std::vector<std::int64_t> smooth_squarefree(std::int64_t Q,
                                            std::size_t cap_bits = kDefaultSmoothCapBits);

// Consecutive fractions lo <= xi < hi of the Farey sequence of order n
// (xi in [0,1)); hi may be 1/1.
struct FareyBracket {
    Rational lo;
    Rational hi;
};
FareyBracket farey_bracket(double xi, std::int64_t n);

Rational dirichlet_approx(double xi, std::int64_t Q);

std::vector<Rational> farey_level(int s, std::int64_t denominator_cap = kDefaultFareyDenominatorCap);

// All a/q with a in A_q, 2^s <= q < 2^{s+1} (or 0/1 for s = 0) within
// distance < radius of xi on the circle. xi in [0,1). At most a handful.
std::vector<Rational> level_rationals_near(double xi, int s, double radius);

}  // namespace ntheory
}  // namespace pcl
