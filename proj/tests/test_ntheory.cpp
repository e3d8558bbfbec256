#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "pcl/errors.hpp"
#include "pcl/ntheory.hpp"

using namespace pcl;
using namespace pcl::ntheory;

namespace {

// Brute-force oracles, independent of the sieve.
bool brute_is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

double brute_mangoldt(std::int64_t n) {
    for (std::int64_t p = 2; p <= n; ++p) {
        if (!brute_is_prime(p)) continue;
        std::int64_t m = n;
        while (m % p == 0) m /= p;
        if (m == 1) return std::log(static_cast<double>(p));
        if (n % p == 0) return 0.0;
    }
    return 0.0;
}

}  // namespace

TEST_CASE("build_tables small values") {
    const auto t = build_tables(10);
    const std::vector<int> mu{1, -1, -1, 0, -1, 1, -1, 0, 0, 1};
    for (int n = 1; n <= 10; ++n) CHECK(t.moebius[n] == mu[n - 1]);
    CHECK(t.totient[10] == 4);
    CHECK(t.mangoldt[9] == doctest::Approx(std::log(3.0)));
    CHECK(t.mangoldt[6] == 0.0);
    CHECK(t.primes == std::vector<std::uint32_t>{2, 3, 5, 7});
}

TEST_CASE("build_tables matches brute force and invariants") {
    const auto t = build_tables(3000);
    for (std::int64_t n = 1; n <= 3000; ++n) {
        CHECK(t.mangoldt[n] == doctest::Approx(brute_mangoldt(n)));
        CHECK(t.moebius[n] == moebius(n));
        CHECK(t.totient[n] == totient(n));
        const std::int64_t p = t.spf[n];
        if (n >= 2) CHECK((t.moebius[n] == 0) == (n % (p * p) == 0 || t.moebius[n / p] == 0));
        if (n >= 2) {
            const double ln = std::log(static_cast<double>(n));
            CHECK(static_cast<double>(n) / (1.0 + std::abs(std::log(1.0 + ln))) <= 3.0 * t.totient[n]);
            CHECK(t.totient[n] <= n - 1);
        }
        CHECK(t.psi_prefix[n] >= t.psi_prefix[n - 1]);
    }
}

TEST_CASE("build_tables errors") {
    CHECK_THROWS_AS(build_tables(1), DomainError);
    CHECK_THROWS_AS(build_tables(1000, 100), CapacityError);
}

TEST_CASE("psi_count examples and range") {
    const auto t = build_tables(100);
    CHECK(psi_count(t, 2, 3, 1) == 0.0);
    CHECK(psi_count(t, 10, 1, 0) == doctest::Approx(std::log(2520.0)));
    CHECK(psi_count(t, 10, 4, 1) == doctest::Approx(std::log(15.0)));
    CHECK_THROWS_AS(psi_count(t, 101, 3, 1), RangeError);
    CHECK_THROWS_AS(psi_count(t, 10, 3, 3), DomainError);
}

TEST_CASE("page_prediction") {
    ExceptionalRegistry empty;
    CHECK(page_prediction(100, 3, 1, empty) == doctest::Approx(50.0));
    CHECK(page_prediction(100, 1, 0, empty) == doctest::Approx(100.0));
    ExceptionalRegistry reg;
    reg.add(5, 0.9, kronecker_character(5));
    // chi_5(2) = -1, phi(5) = 4
    CHECK(page_prediction(100, 5, 2, reg) == doctest::Approx(25.0 + std::pow(100.0, 0.9) / (0.9 * 4.0)));
    CHECK_THROWS_AS(page_prediction(100, 6, 3, empty), DomainError);
}

TEST_CASE("ramanujan sums: examples and oracle sweep") {
    for (int n = -20; n <= 20; ++n) CHECK(ramanujan_sum(1, n) == 1);
    for (int q = 1; q <= 40; ++q) CHECK(ramanujan_sum(q, 0) == totient(q));
    CHECK(ramanujan_sum(4, 2) == -2);
    CHECK(ramanujan_sum_oracle(4, 2) == -2);
    CHECK(ramanujan_sum_oracle(6, 1) == 1);
    CHECK(ramanujan_sum_oracle(2, 1) == -1);
    for (int q = 1; q <= 120; ++q)
        for (int n = -150; n <= 150; n += 7) CHECK(ramanujan_sum(q, n) == ramanujan_sum_oracle(q, n));
}

TEST_CASE("ramanujan sums are multiplicative in q") {
    for (std::int64_t q1 = 1; q1 <= 40; ++q1)
        for (std::int64_t q2 = 1; q1 * q2 <= 1000; ++q2) {
            if (gcd(q1, q2) != 1) continue;
            for (std::int64_t n : {0, 1, 2, 6, 12, 30, 35, 210})
                CHECK(ramanujan_sum(q1 * q2, n) == ramanujan_sum(q1, n) * ramanujan_sum(q2, n));
        }
}

TEST_CASE("characters_mod small groups") {
    auto c1 = characters_mod(1);
    REQUIRE(c1.size() == 1);
    CHECK(c1[0].is_principal);

    auto c5 = characters_mod(5);
    CHECK(c5.size() == 4);
    int real_nonprincipal = 0;
    for (const auto& c : c5) real_nonprincipal += (c.is_real && !c.is_principal);
    CHECK(real_nonprincipal == 1);

    auto c8 = characters_mod(8);
    CHECK(c8.size() == 4);
    for (const auto& c : c8) CHECK(c.is_real);

    CHECK_THROWS_AS(characters_mod(20000), CapacityError);
}

TEST_CASE("characters are multiplicative, unit-supported, orthogonal") {
    for (std::int64_t q = 1; q <= 200; q += (q < 40 ? 1 : 13)) {
        const auto chars = characters_mod(q);
        CHECK(static_cast<std::int64_t>(chars.size()) == totient(q));
        for (const auto& c : chars) {
            for (std::int64_t n = 0; n < q; ++n) {
                const bool unit = gcd(n, q) == 1;
                CHECK((std::abs(c(n)) == doctest::Approx(unit ? 1.0 : 0.0)));
            }
            for (std::int64_t m = 0; m < q; m += 3)
                for (std::int64_t n = 0; n < q; n += 5)
                    CHECK(std::abs(c(m * n) - c(m) * c(n)) < 1e-9);
        }
        for (std::size_t i = 0; i < chars.size(); ++i)
            for (std::size_t j = 0; j < chars.size(); ++j) {
                cplx s{0, 0};
                for (std::int64_t n = 0; n < q; ++n) s += chars[i](n) * std::conj(chars[j](n));
                const double expect = (i == j) ? static_cast<double>(totient(q)) : 0.0;
                CHECK(std::abs(s - expect) < 1e-9);
            }
    }
}

TEST_CASE("primitive flags against conductor brute force") {
    // q = 12: primitive characters number phi_2(12) = 2 (Jordan-style count 12*(1-2/2)... via enumeration)
    for (std::int64_t q : {3, 4, 8, 9, 12, 15, 16, 20}) {
        for (const auto& c : characters_mod(q)) {
            // induced from d | q, d < q iff chi(n) depends only on n mod d among units
            bool induced = false;
            for (std::int64_t d = 1; d < q && !induced; ++d) {
                if (q % d != 0) continue;
                bool ok = true;
                for (std::int64_t n = 0; n < q && ok; ++n) {
                    if (gcd(n, q) != 1) continue;
                    if (n % d == 1 % d && std::abs(c(n) - 1.0) > 1e-9) ok = false;
                }
                induced = ok;
            }
            CHECK(c.is_primitive == !induced);
        }
    }
}

TEST_CASE("kronecker_character") {
    const auto k5 = kronecker_character(5);
    CHECK(k5(2).real() == -1.0);
    CHECK(k5(0).real() == 0.0);
    int matches = 0;
    for (const auto& c : characters_mod(5)) {
        if (!c.is_real || c.is_principal) continue;
        bool same = true;
        for (int n = 0; n < 5; ++n) same = same && std::abs(c(n) - k5(n)) < 1e-12;
        matches += same;
    }
    CHECK(matches == 1);
    CHECK_THROWS_AS(kronecker_character(16), DomainError);
    CHECK_THROWS_AS(kronecker_character(9), DomainError);
    for (std::int64_t d : {-4, -3, -8, 8, 13, -7, 21, 24, -20})
        if (is_fundamental_discriminant(d)) CHECK(kronecker_character(d).modulus == std::abs(d));
}

TEST_CASE("gauss sums") {
    const auto c3 = characters_mod(3);
    CHECK(gauss_sum(c3[0], 1).real() == doctest::Approx(-0.5));
    CHECK(std::abs(gauss_sum(characters_mod(1)[0], 7) - 1.0) < 1e-12);
    const auto g = gauss_sum(kronecker_character(5), 1);
    CHECK(g.real() == doctest::Approx(std::sqrt(5.0) / 4.0));
    CHECK(std::abs(g.imag()) < 1e-12);
    for (std::int64_t q = 1; q <= 300; q += 7)
        for (std::int64_t a = -3; a < q; a += 5) {
            const auto pc = characters_mod(q, 400)[0];
            CHECK(std::abs(gauss_sum(pc, a) - principal_gauss_sum(q, a)) < 1e-12);
        }
}

TEST_CASE("smooth square-free sets") {
    CHECK(smooth_squarefree(2) == std::vector<std::int64_t>{1});
    CHECK(smooth_squarefree(3) == std::vector<std::int64_t>{1, 2});
    CHECK(smooth_squarefree(6) == std::vector<std::int64_t>{1, 2, 3, 5, 6, 10, 15, 30});
    CHECK(smooth_squarefree(50).size() == (1u << 15));
    CHECK_THROWS_AS(smooth_squarefree(60), CapacityError);
    const auto s = smooth_squarefree(12);
    const std::set<std::int64_t> members(s.begin(), s.end());
    for (std::int64_t q = 1; q <= 3000; ++q) CHECK(in_smooth_squarefree(q, 12) == members.count(q) > 0);
}

TEST_CASE("dirichlet_approx") {
    CHECK(dirichlet_approx(0.5, 5) == Rational{1, 2});
    CHECK(dirichlet_approx(0.3, 5) == Rational{1, 3});
    CHECK(dirichlet_approx(0.123, 10) == Rational{1, 8});
    CHECK(dirichlet_approx(0.0, 7) == Rational{0, 1});
    CHECK(dirichlet_approx(0.999, 5) == Rational{0, 1});

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> qd(1, 5000);
    for (int i = 0; i < 100000; ++i) {
        const double xi = u(rng);
        const std::int64_t Q = qd(rng);
        const auto r = dirichlet_approx(xi, Q);
        REQUIRE(r.q <= Q);
        CHECK(gcd(r.a, r.q) == 1);
        double d = std::abs(xi - r.value());
        d = std::min(d, 1.0 - d);
        CHECK(d < 1.0 / (static_cast<double>(r.q) * r.q));
        CHECK(d <= 1.0 / (static_cast<double>(r.q) * (Q + 1)) + 1e-15);
    }
}

TEST_CASE("farey levels") {
    CHECK(farey_level(0) == std::vector<Rational>{{0, 1}});
    const auto l1 = farey_level(1);
    CHECK(l1 == std::vector<Rational>{{1, 3}, {1, 2}, {2, 3}});
    CHECK(farey_level(2).size() == 14);
    CHECK_THROWS_AS(farey_level(20), CapacityError);
    for (int s = 1; s <= 8; ++s) {
        const auto l = farey_level(s);
        const double sep = 1.0 / std::pow(2.0, 2 * (s + 1));
        for (std::size_t i = 1; i < l.size(); ++i) CHECK(l[i].value() - l[i - 1].value() >= sep);
    }
}

TEST_CASE("level_rationals_near matches enumeration of R_s") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s <= 7; ++s) {
        const auto level = farey_level(s);
        const double radius = std::pow(2.0, -2 * s - 1);
        for (int i = 0; i < 400; ++i) {
            // bias half the samples onto the level itself
            double xi = u(rng);
            if (i % 2 == 0) {
                const auto& r = level[static_cast<std::size_t>(i) % level.size()];
                xi = r.value() + (u(rng) - 0.5) * 2.2 * radius;
                xi -= std::floor(xi);
            }
            std::set<std::pair<std::int64_t, std::int64_t>> brute;
            for (const auto& r : level) {
                double d = std::abs(xi - r.value());
                d = std::min(d, 1.0 - d);
                if (d < radius) brute.insert({r.a, r.q});
            }
            std::set<std::pair<std::int64_t, std::int64_t>> got;
            for (const auto& r : level_rationals_near(xi, s, radius)) got.insert({r.a, r.q});
            CHECK(got == brute);
        }
    }
}

TEST_CASE("sieve cache round trip") {
    const auto path = std::filesystem::temp_directory_path() / "pcl_test_sieve.bin";
    const auto t = build_tables(5000);
    save_tables(t, path);
    const auto u = load_tables(path);
    CHECK(u.limit == t.limit);
    CHECK(psi_checksum(u) == psi_checksum(t));
    CHECK(u.primes == t.primes);
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(0);
        f.write("XXXX", 4);
    }
    CHECK_THROWS_AS(load_tables(path), IoError);
    std::filesystem::remove(path);
}
