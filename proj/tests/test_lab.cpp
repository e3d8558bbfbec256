#include <cmath>
#include <random>

#include "doctest.h"
#include "pcl/errors.hpp"
#include "pcl/lab.hpp"

using namespace pcl;
using namespace pcl::lab;

namespace {

const ArithmeticTables& tables() {
    static const ArithmeticTables t = ntheory::build_tables(1 << 16);
    return t;
}

std::shared_ptr<const ArithmeticTables> shared_tables() {
    static const auto t = std::make_shared<ArithmeticTables>(ntheory::build_tables(1 << 16));
    return t;
}

IntSet range(std::int64_t start, std::int64_t len) {
    IntSet s;
    for (std::int64_t k = 0; k < len; ++k) s.push_back(start + k);
    return s;
}

// N^{-2} sum_{x in F, y in G} 1_{1 <= y - x <= N} Lambda(y - x), literally.
double pairing_oracle(const IntSet& F, const IntSet& G, std::uint64_t N) {
    double s = 0.0;
    for (auto x : F)
        for (auto y : G) {
            const auto d = y - x;
            if (d >= 1 && d <= static_cast<std::int64_t>(N)) s += tables().mangoldt[static_cast<std::size_t>(d)];
        }
    return s / (static_cast<double>(N) * static_cast<double>(N));
}

// <A* 1_F, 1_G> by direct summation over every dyadic scale.
double maximal_pairing_oracle(const IntSet& F, const IntSet& G, std::uint64_t N_max) {
    double total = 0.0;
    for (auto y : G) {
        double best = 0.0;
        for (std::uint64_t N = 1; N <= N_max; N <<= 1) {
            double s = 0.0;
            for (auto x : F) {
                const auto d = y - x;
                if (d >= 1 && d <= static_cast<std::int64_t>(N)) s += tables().mangoldt[static_cast<std::size_t>(d)];
            }
            best = std::max(best, s / static_cast<double>(N));
        }
        total += best;
    }
    return total;
}

}  // namespace

TEST_CASE("Log and phi") {
    CHECK(Log(1.0) == 1.0);
    CHECK(Log(std::exp(-2.0)) == doctest::Approx(3.0));
    CHECK(orlicz_phi(1.0, 2) == doctest::Approx(1.0));
    CHECK(orlicz_phi(std::exp(1.0), 0) == doctest::Approx(2.0));
}

TEST_CASE("improving ratio") {
    const std::uint64_t N = 256;
    const Interval I{0, 256};
    const auto full = improving_ratio(range(0, 256), range(0, 256), I, N, tables());
    CHECK(full.pairing == doctest::Approx(pairing_oracle(range(0, 256), range(0, 256), N)));
    CHECK(full.pairing <= 1.1);
    CHECK(full.ratio_t1 == doctest::Approx(full.pairing));
    CHECK(full.q_suggested == 2);

    const auto empty = improving_ratio({}, range(0, 10), I, N, tables());
    CHECK(empty.degenerate);
    CHECK(empty.pairing == 0.0);

    std::mt19937_64 rng(3);
    std::bernoulli_distribution b(0.2);
    IntSet F, G;
    for (std::int64_t x = 0; x < 256; ++x) {
        if (b(rng)) F.push_back(x);
        if (b(rng)) G.push_back(x);
    }
    const auto r = improving_ratio(F, G, I, N, tables());
    CHECK(r.pairing == doctest::Approx(pairing_oracle(F, G, N)));
    const double prod = r.density_f * r.density_g;
    CHECK(r.ratio_t2 == doctest::Approx(r.pairing / (prod * Log(prod) * Log(prod))));

    IntSet Fs, Gs;
    for (auto x : F) Fs.push_back(x + 1000);
    for (auto x : G) Gs.push_back(x + 1000);
    const auto shifted = improving_ratio(Fs, Gs, {1000, 256}, N, tables());
    CHECK(shifted.pairing == doctest::Approx(r.pairing).epsilon(1e-12));

    // reflection x -> -x swaps the roles of F and G
    IntSet Fr, Gr;
    for (auto it = G.rbegin(); it != G.rend(); ++it) Fr.push_back(-*it);
    for (auto it = F.rbegin(); it != F.rend(); ++it) Gr.push_back(-*it);
    const auto reflected = improving_ratio(Fr, Gr, {-255, 256}, N, tables());
    CHECK(reflected.pairing == doctest::Approx(r.pairing).epsilon(1e-12));
}

TEST_CASE("sharpness experiment") {
    const auto s = sharpness_experiment(10, 16, tables());
    REQUIRE(s.size() == 7);
    const double r0 = s[0].ratio_t0 / std::log(1024.0);
    CHECK(r0 >= 0.3);
    CHECK(r0 <= 1.5);
    std::vector<double> n, r;
    for (const auto& p : s) {
        n.push_back(std::log2(static_cast<double>(p.N)));
        r.push_back(p.ratio_t0);
        CHECK(p.ratio_t1 == doctest::Approx(s[4].ratio_t1).epsilon(0.3));
    }
    CHECK(spearman(n, r) > 0.9);
    // A_N 1_F(0) = theta(N) / N
    double theta = 0.0;
    for (auto p : tables().primes)
        if (p <= 1024) theta += std::log(static_cast<double>(p));
    const double pairing = theta / (1024.0 * 1024.0);
    double count = 0.0;
    for (auto p : tables().primes) count += p <= 1024;
    CHECK(s[0].ratio_t0 == doctest::Approx(pairing * 1025.0 * 1025.0 / count));
}

TEST_CASE("set search") {
    const std::uint64_t N = 512;
    const Interval I{0, 512};
    for (auto st : {Strategy::RandomDensity, Strategy::ArithmeticProgression, Strategy::Primes, Strategy::Intervals,
                    Strategy::AdversarialGreedy}) {
        const auto a = set_search(N, I, st, 12, 99, tables(), Exec::Serial);
        const auto b = set_search(N, I, st, 12, 99, tables(), Exec::Parallel);
        CHECK(a.worst_t1.ratio_t1 == b.worst_t1.ratio_t1);
        CHECK(a.worst_t2.label == b.worst_t2.label);
        CHECK(a.worst_t2.ratio_t2 <= 5.0);
        CHECK(parse_strategy(to_string(st)) == st);
    }
    const auto full = improving_ratio(range(0, 512), range(0, 512), I, N, tables());
    const auto iv = set_search(N, I, Strategy::Intervals, 1, 5, tables());
    CHECK(iv.worst_t1.ratio_t1 == doctest::Approx(full.ratio_t1));
    CHECK_THROWS_AS(parse_strategy("nope"), DomainError);
}

TEST_CASE("q optimizer") {
    CHECK(q_optimizer(1.0) == 2);
    CHECK(q_optimizer(1e-4) == 36);
    std::int64_t prev = q_optimizer(1e-12);
    for (double d = 1e-11; d <= 1.0; d *= 10.0) {
        const auto q = q_optimizer(d);
        CHECK(q <= prev);
        prev = q;
    }
    CHECK(q_optimizer(1e-12, multiplier::Mode::GRH, 1 << 20) == 16);
    CHECK_THROWS_AS(q_optimizer(0.0), DomainError);
}

TEST_CASE("verify sparse") {
    SparseFamily one{{{{0, 8}, {{0, 8}}, 0}}};
    const auto v = verify_sparse(one);
    CHECK(v.valid);
    CHECK(v.density == 1.0);
    SparseFamily overlap{{{{0, 8}, {{0, 4}}, 0}, {{2, 4}, {{2, 2}}, 1}}};
    CHECK_FALSE(verify_sparse(overlap).valid);
    SparseFamily thin{{{{0, 8}, {{0, 1}}, 0}}};
    CHECK_FALSE(verify_sparse(thin).valid);
    SparseFamily outside{{{{0, 8}, {{6, 4}}, 0}}};
    CHECK_FALSE(verify_sparse(outside).valid);
}

TEST_CASE("build sparse") {
    const auto I = range(0, 64);
    const auto b = build_sparse(I, I, 1 << 10, tables());
    CHECK(verify_sparse(b.family).valid);
    CHECK(b.family.items.size() <= 2 * 7);
    CHECK(b.pairing == doctest::Approx(maximal_pairing_oracle(I, I, 1 << 10)));

    const auto pairs = corpus(60, 17, 1 << 12);
    double worst = 0.0;
    for (const auto& p : pairs) {
        CHECK(p.F.size() + p.G.size() <= (1u << 12));
        const auto s = build_sparse(p.F, p.G, 1 << 12, tables());
        const auto v = verify_sparse(s.family);
        CHECK(v.valid);
        CHECK(v.density >= 0.25);
        for (const auto& it : s.family.items) CHECK(4 * it.e_size() >= it.I.length);
        CHECK(s.form_t2 == doctest::Approx(sparse_form_log(s.family, p.F, p.G, 2)));
        worst = std::max(worst, s.domination_t2);
    }
    CHECK(worst <= 20.0);

    IntSet F{3, 9, 40}, G{12, 41, 60, 90};
    CHECK(maximal_pairing(F, G, 64, tables()) == doctest::Approx(maximal_pairing_oracle(F, G, 64)));
    CHECK_THROWS_AS(build_sparse({}, G, 64, tables()), DomainError);
}

TEST_CASE("p sparse form") {
    CHECK(elementary_identity_holds(1));
    CHECK(elementary_identity_holds(2));
    IntSet F{0, 1, 5, 20}, G{3, 7, 8, 30, 31};
    const auto b = build_sparse(F, G, 64, tables());
    double prev = 1e300;
    for (double p : {1.9, 1.5, 1.2, 1.05}) {
        const auto s = p_sparse_form(b.family, F, G, p, 2);
        CHECK(s.form_p <= prev);
        prev = s.form_p;
        CHECK(s.form_log == doctest::Approx(b.form_t2));
    }
    CHECK_THROWS_AS(p_sparse_form(b.family, F, G, 2.0, 2), DomainError);
    // <1_F>_{I,p} = <1_F>_I^{1/p}
    SparseFamily one{{{{0, 32}, {{0, 32}}, 0}}};
    const auto s = p_sparse_form(one, F, G, 1.5, 1);
    CHECK(s.form_p == doctest::Approx(std::pow(4.0 / 32, 1 / 1.5) * std::pow(5.0 / 32, 1 / 1.5) * 32));
}

TEST_CASE("weak type scan of a point mass") {
    const std::uint64_t N_max = 1 << 12;
    const auto r = weak_type_scan({0}, N_max, 2, tables());
    // A* 1_{0}(x) = Lambda(x) / 2^{ceil log2 x}
    std::vector<double> vals;
    for (std::uint64_t x = 1; x <= N_max; ++x) vals.push_back(tables().mangoldt[x] / static_cast<double>(std::bit_ceil(x)));
    for (const auto& lv : r.levels) {
        std::uint64_t c = 0;
        for (double v : vals) c += v > lv.lambda;
        CHECK(lv.count == c);
    }
    CHECK(r.sup_log <= 10.0);
}

TEST_CASE("weak type scan translation locality") {
    const std::uint64_t N_max = 1 << 10;
    const IntSet F{0, 3, 4, 11};
    IntSet FF = F;
    for (auto x : F) FF.push_back(x + 100000);
    const auto a = weak_type_scan(F, N_max, 2, tables());
    const auto b = weak_type_scan(FF, N_max, 2, tables());
    for (std::size_t i = 0; i < a.levels.size(); ++i) {
        const auto two = 2 * static_cast<std::int64_t>(a.levels[i].count);
        CHECK(std::abs(static_cast<std::int64_t>(b.levels[i].count) - two) <= 1);
    }
}

TEST_CASE("distribution function and orlicz norm") {
    const auto d = LatticeFunction::delta(0);
    CHECK(distribution_function(d, 0.5) == 1);
    CHECK(distribution_function(d, 1.0) == 1);
    CHECK(distribution_function(d, 1.5) == 0);
    LatticeFunction f = LatticeFunction::zeros(0, 100);
    std::mt19937_64 rng(4);
    std::exponential_distribution<double> e;
    for (auto& v : f.values) v = e(rng);
    std::uint64_t prev = distribution_function(f, 0.0);
    for (double l = 0.01; l < 8.0; l += 0.01) {
        const auto c = distribution_function(f, l);
        CHECK(c <= prev);
        prev = c;
    }
    for (std::size_t n : {1u, 7u, 100u, 5000u}) {
        IntSet F;
        for (std::size_t k = 0; k < n; ++k) F.push_back(static_cast<std::int64_t>(3 * k));
        const double ref = static_cast<double>(n) * orlicz_phi(static_cast<double>(n), 2);
        const double v = orlicz_norm(LatticeFunction::indicator(F), 2);
        CHECK(v >= ref / 4);
        CHECK(v <= 4 * ref);
    }
}

TEST_CASE("weak orlicz check") {
    const IntSet F{0, 2, 5, 9, 30};
    const auto ind = LatticeFunction::indicator(F);
    const auto r = weak_orlicz_check(ind, 2, 1 << 10, tables());
    CHECK(r.layering_ok);
    REQUIRE(r.layers.size() == 1);
    CHECK(r.layers[0].size == F.size());
    CHECK(r.ratio <= 10.0);
    // indicator: sup lambda |{A* > lambda}| is at least the dyadic weak-type scan value
    const auto w = weak_type_scan(F, 1 << 10, 0, tables());
    for (const auto& lv : w.levels) CHECK(r.sup_weak >= lv.lambda * static_cast<double>(lv.count) - 1e-12);

    LatticeFunction g = LatticeFunction::zeros(0, 64);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = std::ldexp(1.0 + 0.3 * (i % 3), static_cast<int>(i % 5) - 2);
    const auto rg = weak_orlicz_check(g, 2, 1 << 10, tables());
    CHECK(rg.layering_ok);
    CHECK(rg.layers.size() == 5);
    CHECK(rg.ratio <= 10.0);
    g.values[3] = -1.0;
    CHECK_THROWS_AS(weak_orlicz_check(g, 2, 1 << 10, tables()), DomainError);
}

TEST_CASE("major arc error") {
    multiplier::CutoffParams p;
    const auto r = major_arc_error(1 << 16, 1, 1, {}, shared_tables(), p);
    CHECK(r.max_error == doctest::Approx(std::abs(tables().psi(1 << 16) / 65536.0 - 1.0)));
    CHECK(r.error_at_zero == doctest::Approx(r.max_error));
    CHECK_THROWS_AS(major_arc_error(1 << 10, 8, 3, {}, shared_tables(), p), DomainError);
    p.enforce_q_bound = false;
    const auto s = major_arc_error(1 << 10, 8, 3, {}, shared_tables(), p, Exec::Serial);
    const auto t = major_arc_error(1 << 10, 8, 3, {}, shared_tables(), p, Exec::Parallel);
    CHECK(s.max_error == t.max_error);
    CHECK(s.samples == 22 * 3);
    std::vector<double> n, e;
    for (int k = 10; k <= 16; k += 2) {
        n.push_back(k);
        e.push_back(major_arc_error(std::uint64_t{1} << k, 4, 9, {}, shared_tables(), p).max_error);
    }
    CHECK(spearman(n, e) < -0.9);
}

TEST_CASE("hi norm scan") {
    auto p = multiplier::scaled_grh_preset();
    const auto rows = hi_norm_scan({4, 1 << 12}, {1 << 10, 1 << 11}, p, 2, 128, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].multiplier_sup > 0.0);
    // Plancherel: ||Hi f||_2 <= sup |Hi hat| ||f||_2
    CHECK(rows[0].norm_fixed <= rows[0].multiplier_sup + 1e-12);
    CHECK(rows[0].norm_maximal >= rows[0].norm_fixed - 1e-12);
    CHECK(rows[1].hi_first > rows[1].hi_last);
    CHECK(rows[1].multiplier_sup == 0.0);
    CHECK(rows[1].norm_maximal == 0.0);
}

TEST_CASE("spearman") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3}, {5, 5, 5}) == 0.0);
    CHECK_THROWS_AS(spearman({1}, {1}), DomainError);
}
