#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pcl/errors.hpp"
#include "pcl/fft.hpp"
#include "pcl/operators.hpp"

using namespace pcl;
using namespace pcl::operators;
using multiplier::CutoffParams;
using multiplier::ModelKind;
using multiplier::MultiplierModel;

namespace {

const ArithmeticTables& tables() {
    static const ArithmeticTables t = ntheory::build_tables(1 << 14);
    return t;
}

std::shared_ptr<const ArithmeticTables> shared_tables() {
    static const auto t = std::make_shared<ArithmeticTables>(ntheory::build_tables(1 << 14));
    return t;
}

LatticeFunction random_function(std::mt19937_64& rng, std::int64_t offset, std::size_t len, bool nonneg = false) {
    std::uniform_real_distribution<double> u(nonneg ? 0.0 : -1.0, 1.0);
    LatticeFunction f = LatticeFunction::zeros(offset, len);
    for (auto& v : f.values) v = u(rng);
    return f;
}

// N^{-1} sum_{n <= N} f(x - n) Lambda(n), literally.
double average_oracle(const LatticeFunction& f, std::uint64_t N, std::int64_t x) {
    double s = 0.0;
    for (std::uint64_t n = 1; n <= N; ++n) s += f.at(x - static_cast<std::int64_t>(n)) * tables().mangoldt[n];
    return s / static_cast<double>(N);
}

}  // namespace

TEST_CASE("lattice function basics") {
    auto f = LatticeFunction::indicator({-2, 0, 3});
    CHECK(f.offset == -2);
    CHECK(f.size() == 6);
    CHECK(f.l1() == 3.0);
    CHECK(f.at(-1) == 0.0);
    CHECK(f.at(100) == 0.0);
    CHECK_THROWS_AS(f.ref(100), RangeError);
    CHECK(f.bracket({-2, 6}, 1.0) == doctest::Approx(0.5));
    CHECK(f.sum_over({0, 100}) == 2.0);
    const auto g = LatticeFunction::from_json(f.to_json());
    CHECK(g.offset == f.offset);
    CHECK(g.values == f.values);
    CHECK_THROWS_AS(LatticeFunction::from_json("{\"values\":[1]}"), IoError);
    std::ostringstream os;
    LatticeFunction::delta(4, 2.5).write_csv(os);
    CHECK(os.str() == "x,value\n4,2.5\n");
}

TEST_CASE("dyadic scale set") {
    const auto s = DyadicScaleSet::up_to(16, 2);
    CHECK(s.scales() == std::vector<std::uint64_t>{2, 4, 8, 16});
    CHECK(s.contains(8));
    CHECK_FALSE(s.contains(1));
    CHECK_THROWS_AS(DyadicScaleSet::up_to(12), DomainError);
    DyadicScaleSet t;
    CHECK_THROWS_AS(t.add(3), DomainError);
}

TEST_CASE("average of a point mass reads the kernel") {
    const auto a = average(LatticeFunction::delta(0), 4, tables());
    CHECK(a.at(1) == 0.0);
    CHECK(a.at(2) == doctest::Approx(std::log(2.0) / 4));
    CHECK(a.at(3) == doctest::Approx(std::log(3.0) / 4));
    CHECK(a.at(4) == doctest::Approx(std::log(2.0) / 4));
    CHECK(a.at(5) == 0.0);
    CHECK(a.at(0) == 0.0);
}

TEST_CASE("average direct, FFT and oracle agree") {
    std::mt19937_64 rng(11);
    for (std::uint64_t N : {1u, 7u, 64u, 1000u, 4096u}) {
        for (std::size_t len : {1u, 33u, 4096u}) {
            const auto f = random_function(rng, -17, len);
            const auto d = average(f, N, tables(), Method::Direct);
            const auto F = average(f, N, tables(), Method::FFT);
            REQUIRE(d.offset == F.offset);
            REQUIRE(d.size() == F.size());
            REQUIRE(d.size() == len + N - 1);
            double err = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d.values[i] - F.values[i]));
            CHECK(err < 1e-10);
            for (std::int64_t x : {d.offset - 1, d.offset, d.offset + 5, d.end() - 1, d.end()})
                CHECK(d.at(x) == doctest::Approx(average_oracle(f, N, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("average conserves mass and positivity") {
    std::mt19937_64 rng(12);
    const auto f = random_function(rng, 5, 300, true);
    for (std::uint64_t N : {3u, 50u, 512u}) {
        const auto a = average(f, N, tables());
        const double total = std::accumulate(a.values.begin(), a.values.end(), 0.0);
        const double sum_f = std::accumulate(f.values.begin(), f.values.end(), 0.0);
        CHECK(total == doctest::Approx(tables().psi(N) / static_cast<double>(N) * sum_f).epsilon(1e-12));
        for (double v : a.values) CHECK(v >= -1e-12);
    }
}

TEST_CASE("mobius average kernels") {
    const auto one = mobius_average(LatticeFunction::delta(0), 4, 1.0);
    for (std::int64_t x = 1; x <= 4; ++x) CHECK(one.at(x) == doctest::Approx(0.25));
    CHECK(one.at(0) == 0.0);
    const auto half = mobius_average(LatticeFunction::delta(0), 4, 0.5);
    for (int n = 1; n <= 4; ++n) CHECK(half.at(n) == doctest::Approx(0.5 * (std::sqrt(n) - std::sqrt(n - 1.0))));
    CHECK_THROWS_AS(mobius_average(LatticeFunction::delta(0), 4, 0.3), DomainError);
}

TEST_CASE("mobius average transforms by m_beta_hat") {
    std::mt19937_64 rng(13);
    const std::uint64_t N = 20;
    const double beta = 0.7;
    const auto f = random_function(rng, 0, 40);
    const auto g = mobius_average(f, N, beta, Method::Direct);
    const std::size_t L = 128;
    std::vector<cplx> fin(L), gin(L);
    for (std::size_t k = 0; k < f.size(); ++k) fin[k] = f.values[k];
    for (std::size_t k = 0; k < g.size(); ++k) gin[static_cast<std::size_t>(g.offset) + k] = g.values[k];
    const auto F = fft::forward(fin);
    const auto G = fft::forward(gin);
    for (std::size_t j = 0; j < L; ++j) {
        const cplx expect = multiplier::m_beta_hat(static_cast<double>(j) / L, N, beta) * F[j];
        CHECK(std::abs(G[j] - expect) < 1e-10);
    }
}

TEST_CASE("maximal function") {
    const auto s = DyadicScaleSet::up_to(64, 2);
    const auto m = maximal(LatticeFunction::delta(0), s, tables());
    CHECK(m.at(2) == doctest::Approx(std::log(2.0) / 2));

    std::mt19937_64 rng(14);
    const auto f = random_function(rng, -40, 200);
    const auto all = DyadicScaleSet::up_to(256);
    const auto ser = maximal(f, all, tables(), Exec::Serial);
    const auto par = maximal(f, all, tables(), Exec::Parallel);
    const auto ref = maximal_reference(f, all, tables());
    REQUIRE(ser.size() == ref.size());
    REQUIRE(ser.offset == ref.offset);
    double err = 0.0;
    for (std::size_t i = 0; i < ser.size(); ++i) {
        err = std::max(err, std::abs(ser.values[i] - ref.values[i]));
        CHECK(ser.values[i] == par.values[i]);
    }
    CHECK(err < 1e-12);

    for (std::uint64_t N : all.scales()) {
        const auto a = average(f, N, tables());
        for (std::int64_t x = a.offset; x < a.end(); ++x) CHECK(ser.at(x) >= std::abs(a.at(x)) - 1e-12);
    }
    const auto fewer = maximal(f, DyadicScaleSet::up_to(32), tables());
    for (std::int64_t x = fewer.offset; x < fewer.end(); ++x) CHECK(ser.at(x) >= fewer.at(x) - 1e-12);
}

TEST_CASE("maximal window matches the full maximal function") {
    std::mt19937_64 rng(15);
    const auto f = random_function(rng, 0, 30);
    const auto scales = DyadicScaleSet::up_to(1 << 12);
    const Interval w{20, 40};
    const auto win = maximal_window(f, scales, tables(), w);
    const auto full = maximal_reference(f, scales, tables());
    for (std::int64_t x = w.start; x < w.end(); ++x) CHECK(win.at(x) == doctest::Approx(full.at(x)).epsilon(1e-12));
}

TEST_CASE("admissible tau") {
    const Interval I0{0, 32};
    const Interval big = I0.tripled();

    LatticeFunction ones = LatticeFunction::zeros(big.start, static_cast<std::size_t>(big.length));
    for (auto& v : ones.values) v = 1.0;
    const auto t1 = admissible_tau(ones, I0);
    for (auto t : t1.tau) CHECK(t == 1);
    CHECK(is_admissible(ones, I0, t1));

    LatticeFunction spike = LatticeFunction::zeros(big.start, static_cast<std::size_t>(big.length));
    spike.ref(I0.start + I0.length / 2) = static_cast<double>(big.length);
    const auto t2 = admissible_tau(spike, I0);
    CHECK(is_admissible(spike, I0, t2));
    // smallest: no smaller dyadic value is admissible
    for (std::size_t i = 0; i < t2.tau.size(); ++i) {
        if (t2.tau[i] == 1) continue;
        auto smaller = t2;
        smaller.tau[i] /= 2;
        CHECK_FALSE(is_admissible(spike, I0, smaller));
    }
    CHECK(t2.tau[17] > t2.tau[16]);
    CHECK(t2.tau[31] <= t2.tau[17]);

    auto scaled = spike;
    for (auto& v : scaled.values) v *= 7.5;
    CHECK(admissible_tau(scaled, I0).tau == t2.tau);

    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 40; ++trial) {
        const Interval I{trial - 20, 1 + trial % 23};
        const Interval B = I.tripled();
        auto f = random_function(rng, B.start, static_cast<std::size_t>(B.length), true);
        for (auto& v : f.values) v = std::pow(v, 12.0);
        const auto t = admissible_tau(f, I);
        CHECK(is_admissible(f, I, t));
        for (std::size_t i = 0; i < t.tau.size(); ++i) {
            if (t.tau[i] == 1) continue;
            auto smaller = t;
            smaller.tau[i] /= 2;
            CHECK_FALSE(is_admissible(f, I, smaller));
        }
    }

    auto neg = ones;
    neg.values[3] = -1.0;
    CHECK_THROWS_AS(admissible_tau(neg, I0), DomainError);
    auto wide = ones;
    wide.values.push_back(1.0);
    CHECK_THROWS_AS(admissible_tau(wide, I0), DomainError);
}

TEST_CASE("linearized and argmax") {
    std::mt19937_64 rng(17);
    const auto f = random_function(rng, 0, 64);
    const Interval on{10, 100};
    ScaleMap constant{on.start, std::vector<std::uint64_t>(static_cast<std::size_t>(on.length), 16)};
    const auto lin = linearized(f, constant, tables());
    const auto a16 = average(f, 16, tables());
    for (std::int64_t x = on.start; x < on.end(); ++x) CHECK(lin.at(x) == a16.at(x));

    const auto scales = DyadicScaleSet::up_to(128);
    const auto tau = argmax_scales(f, scales, tables(), on);
    const auto lin2 = linearized(f, tau, tables());
    const auto m = maximal(f, scales, tables());
    for (std::int64_t x = on.start; x < on.end(); ++x) {
        CHECK(std::abs(lin2.at(x)) == doctest::Approx(m.at(x)).epsilon(1e-12));
        CHECK(std::abs(lin.at(x)) <= m.at(x) + 1e-12);
    }
}

TEST_CASE("apply_multiplier identity and prime average") {
    std::mt19937_64 rng(18);
    const std::uint64_t N = 64;
    const auto f = random_function(rng, -5, 50);
    CutoffParams p;
    const MultiplierModel one(ModelKind::One, N, p);
    const auto id = apply_multiplier(f, one, 256);
    for (std::int64_t x = id.offset; x < id.end(); ++x) CHECK(std::abs(id.at(x) - f.at(x)) < 1e-10);
    CHECK_THROWS_AS(apply_multiplier(f, one, 200), DomainError);

    const MultiplierModel A(ModelKind::A_hat, N, p, {}, shared_tables());
    const auto viaA = apply_multiplier(f, A, 256);
    const auto avg = average(f, N, tables());
    for (std::int64_t x = viaA.offset; x < viaA.end(); ++x) CHECK(std::abs(viaA.at(x) - avg.at(x)) < 1e-8);
}

TEST_CASE("low kernel matches the periodised Lo operator") {
    const std::uint64_t N = 16;
    CutoffParams p;
    p.Q = 2;
    p.enforce_q_bound = false;
    const MultiplierModel lo(ModelKind::Lo, N, p);
    const auto k = low_kernel_range(-20, 40, 2, N, Exec::Serial);
    double prev = 0.0;
    for (int d = 0; d < 4; ++d) {
        const std::size_t L = std::size_t{256} << d;
        const auto y = apply_multiplier(LatticeFunction::delta(0), lo, L);
        double err = 0.0;
        for (std::int64_t x = -20; x <= 40; ++x) err = std::max(err, std::abs(y.at(x) - k[static_cast<std::size_t>(x + 20)]));
        if (d > 0) CHECK(err < 0.6 * prev);
        prev = err;
    }
    CHECK(prev < 1e-3);

    // Q = 2: plain (M_N conv K_0)
    for (std::int64_t x : {-7, 0, 5, 30})
        CHECK(low_kernel(x, 2, N) == doctest::Approx(smoothed_average_kernel(x, N, 0)));
    // dist^{-2} tail
    const double far1 = std::abs(low_kernel(1000, 2, N));
    const double far2 = std::abs(low_kernel(2000, 2, N));
    CHECK(far1 < 1e-5);
    CHECK(far2 <= far1);

    const auto par = low_kernel_range(-20, 40, 2, N, Exec::Parallel);
    CHECK(par == k);
}

TEST_CASE("low kernel with several moduli matches the Lo operator") {
    const std::uint64_t N = 32;
    CutoffParams p;
    p.Q = 6;
    p.enforce_q_bound = false;
    const MultiplierModel lo(ModelKind::Lo, N, p);
    const auto y = apply_multiplier(LatticeFunction::delta(0), lo, 1 << 14);
    for (std::int64_t x = -30; x <= 60; x += 3) CHECK(std::abs(y.at(x) - low_kernel(x, 6, N)) < 1e-3);
}

TEST_CASE("s function examples") {
    CHECK(s_function(1, 6) == doctest::Approx(3.75));
    CHECK(s_function_oracle(1, 6) == doctest::Approx(3.75));
    CHECK(s_function_oracle(2, 6) == 0.0);
    CHECK(s_function(2, 6) == 0.0);
    CHECK(s_function_oracle(0, 6) == 0.0);
    CHECK(s_function_agrees(7, 6));
}

TEST_CASE("s function closed form matches the literal sum") {
    for (std::int64_t Q : {4, 6, 10, 20, 50}) {
        for (std::int64_t x = -10000; x <= 10000; x += (Q == 50 ? 37 : 1)) {
            if (x == 0) continue;
            if (!s_function_agrees(x, Q)) FAIL("disagreement at x=" << x << " Q=" << Q);
        }
    }
    CHECK_THROWS_AS(s_function_oracle(1, 100), CapacityError);
}

TEST_CASE("s function is bounded by 3 log Q") {
    for (std::int64_t Q = 3; Q <= 100; ++Q) {
        double sup = 0.0;
        for (std::int64_t x = 1; x <= 2000; ++x) sup = std::max(sup, std::abs(s_function(x, Q)));
        CHECK(sup <= 3.0 * std::log(static_cast<double>(Q)));
    }
}

TEST_CASE("Cohen identity") {
    for (std::int64_t q = 1; q <= 300; q += (q < 40 ? 1 : 13)) {
        std::vector<std::int64_t> units;
        for (std::int64_t r = 0; r < q; ++r)
            if (ntheory::gcd(r, q) == 1) units.push_back(r);
        for (std::int64_t x = -300; x <= 300; x += 7) {
            std::int64_t lhs = 0;
            for (auto r : units) lhs += ntheory::ramanujan_sum(q, r + x);
            CHECK(lhs == ntheory::moebius(q) * ntheory::ramanujan_sum(q, -x));
        }
        const auto sums = principal_inner_sums(q, -300, 300);
        for (std::int64_t x = -300; x <= 300; ++x) {
            const double expect = ntheory::moebius(q) * static_cast<double>(ntheory::ramanujan_sum(q, -x)) /
                                  static_cast<double>(ntheory::totient(q));
            CHECK(std::abs(sums[static_cast<std::size_t>(x + 300)] - expect) < 1e-9);
        }
    }
    CHECK(std::abs(principal_inner_sum(30, 7) - principal_inner_sums(30, 7, 7)[0]) < 1e-15);
}

TEST_CASE("exceptional inner sums") {
    for (std::int64_t d = -100; d <= 100; ++d) {
        if (!ntheory::is_fundamental_discriminant(d)) continue;
        const auto chi = ntheory::kronecker_character(d);
        const std::int64_t q = chi.modulus;
        const double ratio = static_cast<double>(q) / static_cast<double>(ntheory::totient(q));
        for (std::int64_t x = 0; x < q; ++x) {
            const double expect = ntheory::gcd(x, q) == 1 ? ratio : 0.0;
            CHECK(std::abs(std::abs(character_inner_sum(chi, x)) - expect) < 1e-9);
        }
    }
}

TEST_CASE("ex kernel") {
    ntheory::ExceptionalRegistry empty;
    CHECK(ex_kernel(3, 10, 16, empty) == cplx{0.0, 0.0});

    ntheory::ExceptionalRegistry r;
    r.add(5, 0.9, ntheory::kronecker_character(5));
    const std::uint64_t N = 32;
    for (std::int64_t x = -20; x <= 60; ++x) {
        const double k = smoothed_average_kernel(x, N, 2, 0.9);
        const double inner = x % 5 == 0 ? 0.0 : 1.25;
        CHECK(std::abs(ex_kernel(x, 10, N, r)) == doctest::Approx(inner * std::abs(k)).epsilon(1e-9));
    }
    CHECK(std::abs(ex_kernel(3, 5, N, r)) == 0.0);

    r.add(8, 0.8, ntheory::kronecker_character(8));
    double sup_kernel = 0.0;
    double sup_ex = 0.0;
    for (std::int64_t x = -50; x <= 100; ++x) {
        sup_ex = std::max(sup_ex, std::abs(ex_kernel(x, 20, N, r)));
        sup_kernel = std::max({sup_kernel, std::abs(smoothed_average_kernel(x, N, 2, 0.9)),
                               std::abs(smoothed_average_kernel(x, N, 3, 0.8))});
    }
    CHECK(sup_ex <= 2.0 * 2.0 * 2.0 * sup_kernel);
}
