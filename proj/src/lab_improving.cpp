#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pcl/errors.hpp"
#include "pcl/lab.hpp"

namespace pcl::lab {

double Log(double x) { return 1.0 + std::abs(std::log(x)); }

double orlicz_phi(double x, int t) { return Log(x) * std::pow(Log(Log(x)), t); }

namespace {

// sum_{y in G} sum_{x in F, 1 <= y - x <= N} Lambda(y - x)
double direct_pair_sum(const IntSet& F, const IntSet& G, std::uint64_t N, const ArithmeticTables& t) {
    double s = 0.0;
    for (auto y : G) {
        auto lo = std::lower_bound(F.begin(), F.end(), y - static_cast<std::int64_t>(N));
        for (; lo != F.end() && *lo < y; ++lo) s += t.mangoldt[static_cast<std::size_t>(y - *lo)];
    }
    return s;
}

double fft_pair_sum(const IntSet& F, const IntSet& G, std::uint64_t N, const ArithmeticTables& t) {
    const auto a = operators::average(LatticeFunction::indicator(F), N, t);
    double s = 0.0;
    for (auto y : G) s += a.at(y);
    return s * static_cast<double>(N);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    return std::mt19937_64(seq);
}

IntSet restrict_to(const IntSet& S, const Interval& I) {
    IntSet out;
    for (auto x : S)
        if (I.contains(x)) out.push_back(x);
    return out;
}

IntSet bernoulli(std::mt19937_64& rng, const Interval& I, double p) {
    std::bernoulli_distribution b(p);
    IntSet out;
    for (std::int64_t x = I.start; x < I.end(); ++x)
        if (b(rng)) out.push_back(x);
    return out;
}

IntSet range(std::int64_t start, std::int64_t len, std::int64_t step = 1) {
    IntSet out;
    for (std::int64_t k = 0; k < len; ++k) out.push_back(start + k * step);
    return out;
}

Interval random_subinterval(std::mt19937_64& rng, const Interval& I) {
    const int bits = std::max(0, static_cast<int>(std::log2(static_cast<double>(I.length))));
    const std::int64_t len = std::min<std::int64_t>(
        I.length, std::int64_t{1} << std::uniform_int_distribution<int>(0, bits)(rng));
    const std::int64_t start = I.start + std::uniform_int_distribution<std::int64_t>(0, I.length - len)(rng);
    return {start, len};
}

IntSet progression_in(std::mt19937_64& rng, const Interval& I) {
    const std::int64_t m = std::uniform_int_distribution<std::int64_t>(1, 64)(rng);
    const std::int64_t a = std::uniform_int_distribution<std::int64_t>(0, m - 1)(rng);
    IntSet out;
    for (std::int64_t x = I.start; x < I.end(); ++x)
        if (ntheory::mod(x - a, m) == 0) out.push_back(x);
    return out;
}

IntSet primes_in(const Interval& I, const ArithmeticTables& t) {
    IntSet out;
    for (std::int64_t x = std::max<std::int64_t>(I.start, 2); x < I.end(); ++x)
        if (static_cast<std::uint64_t>(x) <= t.limit && t.spf[static_cast<std::size_t>(x)] == x) out.push_back(x);
    return out;
}

std::pair<IntSet, IntSet> draw(Strategy s, std::mt19937_64& rng, std::uint64_t N, const Interval& I, std::uint64_t k,
                               const ArithmeticTables& t) {
    std::uniform_int_distribution<int> expo(0, 12);
    switch (s) {
        case Strategy::RandomDensity:
            return {bernoulli(rng, I, std::ldexp(1.0, -expo(rng))), bernoulli(rng, I, std::ldexp(1.0, -expo(rng)))};
        case Strategy::ArithmeticProgression: return {progression_in(rng, I), progression_in(rng, I)};
        case Strategy::Primes: {
            const auto J = random_subinterval(rng, I);
            return {primes_in(I, t), range(J.start, J.length)};
        }
        case Strategy::Intervals: {
            if (k == 0) return {range(I.start, I.length), range(I.start, I.length)};
            const auto A = random_subinterval(rng, I);
            const auto B = random_subinterval(rng, I);
            return {range(A.start, A.length), range(B.start, B.length)};
        }
        case Strategy::AdversarialGreedy: {
            const auto A = random_subinterval(rng, I);
            IntSet F = std::bernoulli_distribution(0.5)(rng) ? range(A.start, A.length)
                                                              : bernoulli(rng, I, std::ldexp(1.0, -expo(rng)));
            if (F.empty()) return {F, {}};
            const auto a = operators::average(LatticeFunction::indicator(F), N, t);
            std::vector<std::pair<double, std::int64_t>> v;
            for (std::int64_t x = I.start; x < I.end(); ++x) v.emplace_back(-a.at(x), x);
            const auto m = static_cast<std::size_t>(random_subinterval(rng, I).length);
            std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
            IntSet G;
            for (std::size_t i = 0; i < m; ++i) G.push_back(v[i].second);
            std::sort(G.begin(), G.end());
            return {F, G};
        }
    }
    return {};
}

}  // namespace

ImprovingTrial improving_ratio(const IntSet& F_in, const IntSet& G_in, const Interval& I, std::uint64_t N,
                               const ArithmeticTables& t) {
    if (N < 1) throw DomainError("improving_ratio: N must be positive");
    if (N > t.limit) throw RangeError("improving_ratio: N beyond table limit");
    if (I.length < 1) throw DomainError("improving_ratio: empty interval");
    const IntSet F = restrict_to(F_in, I);
    const IntSet G = restrict_to(G_in, I);
    ImprovingTrial r;
    r.N = N;
    r.I = I;
    r.size_f = F.size();
    r.size_g = G.size();
    r.density_f = static_cast<double>(F.size()) / static_cast<double>(I.length);
    r.density_g = static_cast<double>(G.size()) / static_cast<double>(I.length);
    if (F.empty() || G.empty()) {
        r.degenerate = true;
        return r;
    }
    const double work = static_cast<double>(F.size()) * static_cast<double>(G.size());
    const double pair_sum = work <= 2e7 ? direct_pair_sum(F, G, N, t) : fft_pair_sum(F, G, N, t);
    const double Nd = static_cast<double>(N);
    r.pairing = pair_sum / (Nd * Nd);
    const double prod = r.density_f * r.density_g;
    r.log_factor = Log(prod);
    r.ratio_t0 = r.pairing / prod;
    r.ratio_t1 = r.ratio_t0 / r.log_factor;
    r.ratio_t2 = r.ratio_t1 / r.log_factor;
    r.q_suggested = q_optimizer(prod);
    return r;
}

std::vector<SharpnessPoint> sharpness_experiment(int n_min, int n_max, const ArithmeticTables& t) {
    if (n_min < 1 || n_max < n_min || n_max > 62) throw DomainError("sharpness_experiment: bad range");
    if ((std::uint64_t{1} << n_max) > t.limit) throw RangeError("sharpness_experiment: N beyond table limit");
    std::vector<SharpnessPoint> out;
    for (int n = n_min; n <= n_max; ++n) {
        const std::uint64_t N = std::uint64_t{1} << n;
        IntSet F;
        for (auto it = t.primes.rbegin(); it != t.primes.rend(); ++it)
            if (*it <= N) F.push_back(-static_cast<std::int64_t>(*it));
        const auto r = improving_ratio(F, {0}, {-static_cast<std::int64_t>(N), static_cast<std::int64_t>(N) + 1}, N, t);
        out.push_back({N, r.ratio_t0, r.ratio_t1});
    }
    return out;
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::RandomDensity: return "random-density";
        case Strategy::ArithmeticProgression: return "arithmetic-progression";
        case Strategy::Primes: return "primes";
        case Strategy::Intervals: return "intervals";
        case Strategy::AdversarialGreedy: return "adversarial-greedy";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s) {
    for (auto v : {Strategy::RandomDensity, Strategy::ArithmeticProgression, Strategy::Primes, Strategy::Intervals,
                   Strategy::AdversarialGreedy})
        if (to_string(v) == s) return v;
    throw DomainError("unknown strategy: " + s);
}

SearchResult set_search(std::uint64_t N, const Interval& I, Strategy strategy, std::size_t trials, std::uint64_t seed,
                        const ArithmeticTables& t, Exec exec) {
    if (trials < 1) throw DomainError("set_search: trials must be at least 1");
    std::vector<ImprovingTrial> results(trials);
    const auto n = static_cast<std::int64_t>(trials);
    auto run = [&](std::int64_t k) {
        auto rng = trial_rng(seed, static_cast<std::uint64_t>(k));
        auto [F, G] = draw(strategy, rng, N, I, static_cast<std::uint64_t>(k), t);
        auto r = improving_ratio(F, G, I, N, t);
        r.label = to_string(strategy) + "#" + std::to_string(k);
        results[static_cast<std::size_t>(k)] = std::move(r);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t k = 0; k < n; ++k) run(k);
    } else {
        for (std::int64_t k = 0; k < n; ++k) run(k);
    }
    SearchResult out;
    out.trials = trials;
    bool have = false;
    for (const auto& r : results) {
        if (r.degenerate) {
            ++out.degenerate;
            continue;
        }
        if (!have || r.ratio_t1 > out.worst_t1.ratio_t1) out.worst_t1 = r;
        if (!have || r.ratio_t2 > out.worst_t2.ratio_t2) out.worst_t2 = r;
        have = true;
    }
    return out;
}

std::int64_t q_optimizer(double density_product, multiplier::Mode mode, std::uint64_t N, double c) {
    if (!(density_product > 0.0 && density_product <= 1.0))
        throw DomainError("q_optimizer: density product must lie in (0, 1]");
    const double target = 1.0 / std::sqrt(density_product);
    std::int64_t Q = 2;
    for (;; ++Q) {
        const double q = static_cast<double>(Q);
        if (q * std::log(q) / std::max(std::log(std::log(q)), 1.0) >= target) break;
    }
    if (N > 0) {
        multiplier::CutoffParams p;
        p.mode = mode;
        p.c = c;
        const auto cap = static_cast<std::int64_t>(std::floor(p.n_tilde(N)));
        Q = std::min(Q, std::max<std::int64_t>(cap, 2));
    }
    return Q;
}

std::vector<SetPair> corpus(std::size_t count, std::uint64_t seed, std::size_t max_union) {
    static const ArithmeticTables small = ntheory::build_tables(1 << 17);
    std::vector<SetPair> out;
    const std::size_t half = max_union / 2;
    auto cap = [&](IntSet s) {
        if (s.size() > half) s.resize(half);
        return s;
    };
    for (std::size_t k = 0; k < count; ++k) {
        auto rng = trial_rng(seed, k);
        std::uniform_int_distribution<int> bits(6, 16);
        const std::int64_t W = std::int64_t{1} << bits(rng);
        const Interval window{0, W};
        SetPair p;
        switch (k % 6) {
            case 0: {
                std::uniform_int_distribution<int> e(0, 8);
                p.F = cap(bernoulli(rng, window, std::ldexp(1.0, -e(rng))));
                p.G = cap(bernoulli(rng, window, std::ldexp(1.0, -e(rng))));
                p.label = "random";
                break;
            }
            case 1: {
                const auto A = random_subinterval(rng, window);
                const auto B = random_subinterval(rng, window);
                p.F = cap(range(A.start, A.length));
                p.G = cap(range(B.start, B.length));
                p.label = "intervals";
                break;
            }
            case 2:
                p.F = cap(progression_in(rng, window));
                p.G = cap(progression_in(rng, window));
                p.label = "progressions";
                break;
            case 3: {
                const auto B = random_subinterval(rng, {0, W + W / 2});
                p.F = cap(primes_in(window, small));
                p.G = cap(range(B.start, B.length));
                p.label = "primes";
                break;
            }
            case 4: {
                std::uniform_int_distribution<std::int64_t> pos(0, std::int64_t{1} << 18);
                std::uniform_int_distribution<std::int64_t> len(1, 256);
                for (int c = 0; c < 8; ++c) {
                    const auto s = pos(rng);
                    for (auto x : range(s, len(rng))) p.F.push_back(x);
                    const auto u = pos(rng);
                    for (auto x : range(u, len(rng))) p.G.push_back(x);
                }
                p.label = "clusters";
                break;
            }
            default: {
                const auto B = random_subinterval(rng, window);
                p.F = {0};
                p.G = cap(range(B.start + 1, B.length));
                p.label = "point";
                break;
            }
        }
        for (auto* s : {&p.F, &p.G}) {
            std::sort(s->begin(), s->end());
            s->erase(std::unique(s->begin(), s->end()), s->end());
        }
        if (p.F.empty()) p.F = {0};
        if (p.G.empty()) p.G = {1};
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<std::pair<std::string, IntSet>> weak_type_corpus(std::uint64_t seed) {
    static const ArithmeticTables small = ntheory::build_tables(1 << 15);
    auto rng = trial_rng(seed, 0);
    std::vector<std::pair<std::string, IntSet>> out;
    out.emplace_back("point", IntSet{0});
    out.emplace_back("random-dense", bernoulli(rng, {0, 1 << 12}, 0.125));
    IntSet sparse;
    std::uniform_int_distribution<std::int64_t> pos(0, (1 << 16) - 1);
    for (int k = 0; k < 256; ++k) sparse.push_back(pos(rng));
    std::sort(sparse.begin(), sparse.end());
    sparse.erase(std::unique(sparse.begin(), sparse.end()), sparse.end());
    out.emplace_back("random-sparse", sparse);
    out.emplace_back("primes", primes_in({0, 1 << 14}, small));
    out.emplace_back("interval-short", range(0, 1 << 10));
    out.emplace_back("interval-long", range(0, 1 << 14));
    out.emplace_back("progression", range(0, 1 << 11, 7));
    return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman: need two equal-length samples");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace pcl::lab
