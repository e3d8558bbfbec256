#include <algorithm>
#include <cmath>
#include <random>

#include "pcl/errors.hpp"
#include "pcl/fft.hpp"
#include "pcl/lab.hpp"

namespace pcl::lab {

using multiplier::CutoffParams;
using multiplier::ModelKind;
using multiplier::MultiplierModel;

MajorArcReport major_arc_error(std::uint64_t N, std::int64_t Q, std::size_t samples_per_arc,
                               const ntheory::ExceptionalRegistry& registry,
                               std::shared_ptr<const ArithmeticTables> tables, const CutoffParams& params,
                               Exec exec) {
    if (!tables || N > tables->limit) throw RangeError("major_arc_error: tables must cover N");
    if (Q < 1) throw DomainError("major_arc_error: Q must be positive");
    if (samples_per_arc < 1) throw DomainError("major_arc_error: need at least one sample per arc");
    CutoffParams p = params;
    p.Q = Q;
    if (p.enforce_q_bound && static_cast<double>(Q) > p.n_tilde(N))
        throw DomainError("major_arc_error: Q exceeds N-tilde for this mode");
    p.enforce_q_bound = false;
    const MultiplierModel A(ModelKind::A_hat, N, p, registry, tables);

    struct Sample {
        ntheory::Rational aq;
        double alpha;
    };
    std::vector<Sample> samples;
    const double radius = static_cast<double>(Q) / static_cast<double>(N);
    for (std::int64_t q = 1; q <= Q; ++q)
        for (std::int64_t a = 0; a < q; ++a) {
            if (ntheory::gcd(a, q) != 1) continue;
            for (std::size_t k = 0; k < samples_per_arc; ++k) {
                const double alpha = samples_per_arc == 1
                                         ? 0.0
                                         : -radius + 2.0 * radius * static_cast<double>(k) /
                                                         static_cast<double>(samples_per_arc - 1);
                samples.push_back({{a, q}, alpha});
            }
        }
    std::vector<double> err(samples.size());
    const auto n = static_cast<std::int64_t>(samples.size());
    auto eval = [&](std::int64_t i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const double xi = static_cast<double>(s.aq.a) / static_cast<double>(s.aq.q) + s.alpha;
        err[static_cast<std::size_t>(i)] = std::abs(A(xi) - multiplier::l_aq_hat(s.alpha, s.aq, N, registry));
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) eval(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) eval(i);
    }

    MajorArcReport r;
    r.N = N;
    r.Q = Q;
    r.samples = samples.size();
    for (std::size_t i = 0; i < err.size(); ++i)
        if (err[i] > r.max_error) {
            r.max_error = err[i];
            r.argmax_xi = static_cast<double>(samples[i].aq.a) / static_cast<double>(samples[i].aq.q) + samples[i].alpha;
        }
    r.error_at_zero = std::abs(tables->psi(N) / static_cast<double>(N) - 1.0);
    const double logN = std::log2(static_cast<double>(N));
    r.curve_grh = static_cast<double>(Q) * std::pow(static_cast<double>(N), -0.5 + p.epsilon);
    r.curve_uncond = static_cast<double>(Q) * std::exp(-p.c * std::sqrt(logN));
    return r;
}

multiplier::SupReport err_norm_scan(std::uint64_t N, const CutoffParams& params,
                                    const ntheory::ExceptionalRegistry& registry,
                                    std::shared_ptr<const ArithmeticTables> tables, const multiplier::GridSpec& grid,
                                    Exec exec) {
    const MultiplierModel A(ModelKind::A_hat, N, params, registry, tables);
    const MultiplierModel B(ModelKind::B, N, params, registry, tables);
    auto rep = multiplier::sup_scan(A, B, grid, exec);
    const auto Qd = static_cast<std::int64_t>(std::sqrt(static_cast<double>(N)));
    const auto r = ntheory::dirichlet_approx(rep.argmax_xi, Qd);
    rep.curve_reference = "vinogradov(q=" + std::to_string(r.q) + ")";
    rep.curve_value = multiplier::vinogradov_curve(static_cast<double>(r.q), N);
    rep.fitted_constant = rep.curve_value > 0.0 ? rep.sup / rep.curve_value : 0.0;
    return rep;
}

std::vector<HiNormRow> hi_norm_scan(const std::vector<std::int64_t>& Qs, const std::vector<std::uint64_t>& N_list,
                                    const CutoffParams& params, std::size_t corpus_size, std::size_t len,
                                    std::uint64_t seed) {
    if (N_list.empty() || corpus_size < 1 || len < 1) throw DomainError("hi_norm_scan: empty input");
    const std::uint64_t N_top = *std::max_element(N_list.begin(), N_list.end());
    const std::size_t L = fft::next_pow2(2 * (len + N_top));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<std::vector<cplx>> spectra;
    for (std::size_t k = 0; k < corpus_size; ++k) {
        std::vector<double> f(len);
        double norm = 0.0;
        for (auto& v : f) {
            v = gauss(rng);
            norm += v * v;
        }
        std::vector<cplx> a(L, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < len; ++i) a[i] = f[i] / std::sqrt(norm);
        spectra.push_back(fft::forward(a));
    }

    std::vector<HiNormRow> rows;
    for (auto Q : Qs) {
        CutoffParams p = params;
        p.Q = Q;
        p.enforce_q_bound = false;
        HiNormRow row;
        row.Q = Q;
        std::vector<std::vector<double>> sup_abs(corpus_size, std::vector<double>(L, 0.0));
        for (auto N : N_list) {
            const MultiplierModel hi(ModelKind::Hi, N, p);
            const auto m = hi.on_grid(L);
            const bool top = N == N_top;
            if (top) {
                const auto r = hi.hi_levels();
                row.hi_first = r.first;
                row.hi_last = r.last;
                for (const auto& v : m) row.multiplier_sup = std::max(row.multiplier_sup, std::abs(v));
            }
            for (std::size_t k = 0; k < corpus_size; ++k) {
                std::vector<cplx> y(L);
                for (std::size_t j = 0; j < L; ++j) y[j] = spectra[k][j] * m[j];
                y = fft::inverse(y);
                double norm2 = 0.0;
                for (std::size_t i = 0; i < L; ++i) {
                    const double v = std::abs(y[i].real());
                    norm2 += v * v;
                    sup_abs[k][i] = std::max(sup_abs[k][i], v);
                }
                if (top) row.norm_fixed = std::max(row.norm_fixed, std::sqrt(norm2));
            }
        }
        for (const auto& s : sup_abs) {
            double norm2 = 0.0;
            for (double v : s) norm2 += v * v;
            row.norm_maximal = std::max(row.norm_maximal, std::sqrt(norm2));
        }
        const double q = static_cast<double>(Q);
        row.curve_fixed = std::log(std::log(q)) / q;
        row.curve_maximal = std::log(q) * std::log(std::log(q)) / q;
        row.fitted_constant = row.curve_fixed > 0.0 ? row.multiplier_sup / row.curve_fixed : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pcl::lab
