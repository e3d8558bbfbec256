#pragma once

// Experiment harness: improving-inequality trials, sparse families, weak-type
// and Orlicz scans, and the measured error terms of the multiplier splitting.

#include <cstdint>
#include <string>
#include <vector>

#include "pcl/multiplier.hpp"
#include "pcl/ntheory.hpp"
#include "pcl/operators.hpp"
#include "pcl/parallel.hpp"

namespace pcl::lab {

using ntheory::ArithmeticTables;
using operators::Interval;
using operators::LatticeFunction;
using IntSet = std::vector<std::int64_t>;  // sorted, distinct

// Log x = 1 + |log x|
double Log(double x);
// phi(x) = Log x (Log Log x)^t
double orlicz_phi(double x, int t);

struct ImprovingTrial {
    std::uint64_t N = 0;
    Interval I;
    std::size_t size_f = 0;
    std::size_t size_g = 0;
    double pairing = 0.0;  // N^{-1} <A_N 1_F, 1_G>
    double density_f = 0.0;
    double density_g = 0.0;
    double log_factor = 0.0;  // Log(<f><g>)
    double ratio_t0 = 0.0;
    double ratio_t1 = 0.0;
    double ratio_t2 = 0.0;
    bool degenerate = false;  // F or G empty: ratios are not defined
    std::int64_t q_suggested = 2;
    std::string label;
};

// F, G subsets of I; |I| = N is the intended use but is not required.
ImprovingTrial improving_ratio(const IntSet& F, const IntSet& G, const Interval& I, std::uint64_t N,
                               const ArithmeticTables& t);

struct SharpnessPoint {
    std::uint64_t N = 0;
    double ratio_t0 = 0.0;
    double ratio_t1 = 0.0;
};

// I = [-N, 0], F = {-p : p <= N prime}, G = {0}, for N = 2^n_min .. 2^n_max.
std::vector<SharpnessPoint> sharpness_experiment(int n_min, int n_max, const ArithmeticTables& t);

enum class Strategy { RandomDensity, ArithmeticProgression, Primes, Intervals, AdversarialGreedy };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct SearchResult {
    ImprovingTrial worst_t1;
    ImprovingTrial worst_t2;
    std::size_t trials = 0;
    std::size_t degenerate = 0;
};

// Trial k draws from a generator seeded by (seed, k).
SearchResult set_search(std::uint64_t N, const Interval& I, Strategy strategy, std::size_t trials,
                        std::uint64_t seed, const ArithmeticTables& t, Exec exec = Exec::Parallel);

// Smallest Q >= 2 with Q log Q / max(log log Q, 1) >= density_product^{-1/2};
// capped at N-tilde when N > 0.
std::int64_t q_optimizer(double density_product, multiplier::Mode mode = multiplier::Mode::GRH,
                         std::uint64_t N = 0, double c = 1.0);

struct SparseItem {
    Interval I;
    std::vector<Interval> E;  // disjoint runs
    std::size_t depth = 0;

    std::int64_t e_size() const;
};

struct SparseFamily {
    std::vector<SparseItem> items;
};

struct SparseVerdict {
    bool valid = true;
    double density = 1.0;  // min |E| / |I|
    std::string reason;
};

SparseVerdict verify_sparse(const SparseFamily& family);

struct SparseBuild {
    SparseFamily family;
    Interval root;
    double pairing = 0.0;                 // <A* 1_F, 1_G>
    std::vector<double> terms;            // per item, t = 2
    double form_t1 = 0.0;
    double form_t2 = 0.0;
    double domination_t2 = 0.0;           // pairing / form_t2
};

// Stopping-time construction with threshold factor 10 on 3J-averages.
SparseBuild build_sparse(const IntSet& F, const IntSet& G, std::uint64_t N_max, const ArithmeticTables& t,
                         double factor = 10.0);
// sum_I <1_F>_I <1_G>_I Log(<1_F>_I <1_G>_I)^t |I|
double sparse_form_log(const SparseFamily& family, const IntSet& F, const IntSet& G, int t);
// <A* 1_F, 1_G> over dyadic scales 1..N_max.
double maximal_pairing(const IntSet& F, const IntSet& G, std::uint64_t N_max, const ArithmeticTables& t);

struct PSparse {
    double form_p = 0.0;    // sum_I <1_F>_{I,p} <1_G>_{I,p} |I|
    double form_log = 0.0;  // sparse_form_log with the same t
    double scaled_p = 0.0;  // (p - 1)^t form_p
};

PSparse p_sparse_form(const SparseFamily& family, const IntSet& F, const IntSet& G, double p, int t);
// x (Log x)^t <= 4 x / (p - 1)^t at p = 1 + 1/Log x for x = 2^{-k}, k = 1..kmax.
bool elementary_identity_holds(int t, int kmax = 40);

struct WeakTypeLevel {
    double lambda = 0.0;
    std::uint64_t count = 0;  // |{A* 1_F > lambda}|
};

struct WeakTypeReport {
    std::size_t size_f = 0;
    std::uint64_t N_max = 0;
    int t = 2;
    std::vector<WeakTypeLevel> levels;
    double sup_log = 0.0;        // sup lambda (Log lambda)^{-t} |{.}| / |F|
    double sup_relative = 0.0;   // sup lambda |{.}| / (|F| Log(|{.}| / |F|))
};

WeakTypeReport weak_type_scan(const IntSet& F, std::uint64_t N_max, int t, const ArithmeticTables& t_tables);

// |{x : |f(x)| >= lambda}|
std::uint64_t distribution_function(const LatticeFunction& f, double lambda);
// sum_{j >= 0, 2^j <= |supp f|} 2^j phi(2^j) f*(2^j), f* the decreasing rearrangement.
double orlicz_norm(const LatticeFunction& f, int t);

struct OrliczLayer {
    int j = 0;
    std::uint64_t size = 0;  // |{2^j <= f < 2^{j+1}}|
};

struct WeakOrliczReport {
    double orlicz = 0.0;
    double sup_weak = 0.0;  // sup_lambda lambda |{A* f > lambda}|
    double ratio = 0.0;     // sup_weak / orlicz
    std::vector<OrliczLayer> layers;
    bool layering_ok = false;
};

WeakOrliczReport weak_orlicz_check(const LatticeFunction& f, int t, std::uint64_t N_max, const ArithmeticTables& t_tables);

struct SetPair {
    IntSet F;
    IntSet G;
    std::string label;
};

// Mixed corpus: random densities, intervals, progressions, primes, clusters.
std::vector<SetPair> corpus(std::size_t count, std::uint64_t seed, std::size_t max_union = 1 << 14);
// Single sets for weak-type scans.
std::vector<std::pair<std::string, IntSet>> weak_type_corpus(std::uint64_t seed);

struct MajorArcReport {
    std::uint64_t N = 0;
    std::int64_t Q = 0;
    std::size_t samples = 0;
    double max_error = 0.0;
    double argmax_xi = 0.0;
    double error_at_zero = 0.0;  // |psi(N)/N - 1|
    double curve_grh = 0.0;      // Q N^{-1/2 + eps}
    double curve_uncond = 0.0;   // Q exp(-c sqrt n)
};

// xi = a/q + alpha, q <= Q, alpha on a grid of samples_per_arc points in [-Q/N, Q/N].
MajorArcReport major_arc_error(std::uint64_t N, std::int64_t Q, std::size_t samples_per_arc,
                               const ntheory::ExceptionalRegistry& registry,
                               std::shared_ptr<const ArithmeticTables> tables,
                               const multiplier::CutoffParams& params = {}, Exec exec = Exec::Parallel);

multiplier::SupReport err_norm_scan(std::uint64_t N, const multiplier::CutoffParams& params,
                                    const ntheory::ExceptionalRegistry& registry,
                                    std::shared_ptr<const ArithmeticTables> tables,
                                    const multiplier::GridSpec& grid = {}, Exec exec = Exec::Parallel);

struct HiNormRow {
    std::int64_t Q = 0;
    double multiplier_sup = 0.0;  // max |Hi hat| over the DFT grid
    double norm_fixed = 0.0;      // max over corpus of ||Hi_N f||_2 at the largest N
    double norm_maximal = 0.0;    // max over corpus of ||sup_N |Hi_N f| ||_2
    double curve_fixed = 0.0;     // log log Q / Q
    double curve_maximal = 0.0;   // log Q log log Q / Q
    double fitted_constant = 0.0; // multiplier_sup / curve_fixed
    int hi_first = 0;
    int hi_last = -1;
};

// Hi with the given params (Q replaced per row, q-bound not enforced), applied
// to corpus_size random l2-normalised f of length len at every N in N_list.
std::vector<HiNormRow> hi_norm_scan(const std::vector<std::int64_t>& Qs, const std::vector<std::uint64_t>& N_list,
                                    const multiplier::CutoffParams& params, std::size_t corpus_size,
                                    std::size_t len, std::uint64_t seed);

// Spearman rank correlation.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pcl::lab
