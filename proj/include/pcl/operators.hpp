#pragma once

// Spatial side: prime averages, maximal and linearized operators, multipliers
// applied by periodised DFT, and the closed-form Low/Exceptional kernels.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcl/multiplier.hpp"
#include "pcl/ntheory.hpp"
#include "pcl/parallel.hpp"

namespace pcl::operators {

using ntheory::ArithmeticTables;

// [start, start + length)
struct Interval {
    std::int64_t start = 0;
    std::int64_t length = 1;

    std::int64_t end() const { return start + length; }
    bool contains(std::int64_t x) const { return x >= start && x < end(); }
    // 3I: same centre, three times the length.
    Interval tripled() const { return {start - length, 3 * length}; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct LatticeFunction {
    std::int64_t offset = 0;
    std::vector<double> values;

    static LatticeFunction zeros(std::int64_t offset, std::size_t len);
    static LatticeFunction delta(std::int64_t x, double mass = 1.0);
    // Indicator of a finite set; the support is the set's hull.
    static LatticeFunction indicator(const std::vector<std::int64_t>& set);

    std::size_t size() const { return values.size(); }
    std::int64_t end() const { return offset + static_cast<std::int64_t>(values.size()); }
    double at(std::int64_t x) const;
    double& ref(std::int64_t x);

    double l1() const;
    double l2() const;
    double linf() const;
    // [ |I|^{-1} sum_{x in I} |f(x)|^r ]^{1/r}
    double bracket(const Interval& I, double r = 1.0) const;
    double sum_over(const Interval& I) const;

    // <f, g> over the overlap of the supports.
    double pairing(const LatticeFunction& g) const;

    void write_csv(std::ostream& os) const;
    std::string to_json() const;
    static LatticeFunction from_json(const std::string& s);
};

// Powers of two.
class DyadicScaleSet {
public:
    DyadicScaleSet() = default;
    // 1, 2, 4, ..., N_max (N_max a power of two)
    static DyadicScaleSet up_to(std::uint64_t n_max, std::uint64_t n_min = 1);
    void add(std::uint64_t N);
    const std::vector<std::uint64_t>& scales() const { return scales_; }
    bool contains(std::uint64_t N) const;
    std::uint64_t max() const { return scales_.empty() ? 0 : scales_.back(); }

private:
    std::vector<std::uint64_t> scales_;
};

enum class Method { Auto, Direct, FFT };

// A_N f(x) = N^{-1} sum_{n <= N} f(x - n) Lambda(n)
LatticeFunction average(const LatticeFunction& f, std::uint64_t N, const ArithmeticTables& t,
                        Method method = Method::Auto);
// Convolution with (N beta)^{-1} (n^beta - (n-1)^beta) on n = 1..N.
LatticeFunction mobius_average(const LatticeFunction& f, std::uint64_t N, double beta,
                               Method method = Method::Auto);

// sup over the scale set of |A_N f|, on supp f + [1, max scale].
LatticeFunction maximal(const LatticeFunction& f, const DyadicScaleSet& scales, const ArithmeticTables& t,
                        Exec exec = Exec::Parallel);
// Same values by direct summation; for testing.
LatticeFunction maximal_reference(const LatticeFunction& f, const DyadicScaleSet& scales,
                                  const ArithmeticTables& t);
// A* f restricted to window. Scales beyond the span between supp f and the
// window are clamped to the smallest one, where the supremum is attained.
LatticeFunction maximal_window(const LatticeFunction& f, const DyadicScaleSet& scales,
                               const ArithmeticTables& t, const Interval& window,
                               Exec exec = Exec::Parallel);

// tau over an interval: tau[x - offset].
struct ScaleMap {
    std::int64_t offset = 0;
    std::vector<std::uint64_t> tau;
};

// Smallest dyadic tau(x) <= |I0| with M_N f(x) <= 10 <f>_{3 I0, 1} for every
// dyadic N in [tau(x), |I0|]; larger N satisfy it automatically.
ScaleMap admissible_tau(const LatticeFunction& f, const Interval& I0);
// Literal check of the admissibility inequality for every dyadic N >= tau(x).
bool is_admissible(const LatticeFunction& f, const Interval& I0, const ScaleMap& tau);

// x -> A_{tau(x)} f(x) on the interval of tau.
LatticeFunction linearized(const LatticeFunction& f, const ScaleMap& tau, const ArithmeticTables& t);
// tau(x) attaining the maximum of |A_N f(x)| over the scale set (smallest on ties).
ScaleMap argmax_scales(const LatticeFunction& f, const DyadicScaleSet& scales, const ArithmeticTables& t,
                       const Interval& on);

// Periodised Z-operator: DFT of length L, multiply by model(j/L), inverse DFT.
// Output covers [offset - L/4, offset + 3L/4), real part.
LatticeFunction apply_multiplier(const LatticeFunction& f, const multiplier::MultiplierModel& model,
                                 std::size_t L);

// S(x) = sum_{q in S_Q} mu(q) c_q(x) / phi(q) in closed form.
double s_function(std::int64_t x, std::int64_t Q);
// The literal sum, with exact integer arithmetic over a common denominator.
double s_function_oracle(std::int64_t x, std::int64_t Q);
// Closed form and literal sum agree as rationals.
bool s_function_agrees(std::int64_t x, std::int64_t Q);

// sum_{a in A_q} G(1_{A_q}, a) e(xa/q), G by its defining sum.
cplx principal_inner_sum(std::int64_t q, std::int64_t x);
// Same for all x in [x_lo, x_hi] with the Gauss sums computed once.
std::vector<cplx> principal_inner_sums(std::int64_t q, std::int64_t x_lo, std::int64_t x_hi);
// sum_{a in A_q} G(chi, a) e(xa/q)
cplx character_inner_sum(const ntheory::DirichletCharacter& chi, std::int64_t x);

// (M_N^beta conv K_s)(x) = (N beta)^{-1} sum_{m=1}^N (m^beta - (m-1)^beta) K_s(x - m)
double smoothed_average_kernel(std::int64_t x, std::uint64_t N, int s, double beta = 1.0);

// sum_{q in S_Q} (mu(q)/phi(q)) c_q(-x) (M_N conv K_{s(q)})(x), s(q) = floor(log2 q)
double low_kernel(std::int64_t x, std::int64_t Q, std::uint64_t N);
std::vector<double> low_kernel_range(std::int64_t x_lo, std::int64_t x_hi, std::int64_t Q, std::uint64_t N,
                                     Exec exec = Exec::Parallel);
// sum over registry q < Q of [sum_a G(chi_q, a) e(xa/q)] (M_N^{beta_q} conv K_{s_q})(x)
cplx ex_kernel(std::int64_t x, std::int64_t Q, std::uint64_t N, const ntheory::ExceptionalRegistry& registry);

}  // namespace pcl::operators
