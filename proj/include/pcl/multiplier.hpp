#pragma once

// Frequency side: the prime-average multiplier, its major-arc approximants and
// the level atoms of the High/Low/Exceptional decomposition.

#include <memory>
#include <string>
#include <vector>

#include "pcl/ntheory.hpp"
#include "pcl/parallel.hpp"

namespace pcl::multiplier {

using ntheory::ArithmeticTables;
using ntheory::ExceptionalRegistry;
using ntheory::Rational;

enum class Mode { GRH, Unconditional };

std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

struct CutoffParams {
    Mode mode = Mode::GRH;
    double c = 1.0;
    double epsilon = 0.05;
    double alpha_cut = 1.0 / 400.0;
    std::int64_t Q = 2;
    // Lo sums levels 0..lo_level_cap (denominators below 2^{cap+1}).
    int lo_level_cap = 19;
    bool enforce_q_bound = true;

    // N-tilde: N^{1/5} under GRH, e^{c sqrt(n)/4} otherwise (N = 2^n).
    double n_tilde(std::uint64_t N) const;
    // C = n_tilde^alpha_cut; B sums levels with 2^s < C.
    double level_cutoff(std::uint64_t N) const;
    // Throws DomainError if Q > n_tilde(N) (when enforced) or fields are out of range.
    void validate(std::uint64_t N) const;
};

// alpha_cut chosen so that B at N = 2^16 reaches denominators near N^{1/2}.
CutoffParams scaled_grh_preset(std::int64_t Q = 4);
inline constexpr const char* kScaledGrhLabel = "scaled-grh";

// Trapezoid: 1 on |xi| <= 1/4, linear to 0 at |xi| = 1/2. Not periodised.
double bump(double xi);
// Inverse Fourier transform of bump on R: 4 sin(3 pi x/4) sin(pi x/4) / (pi^2 x^2).
double bump_inv_kernel(double x);
// eta_s(xi) = bump(4^s xi)
double eta(double xi, int s);
// K_s(y) = 4^{-s} bump_inv_kernel(4^{-s} y)
double kernel(double y, int s);

// Signed distance xi - r reduced to [-1/2, 1/2).
double circle_diff(double xi, double r);
double circle_diff(double xi, const Rational& r);

cplx a_hat(double xi, std::uint64_t N, const ArithmeticTables& t);
// a_hat at xi = j/M, j = 0..M-1, by one DFT.
std::vector<cplx> a_hat_grid(std::uint64_t N, std::size_t M, const ArithmeticTables& t);
cplx m_hat(double xi, std::uint64_t N);
cplx m_beta_hat(double xi, std::uint64_t N, double beta);
// G(1_{A_q}, a) m_hat(xi) - G(chi_q, a) m_beta_hat(xi, beta_q); xi is the offset from a/q.
cplx l_aq_hat(double xi, const Rational& aq, std::uint64_t N, const ExceptionalRegistry& registry);

enum class AtomFilter { All, Lo, Hi, Exceptional };

cplx atom_hat(double xi, int s, std::uint64_t N, AtomFilter filter, const CutoffParams& params,
              const ExceptionalRegistry& registry);

enum class ModelKind { A_hat, M_hat, B, Lo, Hi, Ex, Err, ErrPrime, One };

std::string to_string(ModelKind k);
ModelKind parse_model_kind(const std::string& s);

// A named multiplier on the circle. Coefficients (mu, phi, exceptional Gauss
// sums, prime powers) are cached at construction; evaluation is thread-safe.
class MultiplierModel {
public:
    MultiplierModel(ModelKind kind, std::uint64_t N, CutoffParams params,
                    ExceptionalRegistry registry = {},
                    std::shared_ptr<const ArithmeticTables> tables = nullptr);

    cplx operator()(double xi) const;
    // Values at xi = j/M.
    std::vector<cplx> on_grid(std::size_t M, Exec exec = Exec::Parallel) const;
    // Values at xi0 + k h, k = 0..count-1; the prime sum runs by phase recurrence.
    std::vector<cplx> on_window(double xi0, double h, std::size_t count) const;

    cplx atom(double xi, int s, AtomFilter filter) const;

    ModelKind kind() const { return kind_; }
    std::uint64_t N() const { return N_; }
    const CutoffParams& params() const { return params_; }
    const ExceptionalRegistry& registry() const { return registry_; }

    // Level ranges actually summed: [first, last], empty when first > last.
    struct LevelRange {
        int first = 0;
        int last = -1;
    };
    LevelRange b_levels() const;
    LevelRange lo_levels() const;
    LevelRange hi_levels() const;
    LevelRange ex_levels() const;

private:
    cplx eval_kind(ModelKind k, double xi) const;
    cplx a_hat_sparse(double xi) const;
    cplx sum_atoms(double xi, LevelRange r, AtomFilter filter) const;
    double principal_coeff(std::int64_t q) const;
    bool smooth(std::int64_t q) const;

    ModelKind kind_;
    std::uint64_t N_;
    CutoffParams params_;
    ExceptionalRegistry registry_;
    std::shared_ptr<const ArithmeticTables> tables_;
    std::shared_ptr<const ArithmeticTables> coeff_;
    std::vector<std::uint32_t> pp_n_;
    std::vector<double> pp_w_;
    std::vector<std::vector<cplx>> ex_gauss_;
};

cplx model_hat(ModelKind kind, double xi, std::uint64_t N, const CutoffParams& params,
               const ExceptionalRegistry& registry,
               std::shared_ptr<const ArithmeticTables> tables = nullptr);

struct GridSpec {
    std::size_t base_points = 0;  // 0 means 4N
    int refine_factor = 64;
    int refine_halfwidth = 4;  // in base spacings
    std::int64_t refine_q_cap = 16;
};

struct SupReport {
    std::string kindA;
    std::string kindB;
    std::uint64_t N = 0;
    std::int64_t Q = 0;
    std::string mode;
    double sup = 0.0;
    double argmax_xi = 0.0;
    std::size_t grid_points = 0;
    std::size_t refined_points = 0;
    std::string curve_reference;
    double curve_value = 0.0;
    double fitted_constant = 0.0;
};

SupReport sup_scan(const MultiplierModel& A, const MultiplierModel& B, const GridSpec& grid,
                   Exec exec = Exec::Parallel);

// Vinogradov-type reference (q^{-1/2} + (q/N)^{1/2} + N^{-1/5}) log^3 N.
double vinogradov_curve(double q, std::uint64_t N);

}  // namespace pcl::multiplier
