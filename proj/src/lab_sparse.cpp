#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "pcl/errors.hpp"
#include "pcl/lab.hpp"

namespace pcl::lab {

namespace {

std::size_t count_in(const IntSet& S, const Interval& I) {
    const auto lo = std::lower_bound(S.begin(), S.end(), I.start);
    const auto hi = std::lower_bound(S.begin(), S.end(), I.end());
    return static_cast<std::size_t>(hi - lo);
}

double avg(const IntSet& S, const Interval& I) {
    return static_cast<double>(count_in(S, I)) / static_cast<double>(I.length);
}

double avg3(const IntSet& S, const Interval& I) { return avg(S, I.tripled()); }

Interval hull(const IntSet& S) { return {S.front(), S.back() - S.front() + 1}; }

double log_term(double prod, int t) { return prod > 0.0 ? prod * std::pow(Log(prod), t) : 0.0; }

void check_set(const IntSet& S, const char* what) {
    if (S.empty()) throw DomainError(std::string(what) + ": empty set");
    if (!std::is_sorted(S.begin(), S.end()) || std::adjacent_find(S.begin(), S.end()) != S.end())
        throw DomainError(std::string(what) + ": set must be sorted and distinct");
}

}  // namespace

std::int64_t SparseItem::e_size() const {
    std::int64_t s = 0;
    for (const auto& r : E) s += r.length;
    return s;
}

SparseVerdict verify_sparse(const SparseFamily& family) {
    SparseVerdict v;
    std::vector<Interval> runs;
    for (const auto& it : family.items) {
        const std::int64_t e = it.e_size();
        for (const auto& r : it.E) {
            if (r.length < 1 || r.start < it.I.start || r.end() > it.I.end()) {
                v.valid = false;
                v.reason = "E not contained in I";
            }
            runs.push_back(r);
        }
        if (4 * e < it.I.length && v.valid) {
            v.valid = false;
            v.reason = "|E| < |I|/4";
        }
        if (it.I.length > 0)
            v.density = std::min(v.density, static_cast<double>(e) / static_cast<double>(it.I.length));
    }
    std::sort(runs.begin(), runs.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < runs.size(); ++i)
        if (runs[i].start < runs[i - 1].end() && v.valid) {
            v.valid = false;
            v.reason = "E sets overlap";
        }
    return v;
}

double sparse_form_log(const SparseFamily& family, const IntSet& F, const IntSet& G, int t) {
    double s = 0.0;
    for (const auto& it : family.items)
        s += log_term(avg(F, it.I) * avg(G, it.I), t) * static_cast<double>(it.I.length);
    return s;
}

double maximal_pairing(const IntSet& F, const IntSet& G, std::uint64_t N_max, const ArithmeticTables& t) {
    check_set(F, "maximal_pairing");
    check_set(G, "maximal_pairing");
    const auto m = operators::maximal_window(LatticeFunction::indicator(F), operators::DyadicScaleSet::up_to(N_max), t,
                                             hull(G));
    double s = 0.0;
    for (auto y : G) s += m.at(y);
    return s;
}

SparseBuild build_sparse(const IntSet& F, const IntSet& G, std::uint64_t N_max, const ArithmeticTables& t,
                         double factor) {
    check_set(F, "build_sparse");
    check_set(G, "build_sparse");
    const std::int64_t lo = std::min(F.front(), G.front());
    const std::int64_t hi = std::max(F.back(), G.back());
    const std::int64_t H = hi - lo + 1;
    const auto len = static_cast<std::int64_t>(std::bit_ceil(static_cast<std::uint64_t>(3 * H)));
    SparseBuild out;
    out.root = {lo - (len - H) / 2, len};

    struct Node {
        Interval I;
        std::size_t depth;
    };
    std::vector<Node> stack{{out.root, 0}};
    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        if (node.depth > 64) throw ConstructionError("build_sparse: recursion depth exceeded");
        const double aF = factor * avg3(F, node.I);
        const double aG = factor * avg3(G, node.I);
        std::vector<Interval> children;
        std::vector<Interval> todo;
        if (node.I.length > 1) todo = {{node.I.start + node.I.length / 2, node.I.length / 2}, {node.I.start, node.I.length / 2}};
        while (!todo.empty()) {
            const Interval J = todo.back();
            todo.pop_back();
            const Interval J3 = J.tripled();
            if (count_in(F, J3) == 0 && count_in(G, J3) == 0) continue;
            if (avg3(F, J) > aF || avg3(G, J) > aG) {
                children.push_back(J);
            } else if (J.length > 1) {
                todo.push_back({J.start + J.length / 2, J.length / 2});
                todo.push_back({J.start, J.length / 2});
            }
        }
        SparseItem item{node.I, {}, node.depth};
        std::int64_t cursor = node.I.start;
        for (const auto& c : children) {
            if (c.start > cursor) item.E.push_back({cursor, c.start - cursor});
            cursor = c.end();
        }
        if (cursor < node.I.end()) item.E.push_back({cursor, node.I.end() - cursor});
        out.family.items.push_back(std::move(item));
        for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back({*it, node.depth + 1});
    }

    for (const auto& it : out.family.items) {
        const double prod = avg(F, it.I) * avg(G, it.I);
        out.terms.push_back(log_term(prod, 2) * static_cast<double>(it.I.length));
        out.form_t1 += log_term(prod, 1) * static_cast<double>(it.I.length);
        out.form_t2 += out.terms.back();
    }
    out.pairing = maximal_pairing(F, G, N_max, t);
    out.domination_t2 = out.form_t2 > 0.0 ? out.pairing / out.form_t2 : 0.0;
    return out;
}

PSparse p_sparse_form(const SparseFamily& family, const IntSet& F, const IntSet& G, double p, int t) {
    if (!(p > 1.0 && p < 2.0)) throw DomainError("p_sparse_form: p must lie in (1, 2)");
    PSparse out;
    for (const auto& it : family.items)
        out.form_p += std::pow(avg(F, it.I), 1.0 / p) * std::pow(avg(G, it.I), 1.0 / p) * static_cast<double>(it.I.length);
    out.form_log = sparse_form_log(family, F, G, t);
    out.scaled_p = std::pow(p - 1.0, t) * out.form_p;
    return out;
}

bool elementary_identity_holds(int t, int kmax) {
    for (int k = 1; k <= kmax; ++k) {
        const double x = std::ldexp(1.0, -k);
        const double p = 1.0 + 1.0 / Log(x);
        if (x * std::pow(Log(x), t) > 4.0 * x / std::pow(p - 1.0, t) * (1.0 + 1e-12)) return false;
    }
    return true;
}

WeakTypeReport weak_type_scan(const IntSet& F, std::uint64_t N_max, int t, const ArithmeticTables& tables) {
    check_set(F, "weak_type_scan");
    const auto m = operators::maximal(LatticeFunction::indicator(F), operators::DyadicScaleSet::up_to(N_max), tables);
    std::vector<double> v = m.values;
    std::sort(v.begin(), v.end(), std::greater<>());
    WeakTypeReport r;
    r.size_f = F.size();
    r.N_max = N_max;
    r.t = t;
    const double nf = static_cast<double>(F.size());
    for (int j = 0; j <= 40; ++j) {
        const double lambda = std::ldexp(1.0, -j);
        const auto count = static_cast<std::uint64_t>(
            std::lower_bound(v.begin(), v.end(), lambda, std::greater<>()) - v.begin());
        r.levels.push_back({lambda, count});
        const double c = static_cast<double>(count);
        r.sup_log = std::max(r.sup_log, lambda * std::pow(Log(lambda), -t) * c / nf);
        if (count > 0) r.sup_relative = std::max(r.sup_relative, lambda * c / (nf * Log(c / nf)));
    }
    return r;
}

std::uint64_t distribution_function(const LatticeFunction& f, double lambda) {
    std::uint64_t n = 0;
    for (double v : f.values) n += std::abs(v) >= lambda;
    return n;
}

double orlicz_norm(const LatticeFunction& f, int t) {
    std::vector<double> v;
    for (double x : f.values)
        if (x != 0.0) v.push_back(std::abs(x));
    std::sort(v.begin(), v.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t k = 1; k <= v.size(); k <<= 1) {
        const double x = static_cast<double>(k);
        s += x * orlicz_phi(x, t) * v[k - 1];
    }
    return s;
}

WeakOrliczReport weak_orlicz_check(const LatticeFunction& f, int t, std::uint64_t N_max, const ArithmeticTables& tables) {
    for (double v : f.values)
        if (v < 0.0) throw DomainError("weak_orlicz_check: f must be nonnegative");
    WeakOrliczReport r;
    r.orlicz = orlicz_norm(f, t);
    const auto m = operators::maximal(f, operators::DyadicScaleSet::up_to(N_max), tables);
    std::vector<double> v = m.values;
    std::sort(v.begin(), v.end(), std::greater<>());
    for (std::size_t k = 0; k < v.size(); ++k) r.sup_weak = std::max(r.sup_weak, v[k] * static_cast<double>(k + 1));
    r.ratio = r.orlicz > 0.0 ? r.sup_weak / r.orlicz : 0.0;

    std::map<int, std::uint64_t> layers;
    r.layering_ok = true;
    for (double x : f.values) {
        if (x == 0.0) continue;
        const int j = static_cast<int>(std::floor(std::log2(x)));
        ++layers[j];
        const double base = std::ldexp(1.0, j);
        if (!(base <= x && x <= 2.0 * base)) r.layering_ok = false;
    }
    for (const auto& [j, n] : layers) r.layers.push_back({j, n});
    return r;
}

}  // namespace pcl::lab
