#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fiberlab/arith.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/parallel.hpp"
#include "fiberlab/structure.hpp"

namespace fiberlab {

using Complex = std::complex<double>;

// f(t) = sum_n c(n) e(nt) with finitely many nonzero coefficients.
class TrigPoly {
  public:
    TrigPoly() = default;

    static TrigPoly from_set(const IntSet& a) {
        TrigPoly f;
        for (const auto& n : a) f.c_.emplace(n, Complex(1.0, 0.0));
        return f;
    }

    void set_coeff(const Int& n, Complex v) {
        if (v == Complex(0.0, 0.0))
            c_.erase(n);
        else
            c_[n] = v;
    }

    const std::map<Int, Complex>& coefficients() const { return c_; }
    std::size_t support_size() const { return c_.size(); }
    bool zero() const { return c_.empty(); }

    Int max_abs_frequency() const {
        Int f = 0;
        for (const auto& [n, c] : c_) {
            Int a = abs(n);
            if (a > f) f = a;
        }
        return f;
    }

    double l2_from_coefficients() const {
        double s = 0.0;
        for (const auto& [n, c] : c_) s += std::norm(c);
        return std::sqrt(s);
    }

  private:
    std::map<Int, Complex> c_;
};

// Partition of the integers by the valuation vector at a prime tuple; 0 gets
// a reserved singleton key.  Refinement is the union of the prime tuples,
// which makes refine associative, commutative and idempotent as a partition.
struct ScaleKey {
    bool zero = false;
    std::vector<unsigned long> vals;

    friend bool operator<(const ScaleKey& a, const ScaleKey& b) {
        if (a.zero != b.zero) return b.zero;
        return a.vals < b.vals;
    }
    friend bool operator==(const ScaleKey& a, const ScaleKey& b) {
        return a.zero == b.zero && a.vals == b.vals;
    }
};

class ScalePartition {
  public:
    ScalePartition() = default;
    explicit ScalePartition(PrimeTuple primes) : primes_(std::move(primes)) {}

    static ScalePartition padic(const Int& p) {
        return ScalePartition(PrimeTuple({p}));
    }

    const PrimeTuple& primes() const { return primes_; }

    ScaleKey key(const Int& n) const {
        ScaleKey k;
        if (n == 0) {
            k.zero = true;
            return k;
        }
        k.vals = primes_.valuations(n);
        return k;
    }

    friend ScalePartition refine(const ScalePartition& a, const ScalePartition& b) {
        std::vector<Int> merged = a.primes_.primes();
        for (const auto& p : b.primes_.primes()) merged.push_back(p);
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        return ScalePartition(PrimeTuple::unchecked(std::move(merged)));
    }

  private:
    PrimeTuple primes_;
};

inline ScalePartition padic_partition(const Int& p) { return ScalePartition::padic(p); }

namespace detail {

// Exact-phase grid evaluation: e(n j/N) = table[(n mod N) j mod N], so there
// is no accumulated phase drift and results are bit-stable.
inline std::vector<Complex> eval_on_grid(const std::map<Int, Complex>& coeffs, std::size_t n_grid) {
    std::vector<Complex> table(n_grid);
    const double step = 2.0 * M_PI / static_cast<double>(n_grid);
    for (std::size_t m = 0; m < n_grid; ++m)
        table[m] = Complex(std::cos(step * static_cast<double>(m)),
                           std::sin(step * static_cast<double>(m)));

    struct Term {
        std::size_t r;
        Complex c;
    };
    std::vector<Term> terms;
    terms.reserve(coeffs.size());
    for (const auto& [n, c] : coeffs) {
        unsigned long r = mpz_fdiv_ui(n.get_mpz_t(), static_cast<unsigned long>(n_grid));
        terms.push_back({static_cast<std::size_t>(r), c});
    }

    auto chunks = map_chunks<std::vector<Complex>>(
        n_grid, 4096, [&](std::size_t lo, std::size_t hi) {
            std::vector<Complex> out(hi - lo, Complex(0.0, 0.0));
            for (const auto& term : terms) {
                std::size_t idx = (term.r * (lo % n_grid)) % n_grid;
                for (std::size_t j = lo; j < hi; ++j) {
                    out[j - lo] += term.c * table[idx];
                    idx += term.r;
                    if (idx >= n_grid) idx -= n_grid;
                }
            }
            return out;
        });
    std::vector<Complex> grid;
    grid.reserve(n_grid);
    for (auto& part : chunks)
        for (auto& v : part) grid.push_back(v);
    return grid;
}

inline bool is_even_integer(double q) {
    return q >= 2.0 && q == std::floor(q) && std::fmod(q, 2.0) == 0.0;
}

inline std::size_t freq_as_size(const Int& f) {
    if (!f.fits_ulong_p()) throw BadParameter("frequency too large for grid evaluation");
    return static_cast<std::size_t>(f.get_ui());
}

// Deterministic chunked mean of v^q over the grid.
inline double grid_mean_pow(const std::vector<double>& vals, double q) {
    double total = 0.0;
    std::size_t n = vals.size();
    for (std::size_t lo = 0; lo < n; lo += 4096) {
        std::size_t hi = std::min(n, lo + 4096);
        double part = 0.0;
        for (std::size_t j = lo; j < hi; ++j) part += std::pow(vals[j], q);
        total += part;
    }
    return total / static_cast<double>(n);
}

}  // namespace detail

struct NormInfo {
    double value = 0.0;
    std::size_t grid = 0;
    bool exact = false;  // Riemann sum equals the integral (even q, enough points)
};

// L^q norm on the torus.  For even integer q the Riemann sum on N >= qF+1
// points is exact because |f|^q is a trig polynomial of degree <= qF.
inline NormInfo lq_norm_info(const TrigPoly& f, double q,
                             std::optional<std::size_t> grid_points = {}) {
    if (!(q >= 1.0)) throw BadExponent("lq_norm: q must be >= 1");
    NormInfo info;
    if (f.zero()) {
        info.exact = true;
        return info;
    }
    std::size_t fmax = detail::freq_as_size(f.max_abs_frequency());
    bool even = detail::is_even_integer(q);
    std::size_t min_grid =
        even ? static_cast<std::size_t>(q) * fmax + 1 : std::max<std::size_t>(4096, 8 * fmax);
    info.grid = std::max(grid_points.value_or(0), min_grid);
    info.exact = even;

    auto grid = detail::eval_on_grid(f.coefficients(), info.grid);
    std::vector<double> mod(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) mod[j] = std::abs(grid[j]);
    info.value = std::pow(detail::grid_mean_pow(mod, q), 1.0 / q);
    return info;
}

inline double lq_norm(const TrigPoly& f, double q, std::optional<std::size_t> grid_points = {}) {
    return lq_norm_info(f, q, grid_points).value;
}

namespace detail {

inline std::map<ScaleKey, std::map<Int, Complex>> split_by_class(const TrigPoly& f,
                                                                 const ScalePartition& p) {
    std::map<ScaleKey, std::map<Int, Complex>> classes;
    for (const auto& [n, c] : f.coefficients()) classes[p.key(n)].emplace(n, c);
    return classes;
}

}  // namespace detail

// (S_P f)(t) = ( sum_P |sum_{n in P} c(n) e(nt)|^2 )^(1/2) at a single point.
inline double square_function(const TrigPoly& f, const ScalePartition& p, double t) {
    double s = 0.0;
    for (const auto& [key, coeffs] : detail::split_by_class(f, p)) {
        Complex part(0.0, 0.0);
        for (const auto& [n, c] : coeffs) {
            double phase = 2.0 * M_PI * n.get_d() * t;
            part += c * Complex(std::cos(phase), std::sin(phase));
        }
        s += std::norm(part);
    }
    return std::sqrt(s);
}

// || S_P f ||_q on a grid of N >= 2qF+1 points (exact for even q).
inline NormInfo sq_norm_info(const TrigPoly& f, const ScalePartition& p, double q) {
    if (!(q >= 1.0)) throw BadExponent("sq_norm: q must be >= 1");
    NormInfo info;
    if (f.zero()) {
        info.exact = true;
        return info;
    }
    std::size_t fmax = detail::freq_as_size(f.max_abs_frequency());
    bool even = detail::is_even_integer(q);
    info.grid = even ? 2 * static_cast<std::size_t>(q) * fmax + 1
                     : std::max<std::size_t>(4096, 8 * fmax);
    info.exact = even;

    std::vector<double> sq(info.grid, 0.0);
    for (const auto& [key, coeffs] : detail::split_by_class(f, p)) {
        auto grid = detail::eval_on_grid(coeffs, info.grid);
        for (std::size_t j = 0; j < grid.size(); ++j) sq[j] += std::norm(grid[j]);
    }
    std::vector<double> vals(info.grid);
    for (std::size_t j = 0; j < info.grid; ++j) vals[j] = std::sqrt(sq[j]);
    info.value = std::pow(detail::grid_mean_pow(vals, q), 1.0 / q);
    return info;
}

inline double sq_norm(const TrigPoly& f, const ScalePartition& p, double q) {
    return sq_norm_info(f, p, q).value;
}

// f_eps: multiply every coefficient by the sign of its partition class.
inline TrigPoly sign_multiplier(const TrigPoly& f, const ScalePartition& p,
                                const std::map<ScaleKey, int>& eps) {
    TrigPoly g;
    for (const auto& [n, c] : f.coefficients()) {
        auto it = eps.find(p.key(n));
        if (it == eps.end())
            throw MissingKey("sign_multiplier: no sign for the class of " + n.get_str());
        if (it->second != 1 && it->second != -1)
            throw BadParameter("sign_multiplier: signs must be +-1");
        g.set_coeff(n, static_cast<double>(it->second) * c);
    }
    return g;
}

struct BurkholderStudy {
    double lq = 0.0;                  // ||f||_q
    double sq = 0.0;                  // ||S_P f||_q
    double ratio_square_fn = 0.0;     // ||f||_q / ||S_P f||_q
    double max_ratio_multiplier = 0.0;
    std::map<ScaleKey, int> witness;  // eps attaining the max
    bool exhaustive = false;
    std::size_t patterns = 0;
};

// Ratio study for the multiplier and square-function inequalities.  All of
// it is reported; no theorem constant is asserted.  Sign patterns are
// enumerated exactly up to 16 occupied classes, sampled (seeded) beyond.
inline BurkholderStudy burkholder_ratio_study(const TrigPoly& f, const ScalePartition& p,
                                              double q, std::size_t trials, std::uint64_t seed) {
    if (!detail::is_even_integer(q)) throw BadExponent("burkholder_ratio_study: q must be even");
    BurkholderStudy study;
    study.lq = lq_norm(f, q);
    study.sq = sq_norm(f, p, q);
    study.ratio_square_fn = study.sq > 0.0 ? study.lq / study.sq : 1.0;
    if (f.zero()) {
        study.max_ratio_multiplier = 1.0;
        study.exhaustive = true;
        return study;
    }

    auto classes = detail::split_by_class(f, p);
    std::vector<ScaleKey> keys;
    for (const auto& [key, coeffs] : classes) keys.push_back(key);
    std::size_t m = keys.size();

    std::size_t fmax = detail::freq_as_size(f.max_abs_frequency());
    std::size_t n_grid = static_cast<std::size_t>(q) * fmax + 1;
    std::vector<std::vector<Complex>> class_grid;
    class_grid.reserve(m);
    for (const auto& key : keys) class_grid.push_back(detail::eval_on_grid(classes[key], n_grid));

    auto norm_for = [&](const std::vector<int>& signs) {
        std::vector<double> mod(n_grid);
        for (std::size_t j = 0; j < n_grid; ++j) {
            Complex v(0.0, 0.0);
            for (std::size_t c = 0; c < m; ++c)
                v += static_cast<double>(signs[c]) * class_grid[c][j];
            mod[j] = std::abs(v);
        }
        return std::pow(detail::grid_mean_pow(mod, q), 1.0 / q);
    };

    study.max_ratio_multiplier = 1.0;
    std::vector<int> signs(m, 1);
    study.witness.clear();
    for (std::size_t c = 0; c < m; ++c) study.witness[keys[c]] = 1;

    auto consider = [&](const std::vector<int>& s) {
        double nrm = norm_for(s);
        double ratio = nrm > 0.0 ? study.lq / nrm : 1.0;
        if (ratio > study.max_ratio_multiplier) {
            study.max_ratio_multiplier = ratio;
            for (std::size_t c = 0; c < m; ++c) study.witness[keys[c]] = s[c];
        }
    };

    if (m <= 16) {
        study.exhaustive = true;
        study.patterns = std::size_t{1} << m;
        for (std::size_t mask = 0; mask < study.patterns; ++mask) {
            for (std::size_t c = 0; c < m; ++c) signs[c] = (mask >> c) & 1 ? -1 : 1;
            consider(signs);
        }
    } else {
        study.exhaustive = false;
        study.patterns = trials == 0 ? 256 : trials;
        Rng rng(seed);
        for (std::size_t t = 0; t < study.patterns; ++t) {
            for (std::size_t c = 0; c < m; ++c) signs[c] = rng.coin() ? 1 : -1;
            consider(signs);
        }
    }
    return study;
}

struct EnergyDecompositionCheck {
    Int lhs;             // E_+(A,A)
    Int rhs;             // sum over ordered fibre pairs of E_+(p^v B_v, p^v' B_v')
    double empirical_c;  // (lhs/rhs)^(1/r) when lhs > rhs, else 1
};

inline EnergyDecompositionCheck energy_decomposition_check(const FibredDecomposition& d) {
    if (d.fibres.empty()) throw EmptyDecomposition("energy_decomposition_check: no fibres");
    EnergyDecompositionCheck chk;
    chk.lhs = additive_energy(d.source, d.source);
    chk.rhs = 0;

    std::vector<IntSet> dilated;  // p^v B_v, the fibre's slice of A
    for (const auto& [v, b] : d.fibres) {
        Int mono = monomial_int(d.primes, v);
        std::vector<Int> elems;
        elems.reserve(b.size());
        for (const auto& x : b) elems.push_back(mono * x);
        dilated.push_back(IntSet(std::move(elems)));
    }
    for (const auto& x : dilated)
        for (const auto& y : dilated) chk.rhs += additive_energy(x, y);

    if (chk.lhs > chk.rhs && d.primes.rank() > 0) {
        double ratio = Rat(chk.lhs).get_d() / Rat(chk.rhs).get_d();
        chk.empirical_c = std::pow(ratio, 1.0 / static_cast<double>(d.primes.rank()));
    } else {
        chk.empirical_c = 1.0;
    }
    return chk;
}

}  // namespace fiberlab
