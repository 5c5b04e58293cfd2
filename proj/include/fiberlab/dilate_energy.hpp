#pragma once

#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "fiberlab/arith.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/parallel.hpp"

namespace fiberlab {

inline constexpr std::size_t kWitnessCap = 10'000;

struct DilateCountReport {
    Int count;
    Rat bound;        // rational approximation of 1 + 4|B| log2|B|, reporting only
    bool ok;          // exact: 2^(count-1) <= |B|^(4|B|); a theorem, so false flags a bug
    std::vector<std::tuple<Int, Int, unsigned long>> witnesses;  // (b1, b2, v)
    bool truncated = false;
};

// X_p(B,n): ordered pairs with b1 - b2 = n p^v for some v >= 0.  The power
// test is repeated exact division, no logarithms.
inline DilateCountReport xp_count(const IntSet& b, const Int& p, const Int& n,
                                  bool collect_witnesses = true) {
    if (b.size() < 2) throw BadInput("xp_count: need |B| >= 2");
    if (n == 0) throw BadInput("xp_count: n must be nonzero");
    if (!is_prime(p)) throw BadInput("xp_count: p must be prime");
    if (b[0] <= 0) throw BadInput("xp_count: elements must be positive");

    DilateCountReport rep;
    rep.count = 0;
    Int q;
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (i == j) continue;
            Int d = b[i] - b[j];
            if (!mpz_divisible_p(d.get_mpz_t(), n.get_mpz_t())) continue;
            q = d / n;
            if (q < 1) continue;
            unsigned long v = 0;
            while (mpz_divisible_p(q.get_mpz_t(), p.get_mpz_t())) {
                q /= p;
                ++v;
            }
            if (q == 1) {
                ++rep.count;
                if (collect_witnesses) {
                    if (rep.witnesses.size() < kWitnessCap)
                        rep.witnesses.emplace_back(b[i], b[j], v);
                    else
                        rep.truncated = true;
                }
            }
        }
    }

    // count <= 1 + 4|B| log2|B|  <=>  2^(count-1) <= |B|^(4|B|)
    Int sz(b.size());
    if (rep.count <= 1) {
        rep.ok = true;
    } else {
        Int lhs = pow2(static_cast<unsigned long>(Int(rep.count - 1).get_ui()));
        Int rhs = int_pow(sz, 4 * static_cast<unsigned long>(b.size()));
        rep.ok = lhs <= rhs;
    }
    double l2 = std::log2(static_cast<double>(b.size()));
    rep.bound = Rat(1) + Rat(4) * Rat(sz) *
                             make_rat(Int(static_cast<long>(std::ceil(l2 * (1L << 30)))),
                                      Int(1L << 30));
    return rep;
}

struct GammaPairReport {
    Int count;            // ordered (b1,b2) with (b1-b2)/u in +-<P>
    double bound;         // |B| exp((ln|B|)^(1-eps)), natural logs
    double ratio;         // count / bound
    bool precond_ok;      // r <= (ln|B|)^(1-6 eps)
    bool size_floor_ok;   // |B| >= the configured "sufficiently large" floor
};

// Lemma-style difference count into a dilated S-unit group.  Membership uses
// the signed group (the -1-adjoined convention), so both difference signs
// land in the count.  Nothing is asserted: the bound is a report.
inline GammaPairReport gamma_pair_count(const IntSet& b, const PrimeTuple& p, const Rat& u,
                                        double eps, std::size_t size_floor = 64) {
    if (b.size() < 2) throw BadInput("gamma_pair_count: need |B| >= 2");
    if (u == 0) throw BadInput("gamma_pair_count: u must be nonzero");
    if (!(eps > 0.0 && eps < 1.0 / 6.0))
        throw BadInput("gamma_pair_count: eps must lie in (0, 1/6)");

    const Int& un = u.get_num();
    const Int& ud = u.get_den();
    auto parts = map_chunks<std::uint64_t>(b.size(), 16, [&](std::size_t lo, std::size_t hi) {
        std::uint64_t c = 0;
        Int num, den, g, rest;
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (i == j) continue;
                // (b_i - b_j) / u = (b_i - b_j) * ud / un
                num = abs((b[i] - b[j]) * ud);
                den = abs(un);
                mpz_gcd(g.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
                num /= g;
                den /= g;
                for (const auto& q : p.primes()) {
                    mpz_remove(rest.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
                    mpz_swap(num.get_mpz_t(), rest.get_mpz_t());
                    mpz_remove(rest.get_mpz_t(), den.get_mpz_t(), q.get_mpz_t());
                    mpz_swap(den.get_mpz_t(), rest.get_mpz_t());
                }
                if (num == 1 && den == 1) ++c;
            }
        }
        return c;
    });
    unsigned __int128 total = 0;
    for (auto c : parts) total += c;

    GammaPairReport rep;
    rep.count = u128_to_int(total);
    double ln_b = std::log(static_cast<double>(b.size()));
    rep.bound = static_cast<double>(b.size()) * std::exp(std::pow(ln_b, 1.0 - eps));
    rep.ratio = rep.count.get_d() / rep.bound;
    rep.precond_ok =
        static_cast<double>(p.rank()) <= std::pow(ln_b, 1.0 - 6.0 * eps);
    rep.size_floor_ok = b.size() >= size_floor;
    return rep;
}

}  // namespace fiberlab
