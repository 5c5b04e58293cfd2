#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "fiberlab/error.hpp"
#include "fiberlab/numeric.hpp"

namespace fiberlab {

inline constexpr std::uint32_t kSieveLimit = 1'000'000;

// Primes up to kSieveLimit.  Built on first use, then shared read-only.
inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<bool> composite(kSieveLimit + 1, false);
        std::vector<std::uint32_t> ps;
        for (std::uint32_t i = 2; i <= kSieveLimit; ++i) {
            if (composite[i]) continue;
            ps.push_back(i);
            for (std::uint64_t j = std::uint64_t{i} * i; j <= kSieveLimit; j += i)
                composite[j] = true;
        }
        return ps;
    }();
    return primes;
}

// Deterministic Miller-Rabin.  The fixed base set is proven sufficient below
// 3.3e24 and treated as a strong probable-prime test above that, which covers
// everything the default factorization bound lets through.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    const auto& ps = small_primes();
    for (std::size_t i = 0; i < 200 && i < ps.size(); ++i) {
        Int p(ps[i]);
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), ps[i])) return false;
        if (p * p > n) return true;
    }
    static const unsigned long bases[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                          29, 31, 37, 41, 43, 47, 53, 59};
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    Int nm1 = n - 1;
    for (unsigned long b : bases) {
        Int x;
        Int base(b);
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool witness = true;
        for (unsigned long i = 1; i < s; ++i) {
            x = x * x % n;
            if (x == nm1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

struct FactoredInt {
    Int value;
    int sign = 1;
    std::vector<std::pair<Int, unsigned long>> factors;  // strictly increasing primes

    unsigned long omega() const { return static_cast<unsigned long>(factors.size()); }

    Int reconstruct() const {
        Int r = sign;
        for (const auto& [p, e] : factors) r *= int_pow(p, e);
        return r;
    }
};

struct FactorizeOptions {
    Int bound = pow2(96);
};

namespace detail {

// Pollard rho, Brent variant, with batched gcds and a deterministic restart
// schedule.  The per-parameter step cap abandons orbits whose cycle is
// atypically long; expected caps scale with n^(1/4).
inline Int pollard_rho(const Int& n) {
    Int root4 = sqrt_floor(sqrt_floor(n).first).first;
    unsigned long cap = 1024;
    if (root4.fits_ulong_p()) cap += 64 * root4.get_ui();

    for (unsigned long c = 1;; ++c) {
        auto f = [&](const Int& v) -> Int { return (v * v + c) % n; };
        Int y = Int(2) + Int(c), x, ys, q = 1, g = 1;
        unsigned long r = 1, steps = 0;
        const unsigned long batch = 128;
        while (g == 1 && steps < cap) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = f(y);
            for (unsigned long k = 0; k < r && g == 1; k += batch) {
                ys = y;
                unsigned long lim = std::min(batch, r - k);
                for (unsigned long i = 0; i < lim; ++i) {
                    y = f(y);
                    Int diff = x > y ? x - y : y - x;
                    if (diff != 0) q = q * diff % n;
                }
                steps += lim;
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
            r *= 2;
        }
        if (g == n) {
            // the batch overshot; walk the saved tail one step at a time
            g = 1;
            while (g == 1) {
                ys = f(ys);
                Int diff = x > ys ? x - ys : ys - x;
                if (diff == 0) break;
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            }
        }
        if (g != 1 && g != n) return g;
    }
}

inline void factor_large(const Int& m, std::vector<std::pair<Int, unsigned long>>& out,
                         const FactorizeOptions& opts) {
    if (m == 1) return;
    if (is_prime(m)) {
        out.emplace_back(m, 1);
        return;
    }
    if (m > opts.bound)
        throw FactorizationTooHard("composite cofactor " + m.get_str() +
                                   " exceeds the factorization bound");
    Int d = pollard_rho(m);
    factor_large(d, out, opts);
    factor_large(m / d, out, opts);
}

}  // namespace detail

// Trial division over the shared sieve, then deterministic rho on what is
// left.  The reconstruction product reproduces the input exactly.
inline FactoredInt factorize(const Int& n, const FactorizeOptions& opts = {}) {
    if (n == 0) throw ZeroInput("factorize: input must be nonzero");
    FactoredInt out;
    out.value = n;
    out.sign = n < 0 ? -1 : 1;
    Int m = abs(n);
    if (m == 1) return out;

    auto trial_limit = [&m]() -> std::uint32_t {
        auto [root, exact] = sqrt_floor(m);
        (void)exact;
        if (root >= kSieveLimit) return kSieveLimit;
        return static_cast<std::uint32_t>(root.get_ui());
    };

    std::uint32_t lim = trial_limit();
    for (std::uint32_t p : small_primes()) {
        if (p > lim) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            unsigned long e = 0;
            do {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                ++e;
            } while (mpz_divisible_ui_p(m.get_mpz_t(), p));
            out.factors.emplace_back(Int(p), e);
            if (m == 1) break;
            lim = trial_limit();
        }
    }
    if (m > 1) {
        if (m <= Int(kSieveLimit) * Int(kSieveLimit)) {
            out.factors.emplace_back(m, 1);  // no prime <= sqrt(m) divides it
        } else {
            std::vector<std::pair<Int, unsigned long>> large;
            detail::factor_large(m, large, opts);
            std::sort(large.begin(), large.end());
            for (std::size_t i = 0; i < large.size(); ++i) {
                if (!out.factors.empty() && out.factors.back().first == large[i].first)
                    out.factors.back().second += large[i].second;
                else
                    out.factors.push_back(large[i]);
            }
        }
    }
    return out;
}

inline unsigned long omega(const Int& n) {
    if (n == 0) throw ZeroInput("omega: input must be nonzero");
    return factorize(n).omega();
}

inline unsigned long valuation(const Int& n, const Int& p) {
    if (n == 0) throw ZeroInput("valuation: input must be nonzero");
    if (!is_prime(p)) throw BadParameter("valuation: p = " + p.get_str() + " is not prime");
    Int rest;
    return static_cast<unsigned long>(
        mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

// Ordered tuple of distinct primes p = (p_1 < ... < p_r).
class PrimeTuple {
  public:
    PrimeTuple() = default;

    explicit PrimeTuple(std::vector<Int> primes) : primes_(std::move(primes)) {
        std::sort(primes_.begin(), primes_.end());
        for (std::size_t i = 0; i < primes_.size(); ++i) {
            if (i > 0 && primes_[i] == primes_[i - 1])
                throw BadParameter("PrimeTuple: duplicate prime " + primes_[i].get_str());
            if (!is_prime(primes_[i]))
                throw BadParameter("PrimeTuple: " + primes_[i].get_str() + " is not prime");
        }
    }

    // Trusts the caller: sorted, distinct, prime.
    static PrimeTuple unchecked(std::vector<Int> sorted) {
        PrimeTuple t;
        t.primes_ = std::move(sorted);
        return t;
    }

    std::size_t rank() const { return primes_.size(); }
    bool empty() const { return primes_.empty(); }
    const std::vector<Int>& primes() const { return primes_; }
    const Int& operator[](std::size_t i) const { return primes_[i]; }

    bool contains(const Int& p) const {
        return std::binary_search(primes_.begin(), primes_.end(), p);
    }

    Int product() const {
        Int r = 1;
        for (const auto& p : primes_) r *= p;
        return r;
    }

    // Valuation vector of |n| at the tuple's primes, in tuple order.
    std::vector<unsigned long> valuations(const Int& n) const {
        if (n == 0) throw ZeroInput("valuations of zero");
        std::vector<unsigned long> v(primes_.size());
        Int rest;
        for (std::size_t i = 0; i < primes_.size(); ++i)
            v[i] = static_cast<unsigned long>(
                mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), primes_[i].get_mpz_t()));
        return v;
    }

    // n with all tuple primes divided out (sign kept).
    Int coprime_part(const Int& n) const {
        if (n == 0) throw ZeroInput("coprime_part of zero");
        Int m = n;
        Int rest;
        for (const auto& p : primes_) {
            mpz_remove(rest.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
            m = rest;
        }
        return m;
    }

    bool operator==(const PrimeTuple& o) const { return primes_ == o.primes_; }

  private:
    std::vector<Int> primes_;
};

enum class MembershipMode { group, semigroup, signed_group };

// x in <P> (group), <P>_+ (semigroup), or +-<P> (the -1-adjoined convention).
inline bool group_membership(const Rat& x, const PrimeTuple& P, MembershipMode mode) {
    if (x == 0) throw ZeroInput("group_membership: x must be nonzero");
    Int num = abs(Int(x.get_num()));
    Int den = x.get_den();
    Int rest;
    for (const auto& p : P.primes()) {
        mpz_remove(rest.get_mpz_t(), num.get_mpz_t(), p.get_mpz_t());
        num = rest;
        mpz_remove(rest.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
        den = rest;
    }
    bool abs_member = num == 1 && den == 1;
    switch (mode) {
        case MembershipMode::signed_group:
            return abs_member;
        case MembershipMode::group:
            return x > 0 && abs_member;
        case MembershipMode::semigroup:
            return x > 0 && x.get_den() == 1 && abs_member;
    }
    return false;
}

// p^v = p_1^{v_1} ... p_r^{v_r}; negative exponents land in the denominator.
inline Rat monomial(const PrimeTuple& P, const std::vector<long>& exps) {
    if (exps.size() != P.rank())
        throw DimensionMismatch("monomial: exponent vector length " +
                                std::to_string(exps.size()) + " != rank " +
                                std::to_string(P.rank()));
    Int num = 1, den = 1;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] >= 0)
            num *= int_pow(P[i], static_cast<unsigned long>(exps[i]));
        else
            den *= int_pow(P[i], static_cast<unsigned long>(-exps[i]));
    }
    return make_rat(num, den);
}

inline Int monomial_int(const PrimeTuple& P, const std::vector<unsigned long>& exps) {
    if (exps.size() != P.rank()) throw DimensionMismatch("monomial: length mismatch");
    Int r = 1;
    for (std::size_t i = 0; i < exps.size(); ++i) r *= int_pow(P[i], exps[i]);
    return r;
}

// (8l)^(4l^2 + lr + 1), the S-unit theorem's solution-count reference value.
inline Int sunit_reference_bound(unsigned long l, unsigned long r) {
    if (l == 0) throw BadParameter("sunit_reference_bound: l must be >= 1");
    unsigned long e = 4 * l * l + l * r + 1;
    Int base(8 * l);
    return int_pow(base, e);
}

}  // namespace fiberlab
