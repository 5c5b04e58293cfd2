#pragma once

#include <string>
#include <vector>

#include "fiberlab/arith.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"

namespace fiberlab {

inline IntSet interval(unsigned long n) {
    if (n == 0) throw BadParameter("interval: N must be >= 1");
    std::vector<Int> v;
    v.reserve(n);
    for (unsigned long i = 1; i <= n; ++i) v.emplace_back(i);
    return IntSet::from_sorted_unique(std::move(v));
}

// {a + d*i : 1 <= i <= n}
inline IntSet arith_prog(const Int& a, const Int& d, unsigned long n) {
    if (n == 0) throw BadParameter("arith_prog: N must be >= 1");
    if (d == 0) throw BadParameter("arith_prog: step must be nonzero");
    std::vector<Int> v;
    v.reserve(n);
    for (unsigned long i = 1; i <= n; ++i) v.push_back(a + d * Int(i));
    IntSet s(std::move(v));
    if (s.size() != n) throw BadParameter("arith_prog: collision");  // unreachable for d != 0
    return s;
}

// {c * r^i : 0 <= i < m}
inline IntSet geom_prog(const Int& c, const Int& r, unsigned long m) {
    if (m == 0) throw BadParameter("geom_prog: M must be >= 1");
    if (c == 0) throw BadParameter("geom_prog: scale must be nonzero");
    if (r < 2) throw BadParameter("geom_prog: ratio must be >= 2");
    std::vector<Int> v;
    v.reserve(m);
    Int cur = c;
    for (unsigned long i = 0; i < m; ++i) {
        v.push_back(cur);
        cur *= r;
    }
    IntSet s(std::move(v));
    if (s.size() != m) throw BadParameter("geom_prog: collision");
    return s;
}

inline IntSet primes_upto(unsigned long n) {
    if (n == 0) throw BadParameter("primes_upto: N must be >= 1");
    if (n > kSieveLimit) throw BadParameter("primes_upto: N beyond sieve limit");
    std::vector<Int> v;
    for (std::uint32_t p : small_primes()) {
        if (p > n) break;
        v.emplace_back(p);
    }
    return IntSet::from_sorted_unique(std::move(v));
}

// {p, p^2, ..., p^N}
inline IntSet prime_powers(const Int& p, unsigned long n) {
    if (n == 0) throw BadParameter("prime_powers: N must be >= 1");
    if (!is_prime(p)) throw BadParameter("prime_powers: p must be prime");
    std::vector<Int> v;
    v.reserve(n);
    Int cur = p;
    for (unsigned long i = 1; i <= n; ++i) {
        v.push_back(cur);
        cur *= p;
    }
    return IntSet::from_sorted_unique(std::move(v));
}

// Product of a geometric progression Gamma = {1, p, ..., p^(M-1)} and an
// arithmetic base B.  The classic choice is B = {1, ..., 2n^2} with M = n;
// base_kind primes takes the first N primes instead, which keeps omega <= 2
// over the whole set.
struct BWParams {
    unsigned long M = 0;
    unsigned long N = 0;
    Int p;
    Int a{0};
    Int d{1};
    enum class Base { ap, primes } base = Base::ap;

    static BWParams classic(unsigned long n, Int gen_prime) {
        BWParams q;
        q.M = n;
        q.N = 2 * n * n;
        q.p = std::move(gen_prime);
        return q;
    }

    static BWParams prime_base(unsigned long m, unsigned long n, Int gen_prime) {
        BWParams q;
        q.M = m;
        q.N = n;
        q.p = std::move(gen_prime);
        q.base = Base::primes;
        return q;
    }
};

struct BalogWooleyParts {
    IntSet gamma;
    IntSet base;
    IntSet set;
};

inline BalogWooleyParts balog_wooley_parts(const BWParams& params) {
    if (params.M == 0 || params.N == 0) throw BadParameter("balog_wooley: M, N must be >= 1");
    if (!is_prime(params.p)) throw BadParameter("balog_wooley: generator must be prime");

    IntSet base;
    if (params.base == BWParams::Base::primes) {
        std::vector<Int> v;
        for (std::uint32_t q : small_primes()) {
            v.emplace_back(q);
            if (v.size() == params.N) break;
        }
        if (v.size() != params.N) throw BadParameter("balog_wooley: base too large for sieve");
        base = IntSet::from_sorted_unique(std::move(v));
    } else {
        base = arith_prog(params.a, params.d, params.N);
    }
    if (base.contains_zero()) throw BadParameter("balog_wooley: base contains 0");
    if (!(params.p > base[base.size() - 1]))
        throw BadParameter("balog_wooley: need p > max(B) to rule out collisions");

    IntSet gamma = params.M == 1 ? IntSet{1} : geom_prog(1, params.p, params.M);
    IntSet set = product_set(gamma, base);
    if (Int(set.size()) < Int(params.M) * Int(params.N))
        throw CollisionDetected("balog_wooley: |Gamma . B| < M*N");
    BalogWooleyParts out;
    out.gamma = std::move(gamma);
    out.base = std::move(base);
    out.set = std::move(set);
    return out;
}

inline IntSet balog_wooley(const BWParams& params) { return balog_wooley_parts(params).set; }

// Approximate Balog-Wooley: delete or shift a fraction of the base before
// taking the product.  Collisions are allowed here, the set is just deduped.
inline IntSet balog_wooley_approx(const BWParams& params, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw BadParameter("balog_wooley_approx: fraction must be in [0,1)");
    BalogWooleyParts parts = balog_wooley_parts(params);
    std::vector<Int> base(parts.base.begin(), parts.base.end());
    Rng rng(seed);
    std::size_t touched = static_cast<std::size_t>(fraction * static_cast<double>(base.size()));
    for (std::size_t t = 0; t < touched && base.size() > 1; ++t) {
        std::size_t idx = rng.below(base.size());
        if (rng.coin()) {
            base.erase(base.begin() + static_cast<std::ptrdiff_t>(idx));
        } else {
            Int shift = Int(rng.range(1, 3)) * params.d;
            base[idx] += rng.coin() ? shift : -shift;
            if (base[idx] == 0) base[idx] = shift;
        }
    }
    return product_set(parts.gamma, IntSet(std::move(base)));
}

// Deterministic corpus generator: `count` distinct integers, each a product
// of at most k primes from the pool with exponents in [1, max_exponent].
inline IntSet random_k_almost_prime(std::size_t count, unsigned long k, const IntSet& prime_pool,
                                    unsigned long max_exponent, std::uint64_t seed) {
    if (count == 0) throw BadParameter("random_k_almost_prime: count must be >= 1");
    if (k == 0) throw BadParameter("random_k_almost_prime: k must be >= 1");
    if (max_exponent == 0) throw BadParameter("random_k_almost_prime: max exponent must be >= 1");
    if (prime_pool.empty()) throw BadParameter("random_k_almost_prime: empty pool");
    for (const auto& p : prime_pool)
        if (!is_prime(p)) throw BadParameter("random_k_almost_prime: pool element not prime");

    // Exact capacity: distinct values correspond to distinct supports with
    // exponent choices, by unique factorization.
    Int capacity = 0;
    unsigned long jmax = std::min<unsigned long>(k, prime_pool.size());
    for (unsigned long j = 1; j <= jmax; ++j) {
        Int binom;
        mpz_bin_uiui(binom.get_mpz_t(), prime_pool.size(), j);
        capacity += binom * int_pow(Int(max_exponent), j);
    }
    if (capacity < Int(count))
        throw PoolExhausted("random_k_almost_prime: only " + capacity.get_str() +
                            " distinct values available");

    Rng rng(seed);
    std::vector<Int> pool(prime_pool.begin(), prime_pool.end());
    std::vector<Int> out;
    std::vector<std::size_t> picks;
    while (out.size() < count) {
        unsigned long j = 1 + static_cast<unsigned long>(rng.below(jmax));
        picks.clear();
        while (picks.size() < j) {
            std::size_t idx = rng.below(pool.size());
            if (std::find(picks.begin(), picks.end(), idx) == picks.end()) picks.push_back(idx);
        }
        Int v = 1;
        for (std::size_t idx : picks)
            v *= int_pow(pool[idx], 1 + static_cast<unsigned long>(rng.below(max_exponent)));
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    return IntSet(std::move(out));
}

}  // namespace fiberlab
