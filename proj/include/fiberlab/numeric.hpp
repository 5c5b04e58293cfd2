#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "fiberlab/error.hpp"

namespace fiberlab {

// All exact arithmetic runs on GMP: energies and structure-theorem bounds
// overflow 64 bits well inside desk scale.
using Int = mpz_class;
using Rat = mpq_class;

inline Int int_pow(const Int& base, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Int pow2(unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
    return r;
}

inline Int factorial(unsigned long n) {
    Int r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
}

inline Rat make_rat(Int num, Int den) {
    if (den == 0) throw BadParameter("rational with zero denominator");
    Rat r(std::move(num), std::move(den));
    r.canonicalize();
    return r;
}

// floor(sqrt(n)) together with an exact-square flag
inline std::pair<Int, bool> sqrt_floor(const Int& n) {
    if (n < 0) throw BadParameter("sqrt_floor of negative value");
    Int root, rem;
    mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    return {root, rem == 0};
}

inline Int u128_to_int(unsigned __int128 v) {
    Int hi(static_cast<unsigned long>(v >> 64));
    Int lo(static_cast<unsigned long>(v & ~0ULL));
    return (hi << 64) + lo;
}

// Rational upper approximation of log2(n), within 1e-9 above the true value.
// Bound checks that involve log2 compare against this rational exactly, so a
// borderline theorem bound is given the benefit of the rounding.
inline Rat log2_upper(const Int& n) {
    if (n < 1) throw BadParameter("log2_upper needs n >= 1");
    std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    double l;
    if (bits <= 512) {
        l = std::log2(n.get_d());
    } else {
        Int top = n >> (bits - 64);
        l = static_cast<double>(bits - 64) + std::log2(top.get_d() + 1.0);
    }
    long scaled = static_cast<long>(std::ceil(l * 1e9)) + 1;
    return make_rat(Int(scaled), Int(1000000000));
}

inline std::string format_real(double v, int significant = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant, v);
    return buf;
}

// Seeded deterministic RNG.  Bounded draws use rejection sampling on the raw
// mt19937_64 stream, so results do not depend on the standard library's
// distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw BadParameter("Rng::below(0)");
        std::uint64_t limit = ~0ULL - ~0ULL % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    long range(long lo, long hi) {  // inclusive
        if (hi < lo) throw BadParameter("Rng::range: empty range");
        return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool coin() { return (next() & 1) != 0; }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace fiberlab
