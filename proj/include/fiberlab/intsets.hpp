#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "fiberlab/arith.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/parallel.hpp"

namespace fiberlab {

// Deduplicated, sorted finite set of big integers.
class IntSet {
  public:
    IntSet() = default;

    explicit IntSet(std::vector<Int> values) : e_(std::move(values)) {
        std::sort(e_.begin(), e_.end());
        e_.erase(std::unique(e_.begin(), e_.end()), e_.end());
    }

    IntSet(std::initializer_list<long> values) {
        for (long v : values) e_.emplace_back(v);
        std::sort(e_.begin(), e_.end());
        e_.erase(std::unique(e_.begin(), e_.end()), e_.end());
    }

    static IntSet from_sorted_unique(std::vector<Int> values) {
        for (std::size_t i = 1; i < values.size(); ++i)
            if (!(values[i - 1] < values[i]))
                throw BadParameter("IntSet::from_sorted_unique: not strictly increasing");
        IntSet s;
        s.e_ = std::move(values);
        return s;
    }

    std::size_t size() const { return e_.size(); }
    bool empty() const { return e_.empty(); }
    const Int& operator[](std::size_t i) const { return e_[i]; }
    auto begin() const { return e_.begin(); }
    auto end() const { return e_.end(); }
    const std::vector<Int>& elements() const { return e_; }

    bool contains(const Int& v) const {
        return std::binary_search(e_.begin(), e_.end(), v);
    }

    bool contains_zero() const { return contains(Int(0)); }

    // True when every element fits a signed 64-bit word.
    bool fits_i64() const {
        for (const auto& v : e_)
            if (!v.fits_slong_p()) return false;
        return true;
    }

    std::vector<long> as_i64() const {
        std::vector<long> out;
        out.reserve(e_.size());
        for (const auto& v : e_) out.push_back(v.get_si());
        return out;
    }

    bool operator==(const IntSet& o) const { return e_ == o.e_; }

  private:
    std::vector<Int> e_;
};

namespace detail {

struct I128Hash {
    std::size_t operator()(unsigned __int128 v) const {
        std::uint64_t lo = static_cast<std::uint64_t>(v);
        std::uint64_t hi = static_cast<std::uint64_t>(v >> 64);
        std::uint64_t x = lo ^ (hi * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        return static_cast<std::size_t>(x);
    }
};

// Representation counts over A x B for op in {+, *}, 64-bit element fast path.
// Chunked over A so worker count never changes the totals.
template <bool Multiply>
std::unordered_map<unsigned __int128, std::uint64_t, I128Hash> rep_counts_i64(
    const std::vector<long>& a, const std::vector<long>& b) {
    using Map = std::unordered_map<unsigned __int128, std::uint64_t, I128Hash>;
    auto chunks = map_chunks<Map>(a.size(), 64, [&](std::size_t lo, std::size_t hi) {
        Map m;
        m.reserve((hi - lo) * b.size());
        for (std::size_t i = lo; i < hi; ++i) {
            __int128 ai = a[i];
            for (long bj : b) {
                __int128 v = Multiply ? ai * bj : ai + bj;
                ++m[static_cast<unsigned __int128>(v)];
            }
        }
        return m;
    });
    Map total;
    if (!chunks.empty()) {
        total = std::move(chunks[0]);
        for (std::size_t c = 1; c < chunks.size(); ++c)
            for (const auto& [k, v] : chunks[c]) total[k] += v;
    }
    return total;
}

template <bool Multiply>
std::map<Int, std::uint64_t> rep_counts_big(const IntSet& a, const IntSet& b) {
    std::map<Int, std::uint64_t> m;
    Int v;
    for (const auto& x : a)
        for (const auto& y : b) {
            if (Multiply)
                v = x * y;
            else
                v = x + y;
            ++m[v];
        }
    return m;
}

template <bool Multiply>
Int energy_impl(const IntSet& a, const IntSet& b) {
    if (a.empty() || b.empty()) return 0;
    if (a.fits_i64() && b.fits_i64()) {
        auto counts = rep_counts_i64<Multiply>(a.as_i64(), b.as_i64());
        unsigned __int128 e = 0;
        for (const auto& [k, c] : counts) e += static_cast<unsigned __int128>(c) * c;
        return u128_to_int(e);
    }
    Int e = 0;
    for (const auto& [k, c] : rep_counts_big<Multiply>(a, b)) e += Int(c) * Int(c);
    return e;
}

}  // namespace detail

// Representation function of A op B with its total mass |A||B|.
struct RepCounts {
    std::map<Int, std::uint64_t> counts;
    Int total = 0;
};

inline RepCounts sum_representations(const IntSet& a, const IntSet& b) {
    RepCounts r;
    r.counts = detail::rep_counts_big<false>(a, b);
    r.total = Int(a.size()) * Int(b.size());
    return r;
}

inline RepCounts product_representations(const IntSet& a, const IntSet& b) {
    RepCounts r;
    r.counts = detail::rep_counts_big<true>(a, b);
    r.total = Int(a.size()) * Int(b.size());
    return r;
}

inline IntSet sumset(const IntSet& a, const IntSet& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Int> out;
    out.reserve(a.size() * b.size());
    if (a.fits_i64() && b.fits_i64()) {
        std::vector<__int128> vals;
        vals.reserve(a.size() * b.size());
        for (long x : a.as_i64())
            for (long y : b.as_i64()) vals.push_back(static_cast<__int128>(x) + y);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (__int128 v : vals) {
            bool neg = v < 0;
            unsigned __int128 uv = neg ? -static_cast<unsigned __int128>(v)
                                       : static_cast<unsigned __int128>(v);
            Int iv = u128_to_int(uv);
            out.push_back(neg ? -iv : iv);
        }
    } else {
        for (const auto& x : a)
            for (const auto& y : b) out.push_back(x + y);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    IntSet s = IntSet::from_sorted_unique(std::move(out));
    if (s.size() + 1 < a.size() + b.size())
        throw InvariantViolation("sumset smaller than |A|+|B|-1");
    return s;
}

inline IntSet product_set(const IntSet& a, const IntSet& b) {
    if (a.empty() || b.empty()) return {};
    if (a.fits_i64() && b.fits_i64()) {
        std::vector<__int128> vals;
        vals.reserve(a.size() * b.size());
        for (long x : a.as_i64())
            for (long y : b.as_i64()) vals.push_back(static_cast<__int128>(x) * y);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        std::vector<Int> out;
        out.reserve(vals.size());
        for (__int128 v : vals) {
            bool neg = v < 0;
            unsigned __int128 uv = neg ? -static_cast<unsigned __int128>(v)
                                       : static_cast<unsigned __int128>(v);
            Int iv = u128_to_int(uv);
            out.push_back(neg ? -iv : iv);
        }
        return IntSet::from_sorted_unique(std::move(out));
    }
    std::vector<Int> out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(x * y);
    return IntSet(std::move(out));
}

inline IntSet translate(const IntSet& a, const Int& t) {
    std::vector<Int> out;
    out.reserve(a.size());
    for (const auto& x : a) out.push_back(t + x);
    return IntSet::from_sorted_unique(std::move(out));
}

inline IntSet dilate(const IntSet& a, const Rat& d) {
    if (d == 0) throw BadParameter("dilate by zero");
    std::vector<Int> out;
    out.reserve(a.size());
    for (const auto& x : a) {
        Rat v = Rat(x) * d;
        if (v.get_den() != 1)
            throw NonIntegerResult("dilate: " + x.get_str() + " * " + d.get_str() +
                                   " is not an integer");
        out.push_back(Int(v.get_num()));
    }
    return IntSet(std::move(out));
}

// E_+(A,B): ordered quadruples with a1+b1 = a2+b2, via representation counts.
inline Int additive_energy(const IntSet& a, const IntSet& b) {
    return detail::energy_impl<false>(a, b);
}

inline Int multiplicative_energy(const IntSet& a, const IntSet& b) {
    return detail::energy_impl<true>(a, b);
}

// Ordered pairs (a,b) in A x B with gcd(a,b) = 1.
inline Int coprime_pairs(const IntSet& a, const IntSet& b) {
    if (a.contains_zero() || b.contains_zero())
        throw ZeroElement("coprime_pairs: sets must not contain 0");
    if (a.empty() || b.empty()) return 0;
    if (a.fits_i64() && b.fits_i64()) {
        auto av = a.as_i64();
        auto bv = b.as_i64();
        auto parts = map_chunks<std::uint64_t>(av.size(), 64,
                                               [&](std::size_t lo, std::size_t hi) {
            std::uint64_t c = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                std::uint64_t x = static_cast<std::uint64_t>(av[i]);
                if (av[i] < 0) x = 0ULL - x;
                for (long y : bv) {
                    std::uint64_t u = static_cast<std::uint64_t>(y);
                    if (y < 0) u = 0ULL - u;
                    if (std::gcd(x, u) == 1) ++c;
                }
            }
            return c;
        });
        unsigned __int128 total = 0;
        for (auto c : parts) total += c;
        return u128_to_int(total);
    }
    Int total = 0, g;
    for (const auto& x : a)
        for (const auto& y : b) {
            mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
            if (g == 1) ++total;
        }
    return total;
}

struct CoprimeFactorizationReport {
    Int count;   // ordered (a,b) in A x B with ab = q and gcd(a,b) = 1
    Int bound;   // 2^(k+l) with k = max omega over A, l = max omega over B
    bool ok;     // count <= bound; a theorem, so false flags a bug
};

inline CoprimeFactorizationReport coprime_factorization_count(const Int& q, const IntSet& a,
                                                              const IntSet& b) {
    if (q == 0) throw ZeroInput("coprime_factorization_count: q must be nonzero");
    if (a.contains_zero() || b.contains_zero())
        throw ZeroElement("coprime_factorization_count: sets must not contain 0");
    Int count = 0, g;
    for (const auto& x : a) {
        if (!mpz_divisible_p(q.get_mpz_t(), x.get_mpz_t())) continue;
        Int y = q / x;
        if (!b.contains(y)) continue;
        mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        if (g == 1) ++count;
    }
    unsigned long k = 0, l = 0;
    for (const auto& x : a) k = std::max(k, omega(x));
    for (const auto& y : b) l = std::max(l, omega(y));
    CoprimeFactorizationReport r;
    r.count = count;
    r.bound = pow2(k + l);
    r.ok = count <= r.bound;
    return r;
}

}  // namespace fiberlab
