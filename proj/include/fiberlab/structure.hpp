#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fiberlab/arith.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/parallel.hpp"

namespace fiberlab {

struct BipartiteGraph {
    std::vector<Int> left;                       // X
    std::vector<Int> right;                      // Y
    std::vector<std::vector<std::uint32_t>> adj; // sorted Y-indices per left vertex

    std::size_t left_degree(std::size_t i) const { return adj[i].size(); }

    std::size_t max_left_degree() const {
        std::size_t m = 0;
        for (const auto& ns : adj) m = std::max(m, ns.size());
        return m;
    }
};

// Left vertices A, right vertices the primes dividing some element of A and
// not excluded, edge iff p | a.
inline BipartiteGraph prime_support_graph(const IntSet& a, const PrimeTuple& exclude = {}) {
    if (a.contains_zero()) throw ZeroElement("prime_support_graph: 0 in A");
    std::vector<std::vector<Int>> primes_of(a.size());
    std::vector<Int> all;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (const auto& [p, e] : factorize(a[i]).factors) {
            if (exclude.contains(p)) continue;
            primes_of[i].push_back(p);
            all.push_back(p);
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    BipartiteGraph g;
    g.left = a.elements();
    g.right = std::move(all);
    g.adj.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (const auto& p : primes_of[i]) {
            auto it = std::lower_bound(g.right.begin(), g.right.end(), p);
            g.adj[i].push_back(static_cast<std::uint32_t>(it - g.right.begin()));
        }
        std::sort(g.adj[i].begin(), g.adj[i].end());
    }
    return g;
}

struct HeavyPruneResult {
    std::vector<Int> heavy;  // Y' = {y : |N_X(y)| >= |X|/2k}, sorted
    Int bad_pairs;           // ordered (x,x') with a common neighbour outside Y'
};

// Lemma-style degree pruning: |Y'| <= 2k^2 and bad_pairs <= |X|^2/2 are
// consequences of the double count, so their failure throws.
inline HeavyPruneResult heavy_prune(const BipartiteGraph& g, unsigned long k) {
    if (k == 0) throw BadParameter("heavy_prune: k must be >= 1");
    for (std::size_t i = 0; i < g.adj.size(); ++i)
        if (g.adj[i].size() > k)
            throw DegreeTooHigh("heavy_prune: left vertex " + g.left[i].get_str() +
                                " has degree " + std::to_string(g.adj[i].size()) + " > k = " +
                                std::to_string(k));

    std::size_t nx = g.left.size();
    std::vector<std::size_t> ydeg(g.right.size(), 0);
    for (const auto& ns : g.adj)
        for (auto y : ns) ++ydeg[y];

    // |N_X(y)| >= |X|/2k  <=>  2k|N_X(y)| >= |X|
    std::vector<char> is_heavy(g.right.size(), 0);
    std::vector<Int> heavy;
    for (std::size_t y = 0; y < g.right.size(); ++y) {
        if (2 * k * ydeg[y] >= nx) {
            is_heavy[y] = 1;
            heavy.push_back(g.right[y]);
        }
    }
    if (heavy.size() > 2 * k * k)
        throw InvariantViolation("heavy_prune: |Y'| = " + std::to_string(heavy.size()) +
                                 " exceeds 2k^2");

    std::vector<std::vector<std::uint32_t>> light(nx);
    for (std::size_t i = 0; i < nx; ++i)
        for (auto y : g.adj[i])
            if (!is_heavy[y]) light[i].push_back(y);

    auto parts = map_chunks<std::uint64_t>(nx, 32, [&](std::size_t lo, std::size_t hi) {
        std::uint64_t bad = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            if (light[i].empty()) continue;
            for (std::size_t j = 0; j < nx; ++j) {
                bool common = false;
                for (auto y : light[i]) {
                    if (std::binary_search(light[j].begin(), light[j].end(), y)) {
                        common = true;
                        break;
                    }
                }
                if (common) ++bad;
            }
        }
        return bad;
    });
    unsigned __int128 bad = 0;
    for (auto c : parts) bad += c;

    HeavyPruneResult r;
    r.heavy = std::move(heavy);
    r.bad_pairs = u128_to_int(bad);
    if (2 * r.bad_pairs > Int(nx) * Int(nx))
        throw InvariantViolation("heavy_prune: bad pair count exceeds |X|^2/2");
    return r;
}

// A = union over v of p^v . B_v, graded by the valuation vectors at P.
struct FibredDecomposition {
    PrimeTuple primes;
    std::map<std::vector<unsigned long>, IntSet> fibres;
    IntSet source;

    std::size_t max_fibre_size() const {
        std::size_t m = 0;
        for (const auto& [v, b] : fibres) m = std::max(m, b.size());
        return m;
    }

    void validate() const {
        std::vector<Int> rebuilt;
        for (const auto& [v, b] : fibres) {
            Int mono = monomial_int(primes, v);
            for (const auto& x : b) {
                if (primes.coprime_part(x) != x)
                    throw InvariantViolation("fibre element not coprime to P");
                rebuilt.push_back(mono * x);
            }
        }
        std::sort(rebuilt.begin(), rebuilt.end());
        for (std::size_t i = 1; i < rebuilt.size(); ++i)
            if (rebuilt[i - 1] == rebuilt[i])
                throw InvariantViolation("fibred decomposition overlaps");
        if (rebuilt != source.elements())
            throw InvariantViolation("fibred decomposition does not rebuild the source");
    }
};

inline FibredDecomposition fibred_decompose(const IntSet& a, const PrimeTuple& p) {
    if (a.contains_zero()) throw ZeroElement("fibred_decompose: 0 in A");
    std::map<std::vector<unsigned long>, std::vector<Int>> groups;
    for (const auto& x : a) {
        auto v = p.valuations(x);
        groups[v].push_back(x / monomial_int(p, v));
    }
    FibredDecomposition d;
    d.primes = p;
    d.source = a;
    for (auto& [v, elems] : groups) d.fibres.emplace(v, IntSet(std::move(elems)));
    return d;
}

// Corollary-style construction: prune the prime-support graph, decompose at
// the heavy primes, and check the guaranteed supply of coprime base pairs.
inline FibredDecomposition fibred_structure(const IntSet& a, unsigned long k) {
    if (a.contains_zero()) throw ZeroElement("fibred_structure: 0 in A");
    std::string offenders;
    for (const auto& x : a) {
        if (abs(x) != 1 && omega(x) > k) {
            if (!offenders.empty()) offenders += ", ";
            offenders += x.get_str();
        }
    }
    if (!offenders.empty())
        throw OmegaTooLarge("fibred_structure: omega > " + std::to_string(k) + " for " +
                            offenders);

    BipartiteGraph g = prime_support_graph(a);
    HeavyPruneResult pruned = heavy_prune(g, k);
    FibredDecomposition d = fibred_decompose(a, PrimeTuple::unchecked(pruned.heavy));

    Int pairs = 0;
    for (const auto& [v1, b1] : d.fibres)
        for (const auto& [v2, b2] : d.fibres) pairs += coprime_pairs(b1, b2);
    if (2 * pairs < Int(a.size()) * Int(a.size()))
        throw InvariantViolation("fibred_structure: coprime pair supply below |A|^2/2");
    return d;
}

// E_+(A,A)^(1/2) against the sum of fibre energies^(1/2), plus the crude form
// E_+(A,A) / (|A|^2 max |B_v|).  Reported, never asserted.
struct ChangRatio {
    Int lhs_floor;       // floor sqrt of E_+(A,A)
    bool lhs_exact;
    Int rhs_floor_sum;   // sum over fibres of floor sqrt E_+(B_v,B_v)
    bool rhs_all_exact;
    Rat ratio;           // lhs_floor / rhs_floor_sum
    Rat crude_ratio;     // E_+(A,A) / (|A|^2 max|B_v|)
};

inline ChangRatio chang_ratio(const FibredDecomposition& d) {
    if (d.fibres.empty()) throw EmptyDecomposition("chang_ratio: no fibres");
    ChangRatio r;
    Int lhs_energy = additive_energy(d.source, d.source);
    auto [lroot, lexact] = sqrt_floor(lhs_energy);
    r.lhs_floor = lroot;
    r.lhs_exact = lexact;
    r.rhs_floor_sum = 0;
    r.rhs_all_exact = true;
    for (const auto& [v, b] : d.fibres) {
        auto [root, exact] = sqrt_floor(additive_energy(b, b));
        r.rhs_floor_sum += root;
        r.rhs_all_exact = r.rhs_all_exact && exact;
    }
    r.ratio = make_rat(r.lhs_floor, r.rhs_floor_sum);
    r.crude_ratio = make_rat(lhs_energy,
                             Int(d.source.size()) * Int(d.source.size()) *
                                 Int(d.max_fibre_size()));
    return r;
}

// Witness for the exponent-3/2 product estimate.
struct ThreeHalvesWitness {
    std::vector<unsigned long> v1;
    IntSet a_prime;        // union of p^v2 B_v2 over V' = {v2 : |B_v2| <= |B_v1|}
    Int coprime_mass;      // sum over V' of M(v1, v2)
    Int product_size;      // |A.A|
    Rat product_lower;     // |A||B_v1| / 4^(k+1)
    bool ok;
};

inline ThreeHalvesWitness three_halves_witness(const FibredDecomposition& d, unsigned long k) {
    if (d.fibres.empty()) throw EmptyDecomposition("three_halves_witness: no fibres");
    const Int na(d.source.size());

    std::vector<const std::vector<unsigned long>*> keys;
    for (const auto& [v, b] : d.fibres) keys.push_back(&v);

    std::map<std::pair<std::size_t, std::size_t>, Int> m;
    for (std::size_t i = 0; i < keys.size(); ++i)
        for (std::size_t j = 0; j < keys.size(); ++j)
            m[{i, j}] = coprime_pairs(d.fibres.at(*keys[i]), d.fibres.at(*keys[j]));

    for (std::size_t i = 0; i < keys.size(); ++i) {  // map order = lexicographic in v
        std::size_t size_i = d.fibres.at(*keys[i]).size();
        Int mass = 0;
        for (std::size_t j = 0; j < keys.size(); ++j)
            if (d.fibres.at(*keys[j]).size() <= size_i) mass += m.at({i, j});
        if (4 * mass >= na * Int(size_i)) {
            std::vector<Int> elems;
            for (std::size_t j = 0; j < keys.size(); ++j) {
                if (d.fibres.at(*keys[j]).size() > size_i) continue;
                Int mono = monomial_int(d.primes, *keys[j]);
                for (const auto& b : d.fibres.at(*keys[j])) elems.push_back(mono * b);
            }
            ThreeHalvesWitness w;
            w.v1 = *keys[i];
            w.a_prime = IntSet(std::move(elems));
            w.coprime_mass = mass;
            w.product_size = Int(product_set(d.source, d.source).size());
            w.product_lower = make_rat(na * Int(size_i), int_pow(Int(4), k + 1));
            bool prime_big_enough = 4 * Int(w.a_prime.size()) >= na;
            bool product_big_enough = Rat(w.product_size) >= w.product_lower;
            w.ok = prime_big_enough && product_big_enough;
            return w;
        }
    }
    throw NoWitness("three_halves_witness: no fibre satisfies the mass bound; "
                    "was the decomposition produced by fibred_structure?");
}

// Dual form: A = union over b in B of b . Gamma_b with Gamma_b in <P>_+ and
// all fibre sizes inside one dyadic band [L, 2L].
struct CosetDecomposition {
    PrimeTuple primes;
    IntSet base;                   // B
    std::map<Int, IntSet> gamma;   // b -> Gamma_b
    Int band = 1;                  // L
    IntSet source;

    void validate() const {
        std::vector<Int> rebuilt;
        for (const auto& [b, gs] : gamma) {
            if (primes.coprime_part(b) != b)
                throw InvariantViolation("coset base not coprime to P");
            if (Int(gs.size()) < band || Int(gs.size()) > 2 * band)
                throw InvariantViolation("coset fibre size outside [L, 2L]");
            for (const auto& g : gs) {
                if (!group_membership(Rat(g), primes, MembershipMode::semigroup))
                    throw InvariantViolation("coset fibre element outside <P>_+");
                rebuilt.push_back(b * g);
            }
        }
        std::sort(rebuilt.begin(), rebuilt.end());
        for (std::size_t i = 1; i < rebuilt.size(); ++i)
            if (rebuilt[i - 1] == rebuilt[i])
                throw InvariantViolation("coset decomposition overlaps");
        if (rebuilt != source.elements())
            throw InvariantViolation("coset decomposition does not rebuild the source");
        std::vector<Int> bases;
        for (const auto& [b, gs] : gamma) bases.push_back(b);
        if (bases != base.elements())
            throw InvariantViolation("coset base set disagrees with the fibre map");
    }
};

enum class IterationBranch { small_base, half_pairs };

inline const char* to_string(IterationBranch b) {
    return b == IterationBranch::small_base ? "smallBase" : "halfPairs";
}

struct IterationState {
    IntSet set;                     // A_j
    std::map<Int, IntSet> gamma;    // b -> Gamma_b, bases coprime to primes so far
    std::vector<Int> primes;        // p_1 .. p_j in pick order
    unsigned long k = 0;
    unsigned long j = 0;
    Int band = 1;                   // L of the current banding

    static IterationState initial(const IntSet& a, unsigned long k) {
        IterationState s;
        s.set = a;
        for (const auto& x : a) s.gamma.emplace(x, IntSet{1});
        s.k = k;
        s.j = 0;
        s.band = 1;
        return s;
    }
};

struct IterationResult {
    bool terminal = false;
    IterationBranch branch = IterationBranch::small_base;  // valid when terminal
    IterationState next;                                   // valid when !terminal
    Int chosen_prime;                                      // valid when !terminal
    unsigned long level = 0;                               // l with L = 2^l
};

namespace detail {

// Ordered pairs (a,a') whose gcd has all prime factors among `primes`
// (gcd = 1 when the list is empty); diagonal included.
inline Int pairs_with_gcd_inside(const IntSet& a, const std::vector<Int>& primes) {
    auto parts = map_chunks<std::uint64_t>(a.size(), 16, [&](std::size_t lo, std::size_t hi) {
        std::uint64_t good = 0;
        Int g, rest;
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j2 = 0; j2 < a.size(); ++j2) {
                mpz_gcd(g.get_mpz_t(), a[i].get_mpz_t(), a[j2].get_mpz_t());
                for (const auto& p : primes) {
                    mpz_remove(rest.get_mpz_t(), g.get_mpz_t(), p.get_mpz_t());
                    mpz_swap(g.get_mpz_t(), rest.get_mpz_t());
                }
                if (g == 1) ++good;
            }
        }
        return good;
    });
    unsigned __int128 total = 0;
    for (auto c : parts) total += c;
    return u128_to_int(total);
}

}  // namespace detail

// One pass of the iteration lemma.  Terminal when the base is already small
// or half of all ordered pairs have their gcd inside the group generated so
// far; otherwise restricts to the heaviest new prime, regroups the bases and
// pigeonholes the fibre sizes into one dyadic band.
inline IterationResult iteration_step(const IterationState& s) {
    if (s.j != s.primes.size())
        throw InconsistentState("iteration_step: j disagrees with the prime list");
    if (s.j >= s.k) throw InconsistentState("iteration_step: j must be < k");
    std::size_t mass = 0;
    for (const auto& [b, gs] : s.gamma) mass += gs.size();
    if (mass != s.set.size())
        throw InconsistentState("iteration_step: coset form does not cover A_j");

    IterationResult res;
    if (s.gamma.size() <= 2 * s.k) {
        res.terminal = true;
        res.branch = IterationBranch::small_base;
        return res;
    }
    Int good = detail::pairs_with_gcd_inside(s.set, s.primes);
    if (2 * good >= Int(s.set.size()) * Int(s.set.size())) {
        res.terminal = true;
        res.branch = IterationBranch::half_pairs;
        return res;
    }

    // Heaviest unused prime; smallest prime on ties.  Map order gives both.
    std::map<Int, std::size_t> degree;
    for (const auto& x : s.set)
        for (const auto& [p, e] : factorize(x).factors)
            if (std::find(s.primes.begin(), s.primes.end(), p) == s.primes.end()) ++degree[p];
    if (degree.empty())
        throw InvariantViolation("iteration_step: no prime available outside the used list");
    Int p_next;
    std::size_t best = 0;
    for (const auto& [p, deg] : degree) {
        if (deg > best) {
            best = deg;
            p_next = p;
        }
    }

    // Keep the fibres of bases divisible by p_next, pull the p-part across,
    // and merge fibres whose reduced bases collide.
    std::map<Int, std::vector<Int>> regrouped;
    Int rest;
    for (const auto& [b, gs] : s.gamma) {
        if (!mpz_divisible_p(b.get_mpz_t(), p_next.get_mpz_t())) continue;
        unsigned long v = static_cast<unsigned long>(
            mpz_remove(rest.get_mpz_t(), b.get_mpz_t(), p_next.get_mpz_t()));
        Int shift = int_pow(p_next, v);
        auto& bucket = regrouped[rest];
        for (const auto& g : gs) bucket.push_back(g * shift);
    }
    if (regrouped.empty())
        throw InvariantViolation("iteration_step: chosen prime divides no base");

    std::map<Int, IntSet> merged;
    for (auto& [b, gs] : regrouped) merged.emplace(b, IntSet(std::move(gs)));

    // Dyadic pigeonhole on fibre sizes: maximize 2^l |B'_l|, smallest l wins ties.
    std::map<unsigned long, std::size_t> level_count;
    for (const auto& [b, gs] : merged) {
        unsigned long l = 63 - static_cast<unsigned long>(__builtin_clzll(gs.size()));
        ++level_count[l];
    }
    unsigned long best_level = 0;
    std::uint64_t best_score = 0;
    for (const auto& [l, cnt] : level_count) {
        std::uint64_t score = (std::uint64_t{1} << l) * cnt;
        if (score > best_score) {
            best_score = score;
            best_level = l;
        }
    }

    IterationState next;
    next.k = s.k;
    next.j = s.j + 1;
    next.primes = s.primes;
    next.primes.push_back(p_next);
    next.band = pow2(best_level);
    std::vector<Int> elems;
    for (const auto& [b, gs] : merged) {
        unsigned long l = 63 - static_cast<unsigned long>(__builtin_clzll(gs.size()));
        if (l != best_level) continue;
        for (const auto& g : gs) elems.push_back(b * g);
        next.gamma.emplace(b, gs);
    }
    next.set = IntSet(std::move(elems));

    // |A_{j+1}| >= |A_j| / (2(k-j) log2 |A_j|), a theorem for this recipe.
    Rat lhs = Rat(Int(next.set.size())) * Rat(2 * (s.k - s.j)) * log2_upper(Int(s.set.size()));
    if (lhs < Rat(Int(s.set.size())))
        throw InvariantViolation("iteration_step: dyadic level keeps too little of A");

    res.terminal = false;
    res.next = std::move(next);
    res.chosen_prime = p_next;
    res.level = best_level;
    return res;
}

struct IterationTraceStep {
    unsigned long j = 0;
    std::size_t set_size = 0;
    std::size_t base_size = 0;
    bool terminal = false;
    IterationBranch branch = IterationBranch::small_base;  // terminal steps
    Int prime;                                             // continue steps
    unsigned long level = 0;
    Int band;
};

struct StructureReport {
    unsigned long k = 0;
    FibredDecomposition fibred;
    CosetDecomposition coset;
    Rat K;                     // |A.A| / |A| on the original set
    Int product_size;          // |A.A|
    bool size_bound_ok = false;
    bool base_bound_ok = false;
    bool base_small = false;   // which disjunct held: |B| <= 2k
    IterationBranch termination_branch = IterationBranch::small_base;
    std::vector<IterationTraceStep> trace;
    Rat log2_cardinality;      // the rounded-up rational used in the size bound
};

// Run the iteration to termination (at most k steps) and emit both
// decompositions of the regular subset, with the theorem's two bounds
// checked exactly.
inline StructureReport regular_structure(const IntSet& a, unsigned long k) {
    if (a.size() < 2) throw BadInput("regular_structure: need |A| >= 2");
    if (a.contains_zero()) throw ZeroElement("regular_structure: 0 in A");
    std::string offenders;
    for (const auto& x : a) {
        if (abs(x) != 1 && omega(x) > k) {
            if (!offenders.empty()) offenders += ", ";
            offenders += x.get_str();
        }
    }
    if (!offenders.empty())
        throw OmegaTooLarge("regular_structure: omega > " + std::to_string(k) + " for " +
                            offenders);

    StructureReport rep;
    rep.k = k;

    IterationState state = IterationState::initial(a, k);
    while (true) {
        if (state.j == k) {
            // omega(b) <= k - j = 0 forces B inside the units, so the small
            // base disjunct must hold here.
            if (state.gamma.size() > 2 * k)
                throw InvariantViolation("regular_structure: base not small at j = k");
            IterationTraceStep t;
            t.j = state.j;
            t.set_size = state.set.size();
            t.base_size = state.gamma.size();
            t.terminal = true;
            t.branch = IterationBranch::small_base;
            rep.trace.push_back(std::move(t));
            rep.termination_branch = IterationBranch::small_base;
            break;
        }
        IterationResult r = iteration_step(state);
        IterationTraceStep t;
        t.j = state.j;
        t.set_size = state.set.size();
        t.base_size = state.gamma.size();
        if (r.terminal) {
            t.terminal = true;
            t.branch = r.branch;
            rep.trace.push_back(std::move(t));
            rep.termination_branch = r.branch;
            break;
        }
        t.prime = r.chosen_prime;
        t.level = r.level;
        t.band = r.next.band;
        rep.trace.push_back(std::move(t));
        state = std::move(r.next);
    }

    std::vector<Int> sorted_primes = state.primes;
    std::sort(sorted_primes.begin(), sorted_primes.end());
    PrimeTuple tuple = PrimeTuple::unchecked(std::move(sorted_primes));

    rep.coset.primes = tuple;
    rep.coset.gamma = state.gamma;
    rep.coset.band = state.band;
    rep.coset.source = state.set;
    std::vector<Int> bases;
    for (const auto& [b, gs] : state.gamma) bases.push_back(b);
    rep.coset.base = IntSet::from_sorted_unique(std::move(bases));

    // Fibred form: B_v = {b in B : p^v in Gamma_b}.
    std::map<std::vector<unsigned long>, std::vector<Int>> fibre_groups;
    for (const auto& [b, gs] : state.gamma)
        for (const auto& g : gs) fibre_groups[tuple.valuations(g)].push_back(b);
    rep.fibred.primes = tuple;
    rep.fibred.source = state.set;
    for (auto& [v, elems] : fibre_groups) rep.fibred.fibres.emplace(v, IntSet(std::move(elems)));

    rep.product_size = Int(product_set(a, a).size());
    rep.K = make_rat(rep.product_size, Int(a.size()));

    // |A~| >= |A| / (2^k k! (log2|A|)^k), compared as exact rationals.
    rep.log2_cardinality = log2_upper(Int(a.size()));
    Rat lam_pow = 1;
    for (unsigned long i = 0; i < k; ++i) lam_pow *= rep.log2_cardinality;
    rep.size_bound_ok =
        Rat(Int(state.set.size())) * Rat(pow2(k)) * Rat(factorial(k)) * lam_pow >=
        Rat(Int(a.size()));

    // |B| <= 2k  or  |B| <= 4^(k+2) K |A| / |A~|  ==  |B||A~| <= 4^(k+2)|A.A|.
    rep.base_small = rep.coset.base.size() <= 2 * k;
    bool base_product_ok = Int(rep.coset.base.size()) * Int(state.set.size()) <=
                           int_pow(Int(4), k + 2) * rep.product_size;
    rep.base_bound_ok = rep.base_small || base_product_ok;
    return rep;
}

}  // namespace fiberlab
