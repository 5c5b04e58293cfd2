#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "fiberlab/arith.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/structure.hpp"

namespace fiberlab {

struct GrowthReport {
    Int sumset_size;
    Int prodset_size;
    std::optional<double> max_growth_exponent;  // ln max(|A+A|,|A.A|) / ln|A|; absent when |A| = 1
};

inline GrowthReport sum_product_report(const IntSet& a) {
    if (a.empty()) throw BadInput("sum_product_report: empty set");
    GrowthReport r;
    r.sumset_size = Int(sumset(a, a).size());
    r.prodset_size = Int(product_set(a, a).size());
    if (a.size() > 1) {
        Int mx = std::max(r.sumset_size, r.prodset_size);
        r.max_growth_exponent =
            std::log(mx.get_d()) / std::log(static_cast<double>(a.size()));
    }
    return r;
}

struct PipelineReport {
    std::size_t input_size = 0;       // |A| as given
    std::size_t size = 0;             // |A| after sanitizing
    unsigned long k = 0;
    unsigned long k_max = 0;          // max omega over A
    double eps = 0.0;
    Rat K;                            // |A.A| / |A|
    StructureReport structure;
    Int eplus_tilde;                  // E_+(A~, A~)
    Rat S;                            // |A.A| + |A~|^4 / E_+(A~,A~)
    std::optional<double> exponent;   // ln S / ln |A|
    std::optional<double> empirical_c;
    Int sumset_size;
    Int prodset_size;
    std::optional<double> max_growth_exponent;
    bool hypothesis_ok = false;       // (ln|A|)^(1-6 eps) >= k
};

namespace detail {

// Keep the larger of the positive part and the negated negative part
// (positives win ties), dropping 0.
inline IntSet sanitize(const IntSet& a) {
    std::vector<Int> pos, neg;
    for (const auto& x : a) {
        if (x > 0) pos.push_back(x);
        else if (x < 0) neg.push_back(-x);
    }
    if (pos.size() >= neg.size()) return IntSet(std::move(pos));
    return IntSet(std::move(neg));
}

inline StructureReport degenerate_structure(const IntSet& a) {
    StructureReport rep;
    rep.k = 0;
    rep.coset.source = a;
    rep.coset.base = a;
    for (const auto& x : a) rep.coset.gamma.emplace(x, IntSet{1});
    rep.coset.band = 1;
    rep.fibred.source = a;
    rep.fibred.fibres.emplace(std::vector<unsigned long>{}, a);
    rep.product_size = Int(product_set(a, a).size());
    rep.K = make_rat(rep.product_size, Int(a.size()));
    rep.size_bound_ok = true;
    rep.base_bound_ok = true;
    rep.base_small = true;
    rep.log2_cardinality = Rat(0);
    return rep;
}

}  // namespace detail

// The main-theorem experiment: sanitize, measure K, extract the regular
// subset, and evaluate S = |A.A| + |A~|^4 / E_+(A~,A~) with its exponent.
inline PipelineReport run_pipeline(const IntSet& a_in, unsigned long k, double eps) {
    if (a_in.empty()) throw BadInput("run_pipeline: empty set");
    if (!(eps > 0.0 && eps < 1.0 / 6.0)) throw BadInput("run_pipeline: eps must be in (0, 1/6)");
    if (k == 0) throw BadParameter("run_pipeline: k must be >= 1");

    PipelineReport rep;
    rep.input_size = a_in.size();
    rep.eps = eps;
    rep.k = k;

    IntSet a = detail::sanitize(a_in);
    if (a.empty()) throw EmptyAfterSanitize("run_pipeline: nothing left after sanitizing");
    rep.size = a.size();

    std::string offenders;
    rep.k_max = 0;
    for (const auto& x : a) {
        unsigned long o = x == 1 ? 0 : omega(x);
        rep.k_max = std::max(rep.k_max, o);
        if (o > k) {
            if (!offenders.empty()) offenders += ", ";
            offenders += x.get_str();
        }
    }
    if (!offenders.empty())
        throw OmegaTooLarge("run_pipeline: omega > " + std::to_string(k) + " for " + offenders);

    rep.structure = a.size() == 1 ? detail::degenerate_structure(a) : regular_structure(a, k);
    rep.K = rep.structure.K;

    const IntSet& tilde = rep.structure.coset.source;
    rep.eplus_tilde = additive_energy(tilde, tilde);

    Int tilde_sz(tilde.size());
    Rat tail = make_rat(int_pow(tilde_sz, 4), rep.eplus_tilde);
    rep.S = Rat(rep.structure.product_size) + tail;

    if (rep.S < Rat(rep.structure.product_size))
        throw InvariantViolation("run_pipeline: S below |A.A|");
    // Cauchy-Schwarz chain: |A~|^4 / E_+(A~,A~) <= |A~+A~| |A~| <= |A+A| |A|.
    Int tilde_sumset(sumset(tilde, tilde).size());
    rep.sumset_size = Int(sumset(a, a).size());
    rep.prodset_size = rep.structure.product_size;
    if (tail > Rat(tilde_sumset * tilde_sz))
        throw InvariantViolation("run_pipeline: Cauchy-Schwarz chain broken on A~");
    if (tilde_sumset * tilde_sz > rep.sumset_size * Int(a.size()))
        throw InvariantViolation("run_pipeline: Cauchy-Schwarz chain broken against A");

    double ln_a = std::log(static_cast<double>(a.size()));
    if (a.size() > 1) {
        rep.exponent = std::log(rep.S.get_d()) / ln_a;
        Int mx = std::max(rep.sumset_size, rep.prodset_size);
        rep.max_growth_exponent = std::log(mx.get_d()) / ln_a;
        // S < |A|^(5/3)  <=>  S^3 < |A|^5, exactly
        Rat s3 = rep.S * rep.S * rep.S;
        if (s3 < Rat(int_pow(Int(a.size()), 5))) {
            double deficit = -std::log(rep.S.get_d() /
                                       std::pow(static_cast<double>(a.size()), 5.0 / 3.0));
            rep.empirical_c = deficit / std::pow(ln_a, 1.0 - eps);
        }
    }
    rep.hypothesis_ok = std::pow(ln_a, 1.0 - 6.0 * eps) >= static_cast<double>(k);
    return rep;
}

}  // namespace fiberlab
