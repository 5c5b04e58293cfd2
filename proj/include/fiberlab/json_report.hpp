#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "fiberlab/dilate_energy.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/fourier.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/pipeline.hpp"
#include "fiberlab/structure.hpp"

namespace fiberlab {

using Json = nlohmann::json;

// Canonical report encoding: keys sorted (nlohmann objects are ordered maps),
// integers as decimal strings, rationals as {den,num}, reals as strings with
// 12 significant digits.  Reports are byte-identical for identical inputs.
inline Json json_int(const Int& v) { return v.get_str(); }

inline Json json_rat(const Rat& v) {
    return Json{{"den", v.get_den().get_str()}, {"num", v.get_num().get_str()}};
}

inline Json json_real(double v) { return format_real(v); }

inline Json json_real_opt(const std::optional<double>& v) {
    if (!v) return nullptr;
    return json_real(*v);
}

inline Json json_set(const IntSet& a) {
    Json out = Json::array();
    for (const auto& v : a) out.push_back(v.get_str());
    return out;
}

inline Json json_primes(const PrimeTuple& p) {
    Json out = Json::array();
    for (const auto& q : p.primes()) out.push_back(q.get_str());
    return out;
}

inline Json to_json(const FibredDecomposition& d) {
    Json fibres = Json::array();
    for (const auto& [v, b] : d.fibres) {
        Json exps = Json::array();
        for (unsigned long e : v) exps.push_back(std::to_string(e));
        fibres.push_back(Json{{"elements", json_set(b)}, {"v", exps}});
    }
    return Json{{"fibres", fibres},
                {"primes", json_primes(d.primes)},
                {"sourceSize", std::to_string(d.source.size())}};
}

inline Json to_json(const CosetDecomposition& d) {
    Json gamma = Json::array();
    for (const auto& [b, gs] : d.gamma)
        gamma.push_back(Json{{"base", b.get_str()}, {"gamma", json_set(gs)}});
    return Json{{"L", d.band.get_str()},
                {"baseSize", std::to_string(d.base.size())},
                {"cosets", gamma},
                {"primes", json_primes(d.primes)},
                {"sourceSize", std::to_string(d.source.size())}};
}

inline Json to_json(const StructureReport& r) {
    Json trace = Json::array();
    for (const auto& step : r.trace) {
        Json entry{{"baseSize", std::to_string(step.base_size)},
                   {"j", std::to_string(step.j)},
                   {"setSize", std::to_string(step.set_size)}};
        if (step.terminal) {
            entry["terminal"] = true;
            entry["branch"] = to_string(step.branch);
        } else {
            entry["terminal"] = false;
            entry["prime"] = step.prime.get_str();
            entry["level"] = std::to_string(step.level);
            entry["L"] = step.band.get_str();
        }
        trace.push_back(std::move(entry));
    }
    return Json{{"K", json_rat(r.K)},
                {"L", r.coset.band.get_str()},
                {"baseBoundBranch", r.base_small ? "smallBase" : "productBound"},
                {"baseBoundOk", r.base_bound_ok},
                {"baseSize", std::to_string(r.coset.base.size())},
                {"k", std::to_string(r.k)},
                {"log2Cardinality", json_rat(r.log2_cardinality)},
                {"primes", json_primes(r.coset.primes)},
                {"productSize", json_int(r.product_size)},
                {"r", std::to_string(r.coset.primes.rank())},
                {"sizeBoundOk", r.size_bound_ok},
                {"terminationBranch", to_string(r.termination_branch)},
                {"tildeSize", std::to_string(r.coset.source.size())},
                {"trace", trace}};
}

inline Json to_json(const PipelineReport& r) {
    return Json{{"EplusTilde", json_int(r.eplus_tilde)},
                {"K", json_rat(r.K)},
                {"S", json_rat(r.S)},
                {"empiricalC", json_real_opt(r.empirical_c)},
                {"eps", json_real(r.eps)},
                {"exponent", json_real_opt(r.exponent)},
                {"hypothesisOk", r.hypothesis_ok},
                {"inputSize", std::to_string(r.input_size)},
                {"k", std::to_string(r.k)},
                {"kMax", std::to_string(r.k_max)},
                {"maxGrowthExponent", json_real_opt(r.max_growth_exponent)},
                {"prodsetSize", json_int(r.prodset_size)},
                {"size", std::to_string(r.size)},
                {"structure", to_json(r.structure)},
                {"sumsetSize", json_int(r.sumset_size)}};
}

inline Json to_json(const GrowthReport& r) {
    return Json{{"maxGrowthExponent", json_real_opt(r.max_growth_exponent)},
                {"prodsetSize", json_int(r.prodset_size)},
                {"sumsetSize", json_int(r.sumset_size)}};
}

inline Json to_json(const DilateCountReport& r, bool include_witnesses) {
    Json out{{"bound", json_rat(r.bound)},
             {"count", json_int(r.count)},
             {"ok", r.ok},
             {"truncated", r.truncated}};
    if (include_witnesses) {
        Json w = Json::array();
        for (const auto& [b1, b2, v] : r.witnesses)
            w.push_back(Json{{"b1", b1.get_str()}, {"b2", b2.get_str()}, {"v", std::to_string(v)}});
        out["witnesses"] = std::move(w);
    }
    return out;
}

inline Json to_json(const GammaPairReport& r) {
    return Json{{"bound", json_real(r.bound)},
                {"count", json_int(r.count)},
                {"logConvention", "natural"},
                {"precondOk", r.precond_ok},
                {"ratio", json_real(r.ratio)},
                {"sizeFloorOk", r.size_floor_ok}};
}

inline Json to_json(const ScaleKey& k) {
    if (k.zero) return "zero";
    Json out = Json::array();
    for (unsigned long v : k.vals) out.push_back(std::to_string(v));
    return out;
}

inline Json to_json(const BurkholderStudy& s) {
    Json witness = Json::array();
    for (const auto& [key, sign] : s.witness)
        witness.push_back(Json{{"class", to_json(key)}, {"sign", sign}});
    return Json{{"exhaustive", s.exhaustive},
                {"lq", json_real(s.lq)},
                {"maxRatioMultiplier", json_real(s.max_ratio_multiplier)},
                {"patterns", std::to_string(s.patterns)},
                {"ratioSquareFn", json_real(s.ratio_square_fn)},
                {"sq", json_real(s.sq)},
                {"witness", witness}};
}

inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

inline void write_report(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << dump_report(j);
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace fiberlab
