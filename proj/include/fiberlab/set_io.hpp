#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "fiberlab/error.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/numeric.hpp"

namespace fiberlab {

// Set file format: newline-delimited decimal integers, `#` starts a comment.
// Duplicate values are a ParseError unless dedupe is set.
inline IntSet read_set(const std::string& path, bool dedupe = false) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Int> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string token = line.substr(b, e - b + 1);
        if (token.find_first_of(" \t") != std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected one integer");
        Int v;
        if (mpz_set_str(v.get_mpz_t(), token.c_str(), 10) != 0)
            throw ParseError(path + ":" + std::to_string(lineno) + ": not a decimal integer: '" +
                             token + "'");
        values.push_back(std::move(v));
    }
    if (!dedupe) {
        std::vector<Int> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i - 1] == sorted[i])
                throw ParseError(path + ": duplicate value " + sorted[i].get_str() +
                                 " (pass dedupe to accept)");
    }
    return IntSet(std::move(values));
}

inline void write_set(const std::string& path, const IntSet& a) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& v : a) out << v.get_str() << '\n';
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace fiberlab
