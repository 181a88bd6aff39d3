#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcc/model.hpp"

namespace dcc {

struct OracleOptions {
    // Observe everything seen before each decision instead of its parents.
    bool no_forgetting = false;
    // Bound on strategies times joint chance instantiations.
    std::size_t cap = 10'000'000;
};

struct OracleRule {
    std::string decision;
    std::vector<std::string> observed;
    std::vector<std::uint32_t> radix;
    std::vector<std::uint32_t> choice;  // per observed instantiation, first parent most significant
    std::vector<std::uint8_t> reached;  // instantiation has positive probability under the strategy
};

struct OracleResult {
    double p_evidence = 0;
    double g_prime = 0;  // best sum of weighted value times probability
    double meu = 0;
    bool possible = true;
    std::vector<OracleRule> strategy;
    std::uint64_t strategies = 0;
    double p_spread = 0;  // relative spread of P(e) over strategies
};

// Enumerates every strategy and every joint chance instantiation. Ties go to
// the lexicographically smallest strategy.
OracleResult brute_force(const InfluenceDiagram& d, const EvidenceVector& e, const OracleOptions& opt = {});

// Number of strategies, saturating at UINT64_MAX.
std::uint64_t strategy_count(const InfluenceDiagram& d, bool no_forgetting = false);

}  // namespace dcc
