#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcc/circuit.hpp"

namespace dcc {

// A max node keeps its first child unless a later one beats it by more
// than this relative margin.
inline constexpr double tie_tolerance = 1e-12;

struct SweepValues {
    std::vector<double> P;  // g_x(e)
    std::vector<double> V;  // g_x(e')
    std::vector<std::uint32_t> argmax;  // arc offset within the node, max nodes only
    std::size_t arc_touches = 0;  // one per arc read

    double meu(NodeId root) const { return V[root] / P[root]; }
};

struct AdjointTriple {
    std::vector<double> A;  // dg(e)/dP_x
    std::vector<double> B;  // dg(e')/dP_x
    std::vector<double> C;  // dg(e')/dV_x
    std::size_t arc_touches = 0;  // one propagation per arc
};

void evaluate_into(const DecisionCircuit& c, const std::vector<double>& params, SweepValues& out);
SweepValues evaluate(const DecisionCircuit& c, const std::vector<double>& params);
// Leaves read g_x(e) from for_p and g_x(e') from for_v; lets the two leaf
// functions be perturbed separately.
void evaluate_split(const DecisionCircuit& c, const std::vector<double>& for_p, const std::vector<double>& for_v,
                    SweepValues& out);

void differentiate_into(const DecisionCircuit& c, const SweepValues& s, AdjointTriple& out);
AdjointTriple differentiate(const DecisionCircuit& c, const SweepValues& s);

// One rule per decision over its observed parents in the compiled diagram.
// choice[i] is the alternative for the i-th parent instantiation (first
// parent most significant), or -1 where the instantiation is not reached
// with positive probability.
struct DecisionRule {
    std::string decision;
    std::vector<std::string> observed;
    std::vector<std::uint32_t> radix;
    std::vector<int> choice;
};

struct Policy {
    std::vector<DecisionRule> rules;

    const DecisionRule* find(const std::string& decision) const;
    std::string to_text(const InfluenceDiagram& d) const;
};

Policy extract_policy(const DecisionCircuit& c, const SweepValues& s);
Policy extract_policy(const DecisionCircuit& c, const SweepValues& s, const AdjointTriple& adj);

struct LeafSensitivity {
    NodeId leaf = 0;
    std::uint32_t slot = 0;
    std::string label;
    double A = 0, B = 0, C = 0;
    double d_ge = 0;   // dg(e)/dparam
    double d_gep = 0;  // dg(e')/dparam
};

std::vector<LeafSensitivity> leaf_sensitivities(const DecisionCircuit& c, const SweepValues& s,
                                                const AdjointTriple& adj);
std::string sensitivity_csv(const std::vector<LeafSensitivity>& rows);

struct QueryResult {
    double p_evidence = 0;
    double meu = 0;
    bool possible = true;
    Policy policy;
    std::vector<std::string> warnings;
};

// Binds the evidence to the circuit's leaves, sweeps, and reads off the root.
QueryResult query(const DecisionCircuit& c, const InfluenceDiagram& original, const EvidenceVector& e);

// Largest relative spread of P over the children of any max node.
double max_node_spread(const DecisionCircuit& c, const SweepValues& s);

}  // namespace dcc
