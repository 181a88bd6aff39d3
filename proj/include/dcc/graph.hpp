#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcc/model.hpp"

namespace dcc {

// Keeps, for every decision, only the observations relevant to its value
// descendants. Decisions are visited last to first; a user override in the
// file replaces the computed set.
InfluenceDiagram requisite_reduce(const InfluenceDiagram& d);

// True when some path between x and a member of targets is active given the
// conditioning set (d-connection, evaluated by reachability).
bool d_connected(const InfluenceDiagram& d, VarId x, const std::vector<VarId>& targets,
                 const std::vector<VarId>& given);

struct MoralGraph {
    std::size_t n = 0;
    std::vector<std::vector<VarId>> parents;         // arcs of the reduced diagram
    std::vector<std::pair<VarId, VarId>> added;      // undirected moral edges
    std::vector<std::vector<VarId>> neighbours;      // sorted, undirected view

    bool adjacent(VarId a, VarId b) const;
};

MoralGraph moralize(const InfluenceDiagram& reduced);

// Top-down nesting order of the circuit.
struct EliminationOrder {
    std::vector<VarId> vars;
    std::vector<std::size_t> pos;  // inverse permutation

    static EliminationOrder from(std::vector<VarId> vars, std::size_t n);
    static EliminationOrder from_names(const InfluenceDiagram& d, const std::vector<std::string>& names);
    std::string to_string(const InfluenceDiagram& d) const;
};

struct OrderDiagnostics {
    bool consistent = true;
    std::string violation;
};

OrderDiagnostics check_order(const InfluenceDiagram& reduced, const EliminationOrder& order);

struct DirectedChordalGraph {
    std::size_t n = 0;
    EliminationOrder order;
    std::vector<std::vector<VarId>> parents;  // sorted by position in the order
    std::vector<std::vector<VarId>> children;
    std::vector<std::pair<VarId, VarId>> fill;  // (earlier, later)

    bool has_arc(VarId from, VarId to) const;
    bool is_fill(VarId from, VarId to) const;
    std::vector<std::vector<VarId>> undirected() const;
};

DirectedChordalGraph triangulate(const MoralGraph& moral, const EliminationOrder& order);

// Chordal graph from a plain undirected adjacency (used by tests and the
// minimality check).
DirectedChordalGraph triangulate_adjacency(const std::vector<std::vector<VarId>>& adjacency,
                                           const EliminationOrder& order);

// Independent test: maximum cardinality search followed by the
// perfect-elimination check.
bool is_chordal(const std::vector<std::vector<VarId>>& adjacency);

struct LongestPathTree {
    VarId root = 0;
    std::vector<std::optional<VarId>> parent;
    std::vector<std::vector<VarId>> children;  // in order position
    std::vector<std::size_t> depth;
};

// Throws an internal error if the graph violates the single-root, unique
// longest path, ancestor or contiguity properties.
LongestPathTree longest_path_tree(const DirectedChordalGraph& dcg);

// Returns a description of the first violated property, if any.
std::optional<std::string> verify_tree(const DirectedChordalGraph& dcg, const LongestPathTree& tree);

struct SizeStats {
    std::size_t n = 0;  // variables
    std::size_t s = 0;  // largest state count
    std::size_t t = 0;  // largest family size
    std::size_t S = 0;  // largest family state space
};

SizeStats size_stats(const DirectedChordalGraph& dcg, const InfluenceDiagram& d);

// Consistent order for diagrams that come without one: decisions in sequence,
// each preceded by what it observes, the rest at the end; greedy minimum fill
// inside every layer.
EliminationOrder heuristic_order(const InfluenceDiagram& reduced);

std::string moral_dot(const MoralGraph& g, const InfluenceDiagram& d);
std::string chordal_dot(const DirectedChordalGraph& g, const InfluenceDiagram& d);
std::string tree_dot(const DirectedChordalGraph& g, const LongestPathTree& t, const InfluenceDiagram& d);

}  // namespace dcc
