#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcc/backbone.hpp"
#include "dcc/circuit.hpp"
#include "dcc/graph.hpp"
#include "dcc/model.hpp"

namespace dcc {

struct PipelineOptions {
    std::optional<std::vector<std::string>> order;  // falls back to the file, then the heuristic
    CompileMode mode = CompileMode::branching;
    Placement placement = Placement::highest;
    bool prune = false;
    bool coalesce = false;
    std::size_t cap = 10'000'000;
};

// Every intermediate of one compile, kept for reporting.
struct Compiled {
    InfluenceDiagram reduced;
    EliminationOrder order;
    std::string order_source;  // "given", "file" or "heuristic"
    DirectedChordalGraph chordal;
    std::optional<LongestPathTree> tree;
    Backbone backbone;
    DecisionCircuit circuit;
    SizeStats size;
};

EliminationOrder choose_order(const InfluenceDiagram& reduced, const std::optional<std::vector<std::string>>& names,
                              std::string* source = nullptr);

// Reduces, orders, triangulates, plans and compiles. Throws Error.
Compiled compile(const InfluenceDiagram& d, const EvidenceVector& e, const PipelineOptions& opt = {});

}  // namespace dcc
