#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dcc/backbone.hpp"
#include "dcc/graph.hpp"
#include "dcc/model.hpp"

namespace dcc {

using NodeId = std::uint32_t;
inline constexpr NodeId no_node = static_cast<NodeId>(-1);

enum class NodeKind : std::uint8_t { sum, product, max, branch, theta, lambda, constant };
// Value-class children are skipped when a product forms P.
enum class ArcClass : std::uint8_t { probability, value };
enum class CompileMode : std::uint8_t { branching, linear };

const char* node_kind_name(NodeKind k);

enum class ParamKind : std::uint8_t { theta, lambda };

struct ParameterSlot {
    ParamKind kind = ParamKind::theta;
    VarId var = 0;
    std::uint32_t index = 0;  // table cell or state
};

// Flat numbering of every table cell and every evidence slot of a diagram.
class ParameterLayout {
public:
    ParameterLayout() = default;
    explicit ParameterLayout(const InfluenceDiagram& d);

    std::size_t size() const { return slots_.size(); }
    const ParameterSlot& slot(std::uint32_t i) const { return slots_.at(i); }
    std::uint32_t theta(VarId v, std::size_t cell) const;
    std::uint32_t lambda(VarId v, std::size_t state) const;
    std::string label(std::uint32_t i, const InfluenceDiagram& d) const;

    std::vector<double> bind(const InfluenceDiagram& d, const EvidenceVector& e) const;
    std::vector<std::uint8_t> bind_hard(const InfluenceDiagram& d, const EvidenceVector& e) const;

private:
    std::vector<ParameterSlot> slots_;
    std::vector<std::uint32_t> theta_base_, lambda_base_;
};

// Which backbone entry and scope instantiation produced a node.
struct CircuitEntry {
    NodeKind kind = NodeKind::sum;
    std::vector<VarId> vars;
    std::vector<VarId> scope;
};

struct NodeOrigin {
    std::uint32_t entry = static_cast<std::uint32_t>(-1);
    std::uint64_t instance = 0;
};

struct CircuitStats {
    std::size_t nodes = 0;           // operators plus distinct leaves
    std::size_t operators = 0;
    std::size_t leaves = 0;
    std::size_t arcs = 0;            // size: arcs into operators, theta and lambda leaves
    std::size_t constant_arcs = 0;   // arcs into constant leaves, not part of the size
    std::size_t drawn_nodes = 0;     // operators plus one leaf per leaf arc
    std::size_t depth = 0;
    std::size_t per_kind[7] = {};
};

class DecisionCircuit {
public:
    CompileMode mode = CompileMode::branching;
    std::shared_ptr<const InfluenceDiagram> diagram;  // the diagram the leaves refer to
    ParameterLayout layout;
    std::vector<std::string> merged_value_names;  // linear mode: values folded into one

    // Nodes are stored children first; the root is the last node.
    std::vector<NodeKind> kind;
    std::vector<std::uint32_t> first;  // size() + 1 offsets into child
    std::vector<NodeId> child;
    std::vector<ArcClass> arc_class;
    std::vector<std::uint32_t> arc_state;  // state of the introduced variable for sum/max arcs
    std::vector<std::uint32_t> param;      // leaf parameter slot
    std::vector<double> constant;          // constant leaves
    std::vector<ArcClass> leaf_class;      // intrinsic class of leaves
    std::vector<NodeOrigin> origin;
    std::vector<std::pair<NodeId, NodeOrigin>> extra_origins;  // origins of merged duplicates
    std::vector<CircuitEntry> entries;
    std::vector<double> defaults;  // parameters bound at compile time

    std::size_t size() const { return kind.size(); }
    NodeId root() const { return static_cast<NodeId>(kind.size() - 1); }
    std::size_t child_count(NodeId n) const { return first[n + 1] - first[n]; }
    bool is_leaf(NodeId n) const { return kind[n] >= NodeKind::theta; }

    // Parameters in this circuit's layout for a diagram with the same
    // structure as the one compiled (merging values again in linear mode).
    std::vector<double> bind(const InfluenceDiagram& original, const EvidenceVector& e) const;
    std::vector<std::uint8_t> bind_hard(const InfluenceDiagram& original, const EvidenceVector& e) const;
    // Leaf node for every parameter slot, or no_node.
    std::vector<NodeId> leaf_index() const;
};

CircuitStats circuit_stats(const DecisionCircuit& c);

struct CompileOptions {
    Placement placement = Placement::highest;
    std::size_t cap = 10'000'000;  // nodes, arcs and merged table entries
};

DecisionCircuit compile_branching(const Backbone& b, const InfluenceDiagram& reduced, const EvidenceVector& e,
                                  const CompileOptions& opt = {});

// Every value folded into one whose table is the weighted sum, compiled along
// the order without branch nodes. The order must be consistent with the
// original diagram.
DecisionCircuit compile_linear(const InfluenceDiagram& d, const EliminationOrder& order, const EvidenceVector& e,
                               const CompileOptions& opt = {});

// The value-merged diagram used by linear mode.
InfluenceDiagram merge_values(const InfluenceDiagram& d, const EvidenceVector& e, std::size_t cap);

// Drops arcs and nodes made redundant by hard zeros and ones. Throws an
// evidence error when the whole problem collapses to a hard zero.
DecisionCircuit prune(const DecisionCircuit& c, const std::vector<std::uint8_t>& hard,
                      const std::vector<double>& values);

// Merges structurally identical nodes.
DecisionCircuit coalesce_local(const DecisionCircuit& c);

std::string circuit_dot(const DecisionCircuit& c);
std::string circuit_text(const DecisionCircuit& c);

}  // namespace dcc
