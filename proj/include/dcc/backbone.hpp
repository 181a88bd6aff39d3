#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcc/graph.hpp"
#include "dcc/model.hpp"

namespace dcc {

enum class EntryOp : std::uint8_t { sum, max, product, zero_value };

struct BackboneEntry {
    EntryOp op = EntryOp::sum;
    std::vector<VarId> vars;   // introduced (sum, max) or multiplied (product)
    std::vector<VarId> scope;  // available variables W, in order position
};

// One segment per variable; a segment with several children is a branch point.
struct BackboneSegment {
    VarId var = 0;
    std::vector<VarId> key;  // W before var is introduced
    std::vector<BackboneEntry> entries;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    bool carries_value = false;  // a value product here or below
};

enum class BackboneShape : std::uint8_t { tree, chain };
enum class Placement : std::uint8_t { highest, lowest };

struct Backbone {
    BackboneShape shape = BackboneShape::tree;
    EliminationOrder order;
    std::vector<std::vector<VarId>> chordal_parents;
    std::vector<BackboneSegment> segments;  // indexed by order position
    std::vector<std::size_t> segment_of;    // variable -> segment

    std::size_t root() const { return 0; }
    // Entry count with merged product entries counted once per variable.
    std::size_t entry_count() const;
    std::size_t zero_value_count() const;
    std::vector<VarId> scope_of(std::size_t segment) const;  // key plus var
};

// Step 1: sum/max/product entries per variable, branching with the tree.
Backbone build_backbone(const DirectedChordalGraph& dcg, const LongestPathTree& tree, const InfluenceDiagram& d);

// Same entries strung along the order with no branching; scopes carry every
// earlier variable that is still needed further down.
Backbone build_chain_backbone(const DirectedChordalGraph& dcg, const InfluenceDiagram& d);

// Step 2: one product entry per chance variable below a segment whose scope
// holds its whole family; products landing on the same segment are merged.
Backbone place_products(Backbone b, const InfluenceDiagram& d, Placement placement = Placement::highest);

std::optional<std::string> verify_backbone(const Backbone& b, const InfluenceDiagram& d);

std::string entry_text(const BackboneEntry& e, const InfluenceDiagram& d);
std::string export_backbone(const Backbone& b, const InfluenceDiagram& d);
std::string backbone_dot(const Backbone& b, const InfluenceDiagram& d);

}  // namespace dcc
