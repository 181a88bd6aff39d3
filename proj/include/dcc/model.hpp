#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcc {

using VarId = std::uint32_t;

enum class VarKind : std::uint8_t { chance, decision, value };

// Exit codes of the command-line tool are derived from these.
enum class ErrorClass : int {
    syntax = 2,
    semantic = 3,
    order = 4,
    capacity = 5,
    evidence = 6,
    internal = 7,
    usage = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

const char* kind_name(VarKind k);

// Flat table, row-major over the declared parent order (last parent varies
// fastest), then over the owner's own states for chance variables.
struct NumericTable {
    std::vector<double> entries;
    std::vector<std::uint8_t> hard;  // same length as entries
};

struct Variable {
    std::string name;
    VarKind kind = VarKind::chance;
    std::vector<std::string> states;  // empty for value variables
    std::vector<VarId> parents;
    NumericTable table;  // empty for decisions
    std::optional<std::vector<VarId>> requisite;  // user override, decisions only
};

// Input form with names instead of ids.
struct VariableSpec {
    std::string name;
    VarKind kind = VarKind::chance;
    std::vector<std::string> states;
    std::vector<std::string> parents;
    std::vector<double> table;
    std::vector<std::size_t> hard_cells;
    std::optional<std::vector<std::string>> requisite;
};

class InfluenceDiagram {
public:
    // Validates everything and throws Error on the first violation.
    static InfluenceDiagram build(std::vector<VariableSpec> specs,
                                  std::vector<std::string> decision_order = {},
                                  std::vector<std::string> order_hint = {});

    std::size_t size() const { return vars_.size(); }
    const Variable& var(VarId v) const { return vars_.at(v); }
    const std::vector<Variable>& variables() const { return vars_; }
    std::optional<VarId> find(std::string_view name) const;
    VarId id(std::string_view name) const;  // throws semantic error when absent
    const std::string& name(VarId v) const { return vars_.at(v).name; }
    VarKind kind(VarId v) const { return vars_.at(v).kind; }

    const std::vector<VarId>& children(VarId v) const { return children_.at(v); }
    const std::vector<VarId>& topological() const { return topo_; }
    // Decisions in the order they are made.
    const std::vector<VarId>& decisions() const { return decisions_; }
    // Chance variables with a decision ancestor.
    bool responsive(VarId v) const { return responsive_.at(v) != 0; }
    bool is_ancestor(VarId a, VarId b) const;

    // Value variables have a single placeholder state.
    std::size_t state_count(VarId v) const;
    std::size_t parent_configs(VarId v) const;
    // Index of the table row selected by the parent states in a full
    // assignment (indexed by VarId).
    std::size_t row(VarId v, std::span<const std::uint32_t> assignment) const;
    std::size_t cell(VarId v, std::span<const std::uint32_t> assignment) const;

    // Everything a decision may depend on under no-forgetting: the parents of
    // itself and of every earlier decision, plus the earlier decisions.
    std::vector<VarId> observed_before(VarId decision) const;
    std::size_t decision_rank(VarId decision) const;

    // Copy with the parent list of a decision replaced.
    InfluenceDiagram with_decision_parents(VarId decision, std::vector<VarId> parents) const;
    // Copy with every table replaced; sizes must match.
    InfluenceDiagram with_tables(std::vector<NumericTable> tables) const;

    std::vector<VariableSpec> to_specs() const;
    std::vector<std::string> decision_order_names() const;
    // Elimination order stored with the file, possibly empty.
    const std::vector<std::string>& order_hint() const { return order_hint_; }

    // Throws a semantic error naming two disconnected variables.
    void require_connected(const std::string& context) const;

private:
    void finish(bool check_connected = true);

    std::vector<Variable> vars_;
    std::vector<std::vector<VarId>> children_;
    std::vector<VarId> topo_;
    std::vector<VarId> decisions_;
    std::vector<std::uint8_t> responsive_;
    std::vector<std::vector<std::uint8_t>> ancestor_;
    std::vector<std::string> order_hint_;
};

// Per variable: one entry per state (chance, decision) or a single weight
// (value), each flagged hard or soft.
struct EvidenceVector {
    std::vector<std::vector<double>> lambda;
    std::vector<std::vector<std::uint8_t>> hard;
    std::vector<std::string> warnings;

    static EvidenceVector neutral(const InfluenceDiagram& d);
    bool touches_responsive(const InfluenceDiagram& d) const;
};

struct EvidenceItem {
    std::string variable;
    std::optional<std::string> state;
    std::optional<double> weight;
    bool hard = false;
};

EvidenceVector set_evidence(const InfluenceDiagram& d, std::span<const EvidenceItem> items);

InfluenceDiagram parse_diagram(std::string_view text);
std::string serialize_diagram(const InfluenceDiagram& d);
std::vector<EvidenceItem> parse_evidence(std::string_view text);
std::string read_file(const std::string& path);

// Same structure with every chance/decision variable re-based to k states
// and uniform placeholder tables (value tables all ones).
InfluenceDiagram with_uniform_states(const InfluenceDiagram& d, std::size_t k);

}  // namespace dcc
