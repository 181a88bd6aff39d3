#include "dcc/circuit.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace dcc {

namespace {

[[noreturn]] void internal(const std::string& msg) { throw Error(ErrorClass::internal, msg); }

// Mixed-radix numbering of the instantiations of a scope; the first variable
// is the most significant digit.
struct ScopeIndex {
    std::vector<VarId> vars;
    std::vector<std::uint32_t> radix;
    std::uint64_t count = 1;

    ScopeIndex(const std::vector<VarId>& vs, const InfluenceDiagram& d, std::size_t cap) : vars(vs) {
        for (VarId v : vs) {
            radix.push_back(static_cast<std::uint32_t>(d.state_count(v)));
            count *= radix.back();
            if (count > cap)
                throw Error(ErrorClass::capacity, "a scope has more than " + std::to_string(cap) + " instantiations");
        }
    }
    void decode(std::uint64_t i, std::vector<std::uint32_t>& asg) const {
        for (std::size_t k = vars.size(); k-- > 0;) {
            asg[vars[k]] = static_cast<std::uint32_t>(i % radix[k]);
            i /= radix[k];
        }
    }
    std::uint64_t encode(const std::vector<std::uint32_t>& asg) const {
        std::uint64_t i = 0;
        for (std::size_t k = 0; k < vars.size(); ++k) i = i * radix[k] + asg[vars[k]];
        return i;
    }
};

class Builder {
public:
    Builder(DecisionCircuit& c, const InfluenceDiagram& d, std::size_t cap)
        : c_(c), d_(d), cap_(cap), slot_leaf_(c.layout.size(), no_node) {
        c_.first.assign(1, 0);
    }

    NodeId leaf(std::uint32_t slot, ArcClass cls) {
        if (slot_leaf_[slot] != no_node) return slot_leaf_[slot];
        NodeKind k = c_.layout.slot(slot).kind == ParamKind::theta ? NodeKind::theta : NodeKind::lambda;
        NodeId n = push(k, {}, cls);
        c_.param[n] = slot;
        slot_leaf_[slot] = n;
        return n;
    }

    NodeId zero() {
        if (zero_ == no_node) zero_ = push(NodeKind::constant, {}, ArcClass::value);
        return zero_;
    }

    struct Arc {
        NodeId node;
        ArcClass cls;
        std::uint32_t state;
    };

    NodeId push(NodeKind k, const std::vector<Arc>& arcs, ArcClass leaf_cls = ArcClass::probability,
                NodeOrigin origin = {}) {
        for (const auto& a : arcs) {
            c_.child.push_back(a.node);
            c_.arc_class.push_back(a.cls);
            c_.arc_state.push_back(a.state);
        }
        c_.kind.push_back(k);
        c_.first.push_back(static_cast<std::uint32_t>(c_.child.size()));
        c_.param.push_back(0);
        c_.constant.push_back(0.0);
        c_.leaf_class.push_back(k >= NodeKind::theta ? leaf_cls : ArcClass::probability);
        c_.origin.push_back(origin);
        if (c_.kind.size() > cap_ || c_.child.size() > cap_)
            throw Error(ErrorClass::capacity, "circuit exceeds the cap of " + std::to_string(cap_) + " nodes or arcs");
        return static_cast<NodeId>(c_.kind.size() - 1);
    }

    std::uint32_t entry(NodeKind k, std::vector<VarId> vars, std::vector<VarId> scope) {
        c_.entries.push_back({k, std::move(vars), std::move(scope)});
        return static_cast<std::uint32_t>(c_.entries.size() - 1);
    }

private:
    DecisionCircuit& c_;
    const InfluenceDiagram& d_;
    std::size_t cap_;
    std::vector<NodeId> slot_leaf_;
    NodeId zero_ = no_node;
};

DecisionCircuit construct(const Backbone& b, std::shared_ptr<const InfluenceDiagram> dp, CompileMode mode,
                          std::size_t cap) {
    const InfluenceDiagram& d = *dp;
    DecisionCircuit c;
    c.mode = mode;
    c.diagram = dp;
    c.layout = ParameterLayout(d);
    Builder bld(c, d, cap);
    std::vector<std::uint32_t> asg(d.size(), 0);

    const std::size_t nseg = b.segments.size();
    std::vector<std::vector<NodeId>> head(nseg);  // nodes of each segment's first entry
    std::vector<std::vector<VarId>> head_scope(nseg);

    for (std::size_t s = nseg; s-- > 0;) {
        const auto& seg = b.segments[s];
        const ScopeIndex sc(b.scope_of(s), d, cap);
        std::vector<NodeId> next;
        std::vector<VarId> next_scope;
        if (seg.children.size() == 1) {
            std::size_t ch = seg.children[0];
            const ScopeIndex hs(head_scope[ch], d, cap);
            next.resize(sc.count);
            for (std::uint64_t i = 0; i < sc.count; ++i) {
                sc.decode(i, asg);
                next[i] = head[ch][hs.encode(asg)];
            }
            next_scope = sc.vars;
        } else if (seg.children.size() > 1) {
            std::vector<ScopeIndex> hs;
            for (std::size_t ch : seg.children) hs.emplace_back(head_scope[ch], d, cap);
            std::vector<VarId> chained;
            for (std::size_t ch : seg.children) chained.push_back(b.segments[ch].var);
            std::uint32_t ent = bld.entry(NodeKind::branch, chained, sc.vars);
            next.resize(sc.count);
            for (std::uint64_t i = 0; i < sc.count; ++i) {
                sc.decode(i, asg);
                NodeId acc = head[seg.children[0]][hs[0].encode(asg)];
                for (std::size_t k = 1; k < seg.children.size(); ++k) {
                    NodeId other = head[seg.children[k]][hs[k].encode(asg)];
                    acc = bld.push(NodeKind::branch,
                                   {{acc, ArcClass::probability, 0}, {other, ArcClass::probability, 0}},
                                   ArcClass::probability, {ent, i});
                }
                next[i] = acc;
            }
            next_scope = sc.vars;
        }

        bool pending_zero = false;
        for (std::size_t k = seg.entries.size(); k-- > 0;) {
            const auto& e = seg.entries[k];
            if (e.op == EntryOp::zero_value) {
                pending_zero = true;
                continue;
            }
            const ScopeIndex es(e.scope, d, cap);
            std::vector<NodeId> made(es.count);
            if (e.op == EntryOp::product) {
                std::uint32_t ent = bld.entry(NodeKind::product, e.vars, e.scope);
                std::vector<Builder::Arc> arcs;
                const ScopeIndex* ns = nullptr;
                std::optional<ScopeIndex> ns_store;
                if (!next.empty()) {
                    ns_store.emplace(next_scope, d, cap);
                    ns = &*ns_store;
                }
                for (std::uint64_t i = 0; i < es.count; ++i) {
                    es.decode(i, asg);
                    arcs.clear();
                    if (ns) arcs.push_back({next[ns->encode(asg)], ArcClass::probability, 0});
                    for (VarId v : e.vars) {
                        switch (d.kind(v)) {
                            case VarKind::chance:
                                arcs.push_back({bld.leaf(c.layout.theta(v, d.cell(v, asg)), ArcClass::probability),
                                                ArcClass::probability, 0});
                                arcs.push_back(
                                    {bld.leaf(c.layout.lambda(v, asg[v]), ArcClass::probability), ArcClass::probability, 0});
                                break;
                            case VarKind::decision:
                                arcs.push_back({bld.leaf(c.layout.lambda(v, asg[v]), ArcClass::value), ArcClass::value, 0});
                                break;
                            case VarKind::value:
                                arcs.push_back(
                                    {bld.leaf(c.layout.theta(v, d.row(v, asg)), ArcClass::value), ArcClass::value, 0});
                                arcs.push_back({bld.leaf(c.layout.lambda(v, 0), ArcClass::value), ArcClass::value, 0});
                                break;
                        }
                    }
                    if (pending_zero) arcs.push_back({bld.zero(), ArcClass::value, 0});
                    made[i] = bld.push(NodeKind::product, arcs, ArcClass::probability, {ent, i});
                }
                pending_zero = false;
            } else {
                if (pending_zero || next.empty()) internal("sum or max entry without a continuation");
                VarId x = e.vars.front();
                NodeKind nk = e.op == EntryOp::sum ? NodeKind::sum : NodeKind::max;
                std::uint32_t ent = bld.entry(nk, e.vars, e.scope);
                const ScopeIndex ns(next_scope, d, cap);
                std::vector<Builder::Arc> arcs;
                for (std::uint64_t i = 0; i < es.count; ++i) {
                    es.decode(i, asg);
                    arcs.clear();
                    for (std::uint32_t xs = 0; xs < d.state_count(x); ++xs) {
                        asg[x] = xs;
                        arcs.push_back({next[ns.encode(asg)], ArcClass::probability, xs});
                    }
                    made[i] = bld.push(nk, arcs, ArcClass::probability, {ent, i});
                }
            }
            next = std::move(made);
            next_scope = e.scope;
        }
        if (pending_zero) internal("zero value entry without a product to attach to");
        head[s] = std::move(next);
        head_scope[s] = std::move(next_scope);
    }
    if (head[0].size() != 1 || head[0][0] != c.root()) internal("circuit root is not the last node");
    return c;
}

std::string fresh_name(const InfluenceDiagram& d, std::string base) {
    while (d.find(base)) base += "_";
    return base;
}

EvidenceVector translate_evidence(const InfluenceDiagram& from, const InfluenceDiagram& to, const EvidenceVector& e) {
    EvidenceVector out = EvidenceVector::neutral(to);
    for (VarId v = 0; v < to.size(); ++v) {
        auto src = from.find(to.name(v));
        if (!src || from.kind(*src) != to.kind(v) || to.kind(v) == VarKind::value) continue;
        out.lambda[v] = e.lambda[*src];
        out.hard[v] = e.hard[*src];
    }
    out.warnings = e.warnings;
    return out;
}

}  // namespace

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::sum: return "sum";
        case NodeKind::product: return "product";
        case NodeKind::max: return "max";
        case NodeKind::branch: return "branch";
        case NodeKind::theta: return "theta";
        case NodeKind::lambda: return "lambda";
        case NodeKind::constant: return "constant";
    }
    return "?";
}

ParameterLayout::ParameterLayout(const InfluenceDiagram& d) {
    for (VarId v = 0; v < d.size(); ++v) {
        theta_base_.push_back(static_cast<std::uint32_t>(slots_.size()));
        for (std::size_t c = 0; c < d.var(v).table.entries.size(); ++c)
            slots_.push_back({ParamKind::theta, v, static_cast<std::uint32_t>(c)});
        lambda_base_.push_back(static_cast<std::uint32_t>(slots_.size()));
        for (std::size_t s = 0; s < d.state_count(v); ++s)
            slots_.push_back({ParamKind::lambda, v, static_cast<std::uint32_t>(s)});
    }
}

std::uint32_t ParameterLayout::theta(VarId v, std::size_t cell) const {
    return theta_base_.at(v) + static_cast<std::uint32_t>(cell);
}

std::uint32_t ParameterLayout::lambda(VarId v, std::size_t state) const {
    return lambda_base_.at(v) + static_cast<std::uint32_t>(state);
}

std::string ParameterLayout::label(std::uint32_t i, const InfluenceDiagram& d) const {
    const auto& s = slots_.at(i);
    const Variable& v = d.var(s.var);
    if (s.kind == ParamKind::lambda) {
        if (v.kind == VarKind::value) return "lambda(" + v.name + ")";
        return "lambda(" + v.name + "=" + v.states[s.index] + ")";
    }
    std::size_t width = v.kind == VarKind::chance ? v.states.size() : 1;
    std::size_t row = s.index / width;
    std::string head = v.kind == VarKind::chance ? v.name + "=" + v.states[s.index % width] : v.name;
    std::vector<std::string> parts;
    for (std::size_t k = v.parents.size(); k-- > 0;) {
        const Variable& p = d.var(v.parents[k]);
        parts.push_back(p.name + "=" + p.states[row % p.states.size()]);
        row /= p.states.size();
    }
    std::string out = "theta(" + head;
    for (std::size_t k = parts.size(); k-- > 0;) out += (k + 1 == parts.size() ? "|" : ",") + parts[k];
    return out + ")";
}

std::vector<double> ParameterLayout::bind(const InfluenceDiagram& d, const EvidenceVector& e) const {
    std::vector<double> out(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto& s = slots_[i];
        out[i] = s.kind == ParamKind::theta ? d.var(s.var).table.entries.at(s.index) : e.lambda.at(s.var).at(s.index);
    }
    return out;
}

std::vector<std::uint8_t> ParameterLayout::bind_hard(const InfluenceDiagram& d, const EvidenceVector& e) const {
    std::vector<std::uint8_t> out(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const auto& s = slots_[i];
        out[i] = s.kind == ParamKind::theta ? d.var(s.var).table.hard.at(s.index) : e.hard.at(s.var).at(s.index);
    }
    return out;
}

std::vector<double> DecisionCircuit::bind(const InfluenceDiagram& original, const EvidenceVector& e) const {
    if (mode == CompileMode::branching) return layout.bind(original, e);
    auto merged = merge_values(original, e, std::numeric_limits<std::size_t>::max());
    return layout.bind(merged, translate_evidence(original, merged, e));
}

std::vector<std::uint8_t> DecisionCircuit::bind_hard(const InfluenceDiagram& original, const EvidenceVector& e) const {
    if (mode == CompileMode::branching) return layout.bind_hard(original, e);
    auto merged = merge_values(original, e, std::numeric_limits<std::size_t>::max());
    return layout.bind_hard(merged, translate_evidence(original, merged, e));
}

std::vector<NodeId> DecisionCircuit::leaf_index() const {
    std::vector<NodeId> out(layout.size(), no_node);
    for (NodeId n = 0; n < size(); ++n)
        if (kind[n] == NodeKind::theta || kind[n] == NodeKind::lambda) out[param[n]] = n;
    return out;
}

CircuitStats circuit_stats(const DecisionCircuit& c) {
    CircuitStats s;
    std::vector<std::size_t> depth(c.size(), 0);
    for (NodeId n = 0; n < c.size(); ++n) {
        ++s.per_kind[static_cast<int>(c.kind[n])];
        if (c.is_leaf(n)) {
            ++s.leaves;
            continue;
        }
        ++s.operators;
        for (std::uint32_t a = c.first[n]; a < c.first[n + 1]; ++a) {
            NodeId ch = c.child[a];
            depth[n] = std::max(depth[n], depth[ch] + 1);
            if (c.kind[ch] == NodeKind::constant) {
                ++s.constant_arcs;
            } else {
                ++s.arcs;
                if (c.is_leaf(ch)) ++s.drawn_nodes;
            }
        }
    }
    s.nodes = c.size();
    s.drawn_nodes += s.operators;
    s.depth = c.size() ? depth[c.root()] : 0;
    return s;
}

InfluenceDiagram merge_values(const InfluenceDiagram& d, const EvidenceVector& e, std::size_t cap) {
    std::vector<VariableSpec> specs;
    std::vector<std::string> parents;
    std::vector<VarId> values;
    for (const auto& s : d.to_specs()) {
        if (s.kind == VarKind::value) {
            values.push_back(d.id(s.name));
            for (const auto& p : s.parents)
                if (std::find(parents.begin(), parents.end(), p) == parents.end()) parents.push_back(p);
            continue;
        }
        specs.push_back(s);
    }
    if (values.empty()) return d;
    std::size_t configs = 1;
    for (const auto& p : parents) {
        configs *= d.state_count(d.id(p));
        if (configs > cap)
            throw Error(ErrorClass::capacity, "merged value table would exceed " + std::to_string(cap) + " entries");
    }
    VariableSpec merged;
    merged.name = fresh_name(d, "total_value");
    merged.kind = VarKind::value;
    merged.parents = parents;
    std::vector<double> plain(configs, 0.0), weighted(configs, 0.0);
    std::vector<std::uint32_t> asg(d.size(), 0);
    std::vector<VarId> pid;
    for (const auto& p : parents) pid.push_back(d.id(p));
    for (std::size_t r = 0; r < configs; ++r) {
        std::size_t rest = r;
        for (std::size_t k = pid.size(); k-- > 0;) {
            asg[pid[k]] = static_cast<std::uint32_t>(rest % d.state_count(pid[k]));
            rest /= d.state_count(pid[k]);
        }
        for (VarId v : values) {
            double theta = d.var(v).table.entries[d.row(v, asg)];
            plain[r] += theta;
            weighted[r] += e.lambda[v][0] * theta;
        }
    }
    merged.table = plain;
    specs.push_back(merged);
    auto out = InfluenceDiagram::build(std::move(specs), d.decision_order_names());
    std::vector<NumericTable> tables;
    for (const auto& v : out.variables()) tables.push_back(v.table);
    tables.back().entries = weighted;
    tables.back().hard.assign(weighted.size(), 0);
    return out.with_tables(std::move(tables));
}

DecisionCircuit compile_branching(const Backbone& b, const InfluenceDiagram& reduced, const EvidenceVector& e,
                                  const CompileOptions& opt) {
    if (b.shape != BackboneShape::tree) internal("branching circuits need a tree backbone");
    auto dp = std::make_shared<const InfluenceDiagram>(reduced);
    DecisionCircuit c = construct(b, dp, CompileMode::branching, opt.cap);
    c.defaults = c.layout.bind(reduced, e);
    return c;
}

DecisionCircuit compile_linear(const InfluenceDiagram& d, const EliminationOrder& order, const EvidenceVector& e,
                               const CompileOptions& opt) {
    InfluenceDiagram reduced = requisite_reduce(d);
    auto diag = check_order(reduced, order);
    if (!diag.consistent) throw Error(ErrorClass::order, "inconsistent order: " + diag.violation);
    auto merged = std::make_shared<const InfluenceDiagram>(merge_values(reduced, e, opt.cap));
    // the merged value takes the place of the last value in the order
    std::vector<VarId> mo;
    std::optional<std::size_t> last_value;
    for (std::size_t i = 0; i < order.vars.size(); ++i)
        if (d.kind(order.vars[i]) == VarKind::value) last_value = i;
    for (std::size_t i = 0; i < order.vars.size(); ++i) {
        VarId v = order.vars[i];
        if (d.kind(v) != VarKind::value)
            mo.push_back(merged->id(d.name(v)));
        else if (last_value && i == *last_value)
            mo.push_back(static_cast<VarId>(merged->size() - 1));
    }
    auto morder = EliminationOrder::from(std::move(mo), merged->size());
    auto dcg = triangulate(moralize(*merged), morder);
    auto bb = place_products(build_chain_backbone(dcg, *merged), *merged, opt.placement);
    DecisionCircuit c = construct(bb, merged, CompileMode::linear, opt.cap);
    for (VarId v = 0; v < d.size(); ++v)
        if (d.kind(v) == VarKind::value) c.merged_value_names.push_back(d.name(v));
    c.defaults = c.layout.bind(*merged, translate_evidence(d, *merged, e));
    return c;
}

std::string circuit_dot(const DecisionCircuit& c) {
    std::ostringstream os;
    os << "digraph circuit {\n";
    const auto& d = *c.diagram;
    for (NodeId n = 0; n < c.size(); ++n) {
        os << "  n" << n << " [";
        switch (c.kind[n]) {
            case NodeKind::sum: os << "shape=circle, label=\"+\""; break;
            case NodeKind::product: os << "shape=circle, label=\"*\""; break;
            case NodeKind::max: os << "shape=box, label=\"max\""; break;
            case NodeKind::branch: os << "shape=invtriangle, label=\"br\""; break;
            case NodeKind::theta:
            case NodeKind::lambda: os << "shape=plaintext, label=\"" << c.layout.label(c.param[n], d) << "\""; break;
            case NodeKind::constant: os << "shape=plaintext, label=\"" << c.constant[n] << "\""; break;
        }
        os << "];\n";
    }
    for (NodeId n = 0; n < c.size(); ++n)
        for (std::uint32_t a = c.first[n]; a < c.first[n + 1]; ++a) {
            os << "  n" << n << " -> n" << c.child[a];
            if (c.arc_class[a] == ArcClass::value) os << " [style=dashed]";
            os << ";\n";
        }
    os << "}\n";
    return os.str();
}

std::string circuit_text(const DecisionCircuit& c) {
    std::ostringstream os;
    const auto& d = *c.diagram;
    for (NodeId n = 0; n < c.size(); ++n) {
        os << n << ' ' << node_kind_name(c.kind[n]);
        if (c.kind[n] == NodeKind::theta || c.kind[n] == NodeKind::lambda)
            os << ' ' << c.layout.label(c.param[n], d) << (c.leaf_class[n] == ArcClass::value ? " value" : "");
        else if (c.kind[n] == NodeKind::constant)
            os << ' ' << c.constant[n] << (c.leaf_class[n] == ArcClass::value ? " value" : "");
        for (std::uint32_t a = c.first[n]; a < c.first[n + 1]; ++a)
            os << ' ' << c.child[a] << (c.arc_class[a] == ArcClass::value ? "v" : "");
        os << '\n';
    }
    return os.str();
}

}  // namespace dcc
