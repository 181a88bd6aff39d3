#include "dcc/backbone.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace dcc {

namespace {

[[noreturn]] void internal(const std::string& msg) { throw Error(ErrorClass::internal, msg); }

std::vector<VarId> sorted_by(const EliminationOrder& o, std::vector<VarId> v) {
    std::sort(v.begin(), v.end(), [&](VarId a, VarId b) { return o.pos[a] < o.pos[b]; });
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<VarId> with(const EliminationOrder& o, std::vector<VarId> v, VarId x) {
    v.push_back(x);
    return sorted_by(o, std::move(v));
}

bool contains(const std::vector<VarId>& set, VarId x) { return std::find(set.begin(), set.end(), x) != set.end(); }

bool is_chance_product(const BackboneEntry& e, const InfluenceDiagram& d) {
    return e.op == EntryOp::product && !e.vars.empty() && d.kind(e.vars.front()) == VarKind::chance;
}

void initial_entries(Backbone& b, const InfluenceDiagram& d) {
    for (auto& seg : b.segments) {
        VarId x = seg.var;
        auto scope = with(b.order, seg.key, x);
        switch (d.kind(x)) {
            case VarKind::chance: seg.entries.push_back({EntryOp::sum, {x}, seg.key}); break;
            case VarKind::decision:
                seg.entries.push_back({EntryOp::max, {x}, seg.key});
                seg.entries.push_back({EntryOp::product, {x}, scope});
                break;
            case VarKind::value: seg.entries.push_back({EntryOp::product, {x}, seg.key}); break;
        }
        if (seg.children.empty() && d.kind(x) != VarKind::value)
            seg.entries.push_back({EntryOp::zero_value, {}, scope});
    }
    for (std::size_t i = b.segments.size(); i-- > 0;) {
        auto& seg = b.segments[i];
        seg.carries_value = d.kind(seg.var) == VarKind::value;
        for (std::size_t c : seg.children) seg.carries_value = seg.carries_value || b.segments[c].carries_value;
    }
}

}  // namespace

std::size_t Backbone::entry_count() const {
    std::size_t n = 0;
    for (const auto& s : segments)
        for (const auto& e : s.entries) n += e.op == EntryOp::product ? e.vars.size() : 1;
    return n;
}

std::size_t Backbone::zero_value_count() const {
    std::size_t n = 0;
    for (const auto& s : segments)
        for (const auto& e : s.entries) n += e.op == EntryOp::zero_value;
    return n;
}

std::vector<VarId> Backbone::scope_of(std::size_t segment) const {
    const auto& s = segments.at(segment);
    return with(order, s.key, s.var);
}

Backbone build_backbone(const DirectedChordalGraph& dcg, const LongestPathTree& tree, const InfluenceDiagram& d) {
    Backbone b;
    b.shape = BackboneShape::tree;
    b.order = dcg.order;
    b.chordal_parents = dcg.parents;
    b.segments.resize(d.size());
    b.segment_of.resize(d.size());
    for (std::size_t i = 0; i < dcg.order.vars.size(); ++i) b.segment_of[dcg.order.vars[i]] = i;
    for (std::size_t i = 0; i < dcg.order.vars.size(); ++i) {
        VarId x = dcg.order.vars[i];
        auto& seg = b.segments[i];
        seg.var = x;
        seg.key = dcg.parents[x];
        if (tree.parent[x]) seg.parent = b.segment_of[*tree.parent[x]];
        for (VarId c : tree.children[x]) seg.children.push_back(b.segment_of[c]);
    }
    if (b.segments.empty() || b.segments[0].parent) internal("backbone root is not first in the order");
    initial_entries(b, d);
    return b;
}

Backbone build_chain_backbone(const DirectedChordalGraph& dcg, const InfluenceDiagram& d) {
    Backbone b;
    b.shape = BackboneShape::chain;
    b.order = dcg.order;
    b.chordal_parents = dcg.parents;
    b.segments.resize(d.size());
    b.segment_of.resize(d.size());
    for (std::size_t i = 0; i < dcg.order.vars.size(); ++i) {
        VarId x = dcg.order.vars[i];
        b.segment_of[x] = i;
        auto& seg = b.segments[i];
        seg.var = x;
        seg.key = dcg.parents[x];
        if (i > 0) seg.parent = i - 1;
        if (i + 1 < dcg.order.vars.size()) seg.children.push_back(i + 1);
    }
    initial_entries(b, d);
    return b;
}

Backbone place_products(Backbone b, const InfluenceDiagram& d, Placement placement) {
    const auto& order = b.order;
    std::vector<std::size_t> depth(b.segments.size(), 0);
    for (std::size_t i = 0; i < b.segments.size(); ++i)
        if (b.segments[i].parent) depth[i] = depth[*b.segments[i].parent] + 1;

    for (VarId x : order.vars) {
        if (d.kind(x) != VarKind::chance) continue;
        std::vector<VarId> fam = d.var(x).parents;
        fam.push_back(x);
        std::optional<std::size_t> best;
        // walk the subtree below x's own segment
        std::vector<std::size_t> stack{b.segment_of[x]};
        while (!stack.empty()) {
            std::size_t s = stack.back();
            stack.pop_back();
            for (std::size_t c : b.segments[s].children) stack.push_back(c);
            if (d.kind(b.segments[s].var) == VarKind::value) continue;
            auto scope = with(order, b.chordal_parents[b.segments[s].var], b.segments[s].var);
            bool ok = std::all_of(fam.begin(), fam.end(), [&](VarId f) { return contains(scope, f); });
            if (!ok) continue;
            if (!best) {
                best = s;
            } else if (placement == Placement::highest) {
                if (std::pair(depth[s], s) < std::pair(depth[*best], *best)) best = s;
            } else {
                if (depth[s] > depth[*best] || (depth[s] == depth[*best] && s < *best)) best = s;
            }
        }
        if (!best)
            internal("no backbone entry holds the family of '" + d.name(x) + "'; the moral graph is incomplete");
        auto& seg = b.segments[*best];
        auto it = std::find_if(seg.entries.begin(), seg.entries.end(),
                               [&](const BackboneEntry& e) { return is_chance_product(e, d); });
        if (it != seg.entries.end()) {
            it->vars = with(order, it->vars, x);
        } else {
            auto pos = std::find_if(seg.entries.begin(), seg.entries.end(),
                                    [](const BackboneEntry& e) { return e.op == EntryOp::zero_value; });
            seg.entries.insert(pos, BackboneEntry{EntryOp::product, {x}, with(order, seg.key, seg.var)});
        }
    }

    // Keys: what was introduced above and is still needed here or below.
    const std::size_t n = b.segments.size();
    std::vector<std::set<VarId>> need(n);
    for (std::size_t i = n; i-- > 0;) {
        const auto& seg = b.segments[i];
        need[i].insert(seg.var);
        for (VarId p : b.chordal_parents[seg.var]) need[i].insert(p);
        for (const auto& e : seg.entries)
            if (e.op == EntryOp::product)
                for (VarId v : e.vars) {
                    need[i].insert(v);
                    for (VarId p : d.var(v).parents) need[i].insert(p);
                }
        for (std::size_t c : seg.children) need[i].insert(need[c].begin(), need[c].end());
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& seg = b.segments[i];
        std::vector<VarId> above;
        for (auto p = seg.parent; p; p = b.segments[*p].parent) above.push_back(b.segments[*p].var);
        std::vector<VarId> key;
        for (VarId a : above)
            if (need[i].count(a)) key.push_back(a);
        key = sorted_by(order, std::move(key));
        if (b.shape == BackboneShape::tree && key != b.chordal_parents[seg.var])
            internal("scope of '" + d.name(seg.var) + "' differs from its chordal parents");
        seg.key = key;
        auto scope = with(order, key, seg.var);
        for (auto& e : seg.entries) {
            if (e.op == EntryOp::sum || e.op == EntryOp::max)
                e.scope = key;
            else if (d.kind(seg.var) == VarKind::value)
                e.scope = key;
            else
                e.scope = scope;
        }
    }
    if (auto bad = verify_backbone(b, d)) internal(*bad);
    return b;
}

std::optional<std::string> verify_backbone(const Backbone& b, const InfluenceDiagram& d) {
    std::vector<int> products(d.size(), 0);
    for (std::size_t i = 0; i < b.segments.size(); ++i) {
        const auto& seg = b.segments[i];
        if (seg.parent) {
            auto up = b.scope_of(*seg.parent);
            for (VarId k : seg.key)
                if (!contains(up, k))
                    return "scope of '" + d.name(seg.var) + "' is not available from its parent segment";
        }
        for (const auto& e : seg.entries) {
            if (e.op != EntryOp::product) continue;
            for (VarId v : e.vars) {
                ++products[v];
                for (VarId p : d.var(v).parents)
                    if (!contains(e.scope, p))
                        return "product for '" + d.name(v) + "' is placed where '" + d.name(p) + "' is out of scope";
                if (d.kind(v) == VarKind::chance && !contains(e.scope, v))
                    return "product for '" + d.name(v) + "' is placed above its sum";
            }
        }
        if (seg.children.empty() && d.kind(seg.var) != VarKind::value &&
            (seg.entries.empty() || seg.entries.back().op != EntryOp::zero_value))
            return "terminal segment '" + d.name(seg.var) + "' lacks a zero value entry";
    }
    for (VarId v = 0; v < d.size(); ++v)
        if (products[v] != 1) return "'" + d.name(v) + "' has " + std::to_string(products[v]) + " product entries";
    return std::nullopt;
}

std::string entry_text(const BackboneEntry& e, const InfluenceDiagram& d) {
    auto names = [&](const std::vector<VarId>& vs) {
        std::string s;
        for (VarId v : vs) {
            if (!s.empty()) s += ',';
            s += d.name(v);
        }
        return s.empty() ? std::string("{}") : s;
    };
    switch (e.op) {
        case EntryOp::sum: return "+" + names(e.vars) + "|" + names(e.scope);
        case EntryOp::max: return "max " + names(e.vars) + "|" + names(e.scope);
        case EntryOp::product: return "*" + names(e.vars) + "|" + names(e.scope);
        case EntryOp::zero_value: return "* zero value";
    }
    return "?";
}

std::string export_backbone(const Backbone& b, const InfluenceDiagram& d) {
    std::ostringstream os;
    auto emit = [&](auto&& self, std::size_t s, int indent) -> void {
        // follow single-child runs at the same indentation
        while (true) {
            const auto& seg = b.segments[s];
            for (const auto& e : seg.entries) os << std::string(indent, ' ') << entry_text(e, d) << '\n';
            if (seg.children.size() == 1) {
                s = seg.children[0];
                continue;
            }
            for (std::size_t k = 0; k < seg.children.size(); ++k) {
                os << std::string(indent, ' ') << "branch " << (k + 1) << " of " << seg.children.size() << '\n';
                self(self, seg.children[k], indent + 2);
            }
            return;
        }
    };
    if (!b.segments.empty()) emit(emit, b.root(), 0);
    return os.str();
}

std::string backbone_dot(const Backbone& b, const InfluenceDiagram& d) {
    std::ostringstream os;
    os << "digraph backbone {\n  node [shape=box, fontname=\"monospace\"];\n";
    for (std::size_t i = 0; i < b.segments.size(); ++i) {
        std::string label;
        for (const auto& e : b.segments[i].entries) label += entry_text(e, d) + "\\l";
        os << "  s" << i << " [label=\"" << label << "\"];\n";
    }
    for (std::size_t i = 0; i < b.segments.size(); ++i)
        for (std::size_t c : b.segments[i].children) os << "  s" << i << " -> s" << c << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace dcc
