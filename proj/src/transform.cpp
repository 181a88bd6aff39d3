#include <cstring>
#include <map>

#include "dcc/circuit.hpp"

namespace dcc {

namespace {

struct Arc {
    NodeId node;
    ArcClass cls;
    std::uint32_t state;
};

// Copies the nodes reachable from the new root, in the old (children first)
// order, with the child lists given by `arcs`.
DecisionCircuit rebuild(const DecisionCircuit& c, NodeId root, const std::vector<std::vector<Arc>>& arcs,
                        const std::vector<std::pair<NodeId, NodeOrigin>>& extra) {
    const std::size_t n = c.size();
    std::vector<std::uint8_t> live(n, 0);
    live[root] = 1;
    for (NodeId v = static_cast<NodeId>(n); v-- > 0;) {
        if (!live[v]) continue;
        for (const auto& a : arcs[v]) live[a.node] = 1;
    }
    DecisionCircuit out;
    out.mode = c.mode;
    out.diagram = c.diagram;
    out.layout = c.layout;
    out.merged_value_names = c.merged_value_names;
    out.entries = c.entries;
    out.defaults = c.defaults;
    out.first.assign(1, 0);
    std::vector<NodeId> id(n, no_node);
    for (NodeId v = 0; v < n; ++v) {
        if (!live[v]) continue;
        for (const auto& a : arcs[v]) {
            out.child.push_back(id[a.node]);
            out.arc_class.push_back(a.cls);
            out.arc_state.push_back(a.state);
        }
        out.kind.push_back(c.kind[v]);
        out.first.push_back(static_cast<std::uint32_t>(out.child.size()));
        out.param.push_back(c.param[v]);
        out.constant.push_back(c.constant[v]);
        out.leaf_class.push_back(c.leaf_class[v]);
        out.origin.push_back(c.origin[v]);
        id[v] = static_cast<NodeId>(out.kind.size() - 1);
    }
    for (const auto& [node, org] : extra)
        if (node < n && id[node] != no_node) out.extra_origins.emplace_back(id[node], org);
    return out;
}

std::vector<Arc> arcs_of(const DecisionCircuit& c, NodeId v) {
    std::vector<Arc> out;
    for (std::uint32_t a = c.first[v]; a < c.first[v + 1]; ++a) out.push_back({c.child[a], c.arc_class[a], c.arc_state[a]});
    return out;
}

}  // namespace

DecisionCircuit prune(const DecisionCircuit& c, const std::vector<std::uint8_t>& hard, const std::vector<double>& values) {
    const std::size_t n = c.size();
    enum Status : std::uint8_t { plain, zero, one };
    // Working copy with room for one extra constant-1 leaf appended at the end
    // of the store; since nothing points to it yet, ordering stays valid.
    DecisionCircuit w = c;
    NodeId one_leaf = no_node;
    auto get_one = [&]() {
        if (one_leaf == no_node) {
            // placed at the front so that every parent comes after it
            one_leaf = static_cast<NodeId>(n);
        }
        return one_leaf;
    };
    std::vector<Status> st(n + 1, plain);
    std::vector<NodeId> rep(n + 1);
    std::vector<std::vector<Arc>> arcs(n + 1);
    for (NodeId v = 0; v <= n; ++v) rep[v] = v;

    for (NodeId v = 0; v < n; ++v) {
        switch (c.kind[v]) {
            case NodeKind::theta:
            case NodeKind::lambda: {
                std::uint32_t p = c.param[v];
                if (hard.at(p)) {
                    if (values.at(p) == 0.0 && c.leaf_class[v] == ArcClass::probability) st[v] = zero;
                    if (values.at(p) == 1.0) st[v] = one;
                }
                break;
            }
            case NodeKind::constant:
                if (c.constant[v] == 0.0 && c.leaf_class[v] == ArcClass::probability) st[v] = zero;
                if (c.constant[v] == 1.0) st[v] = one;
                break;
            case NodeKind::product: {
                std::vector<Arc> keep;
                bool dead = false;
                for (auto a : arcs_of(c, v)) {
                    a.node = rep[a.node];
                    if (st[a.node] == zero && a.cls == ArcClass::probability) dead = true;
                    if (st[a.node] == one) continue;
                    keep.push_back(a);
                }
                if (dead) {
                    st[v] = zero;
                } else if (keep.empty()) {
                    st[v] = one;
                    rep[v] = get_one();
                    st[rep[v]] = one;
                } else if (keep.size() == 1 &&
                           (keep[0].cls == ArcClass::probability || c.leaf_class[keep[0].node] == ArcClass::value) &&
                           (keep[0].cls == ArcClass::probability || c.is_leaf(keep[0].node))) {
                    rep[v] = keep[0].node;
                } else {
                    arcs[v] = std::move(keep);
                }
                break;
            }
            case NodeKind::sum:
            case NodeKind::max: {
                std::vector<Arc> keep;
                for (auto a : arcs_of(c, v)) {
                    a.node = rep[a.node];
                    if (st[a.node] == zero) continue;
                    keep.push_back(a);
                }
                if (keep.empty())
                    st[v] = zero;
                else if (keep.size() == 1)
                    rep[v] = keep[0].node;
                else
                    arcs[v] = std::move(keep);
                break;
            }
            case NodeKind::branch: {
                std::vector<Arc> keep;
                bool dead = false;
                for (auto a : arcs_of(c, v)) {
                    a.node = rep[a.node];
                    if (st[a.node] == zero) dead = true;
                    keep.push_back(a);
                }
                if (dead)
                    st[v] = zero;
                else
                    arcs[v] = std::move(keep);
                break;
            }
        }
        if (st[v] == zero) arcs[v].clear();
        if (rep[v] != v && st[rep[v]] == zero) st[v] = zero;
    }
    NodeId root = rep[c.root()];
    if (st[root] == zero)
        throw Error(ErrorClass::evidence, "problem has zero probability/value under hard evidence");

    // Materialise the shared constant 1 leaf as an extra node, then rebuild.
    w.kind.push_back(NodeKind::constant);
    w.first.push_back(w.first.back());
    w.param.push_back(0);
    w.constant.push_back(1.0);
    w.leaf_class.push_back(ArcClass::probability);
    w.origin.push_back({});
    // The extra leaf sits after the root in storage; move it to the front by
    // renumbering through a permutation.
    const std::size_t m = n + 1;
    std::vector<NodeId> perm(m);  // new position -> old id
    perm[0] = static_cast<NodeId>(n);
    for (NodeId v = 0; v < n; ++v) perm[v + 1] = v;
    std::vector<NodeId> inv(m);
    for (NodeId k = 0; k < m; ++k) inv[perm[k]] = k;
    DecisionCircuit q;
    q.mode = w.mode;
    q.diagram = w.diagram;
    q.layout = w.layout;
    q.merged_value_names = w.merged_value_names;
    q.entries = w.entries;
    q.defaults = w.defaults;
    q.first.assign(1, 0);
    std::vector<std::vector<Arc>> qarcs(m);
    for (NodeId k = 0; k < m; ++k) {
        NodeId v = perm[k];
        q.kind.push_back(w.kind[v]);
        q.first.push_back(q.first.back());
        q.param.push_back(w.param[v]);
        q.constant.push_back(w.constant[v]);
        q.leaf_class.push_back(w.leaf_class[v]);
        q.origin.push_back(w.origin[v]);
        for (auto a : arcs[v]) {
            a.node = inv[a.node];
            qarcs[k].push_back(a);
        }
    }
    std::vector<std::pair<NodeId, NodeOrigin>> extra;
    for (const auto& [node, org] : c.extra_origins) extra.emplace_back(inv[rep[node]], org);
    return rebuild(q, inv[root], qarcs, extra);
}

DecisionCircuit coalesce_local(const DecisionCircuit& c) {
    const std::size_t n = c.size();
    std::map<std::vector<std::uint64_t>, NodeId> seen;
    std::vector<NodeId> rep(n);
    std::vector<std::vector<Arc>> arcs(n);
    std::vector<std::pair<NodeId, NodeOrigin>> extra = c.extra_origins;
    for (NodeId v = 0; v < n; ++v) {
        std::vector<std::uint64_t> key{static_cast<std::uint64_t>(c.kind[v]), c.param[v],
                                       static_cast<std::uint64_t>(c.leaf_class[v])};
        std::uint64_t bits;
        std::memcpy(&bits, &c.constant[v], sizeof bits);
        key.push_back(bits);
        arcs[v] = arcs_of(c, v);
        for (auto& a : arcs[v]) {
            a.node = rep[a.node];
            key.push_back((static_cast<std::uint64_t>(a.node) << 24) | (static_cast<std::uint64_t>(a.state) << 1) |
                          static_cast<std::uint64_t>(a.cls));
        }
        auto [it, fresh] = seen.emplace(std::move(key), v);
        rep[v] = it->second;
        if (!fresh) extra.emplace_back(it->second, c.origin[v]);
    }
    for (auto& e : extra) e.first = rep[e.first];
    // only representatives are referenced, so duplicates drop out as unreachable
    return rebuild(c, rep[c.root()], arcs, extra);
}

}  // namespace dcc
