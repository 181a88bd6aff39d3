#include "dcc/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

namespace dcc {

namespace {

[[noreturn]] void internal(const std::string& msg) { throw Error(ErrorClass::internal, msg); }

using Matrix = std::vector<std::vector<std::uint8_t>>;

Matrix adjacency_matrix(const std::vector<std::vector<VarId>>& adj) {
    Matrix m(adj.size(), std::vector<std::uint8_t>(adj.size(), 0));
    for (VarId v = 0; v < adj.size(); ++v)
        for (VarId w : adj[v]) m[v][w] = m[w][v] = 1;
    return m;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

const char* dot_shape(VarKind k) {
    switch (k) {
        case VarKind::chance: return "ellipse";
        case VarKind::decision: return "box";
        case VarKind::value: return "diamond";
    }
    return "ellipse";
}

void dot_nodes(std::ostringstream& os, const InfluenceDiagram& d) {
    for (VarId v = 0; v < d.size(); ++v)
        os << "  " << quote(d.name(v)) << " [shape=" << dot_shape(d.kind(v)) << "];\n";
}

}  // namespace

bool d_connected(const InfluenceDiagram& d, VarId x, const std::vector<VarId>& targets,
                 const std::vector<VarId>& given) {
    const std::size_t n = d.size();
    std::vector<std::uint8_t> observed(n, 0), anc(n, 0), target(n, 0);
    for (VarId g : given) observed[g] = 1;
    for (VarId t : targets) target[t] = 1;
    std::vector<VarId> stack(given.begin(), given.end());
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        if (anc[v]) continue;
        anc[v] = 1;
        for (VarId p : d.var(v).parents) stack.push_back(p);
    }
    // (node, arrived from a child = 0 / from a parent = 1)
    std::vector<std::uint8_t> seen(2 * n, 0);
    std::vector<std::pair<VarId, int>> work{{x, 0}};
    while (!work.empty()) {
        auto [v, dir] = work.back();
        work.pop_back();
        if (seen[2 * v + dir]) continue;
        seen[2 * v + dir] = 1;
        if (!observed[v] && target[v]) return true;
        if (dir == 0) {
            if (observed[v]) continue;
            for (VarId p : d.var(v).parents) work.emplace_back(p, 0);
            for (VarId c : d.children(v)) work.emplace_back(c, 1);
        } else {
            if (!observed[v])
                for (VarId c : d.children(v)) work.emplace_back(c, 1);
            if (anc[v])
                for (VarId p : d.var(v).parents) work.emplace_back(p, 0);
        }
    }
    return false;
}

InfluenceDiagram requisite_reduce(const InfluenceDiagram& d) {
    InfluenceDiagram cur = d;
    const auto& decs = d.decisions();
    for (std::size_t k = decs.size(); k-- > 0;) {
        VarId dec = decs[k];
        if (d.var(dec).requisite) {
            auto req = *d.var(dec).requisite;
            std::sort(req.begin(), req.end());
            cur = cur.with_decision_parents(dec, std::move(req));
            continue;
        }
        std::vector<VarId> obs = d.observed_before(dec);
        cur = cur.with_decision_parents(dec, obs);
        std::vector<VarId> values;
        for (VarId v = 0; v < cur.size(); ++v)
            if (cur.kind(v) == VarKind::value && cur.is_ancestor(dec, v)) values.push_back(v);
        std::vector<VarId> keep;
        if (!values.empty()) {
            for (VarId x : obs) {
                std::vector<VarId> given{dec};
                for (VarId o : obs)
                    if (o != x) given.push_back(o);
                if (d_connected(cur, x, values, given)) keep.push_back(x);
            }
        }
        cur = cur.with_decision_parents(dec, std::move(keep));
    }
    return cur;
}

bool MoralGraph::adjacent(VarId a, VarId b) const {
    return std::binary_search(neighbours[a].begin(), neighbours[a].end(), b);
}

MoralGraph moralize(const InfluenceDiagram& reduced) {
    MoralGraph g;
    g.n = reduced.size();
    g.parents.resize(g.n);
    Matrix adj(g.n, std::vector<std::uint8_t>(g.n, 0));
    for (VarId v = 0; v < g.n; ++v) {
        g.parents[v] = reduced.var(v).parents;
        for (VarId p : g.parents[v]) adj[v][p] = adj[p][v] = 1;
    }
    for (VarId v = 0; v < g.n; ++v) {
        const auto& ps = g.parents[v];
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
                VarId a = ps[i], b = ps[j];
                if (adj[a][b]) continue;
                adj[a][b] = adj[b][a] = 1;
                g.added.emplace_back(std::min(a, b), std::max(a, b));
            }
    }
    g.neighbours.resize(g.n);
    for (VarId v = 0; v < g.n; ++v)
        for (VarId w = 0; w < g.n; ++w)
            if (adj[v][w]) g.neighbours[v].push_back(w);
    return g;
}

EliminationOrder EliminationOrder::from(std::vector<VarId> vars, std::size_t n) {
    EliminationOrder o;
    if (vars.size() != n)
        throw Error(ErrorClass::order, "order lists " + std::to_string(vars.size()) + " variables, diagram has " +
                                           std::to_string(n));
    o.pos.assign(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] >= n) throw Error(ErrorClass::order, "order refers to an unknown variable");
        if (o.pos[vars[i]] != std::numeric_limits<std::size_t>::max())
            throw Error(ErrorClass::order, "order lists a variable twice");
        o.pos[vars[i]] = i;
    }
    o.vars = std::move(vars);
    return o;
}

EliminationOrder EliminationOrder::from_names(const InfluenceDiagram& d, const std::vector<std::string>& names) {
    std::vector<VarId> ids;
    for (const auto& n : names) {
        auto id = d.find(n);
        if (!id) throw Error(ErrorClass::order, "order names unknown variable '" + n + "'");
        ids.push_back(*id);
    }
    return from(std::move(ids), d.size());
}

std::string EliminationOrder::to_string(const InfluenceDiagram& d) const {
    std::string out;
    for (VarId v : vars) {
        if (!out.empty()) out += ',';
        out += d.name(v);
    }
    return out;
}

OrderDiagnostics check_order(const InfluenceDiagram& reduced, const EliminationOrder& order) {
    OrderDiagnostics r;
    auto fail = [&](std::string msg) {
        r.consistent = false;
        r.violation = std::move(msg);
        return r;
    };
    if (order.vars.size() != reduced.size()) return fail("order does not list every variable");
    for (VarId dec : reduced.decisions()) {
        for (VarId p : reduced.var(dec).parents)
            if (order.pos[p] > order.pos[dec])
                return fail("requisite observation '" + reduced.name(p) + "' comes after decision '" +
                            reduced.name(dec) + "'");
        for (VarId v = 0; v < reduced.size(); ++v) {
            if (reduced.kind(v) == VarKind::decision || !reduced.is_ancestor(dec, v)) continue;
            if (order.pos[v] < order.pos[dec])
                return fail(std::string(reduced.kind(v) == VarKind::value ? "value '" : "responsive uncertainty '") +
                            reduced.name(v) + "' comes before decision '" + reduced.name(dec) + "'");
        }
    }
    // A value's product needs its whole family in scope.
    for (VarId v = 0; v < reduced.size(); ++v) {
        if (reduced.kind(v) != VarKind::value) continue;
        for (VarId p : reduced.var(v).parents)
            if (order.pos[p] > order.pos[v])
                return fail("value '" + reduced.name(v) + "' comes before its parent '" + reduced.name(p) + "'");
    }
    // The nesting must not let a decision depend on something it cannot see.
    auto dcg = triangulate(moralize(reduced), order);
    for (VarId dec : reduced.decisions()) {
        auto obs = reduced.observed_before(dec);
        for (VarId p : dcg.parents[dec])
            if (!std::binary_search(obs.begin(), obs.end(), p))
                return fail("order makes '" + reduced.name(p) + "' a parent of decision '" + reduced.name(dec) +
                            "' in the chordal graph, but it is not observed before that decision");
    }
    return r;
}

bool DirectedChordalGraph::has_arc(VarId from, VarId to) const {
    return std::find(parents[to].begin(), parents[to].end(), from) != parents[to].end();
}

bool DirectedChordalGraph::is_fill(VarId from, VarId to) const {
    return std::find(fill.begin(), fill.end(), std::make_pair(from, to)) != fill.end();
}

std::vector<std::vector<VarId>> DirectedChordalGraph::undirected() const {
    std::vector<std::vector<VarId>> adj(n);
    for (VarId v = 0; v < n; ++v)
        for (VarId p : parents[v]) {
            adj[v].push_back(p);
            adj[p].push_back(v);
        }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

DirectedChordalGraph triangulate_adjacency(const std::vector<std::vector<VarId>>& adjacency,
                                           const EliminationOrder& order) {
    DirectedChordalGraph g;
    g.n = adjacency.size();
    g.order = order;
    Matrix adj = adjacency_matrix(adjacency);
    std::vector<std::set<std::size_t>> par(g.n);  // positions of parents
    for (VarId v = 0; v < g.n; ++v)
        for (VarId w : adjacency[v])
            if (order.pos[w] < order.pos[v]) par[v].insert(order.pos[w]);
    for (std::size_t i = order.vars.size(); i-- > 0;) {
        VarId v = order.vars[i];
        std::vector<std::size_t> ps(par[v].begin(), par[v].end());
        for (std::size_t a = 0; a < ps.size(); ++a)
            for (std::size_t b = a + 1; b < ps.size(); ++b) {
                VarId x = order.vars[ps[a]], y = order.vars[ps[b]];
                if (adj[x][y]) continue;
                adj[x][y] = adj[y][x] = 1;
                par[y].insert(ps[a]);
                g.fill.emplace_back(x, y);
            }
    }
    g.parents.resize(g.n);
    g.children.resize(g.n);
    for (VarId v = 0; v < g.n; ++v)
        for (std::size_t p : par[v]) g.parents[v].push_back(order.vars[p]);
    for (VarId v : order.vars)
        for (VarId p : g.parents[v]) g.children[p].push_back(v);
    std::sort(g.fill.begin(), g.fill.end(),
              [&](auto a, auto b) { return std::pair(order.pos[a.first], order.pos[a.second]) <
                                           std::pair(order.pos[b.first], order.pos[b.second]); });
    return g;
}

DirectedChordalGraph triangulate(const MoralGraph& moral, const EliminationOrder& order) {
    if (order.vars.size() != moral.n) throw Error(ErrorClass::order, "order does not match the graph");
    return triangulate_adjacency(moral.neighbours, order);
}

bool is_chordal(const std::vector<std::vector<VarId>>& adjacency) {
    const std::size_t n = adjacency.size();
    if (n == 0) return true;
    Matrix adj = adjacency_matrix(adjacency);
    std::vector<std::size_t> weight(n, 0), visit(n, n);
    std::vector<VarId> seq;
    for (std::size_t step = 0; step < n; ++step) {
        VarId best = 0;
        bool found = false;
        for (VarId v = 0; v < n; ++v) {
            if (visit[v] != n) continue;
            if (!found || weight[v] > weight[best]) {
                best = v;
                found = true;
            }
        }
        visit[best] = step;
        seq.push_back(best);
        for (VarId w : adjacency[best])
            if (visit[w] == n) ++weight[w];
    }
    // Reverse visit order is a perfect elimination order iff chordal.
    for (VarId v : seq) {
        std::vector<VarId> earlier;
        for (VarId w : adjacency[v])
            if (visit[w] < visit[v]) earlier.push_back(w);
        if (earlier.size() < 2) continue;
        VarId u = *std::max_element(earlier.begin(), earlier.end(),
                                    [&](VarId a, VarId b) { return visit[a] < visit[b]; });
        for (VarId w : earlier)
            if (w != u && !adj[u][w]) return false;
    }
    return true;
}

std::optional<std::string> verify_tree(const DirectedChordalGraph& dcg, const LongestPathTree& tree) {
    const std::size_t n = dcg.n;
    std::size_t roots = 0;
    for (VarId v = 0; v < n; ++v)
        if (dcg.parents[v].empty()) ++roots;
    if (roots != 1) return "chordal graph has " + std::to_string(roots) + " roots";
    // ancestors in the chordal graph
    std::vector<std::vector<std::uint8_t>> anc(n, std::vector<std::uint8_t>(n, 0));
    for (VarId v : dcg.order.vars)
        for (VarId p : dcg.parents[v]) {
            anc[v][p] = 1;
            for (VarId a = 0; a < n; ++a)
                if (anc[p][a]) anc[v][a] = 1;
        }
    for (VarId v = 0; v < n; ++v) {
        std::vector<std::uint8_t> on_path(n, 0);
        std::size_t len = 0;
        for (auto p = tree.parent[v]; p; p = tree.parent[*p]) {
            on_path[*p] = 1;
            ++len;
        }
        if (len != tree.depth[v]) return "tree depth mismatch";
        for (VarId a = 0; a < n; ++a)
            if (anc[v][a] != on_path[a])
                return "longest path to node " + std::to_string(v) + " does not hold exactly its ancestors";
    }
    for (VarId x = 0; x < n; ++x)
        for (VarId c : dcg.children[x]) {
            for (auto p = tree.parent[c]; p && *p != x; p = tree.parent[*p])
                if (!dcg.has_arc(x, *p)) return "children of node " + std::to_string(x) + " are not contiguous";
        }
    return std::nullopt;
}

LongestPathTree longest_path_tree(const DirectedChordalGraph& dcg) {
    LongestPathTree t;
    const std::size_t n = dcg.n;
    t.parent.assign(n, std::nullopt);
    t.children.assign(n, {});
    t.depth.assign(n, 0);
    std::size_t roots = 0;
    for (VarId v : dcg.order.vars) {
        if (dcg.parents[v].empty()) {
            t.root = v;
            ++roots;
            continue;
        }
        std::size_t best = 0, ties = 0;
        VarId arg = 0;
        for (VarId p : dcg.parents[v]) {
            if (t.depth[p] + 1 > best) {
                best = t.depth[p] + 1;
                arg = p;
                ties = 1;
            } else if (t.depth[p] + 1 == best) {
                ++ties;
            }
        }
        if (ties != 1) internal("longest path to a node is not unique; the graph is not a directed chordal graph");
        t.parent[v] = arg;
        t.depth[v] = best;
        t.children[arg].push_back(v);
    }
    if (roots != 1) internal("chordal graph has " + std::to_string(roots) + " roots");
    if (auto bad = verify_tree(dcg, t)) internal(*bad);
    return t;
}

SizeStats size_stats(const DirectedChordalGraph& dcg, const InfluenceDiagram& d) {
    SizeStats s;
    s.n = d.size();
    for (VarId v = 0; v < d.size(); ++v) {
        s.s = std::max(s.s, d.state_count(v));
        s.t = std::max(s.t, dcg.parents[v].size() + 1);
        std::size_t space = d.state_count(v);
        for (VarId p : dcg.parents[v]) space *= d.state_count(p);
        s.S = std::max(s.S, space);
    }
    return s;
}

EliminationOrder heuristic_order(const InfluenceDiagram& reduced) {
    const std::size_t n = reduced.size();
    const auto& decs = reduced.decisions();
    // layer 2k: things observed before decision k; 2k+1: the decision itself;
    // values last
    std::vector<std::size_t> layer(n, 2 * decs.size());
    for (std::size_t k = 0; k < decs.size(); ++k) layer[decs[k]] = 2 * k + 1;
    for (VarId v = 0; v < n; ++v)
        if (reduced.kind(v) == VarKind::value) layer[v] = 2 * decs.size() + 1;
    for (std::size_t k = decs.size(); k-- > 0;)
        for (VarId p : reduced.var(decs[k]).parents)
            if (reduced.kind(p) == VarKind::chance) layer[p] = std::min(layer[p], 2 * k);
    auto moral = moralize(reduced);
    Matrix adj = adjacency_matrix(moral.neighbours);
    std::vector<std::uint8_t> gone(n, 0);
    std::vector<VarId> reversed;
    for (std::size_t L = 2 * decs.size() + 2; L-- > 0;) {
        std::vector<VarId> pool;
        for (VarId v = 0; v < n; ++v)
            if (layer[v] == L) pool.push_back(v);
        while (!pool.empty()) {
            std::size_t best_fill = std::numeric_limits<std::size_t>::max();
            std::size_t best_i = 0;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                VarId v = pool[i];
                std::vector<VarId> nb;
                for (VarId w = 0; w < n; ++w)
                    if (!gone[w] && w != v && adj[v][w]) nb.push_back(w);
                std::size_t fill = 0;
                for (std::size_t a = 0; a < nb.size(); ++a)
                    for (std::size_t b = a + 1; b < nb.size(); ++b)
                        if (!adj[nb[a]][nb[b]]) ++fill;
                if (fill < best_fill) {
                    best_fill = fill;
                    best_i = i;
                }
            }
            VarId v = pool[best_i];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_i));
            std::vector<VarId> nb;
            for (VarId w = 0; w < n; ++w)
                if (!gone[w] && w != v && adj[v][w]) nb.push_back(w);
            for (VarId a : nb)
                for (VarId b : nb)
                    if (a != b) adj[a][b] = 1;
            gone[v] = 1;
            reversed.push_back(v);
        }
    }
    std::reverse(reversed.begin(), reversed.end());
    return EliminationOrder::from(std::move(reversed), n);
}

std::string moral_dot(const MoralGraph& g, const InfluenceDiagram& d) {
    std::ostringstream os;
    os << "digraph moral {\n";
    dot_nodes(os, d);
    for (VarId v = 0; v < g.n; ++v)
        for (VarId p : g.parents[v]) os << "  " << quote(d.name(p)) << " -> " << quote(d.name(v)) << ";\n";
    for (auto [a, b] : g.added)
        os << "  " << quote(d.name(a)) << " -> " << quote(d.name(b)) << " [dir=none, style=dashed];\n";
    os << "}\n";
    return os.str();
}

std::string chordal_dot(const DirectedChordalGraph& g, const InfluenceDiagram& d) {
    std::ostringstream os;
    os << "digraph chordal {\n";
    dot_nodes(os, d);
    for (VarId v : g.order.vars)
        for (VarId p : g.parents[v]) {
            os << "  " << quote(d.name(p)) << " -> " << quote(d.name(v));
            if (g.is_fill(p, v)) os << " [style=dashed]";
            os << ";\n";
        }
    os << "}\n";
    return os.str();
}

std::string tree_dot(const DirectedChordalGraph& g, const LongestPathTree& t, const InfluenceDiagram& d) {
    std::ostringstream os;
    os << "digraph longest_path_tree {\n";
    dot_nodes(os, d);
    for (VarId v : g.order.vars)
        for (VarId p : g.parents[v]) {
            os << "  " << quote(d.name(p)) << " -> " << quote(d.name(v));
            if (t.parent[v] && *t.parent[v] == p)
                os << " [style=bold, penwidth=2]";
            else
                os << " [color=gray]";
            os << ";\n";
        }
    os << "}\n";
    return os.str();
}

}  // namespace dcc
