#include "dcc/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace dcc {

namespace {

[[noreturn]] void semantic(const std::string& msg) { throw Error(ErrorClass::semantic, msg); }

}  // namespace

const char* kind_name(VarKind k) {
    switch (k) {
        case VarKind::chance: return "chance";
        case VarKind::decision: return "decision";
        case VarKind::value: return "value";
    }
    return "?";
}

InfluenceDiagram InfluenceDiagram::build(std::vector<VariableSpec> specs,
                                         std::vector<std::string> decision_order,
                                         std::vector<std::string> order_hint) {
    InfluenceDiagram d;
    if (specs.empty()) semantic("diagram has no variables");

    std::map<std::string, VarId, std::less<>> index;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (s.name.empty()) semantic("variable " + std::to_string(i) + " has an empty name");
        if (!index.emplace(s.name, static_cast<VarId>(i)).second)
            semantic("duplicate variable name '" + s.name + "'");
    }
    auto resolve = [&](const std::string& owner, const std::string& p) {
        auto it = index.find(p);
        if (it == index.end()) semantic("variable '" + owner + "' refers to unknown parent '" + p + "'");
        return it->second;
    };

    d.vars_.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto& s = specs[i];
        Variable& v = d.vars_[i];
        v.name = s.name;
        v.kind = s.kind;
        if (s.kind == VarKind::value) {
            if (!s.states.empty()) semantic("value variable '" + s.name + "' must not list states");
        } else {
            if (s.states.empty()) semantic("variable '" + s.name + "' has no states");
            std::set<std::string> seen;
            for (auto& st : s.states)
                if (!seen.insert(st).second) semantic("variable '" + s.name + "' repeats state '" + st + "'");
            v.states = std::move(s.states);
        }
        std::set<VarId> seen;
        for (auto& p : s.parents) {
            VarId pid = resolve(s.name, p);
            if (pid == i) semantic("variable '" + s.name + "' lists itself as a parent");
            if (!seen.insert(pid).second) semantic("variable '" + s.name + "' repeats parent '" + p + "'");
            v.parents.push_back(pid);
        }
        if (s.requisite) {
            if (s.kind != VarKind::decision)
                semantic("only decisions may carry a requisite override ('" + s.name + "')");
            std::vector<VarId> req;
            for (auto& p : *s.requisite) req.push_back(resolve(s.name, p));
            v.requisite = std::move(req);
        }
    }

    // value nodes have no children
    for (const auto& v : d.vars_)
        for (VarId p : v.parents)
            if (d.vars_[p].kind == VarKind::value)
                semantic("value nodes have no children: '" + d.vars_[p].name + "' is a parent of '" + v.name + "'");

    // tables
    for (std::size_t i = 0; i < specs.size(); ++i) {
        Variable& v = d.vars_[i];
        const auto& s = specs[i];
        std::size_t configs = 1;
        for (VarId p : v.parents) configs *= d.vars_[p].states.size();
        if (v.kind == VarKind::decision) {
            if (!s.table.empty()) semantic("decision '" + v.name + "' must not have a table");
            if (!s.hard_cells.empty()) semantic("decision '" + v.name + "' must not flag hard cells");
            continue;
        }
        std::size_t width = v.kind == VarKind::chance ? v.states.size() : 1;
        if (s.table.size() != configs * width)
            semantic("table of '" + v.name + "' has " + std::to_string(s.table.size()) + " entries, expected " +
                     std::to_string(configs * width));
        for (double x : s.table)
            if (!std::isfinite(x)) semantic("table of '" + v.name + "' contains a non-finite entry");
        if (v.kind == VarKind::chance) {
            for (std::size_t r = 0; r < configs; ++r) {
                double sum = 0;
                for (std::size_t k = 0; k < width; ++k) {
                    double x = s.table[r * width + k];
                    if (x < 0) semantic("table of '" + v.name + "' has a negative probability");
                    sum += x;
                }
                if (std::fabs(sum - 1.0) > 1e-9)
                    semantic("table of '" + v.name + "' row " + std::to_string(r) + " sums to " + std::to_string(sum) +
                             ", not 1");
            }
        } else {
            for (double x : s.table)
                if (!(x > 0)) semantic("value table of '" + v.name + "' must be strictly positive");
        }
        v.table.entries = s.table;
        v.table.hard.assign(s.table.size(), 0);
        for (std::size_t c : s.hard_cells) {
            if (c >= s.table.size()) semantic("hard cell index out of range for '" + v.name + "'");
            v.table.hard[c] = 1;
        }
    }

    d.finish();

    if (!decision_order.empty()) {
        std::vector<VarId> ord;
        for (auto& n : decision_order) {
            VarId id = resolve("decision_order", n);
            if (d.vars_[id].kind != VarKind::decision) semantic("decision_order lists non-decision '" + n + "'");
            ord.push_back(id);
        }
        std::vector<VarId> a = ord, b = d.decisions_;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b || std::adjacent_find(a.begin(), a.end()) != a.end())
            semantic("decision_order must list every decision exactly once");
        for (std::size_t i = 0; i < ord.size(); ++i)
            for (std::size_t j = i + 1; j < ord.size(); ++j)
                if (d.is_ancestor(ord[j], ord[i]))
                    semantic("decision_order puts '" + d.vars_[ord[i]].name + "' before its ancestor '" +
                             d.vars_[ord[j]].name + "'");
        d.decisions_ = std::move(ord);
    }
    for (VarId dec : d.decisions_) {
        const auto& v = d.vars_[dec];
        if (!v.requisite) continue;
        auto obs = d.observed_before(dec);
        for (VarId r : *v.requisite)
            if (!std::binary_search(obs.begin(), obs.end(), r))
                semantic("requisite override of '" + v.name + "' names '" + d.vars_[r].name +
                         "', which is not observed before the decision");
    }
    for (auto& n : order_hint) resolve("order", n);
    d.order_hint_ = std::move(order_hint);
    return d;
}

void InfluenceDiagram::finish(bool check_connected) {
    const std::size_t n = vars_.size();
    children_.assign(n, {});
    for (VarId v = 0; v < n; ++v)
        for (VarId p : vars_[v].parents) children_[p].push_back(v);

    // Kahn with lowest declaration index first, so the result is deterministic.
    std::vector<std::size_t> indeg(n);
    for (VarId v = 0; v < n; ++v) indeg[v] = vars_[v].parents.size();
    std::priority_queue<VarId, std::vector<VarId>, std::greater<>> ready;
    for (VarId v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(v);
    topo_.clear();
    while (!ready.empty()) {
        VarId v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (VarId c : children_[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (topo_.size() != n) {
        for (VarId v = 0; v < n; ++v)
            if (indeg[v] != 0) semantic("diagram has a directed cycle through '" + vars_[v].name + "'");
    }

    ancestor_.assign(n, std::vector<std::uint8_t>(n, 0));
    for (VarId v : topo_)
        for (VarId p : vars_[v].parents) {
            ancestor_[p][v] = 1;
            for (VarId a = 0; a < n; ++a)
                if (ancestor_[a][p]) ancestor_[a][v] = 1;
        }

    responsive_.assign(n, 0);
    for (VarId v = 0; v < n; ++v)
        for (VarId a = 0; a < n; ++a)
            if (ancestor_[a][v] && vars_[a].kind == VarKind::decision) responsive_[v] = 1;

    decisions_.clear();
    for (VarId v : topo_)
        if (vars_[v].kind == VarKind::decision) decisions_.push_back(v);

    if (check_connected) require_connected("");
}

void InfluenceDiagram::require_connected(const std::string& context) const {
    const std::size_t n = vars_.size();
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<VarId> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        VarId v = stack.back();
        stack.pop_back();
        auto visit = [&](VarId w) {
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        };
        for (VarId p : vars_[v].parents) visit(p);
        for (VarId c : children_[v]) visit(c);
    }
    for (VarId v = 0; v < n; ++v) {
        if (seen[v]) continue;
        std::string msg = "diagram is not a single component ('" + vars_[0].name + "' and '" + vars_[v].name +
                          "' are not connected)";
        if (context.empty())
            msg += "; split it and solve each component on its own";
        else
            msg += " " + context;
        semantic(msg);
    }
}

std::optional<VarId> InfluenceDiagram::find(std::string_view name) const {
    for (VarId v = 0; v < vars_.size(); ++v)
        if (vars_[v].name == name) return v;
    return std::nullopt;
}

VarId InfluenceDiagram::id(std::string_view name) const {
    auto v = find(name);
    if (!v) semantic("unknown variable '" + std::string(name) + "'");
    return *v;
}

bool InfluenceDiagram::is_ancestor(VarId a, VarId b) const { return ancestor_.at(a).at(b) != 0; }

std::size_t InfluenceDiagram::state_count(VarId v) const {
    return vars_[v].kind == VarKind::value ? 1 : vars_[v].states.size();
}

std::size_t InfluenceDiagram::parent_configs(VarId v) const {
    std::size_t c = 1;
    for (VarId p : vars_[v].parents) c *= vars_[p].states.size();
    return c;
}

std::size_t InfluenceDiagram::row(VarId v, std::span<const std::uint32_t> a) const {
    std::size_t r = 0;
    for (VarId p : vars_[v].parents) r = r * vars_[p].states.size() + a[p];
    return r;
}

std::size_t InfluenceDiagram::cell(VarId v, std::span<const std::uint32_t> a) const {
    std::size_t r = row(v, a);
    if (vars_[v].kind == VarKind::chance) return r * vars_[v].states.size() + a[v];
    return r;
}

std::size_t InfluenceDiagram::decision_rank(VarId decision) const {
    auto it = std::find(decisions_.begin(), decisions_.end(), decision);
    if (it == decisions_.end()) semantic("'" + vars_.at(decision).name + "' is not a decision");
    return static_cast<std::size_t>(it - decisions_.begin());
}

std::vector<VarId> InfluenceDiagram::observed_before(VarId decision) const {
    std::size_t k = decision_rank(decision);
    std::set<VarId> obs;
    for (std::size_t j = 0; j <= k; ++j) {
        for (VarId p : vars_[decisions_[j]].parents) obs.insert(p);
        if (j < k) obs.insert(decisions_[j]);
    }
    return {obs.begin(), obs.end()};
}

InfluenceDiagram InfluenceDiagram::with_decision_parents(VarId decision, std::vector<VarId> parents) const {
    InfluenceDiagram d = *this;
    if (d.vars_.at(decision).kind != VarKind::decision) semantic("'" + d.vars_[decision].name + "' is not a decision");
    d.vars_[decision].parents = std::move(parents);
    auto order = decisions_;
    d.finish(false);
    // Parents only ever come from earlier in the sequence, so the original
    // decision order stays valid.
    d.decisions_ = std::move(order);
    return d;
}

InfluenceDiagram InfluenceDiagram::with_tables(std::vector<NumericTable> tables) const {
    if (tables.size() != vars_.size()) semantic("table count mismatch");
    InfluenceDiagram d = *this;
    for (VarId v = 0; v < vars_.size(); ++v) {
        if (tables[v].entries.size() != vars_[v].table.entries.size())
            semantic("replacement table for '" + vars_[v].name + "' has the wrong size");
        if (tables[v].hard.size() != tables[v].entries.size()) tables[v].hard.assign(tables[v].entries.size(), 0);
        d.vars_[v].table = std::move(tables[v]);
    }
    return d;
}

std::vector<VariableSpec> InfluenceDiagram::to_specs() const {
    std::vector<VariableSpec> out;
    for (const auto& v : vars_) {
        VariableSpec s;
        s.name = v.name;
        s.kind = v.kind;
        s.states = v.states;
        for (VarId p : v.parents) s.parents.push_back(vars_[p].name);
        s.table = v.table.entries;
        for (std::size_t c = 0; c < v.table.hard.size(); ++c)
            if (v.table.hard[c]) s.hard_cells.push_back(c);
        if (v.requisite) {
            std::vector<std::string> r;
            for (VarId p : *v.requisite) r.push_back(vars_[p].name);
            s.requisite = std::move(r);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> InfluenceDiagram::decision_order_names() const {
    std::vector<std::string> out;
    for (VarId v : decisions_) out.push_back(vars_[v].name);
    return out;
}

EvidenceVector EvidenceVector::neutral(const InfluenceDiagram& d) {
    EvidenceVector e;
    for (VarId v = 0; v < d.size(); ++v) {
        e.lambda.emplace_back(d.state_count(v), 1.0);
        e.hard.emplace_back(d.state_count(v), 0);
    }
    return e;
}

bool EvidenceVector::touches_responsive(const InfluenceDiagram& d) const {
    for (VarId v = 0; v < d.size(); ++v) {
        if (d.kind(v) != VarKind::chance || !d.responsive(v)) continue;
        for (double x : lambda[v])
            if (x != 1.0) return true;
    }
    return false;
}

EvidenceVector set_evidence(const InfluenceDiagram& d, std::span<const EvidenceItem> items) {
    EvidenceVector e = EvidenceVector::neutral(d);
    for (const auto& it : items) {
        auto id = d.find(it.variable);
        if (!id) throw Error(ErrorClass::evidence, "evidence names unknown variable '" + it.variable + "'");
        const Variable& v = d.var(*id);
        if (v.kind == VarKind::value) {
            if (!it.weight || it.state)
                throw Error(ErrorClass::evidence, "evidence on value '" + v.name + "' must give a weight");
            if (!(*it.weight >= 0) || !std::isfinite(*it.weight))
                throw Error(ErrorClass::evidence, "negative value weight on '" + v.name + "'");
            e.lambda[*id][0] = *it.weight;
            e.hard[*id][0] = it.hard;
            continue;
        }
        if (!it.state || it.weight)
            throw Error(ErrorClass::evidence, "evidence on '" + v.name + "' must name a state");
        auto st = std::find(v.states.begin(), v.states.end(), *it.state);
        if (st == v.states.end())
            throw Error(ErrorClass::evidence, "'" + v.name + "' has no state '" + *it.state + "'");
        std::size_t k = static_cast<std::size_t>(st - v.states.begin());
        for (std::size_t j = 0; j < v.states.size(); ++j) {
            if (j != k) e.lambda[*id][j] = 0.0;
            e.hard[*id][j] = e.hard[*id][j] || it.hard;
        }
        if (v.kind == VarKind::chance && d.responsive(*id))
            e.warnings.push_back("evidence on responsive uncertainty '" + v.name +
                                 "': g(e) is then not the probability of the evidence");
    }
    for (VarId v = 0; v < d.size(); ++v) {
        if (d.kind(v) == VarKind::value) continue;
        if (std::all_of(e.lambda[v].begin(), e.lambda[v].end(), [](double x) { return x == 0.0; }))
            throw Error(ErrorClass::evidence, "evidence rules out every state of '" + d.name(v) + "'");
    }
    return e;
}

InfluenceDiagram with_uniform_states(const InfluenceDiagram& d, std::size_t k) {
    if (k < 1) throw Error(ErrorClass::usage, "state count must be at least 1");
    auto specs = d.to_specs();
    for (auto& s : specs) {
        if (s.kind != VarKind::value) {
            s.states.clear();
            for (std::size_t i = 0; i < k; ++i) s.states.push_back("s" + std::to_string(i));
        }
    }
    std::map<std::string, std::size_t> states;
    for (auto& s : specs) states[s.name] = s.kind == VarKind::value ? 1 : k;
    for (auto& s : specs) {
        std::size_t configs = 1;
        for (auto& p : s.parents) configs *= states[p];
        s.hard_cells.clear();
        if (s.kind == VarKind::chance)
            s.table.assign(configs * k, 1.0 / static_cast<double>(k));
        else if (s.kind == VarKind::value)
            s.table.assign(configs, 1.0);
        else
            s.table.clear();
    }
    return InfluenceDiagram::build(std::move(specs), d.decision_order_names(), d.order_hint());
}

}  // namespace dcc
