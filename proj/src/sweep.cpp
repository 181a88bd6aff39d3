#include "dcc/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dcc {

namespace {

void sweep_up(const DecisionCircuit& c, const double* for_p, const double* for_v, SweepValues& out) {
    const std::size_t n = c.size();
    out.P.resize(n);
    out.V.resize(n);
    out.argmax.assign(n, 0);
    out.arc_touches = 0;
    double* P = out.P.data();
    double* V = out.V.data();
    for (NodeId x = 0; x < n; ++x) {
        const std::uint32_t lo = c.first[x], hi = c.first[x + 1];
        switch (c.kind[x]) {
            case NodeKind::theta:
            case NodeKind::lambda:
            case NodeKind::constant: {
                const bool k = c.kind[x] == NodeKind::constant;
                const double vp = k ? c.constant[x] : for_p[c.param[x]];
                P[x] = c.leaf_class[x] == ArcClass::value ? 1.0 : vp;
                V[x] = k ? c.constant[x] : for_v[c.param[x]];
                break;
            }
            case NodeKind::sum: {
                double p = 0, v = 0;
                for (std::uint32_t a = lo; a < hi; ++a) {
                    ++out.arc_touches;
                    p += P[c.child[a]];
                    v += V[c.child[a]];
                }
                P[x] = p;
                V[x] = v;
                break;
            }
            case NodeKind::product: {
                double p = 1, v = 1;
                for (std::uint32_t a = lo; a < hi; ++a) {
                    ++out.arc_touches;
                    if (c.arc_class[a] == ArcClass::probability) p *= P[c.child[a]];
                    v *= V[c.child[a]];
                }
                P[x] = p;
                V[x] = v;
                break;
            }
            case NodeKind::max: {
                // first child wins unless a later one is better by more than the tolerance
                std::uint32_t pick = lo;
                double best = V[c.child[lo]];
                ++out.arc_touches;
                for (std::uint32_t a = lo + 1; a < hi; ++a) {
                    ++out.arc_touches;
                    const double v = V[c.child[a]];
                    if (v > best + tie_tolerance * std::abs(best)) {
                        best = v;
                        pick = a;
                    }
                }
                out.argmax[x] = pick - lo;
                P[x] = P[c.child[pick]];
                V[x] = best;
                break;
            }
            case NodeKind::branch: {
                const NodeId a = c.child[lo], b = c.child[lo + 1];
                out.arc_touches += 2;
                P[x] = P[a] * P[b];
                V[x] = V[a] * P[b] + P[a] * V[b];
                break;
            }
        }
    }
}

}  // namespace

void evaluate_into(const DecisionCircuit& c, const std::vector<double>& params, SweepValues& out) {
    if (params.size() < c.layout.size()) throw Error(ErrorClass::usage, "parameter vector shorter than the layout");
    sweep_up(c, params.data(), params.data(), out);
}

void evaluate_split(const DecisionCircuit& c, const std::vector<double>& for_p, const std::vector<double>& for_v,
                    SweepValues& out) {
    if (for_p.size() < c.layout.size() || for_v.size() < c.layout.size())
        throw Error(ErrorClass::usage, "parameter vector shorter than the layout");
    sweep_up(c, for_p.data(), for_v.data(), out);
}

SweepValues evaluate(const DecisionCircuit& c, const std::vector<double>& params) {
    SweepValues s;
    evaluate_into(c, params, s);
    return s;
}

void differentiate_into(const DecisionCircuit& c, const SweepValues& s, AdjointTriple& out) {
    const std::size_t n = c.size();
    out.A.assign(n, 0.0);
    out.B.assign(n, 0.0);
    out.C.assign(n, 0.0);
    out.arc_touches = 0;
    if (n == 0) return;
    double* A = out.A.data();
    double* B = out.B.data();
    double* C = out.C.data();
    const double* P = s.P.data();
    const double* V = s.V.data();
    A[c.root()] = 1.0;
    C[c.root()] = 1.0;
    std::vector<double> pre_p, pre_v;
    for (NodeId x = static_cast<NodeId>(n); x-- > 0;) {
        const std::uint32_t lo = c.first[x], hi = c.first[x + 1];
        switch (c.kind[x]) {
            case NodeKind::sum:
                for (std::uint32_t a = lo; a < hi; ++a) {
                    ++out.arc_touches;
                    NodeId y = c.child[a];
                    A[y] += A[x];
                    B[y] += B[x];
                    C[y] += C[x];
                }
                break;
            case NodeKind::max:
                for (std::uint32_t a = lo; a < hi; ++a) {
                    ++out.arc_touches;
                    if (a != lo + s.argmax[x]) continue;
                    NodeId y = c.child[a];
                    A[y] += A[x];
                    B[y] += B[x];
                    C[y] += C[x];
                }
                break;
            case NodeKind::product: {
                // prefix products, then a suffix sweep, so zeros need no division
                const std::size_t k = hi - lo;
                pre_p.resize(k + 1);
                pre_v.resize(k + 1);
                pre_p[0] = pre_v[0] = 1.0;
                for (std::size_t i = 0; i < k; ++i) {
                    NodeId y = c.child[lo + i];
                    pre_p[i + 1] = pre_p[i] * (c.arc_class[lo + i] == ArcClass::probability ? P[y] : 1.0);
                    pre_v[i + 1] = pre_v[i] * V[y];
                }
                double suf_p = 1.0, suf_v = 1.0;
                for (std::size_t i = k; i-- > 0;) {
                    ++out.arc_touches;
                    NodeId y = c.child[lo + i];
                    const double op = pre_p[i] * suf_p, ov = pre_v[i] * suf_v;
                    if (c.arc_class[lo + i] == ArcClass::probability) {
                        A[y] += A[x] * op;
                        B[y] += B[x] * op;
                        suf_p *= P[y];
                    }
                    C[y] += C[x] * ov;
                    suf_v *= V[y];
                }
                break;
            }
            case NodeKind::branch: {
                const NodeId y1 = c.child[lo], y2 = c.child[lo + 1];
                out.arc_touches += 2;
                A[y1] += P[y2] * A[x];
                B[y1] += P[y2] * B[x] + V[y2] * C[x];
                C[y1] += P[y2] * C[x];
                A[y2] += P[y1] * A[x];
                B[y2] += P[y1] * B[x] + V[y1] * C[x];
                C[y2] += P[y1] * C[x];
                break;
            }
            default:
                break;
        }
    }
}

AdjointTriple differentiate(const DecisionCircuit& c, const SweepValues& s) {
    AdjointTriple t;
    differentiate_into(c, s, t);
    return t;
}

const DecisionRule* Policy::find(const std::string& decision) const {
    for (const auto& r : rules)
        if (r.decision == decision) return &r;
    return nullptr;
}

std::string Policy::to_text(const InfluenceDiagram& d) const {
    std::ostringstream os;
    for (const auto& r : rules) {
        const Variable& dv = d.var(d.id(r.decision));
        for (std::size_t i = 0; i < r.choice.size(); ++i) {
            if (r.choice[i] < 0) continue;
            os << r.decision;
            std::size_t rest = i;
            std::vector<std::string> parts(r.observed.size());
            for (std::size_t k = r.observed.size(); k-- > 0;) {
                const Variable& pv = d.var(d.id(r.observed[k]));
                parts[k] = pv.name + "=" + pv.states[rest % r.radix[k]];
                rest /= r.radix[k];
            }
            for (std::size_t k = 0; k < parts.size(); ++k) os << (k ? "," : " | ") << parts[k];
            os << " -> " << dv.states[static_cast<std::size_t>(r.choice[i])] << '\n';
        }
    }
    return os.str();
}

Policy extract_policy(const DecisionCircuit& c, const SweepValues& s) {
    return extract_policy(c, s, differentiate(c, s));
}

Policy extract_policy(const DecisionCircuit& c, const SweepValues& s, const AdjointTriple& adj) {
    const InfluenceDiagram& d = *c.diagram;
    Policy pol;
    std::vector<std::size_t> rule_of(d.size(), static_cast<std::size_t>(-1));
    for (VarId dec : d.decisions()) {
        DecisionRule r;
        r.decision = d.name(dec);
        std::size_t configs = 1;
        for (VarId p : d.var(dec).parents) {
            r.observed.push_back(d.name(p));
            r.radix.push_back(static_cast<std::uint32_t>(d.state_count(p)));
            configs *= d.state_count(p);
        }
        r.choice.assign(configs, -1);
        rule_of[dec] = pol.rules.size();
        pol.rules.push_back(std::move(r));
    }

    std::vector<std::uint32_t> asg(d.size(), 0);
    auto visit = [&](NodeId x, const NodeOrigin& org) {
        if (org.entry >= c.entries.size()) return;
        const CircuitEntry& e = c.entries[org.entry];
        if (e.kind != NodeKind::max) return;
        if (!(adj.A[x] > 0.0) || !(s.P[x] > 0.0)) return;
        std::uint64_t rest = org.instance;
        for (std::size_t k = e.scope.size(); k-- > 0;) {
            const auto r = d.state_count(e.scope[k]);
            asg[e.scope[k]] = static_cast<std::uint32_t>(rest % r);
            rest /= r;
        }
        const VarId dec = e.vars.front();
        DecisionRule& rule = pol.rules[rule_of[dec]];
        std::size_t idx = 0;
        for (VarId p : d.var(dec).parents) {
            if (std::find(e.scope.begin(), e.scope.end(), p) == e.scope.end())
                throw Error(ErrorClass::internal, "observation " + d.name(p) + " missing from the scope of " + d.name(dec));
            idx = idx * d.state_count(p) + asg[p];
        }
        if (rule.choice[idx] < 0) rule.choice[idx] = static_cast<int>(c.arc_state[c.first[x] + s.argmax[x]]);
    };
    for (NodeId x = 0; x < c.size(); ++x)
        if (c.kind[x] == NodeKind::max) visit(x, c.origin[x]);
    for (const auto& [x, org] : c.extra_origins)
        if (c.kind[x] == NodeKind::max) visit(x, org);
    return pol;
}

std::vector<LeafSensitivity> leaf_sensitivities(const DecisionCircuit& c, const SweepValues&,
                                                const AdjointTriple& adj) {
    std::vector<LeafSensitivity> out;
    for (NodeId x = 0; x < c.size(); ++x) {
        if (c.kind[x] != NodeKind::theta && c.kind[x] != NodeKind::lambda) continue;
        LeafSensitivity r;
        r.leaf = x;
        r.slot = c.param[x];
        r.label = c.layout.label(r.slot, *c.diagram);
        r.A = adj.A[x];
        r.B = adj.B[x];
        r.C = adj.C[x];
        if (c.leaf_class[x] == ArcClass::probability) {
            r.d_ge = r.A;
            r.d_gep = r.B + r.C;
        } else {
            r.d_gep = r.C;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string sensitivity_csv(const std::vector<LeafSensitivity>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "leaf,cell,A,B,C,dg_e,dg_e_prime\n";
    for (const auto& r : rows) {
        os << r.leaf << ",\"" << r.label << "\"," << r.A << ',' << r.B << ',' << r.C << ',' << r.d_ge << ','
           << r.d_gep << '\n';
    }
    return os.str();
}

QueryResult query(const DecisionCircuit& c, const InfluenceDiagram& original, const EvidenceVector& e) {
    QueryResult q;
    q.warnings = e.warnings;
    const auto params = c.bind(original, e);
    const SweepValues s = evaluate(c, params);
    const NodeId r = c.root();
    q.p_evidence = s.P[r];
    if (!(s.P[r] > 0.0)) {
        q.possible = false;
        q.meu = std::numeric_limits<double>::quiet_NaN();
        q.warnings.push_back("evidence has zero probability; expected utility is undefined");
        return q;
    }
    q.meu = s.V[r] / s.P[r];
    q.policy = extract_policy(c, s);
    return q;
}

double max_node_spread(const DecisionCircuit& c, const SweepValues& s) {
    double worst = 0.0;
    for (NodeId x = 0; x < c.size(); ++x) {
        if (c.kind[x] != NodeKind::max) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::uint32_t a = c.first[x]; a < c.first[x + 1]; ++a) {
            lo = std::min(lo, s.P[c.child[a]]);
            hi = std::max(hi, s.P[c.child[a]]);
        }
        if (hi > 0.0) worst = std::max(worst, (hi - lo) / hi);
    }
    return worst;
}

}  // namespace dcc
