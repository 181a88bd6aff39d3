#include <random>

#include "doctest.h"
#include "dcc/pipeline.hpp"
#include "dcc/sweep.hpp"
#include "support.hpp"

using namespace dcc;
using namespace dcc::testing;

namespace {

CircuitStats stats_for(const std::string& fixture, CompileMode mode, std::size_t states = 0) {
    auto d = load_fixture(fixture);
    if (states) d = with_uniform_states(d, states);
    PipelineOptions o;
    o.mode = mode;
    return circuit_stats(compile(d, EvidenceVector::neutral(d), o).circuit);
}

}  // namespace

TEST_CASE("trivial circuit") {
    auto d = load_fixture("trivial");
    auto c = compile(d, EvidenceVector::neutral(d)).circuit;
    auto s = circuit_stats(c);
    // max with two arcs, two products over lambda_d and the value product,
    // which holds theta_v and lambda_v
    CHECK(s.arcs == 10);
    CHECK(c.kind[c.root()] == NodeKind::max);
    CHECK(c.child_count(c.root()) == 2);
    CHECK(stats_for("trivial", CompileMode::linear).arcs == 10);
}

TEST_CASE("fig1 sizes") {
    CHECK(stats_for("fig1", CompileMode::branching).arcs == 138);
    CHECK(stats_for("fig1", CompileMode::linear).arcs == 138);
    CHECK(stats_for("fig1", CompileMode::branching, 3).arcs == 387);
    CHECK(stats_for("fig1", CompileMode::linear, 3).arcs == 396);
    CHECK(stats_for("fig1", CompileMode::branching, 4).arcs == 828);
    CHECK(stats_for("fig1", CompileMode::linear, 4).arcs == 860);
}

TEST_CASE("fig2 linear sizes") {
    CHECK(stats_for("fig2", CompileMode::linear).arcs == 1668);
    CHECK(stats_for("fig2", CompileMode::linear, 3).arcs == 13755);
}

TEST_CASE("wildcatter branching size") { CHECK(stats_for("wildcatter_large", CompileMode::branching).arcs == 1320); }

TEST_CASE("one-node diagram: linear equals branching") {
    auto d = parse_diagram(R"({"variables": [{"name": "V", "kind": "value", "parents": [], "table": [3]}]})");
    PipelineOptions lin;
    lin.mode = CompileMode::linear;
    auto e = EvidenceVector::neutral(d);
    CHECK(circuit_stats(compile(d, e).circuit).arcs == circuit_stats(compile(d, e, lin).circuit).arcs);
}

TEST_CASE("nodes are stored children first") {
    auto d = load_fixture("fig2");
    auto c = compile(d, EvidenceVector::neutral(d)).circuit;
    for (NodeId x = 0; x < c.size(); ++x)
        for (std::uint32_t a = c.first[x]; a < c.first[x + 1]; ++a) CHECK(c.child[a] < x);
}

TEST_CASE("pruning without hard parameters changes nothing") {
    auto d = load_fixture("fig1");
    auto e = EvidenceVector::neutral(d);
    auto c = compile(d, e).circuit;
    auto p = prune(c, c.bind_hard(d, e), c.defaults);
    CHECK(circuit_stats(p).arcs == circuit_stats(c).arcs);
}

TEST_CASE("pruning drops arcs to deterministic rows") {
    auto d = load_fixture("fig1");
    auto specs = d.to_specs();
    for (auto& s : specs)
        if (s.name == "B") {
            s.table = {1.0, 0.0};
            s.hard_cells = {0, 1};
        }
    auto hd = InfluenceDiagram::build(specs, d.decision_order_names(), d.order_hint());
    auto e = EvidenceVector::neutral(hd);
    auto c = compile(hd, e).circuit;
    auto p = prune(c, c.bind_hard(hd, e), c.defaults);
    CHECK(circuit_stats(p).arcs < circuit_stats(c).arcs);
    auto a = evaluate(c, c.defaults), b = evaluate(p, p.defaults);
    CHECK(a.P[c.root()] == b.P[p.root()]);
    CHECK(a.V[c.root()] == b.V[p.root()]);
}

TEST_CASE("pruning reports a zero-probability problem") {
    auto d = load_fixture("fig1");
    std::vector<EvidenceItem> items{{"B", "b0", std::nullopt, true}};
    auto specs = d.to_specs();
    for (auto& s : specs)
        if (s.name == "B") {
            s.table = {0.0, 1.0};
            s.hard_cells = {0, 1};
        }
    auto hd = InfluenceDiagram::build(specs, d.decision_order_names(), d.order_hint());
    auto e = set_evidence(hd, items);
    auto c = compile(hd, e).circuit;
    try {
        prune(c, c.bind_hard(hd, e), c.bind(hd, e));
        FAIL("no error");
    } catch (const Error& err) {
        CHECK(err.error_class() == ErrorClass::evidence);
        CHECK(std::string(err.what()).find("zero probability") != std::string::npos);
    }
}

TEST_CASE("coalescing never grows a circuit and keeps the root values") {
    std::mt19937_64 rng(3);
    RandomShape shape;
    int checked = 0;
    for (int k = 0; k < 150; ++k) {
        auto d = random_diagram(rng, shape);
        Compiled r;
        try {
            r = compile(d, EvidenceVector::neutral(d));
        } catch (const Error&) {
            continue;
        }
        ++checked;
        auto co = coalesce_local(r.circuit);
        CHECK(circuit_stats(co).arcs <= circuit_stats(r.circuit).arcs);
        auto a = evaluate(r.circuit, r.circuit.defaults), b = evaluate(co, co.defaults);
        CHECK(a.P[r.circuit.root()] == b.P[co.root()]);
        CHECK(a.V[r.circuit.root()] == b.V[co.root()]);
        CHECK(circuit_stats(coalesce_local(co)).arcs == circuit_stats(co).arcs);
    }
    CHECK(checked > 75);
}

TEST_CASE("linear mode refuses an oversized merged value") {
    auto d = with_uniform_states(load_fixture("fig2"), 4);
    PipelineOptions o;
    o.mode = CompileMode::linear;
    o.cap = 1000;
    try {
        compile(d, EvidenceVector::neutral(d), o);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.error_class() == ErrorClass::capacity);
    }
}
