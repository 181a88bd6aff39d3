#include <random>

#include "doctest.h"
#include "dcc/graph.hpp"
#include "dcc/oracle.hpp"
#include "support.hpp"

using namespace dcc;
using namespace dcc::testing;

namespace {

InfluenceDiagram scale_values(const InfluenceDiagram& d, double k) {
    std::vector<NumericTable> tables;
    for (VarId v = 0; v < d.size(); ++v) {
        NumericTable t = d.var(v).table;
        if (d.kind(v) == VarKind::value)
            for (auto& x : t.entries) x *= k;
        tables.push_back(std::move(t));
    }
    return d.with_tables(std::move(tables));
}

}  // namespace

TEST_CASE("trivial oracle") {
    auto d = load_fixture("trivial");
    auto r = brute_force(d, EvidenceVector::neutral(d));
    CHECK(r.meu == 5.0);
    CHECK(r.p_evidence == 1.0);
    REQUIRE(r.strategy.size() == 1);
    CHECK(r.strategy[0].choice == std::vector<std::uint32_t>{0});
    CHECK(r.strategies == 2);
}

TEST_CASE("ties go to the smallest strategy") {
    auto d = parse_diagram(R"({"variables": [
        {"name": "D", "kind": "decision", "states": ["d1", "d2", "d3"], "parents": []},
        {"name": "V", "kind": "value", "parents": ["D"], "table": [2, 7, 7]}]})");
    auto r = brute_force(d, EvidenceVector::neutral(d));
    CHECK(r.strategy[0].choice == std::vector<std::uint32_t>{1});
}

TEST_CASE("strategy counts") {
    auto fig2 = requisite_reduce(load_fixture("fig2"));
    std::uint64_t expected = 1;
    for (VarId dv : fig2.decisions()) {
        std::uint64_t configs = 1;
        for (VarId p : fig2.var(dv).parents) configs *= fig2.state_count(p);
        for (std::uint64_t i = 0; i < configs; ++i) expected *= fig2.state_count(dv);
    }
    CHECK(strategy_count(fig2) == expected);
    CHECK(brute_force(fig2, EvidenceVector::neutral(fig2)).strategies == expected);
    CHECK(strategy_count(load_fixture("wildcatter_large")) > 1'000'000'000ull);
}

TEST_CASE("cap exceeded") {
    auto d = load_fixture("wildcatter_large");
    try {
        brute_force(d, EvidenceVector::neutral(d));
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.error_class() == ErrorClass::capacity);
    }
}

TEST_CASE("scaling values scales the optimum and keeps the strategy") {
    std::mt19937_64 rng(12);
    for (const char* name : {"fig1", "wildcatter"}) {
        auto d = requisite_reduce(randomize(load_fixture(name), rng));
        auto e = EvidenceVector::neutral(d);
        auto a = brute_force(d, e);
        auto b = brute_force(scale_values(d, 3.5), e);
        CHECK(rel_diff(b.meu, 3.5 * a.meu) <= 1e-12);
        REQUIRE(a.strategy.size() == b.strategy.size());
        for (std::size_t i = 0; i < a.strategy.size(); ++i) CHECK(a.strategy[i].choice == b.strategy[i].choice);
    }
}

TEST_CASE("P(e) does not depend on the strategy for non-responsive evidence") {
    std::mt19937_64 rng(13);
    for (const char* name : {"fig1", "fig2", "wildcatter"}) {
        auto d = requisite_reduce(randomize(load_fixture(name), rng));
        auto r = brute_force(d, random_evidence(d, rng));
        CHECK(r.p_spread <= 1e-12);
    }
}

TEST_CASE("requisite observations lose nothing against no-forgetting") {
    std::mt19937_64 rng(14);
    for (const char* name : {"trivial", "wildcatter"}) {
        auto full = randomize(load_fixture(name), rng);
        auto e = random_evidence(full, rng);
        OracleOptions nf;
        nf.no_forgetting = true;
        auto a = brute_force(requisite_reduce(full), e);
        auto b = brute_force(full, e, nf);
        CHECK(rel_diff(a.meu, b.meu) <= 1e-9);
    }
}

TEST_CASE("random requisite sets match hiding parents in the oracle") {
    std::mt19937_64 rng(15);
    RandomShape shape;
    shape.max_vars = 8;
    shape.max_states = 2;
    shape.max_decisions = 2;
    int checked = 0;
    for (int k = 0; k < 300 && checked < 60; ++k) {
        InfluenceDiagram d;
        try {
            d = random_diagram(rng, shape);
        } catch (const Error&) {
            continue;
        }
        if (d.decisions().empty() || strategy_count(d, true) > 100'000) continue;
        auto r = requisite_reduce(d);
        auto e = EvidenceVector::neutral(d);
        OracleOptions nf;
        nf.no_forgetting = true;
        // keeping only the requisite observations never costs anything
        const double best = brute_force(d, e, nf).meu;
        CHECK(rel_diff(brute_force(r, e).meu, best) <= 1e-9);
        ++checked;
    }
    CHECK(checked >= 30);
}
