#include <random>

#include "doctest.h"
#include "dcc/graph.hpp"
#include "support.hpp"

using namespace dcc;
using namespace dcc::testing;

namespace {

std::vector<std::string> names(const InfluenceDiagram& d, const std::vector<VarId>& vs) {
    std::vector<std::string> out;
    for (VarId v : vs) out.push_back(d.name(v));
    return out;
}

InfluenceDiagram chain() {
    return parse_diagram(R"({"variables": [
        {"name": "X", "kind": "chance", "states": ["a", "b"], "parents": [], "table": [0.5, 0.5]},
        {"name": "Y", "kind": "chance", "states": ["a", "b"], "parents": ["X"], "table": [0.5, 0.5, 0.2, 0.8]},
        {"name": "Z", "kind": "chance", "states": ["a", "b"], "parents": ["Y"], "table": [0.5, 0.5, 0.3, 0.7]}]})");
}

}  // namespace

TEST_CASE("fig1: A is the requisite observation for D3") {
    auto d = load_fixture("fig1");
    auto r = requisite_reduce(d);
    CHECK(names(r, r.var(r.id("D3")).parents) == std::vector<std::string>{"A"});
    CHECK(names(r, r.var(r.id("D2")).parents) == std::vector<std::string>{"C"});
}

TEST_CASE("computed requisite set for D3 without an override") {
    auto d = load_fixture("fig1");
    auto specs = d.to_specs();
    for (auto& s : specs) s.requisite.reset();
    auto r = requisite_reduce(InfluenceDiagram::build(specs, d.decision_order_names()));
    CHECK(names(r, r.var(r.id("D3")).parents) == std::vector<std::string>{"A"});
}

TEST_CASE("decision with no value descendants keeps nothing") {
    auto d = parse_diagram(R"({"variables": [
        {"name": "X", "kind": "chance", "states": ["a", "b"], "parents": [], "table": [0.5, 0.5]},
        {"name": "D", "kind": "decision", "states": ["d1", "d2"], "parents": ["X"]},
        {"name": "V", "kind": "value", "parents": ["X"], "table": [1, 2]}]})");
    auto r = requisite_reduce(d);
    CHECK(r.var(r.id("D")).parents.empty());
}

TEST_CASE("moralization") {
    SUBCASE("chain adds nothing") { CHECK(moralize(chain()).added.empty()); }
    SUBCASE("fig1 marries A and D3") {
        auto r = requisite_reduce(load_fixture("fig1"));
        auto m = moralize(r);
        CHECK(m.adjacent(r.id("A"), r.id("D3")));
    }
    SUBCASE("collider with four parents is complete") {
        auto d = parse_diagram(R"({"variables": [
            {"name": "P1", "kind": "chance", "states": ["a", "b"], "parents": [], "table": [0.5, 0.5]},
            {"name": "P2", "kind": "chance", "states": ["a", "b"], "parents": [], "table": [0.5, 0.5]},
            {"name": "P3", "kind": "chance", "states": ["a", "b"], "parents": [], "table": [0.5, 0.5]},
            {"name": "P4", "kind": "chance", "states": ["a", "b"], "parents": [], "table": [0.5, 0.5]},
            {"name": "V", "kind": "value", "parents": ["P1", "P2", "P3", "P4"],
             "table": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16]}]})");
        auto m = moralize(d);
        CHECK(m.added.size() == 6);
        for (VarId a = 0; a < 4; ++a)
            for (VarId b = a + 1; b < 4; ++b) CHECK(m.adjacent(a, b));
    }
}

TEST_CASE("order consistency") {
    auto fig1 = requisite_reduce(load_fixture("fig1"));
    CHECK(check_order(fig1, EliminationOrder::from_names(fig1, {"D1", "C", "D2", "E", "A", "B", "D3", "V"})).consistent);
    auto bad = check_order(fig1, EliminationOrder::from_names(fig1, {"D1", "C", "D2", "E", "A", "B", "V", "D3"}));
    CHECK_FALSE(bad.consistent);
    CHECK_FALSE(bad.violation.empty());
    CHECK_FALSE(
        check_order(fig1, EliminationOrder::from_names(fig1, {"D1", "C", "D2", "E", "B", "D3", "A", "V"})).consistent);

    auto fig2 = requisite_reduce(load_fixture("fig2"));
    CHECK(check_order(fig2, EliminationOrder::from_names(
                                fig2, {"B", "D1", "D", "C", "A", "E", "D2", "G", "D4", "I", "L", "F", "D3", "H",
                                       "K", "J", "V1", "V2", "V3", "V4"}))
              .consistent);
}

TEST_CASE("triangulation") {
    SUBCASE("chordal input needs no fill") {
        auto c = chain();
        auto g = triangulate(moralize(c), EliminationOrder::from_names(c, {"X", "Y", "Z"}));
        CHECK(g.fill.empty());
        CHECK(is_chordal(g.undirected()));
    }
    SUBCASE("four-cycle gets one chord") {
        std::vector<std::vector<VarId>> cycle{{1, 3}, {0, 2}, {1, 3}, {0, 2}};
        CHECK_FALSE(is_chordal(cycle));
        auto g = triangulate_adjacency(cycle, EliminationOrder::from({0, 1, 2, 3}, 4));
        CHECK(g.fill.size() == 1);
        CHECK(is_chordal(g.undirected()));
    }
    SUBCASE("fig1 with its stored order") {
        auto r = requisite_reduce(load_fixture("fig1"));
        auto order = EliminationOrder::from_names(r, {"D1", "C", "D2", "E", "A", "B", "D3", "V"});
        auto g = triangulate(moralize(r), order);
        CHECK(is_chordal(g.undirected()));
        for (VarId v = 0; v < g.n; ++v)
            for (std::size_t a = 0; a < g.parents[v].size(); ++a)
                for (std::size_t b = a + 1; b < g.parents[v].size(); ++b)
                    CHECK((g.has_arc(g.parents[v][a], g.parents[v][b]) || g.has_arc(g.parents[v][b], g.parents[v][a])));
    }
}

TEST_CASE("longest path tree") {
    SUBCASE("chain is its own tree") {
        auto c = chain();
        auto g = triangulate(moralize(c), EliminationOrder::from_names(c, {"X", "Y", "Z"}));
        auto t = longest_path_tree(g);
        CHECK(t.root == c.id("X"));
        CHECK(t.parent[c.id("Y")] == c.id("X"));
        CHECK(t.parent[c.id("Z")] == c.id("Y"));
    }
    SUBCASE("fig1 branches once below A") {
        auto r = requisite_reduce(load_fixture("fig1"));
        auto g = triangulate(moralize(r), EliminationOrder::from_names(r, {"D1", "C", "D2", "E", "A", "B", "D3", "V"}));
        auto t = longest_path_tree(g);
        CHECK_FALSE(verify_tree(g, t).has_value());
        std::size_t branch_points = 0;
        for (VarId v = 0; v < g.n; ++v) branch_points += t.children[v].size() > 1;
        CHECK(branch_points == 1);
        CHECK(names(r, t.children[r.id("A")]) == std::vector<std::string>{"B", "D3"});
        CHECK(t.parent[r.id("V")] == r.id("D3"));
    }
}

TEST_CASE("size statistics") {
    auto one = parse_diagram(R"({"variables": [{"name": "B", "kind": "chance", "states": ["b1", "b2"], "table": [0.6, 0.4]}]})");
    auto g = triangulate(moralize(one), EliminationOrder::from({0}, 1));
    auto s = size_stats(g, one);
    CHECK(s.n == 1);
    CHECK(s.t == 1);
    CHECK(s.S == 2);
}

TEST_CASE("heuristic order is consistent on random diagrams") {
    std::mt19937_64 rng(11);
    RandomShape shape;
    int checked = 0;
    for (int k = 0; k < 200; ++k) {
        auto d = random_diagram(rng, shape);
        InfluenceDiagram r;
        try {
            r = requisite_reduce(d);
            r.require_connected("test");
        } catch (const Error&) {
            continue;
        }
        auto o = heuristic_order(r);
        CHECK(check_order(r, o).consistent);
        ++checked;
    }
    CHECK(checked > 100);
}
