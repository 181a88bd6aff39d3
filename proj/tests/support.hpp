#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dcc/model.hpp"

namespace dcc::testing {

inline std::string fixture_path(const std::string& name) { return std::string(DCC_FIXTURES) + "/" + name + ".json"; }

inline InfluenceDiagram load_fixture(const std::string& name) { return parse_diagram(read_file(fixture_path(name))); }

inline double rel_diff(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

// Fresh CPT rows and value tables, same structure.
inline InfluenceDiagram randomize(const InfluenceDiagram& d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0), val(1.0, 100.0);
    std::vector<NumericTable> tables;
    for (VarId v = 0; v < d.size(); ++v) {
        NumericTable t = d.var(v).table;
        if (d.kind(v) == VarKind::chance) {
            const std::size_t k = d.state_count(v);
            for (std::size_t r = 0; r < t.entries.size() / k; ++r) {
                double s = 0;
                for (std::size_t i = 0; i < k; ++i) s += (t.entries[r * k + i] = u(rng));
                for (std::size_t i = 0; i < k; ++i) t.entries[r * k + i] /= s;
            }
        } else if (d.kind(v) == VarKind::value) {
            for (auto& x : t.entries) x = val(rng);
        }
        std::fill(t.hard.begin(), t.hard.end(), 0);
        tables.push_back(std::move(t));
    }
    return d.with_tables(std::move(tables));
}

// Value weights and soft evidence on non-responsive chance variables.
inline EvidenceVector random_evidence(const InfluenceDiagram& d, std::mt19937_64& rng) {
    EvidenceVector e = EvidenceVector::neutral(d);
    std::uniform_real_distribution<double> w(0.25, 2.0), u(0.0, 1.0);
    for (VarId v = 0; v < d.size(); ++v) {
        if (d.kind(v) == VarKind::value) e.lambda[v][0] = w(rng);
        if (d.kind(v) == VarKind::chance && !d.responsive(v) && u(rng) < 0.3) {
            for (auto& l : e.lambda[v]) l = 0.2 + 0.8 * u(rng);
        }
    }
    return e;
}

struct RandomShape {
    std::size_t min_vars = 3;
    std::size_t max_vars = 12;
    std::size_t max_states = 3;
    std::size_t max_decisions = 3;
    std::size_t max_values = 3;
};

// Random connected influence diagram; decisions observe a few earlier
// variables, values hang off the non-value variables.
inline InfluenceDiagram random_diagram(std::mt19937_64& rng, const RandomShape& shape) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = pick(shape.min_vars, shape.max_vars);
    const std::size_t nv = pick(1, std::min(shape.max_values, std::max<std::size_t>(1, n / 3)));
    const std::size_t nd = pick(0, std::min(shape.max_decisions, n - nv - 1));
    const std::size_t nx = n - nv;  // non-value variables

    std::vector<VariableSpec> specs(n);
    std::vector<std::size_t> decision_slots(nx);
    std::iota(decision_slots.begin(), decision_slots.end(), 0);
    std::shuffle(decision_slots.begin(), decision_slots.end(), rng);
    std::vector<std::uint8_t> is_dec(nx, 0);
    for (std::size_t i = 0; i < nd; ++i) is_dec[decision_slots[i]] = 1;

    std::vector<std::size_t> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto& s = specs[i];
        if (i < nx) {
            s.kind = is_dec[i] ? VarKind::decision : VarKind::chance;
            s.name = (is_dec[i] ? "D" : "X") + std::to_string(i);
            const std::size_t k = pick(2, shape.max_states);
            for (std::size_t j = 0; j < k; ++j) s.states.push_back("s" + std::to_string(j));
            for (std::size_t j = 0; j < i; ++j) {
                const double p = is_dec[i] ? 0.35 : 2.0 / static_cast<double>(i + 1);
                if (s.parents.size() < 3 && u(rng) < p) s.parents.push_back(specs[j].name);
            }
        } else {
            s.kind = VarKind::value;
            s.name = "V" + std::to_string(i);
            const std::size_t np = pick(1, std::min<std::size_t>(3, nx));
            std::vector<std::size_t> cand(nx);
            std::iota(cand.begin(), cand.end(), 0);
            std::shuffle(cand.begin(), cand.end(), rng);
            cand.resize(np);
            std::sort(cand.begin(), cand.end());
            for (std::size_t j : cand) s.parents.push_back(specs[j].name);
        }
    }
    // join components by adding arcs from an earlier to a later variable
    auto index_of = [&](const std::string& name) {
        for (std::size_t j = 0; j < n; ++j)
            if (specs[j].name == name) return j;
        return n;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& p : specs[i].parents) comp[find(i)] = find(index_of(p));
    for (std::size_t i = 1; i < n; ++i) {
        if (find(i) == find(0)) continue;
        std::size_t j = i < nx ? pick(0, i - 1) : pick(0, nx - 1);
        if (find(j) == find(i)) j = 0;
        specs[i].parents.push_back(specs[j].name);
        comp[find(i)] = find(j);
    }
    // tables
    std::uniform_real_distribution<double> w(0.05, 1.0), val(1.0, 50.0);
    for (auto& s : specs) {
        std::size_t rows = 1;
        for (const auto& p : s.parents) rows *= std::max<std::size_t>(1, specs[index_of(p)].states.size());
        if (s.kind == VarKind::chance) {
            const std::size_t k = s.states.size();
            for (std::size_t r = 0; r < rows; ++r) {
                std::vector<double> row(k);
                double t = 0;
                for (auto& x : row) t += (x = w(rng));
                for (auto& x : row) s.table.push_back(x / t);
            }
        } else if (s.kind == VarKind::value) {
            for (std::size_t r = 0; r < rows; ++r) s.table.push_back(val(rng));
        }
    }
    return InfluenceDiagram::build(std::move(specs));
}

}  // namespace dcc::testing
