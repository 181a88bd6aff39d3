#include "dcc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dcc {

namespace {

std::vector<VarId> observation_set(const InfluenceDiagram& d, VarId dec, bool no_forgetting) {
    if (!no_forgetting) return d.var(dec).parents;
    return d.observed_before(dec);
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t sat_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < exp; ++i) r = sat_mul(r, base);
    return r;
}

}  // namespace

std::uint64_t strategy_count(const InfluenceDiagram& d, bool no_forgetting) {
    std::uint64_t total = 1;
    for (VarId dec : d.decisions()) {
        std::uint64_t configs = 1;
        for (VarId p : observation_set(d, dec, no_forgetting)) configs = sat_mul(configs, d.state_count(p));
        total = sat_mul(total, sat_pow(d.state_count(dec), configs));
    }
    return total;
}

OracleResult brute_force(const InfluenceDiagram& d, const EvidenceVector& e, const OracleOptions& opt) {
    std::vector<VarId> chance, values;
    for (VarId v = 0; v < d.size(); ++v) {
        if (d.kind(v) == VarKind::chance) chance.push_back(v);
        if (d.kind(v) == VarKind::value) values.push_back(v);
    }
    const std::vector<VarId>& decs = d.decisions();

    std::uint64_t nc = 1, nd = 1;
    for (VarId v : chance) nc = sat_mul(nc, d.state_count(v));
    for (VarId v : decs) nd = sat_mul(nd, d.state_count(v));
    const std::uint64_t ns = strategy_count(d, opt.no_forgetting);
    if (sat_mul(nc, nd) > opt.cap || sat_mul(ns, nc) > opt.cap)
        throw Error(ErrorClass::capacity, "brute force needs " + std::to_string(ns) + " strategies over " +
                                              std::to_string(nc) + " chance instantiations, above the cap of " +
                                              std::to_string(opt.cap));

    // Joint tables over (chance instantiation, decision instantiation).
    std::vector<double> G(nc * nd), Pe(nc * nd);
    std::vector<std::uint32_t> chance_asg(nc * chance.size());
    std::vector<std::uint32_t> asg(d.size(), 0);
    for (std::uint64_t ci = 0; ci < nc; ++ci) {
        std::uint64_t rest = ci;
        for (std::size_t k = chance.size(); k-- > 0;) {
            asg[chance[k]] = static_cast<std::uint32_t>(rest % d.state_count(chance[k]));
            rest /= d.state_count(chance[k]);
            chance_asg[ci * chance.size() + k] = asg[chance[k]];
        }
        for (std::uint64_t di = 0; di < nd; ++di) {
            std::uint64_t r = di;
            for (std::size_t k = decs.size(); k-- > 0;) {
                asg[decs[k]] = static_cast<std::uint32_t>(r % d.state_count(decs[k]));
                r /= d.state_count(decs[k]);
            }
            double p = 1.0;
            for (VarId v : chance) p *= d.var(v).table.entries[d.cell(v, asg)] * e.lambda[v][asg[v]];
            double w = 1.0;
            for (VarId v : decs) w *= e.lambda[v][asg[v]];
            double total = 0.0;
            for (VarId v : values) total += e.lambda[v][0] * d.var(v).table.entries[d.row(v, asg)];
            Pe[ci * nd + di] = p;
            G[ci * nd + di] = p * w * total;
        }
    }

    // Strategy digits: for every decision, one digit per observed instantiation.
    struct Slot {
        std::vector<VarId> obs;
        std::uint32_t states;
        std::size_t offset;  // into the digit array
        std::size_t configs;
    };
    std::vector<Slot> slots;
    std::size_t ndigits = 0;
    for (VarId dec : decs) {
        Slot s{observation_set(d, dec, opt.no_forgetting), static_cast<std::uint32_t>(d.state_count(dec)), ndigits, 1};
        for (VarId p : s.obs) s.configs *= d.state_count(p);
        ndigits += s.configs;
        slots.push_back(std::move(s));
    }
    std::vector<std::uint32_t> digits(ndigits, 0), best_digits;
    std::vector<std::uint32_t> obs_index(nc * decs.size());

    auto run = [&](std::vector<std::uint32_t>& dec_of_chance, double& g, double& p) {
        g = 0.0;
        p = 0.0;
        for (std::uint64_t ci = 0; ci < nc; ++ci) {
            for (std::size_t k = 0; k < chance.size(); ++k) asg[chance[k]] = chance_asg[ci * chance.size() + k];
            std::uint64_t di = 0;
            for (std::size_t k = 0; k < decs.size(); ++k) {
                std::size_t idx = 0;
                for (VarId o : slots[k].obs) idx = idx * d.state_count(o) + asg[o];
                obs_index[ci * decs.size() + k] = static_cast<std::uint32_t>(idx);
                asg[decs[k]] = digits[slots[k].offset + idx];
                di = di * d.state_count(decs[k]) + asg[decs[k]];
            }
            dec_of_chance[ci] = static_cast<std::uint32_t>(di);
            g += G[ci * nd + di];
            p += Pe[ci * nd + di];
        }
    };

    OracleResult res;
    std::vector<std::uint32_t> dec_of_chance(nc), best_dec(nc);
    double best_g = -std::numeric_limits<double>::infinity(), best_p = 0.0;
    double p_lo = std::numeric_limits<double>::infinity(), p_hi = 0.0;
    std::vector<std::uint32_t> best_obs;
    for (;;) {
        double g, p;
        run(dec_of_chance, g, p);
        ++res.strategies;
        p_lo = std::min(p_lo, p);
        p_hi = std::max(p_hi, p);
        if (g > best_g + 1e-12 * std::abs(best_g) || res.strategies == 1) {
            best_g = g;
            best_p = p;
            best_digits = digits;
            best_obs = obs_index;
            best_dec = dec_of_chance;
        }
        // odometer, last digit fastest, so the first optimum found is the
        // lexicographically smallest
        std::size_t pos = ndigits, k = slots.size();
        bool carry = true;
        while (carry && pos-- > 0) {
            while (k > 0 && slots[k - 1].offset > pos) --k;
            if (++digits[pos] < slots[k - 1].states) {
                carry = false;
            } else {
                digits[pos] = 0;
            }
        }
        if (carry) break;
    }

    res.p_evidence = best_p;
    res.g_prime = best_g;
    res.p_spread = p_hi > 0 ? (p_hi - p_lo) / p_hi : 0.0;
    res.possible = best_p > 0.0;
    res.meu = res.possible ? best_g / best_p : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < decs.size(); ++k) {
        OracleRule r;
        r.decision = d.name(decs[k]);
        for (VarId o : slots[k].obs) {
            r.observed.push_back(d.name(o));
            r.radix.push_back(static_cast<std::uint32_t>(d.state_count(o)));
        }
        r.choice.assign(best_digits.begin() + static_cast<std::ptrdiff_t>(slots[k].offset),
                        best_digits.begin() + static_cast<std::ptrdiff_t>(slots[k].offset + slots[k].configs));
        r.reached.assign(slots[k].configs, 0);
        for (std::uint64_t ci = 0; ci < nc; ++ci)
            if (Pe[ci * nd + best_dec[ci]] > 0.0) r.reached[best_obs[ci * decs.size() + k]] = 1;
        res.strategy.push_back(std::move(r));
    }
    return res;
}

}  // namespace dcc
