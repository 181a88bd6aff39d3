// Command-line front end: compile, eval, grad, compare, oracle.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dcc/oracle.hpp"
#include "dcc/pipeline.hpp"
#include "dcc/sweep.hpp"

namespace {

using namespace dcc;

struct RunConfig {
    std::string input;
    std::string order;
    std::string mode = "branching";
    bool prune = false;
    bool coalesce = false;
    std::string placement = "highest";
    std::string format = "text";
    std::string evidence;
    std::size_t cap = 10'000'000;
    std::size_t states = 0;
    std::string emit;
    bool no_forgetting = false;
};

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

InfluenceDiagram load(const RunConfig& cfg) {
    auto d = parse_diagram(read_file(cfg.input));
    if (cfg.states) d = with_uniform_states(d, cfg.states);
    return d;
}

EvidenceVector load_evidence(const RunConfig& cfg, const InfluenceDiagram& d) {
    if (cfg.evidence.empty()) return EvidenceVector::neutral(d);
    auto items = parse_evidence(read_file(cfg.evidence));
    return set_evidence(d, items);
}

PipelineOptions options(const RunConfig& cfg) {
    PipelineOptions o;
    if (!cfg.order.empty()) {
        std::string text = cfg.order;
        if (std::filesystem::is_regular_file(text)) text = read_file(text);
        o.order = split_names(text);
    }
    o.mode = cfg.mode == "linear" ? CompileMode::linear : CompileMode::branching;
    o.placement = cfg.placement == "lowest" ? Placement::lowest : Placement::highest;
    o.prune = cfg.prune;
    o.coalesce = cfg.coalesce;
    o.cap = cfg.cap;
    return o;
}

void print_warnings(const std::vector<std::string>& w) {
    for (const auto& s : w) std::cerr << "warning: " << s << '\n';
}

int cmd_compile(const RunConfig& cfg) {
    auto d = load(cfg);
    auto e = load_evidence(cfg, d);
    print_warnings(e.warnings);
    auto t0 = std::chrono::steady_clock::now();
    auto r = compile(d, e, options(cfg));
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    auto st = circuit_stats(r.circuit);
    if (cfg.emit == "backbone" && r.circuit.mode == CompileMode::branching) {
        std::cout << export_backbone(r.backbone, r.reduced);
        return 0;
    }
    if (cfg.emit == "moral") {
        std::cout << moral_dot(moralize(r.reduced), r.reduced);
        return 0;
    }
    if (cfg.emit == "chordal") {
        std::cout << chordal_dot(r.chordal, r.reduced);
        return 0;
    }
    if (cfg.emit == "tree" && r.tree) {
        std::cout << tree_dot(r.chordal, *r.tree, r.reduced);
        return 0;
    }
    if (cfg.format == "dot") {
        std::cout << circuit_dot(r.circuit);
        return 0;
    }
    if (cfg.format == "csv") {
        std::cout << "mode,nodes,drawn_nodes,arcs,constant_arcs,n,t,S\n"
                  << cfg.mode << ',' << st.nodes << ',' << st.drawn_nodes << ',' << st.arcs << ',' << st.constant_arcs
                  << ',' << r.size.n << ',' << r.size.t << ',' << r.size.S << '\n';
        return 0;
    }
    std::cout << "order: " << r.order.to_string(r.reduced);
    if (r.order_source == "heuristic") std::cout << " (heuristic, none given)";
    std::cout << '\n'
              << "mode: " << cfg.mode << '\n'
              << st.nodes << " nodes (" << st.drawn_nodes << " drawn), " << st.arcs << " arcs\n"
              << "n " << r.size.n << ", t " << r.size.t << ", S " << r.size.S << ", depth " << st.depth << '\n'
              << std::fixed << std::setprecision(1) << "compile time " << ms << " ms\n";
    if (cfg.emit == "circuit") std::cout << circuit_text(r.circuit);
    return 0;
}

int cmd_eval(const RunConfig& cfg) {
    auto d = load(cfg);
    auto e = load_evidence(cfg, d);
    auto r = compile(d, e, options(cfg));
    auto q = query(r.circuit, d, e);
    print_warnings(q.warnings);
    std::cout << std::setprecision(12) << "P(e) " << q.p_evidence << '\n';
    if (!q.possible) {
        std::cerr << "error: evidence is impossible\n";
        return static_cast<int>(ErrorClass::evidence);
    }
    std::cout << "MEU " << q.meu << '\n' << q.policy.to_text(*r.circuit.diagram);
    return 0;
}

int cmd_grad(const RunConfig& cfg) {
    auto d = load(cfg);
    auto e = load_evidence(cfg, d);
    auto r = compile(d, e, options(cfg));
    auto s = evaluate(r.circuit, r.circuit.defaults);
    auto adj = differentiate(r.circuit, s);
    std::cout << sensitivity_csv(leaf_sensitivities(r.circuit, s, adj));
    return 0;
}

int cmd_compare(const RunConfig& cfg) {
    auto d = load(cfg);
    auto e = EvidenceVector::neutral(d);
    auto o = options(cfg);
    o.mode = CompileMode::branching;
    auto b = circuit_stats(compile(d, e, o).circuit);
    o.mode = CompileMode::linear;
    auto l = circuit_stats(compile(d, e, o).circuit);
    if (cfg.format == "csv") {
        std::cout << "branching_arcs,linear_arcs,branching_nodes,linear_nodes\n"
                  << b.arcs << ',' << l.arcs << ',' << b.drawn_nodes << ',' << l.drawn_nodes << '\n';
        return 0;
    }
    std::cout << "            arcs    nodes\n"
              << "branching " << std::setw(7) << b.arcs << std::setw(9) << b.drawn_nodes << '\n'
              << "linear    " << std::setw(7) << l.arcs << std::setw(9) << l.drawn_nodes << '\n'
              << std::fixed << std::setprecision(3) << "ratio " << static_cast<double>(b.arcs) / l.arcs << '\n';
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    auto d = load(cfg);
    auto e = load_evidence(cfg, d);
    auto r = compile(d, e, options(cfg));
    OracleOptions oo;
    oo.cap = cfg.cap;
    oo.no_forgetting = cfg.no_forgetting;
    auto o = brute_force(cfg.no_forgetting ? d : r.reduced, e, oo);
    auto q = query(r.circuit, d, e);
    std::cout << std::setprecision(12) << "strategies " << o.strategies << '\n'
              << "oracle  P(e) " << o.p_evidence << "  MEU " << o.meu << '\n'
              << "circuit P(e) " << q.p_evidence << "  MEU " << q.meu << '\n';
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    bool ok = o.possible == q.possible && rel(o.p_evidence, q.p_evidence) <= 1e-9 &&
              (!o.possible || rel(o.meu, q.meu) <= 1e-9);
    std::cout << (ok ? "match" : "MISMATCH") << '\n';
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision circuit compiler for influence diagrams"};
    app.require_subcommand(1);
    RunConfig cfg;
    auto common = [&](CLI::App* sc) {
        sc->add_option("input", cfg.input, "diagram file (JSON)")->required()->check(CLI::ExistingFile);
        sc->add_option("--order", cfg.order, "elimination order: comma list or file");
        sc->add_option("--mode", cfg.mode, "branching or linear")->check(CLI::IsMember({"branching", "linear"}));
        sc->add_flag("--prune", cfg.prune, "drop nodes made redundant by hard zeros and ones");
        sc->add_flag("--coalesce", cfg.coalesce, "merge identical nodes");
        sc->add_option("--placement", cfg.placement, "product placement")->check(CLI::IsMember({"highest", "lowest"}));
        sc->add_option("--format", cfg.format, "text, csv or dot")->check(CLI::IsMember({"text", "csv", "dot"}));
        sc->add_option("--evidence", cfg.evidence, "evidence file (JSON)")->check(CLI::ExistingFile);
        sc->add_option("--cap", cfg.cap, "bound on circuit size and enumeration")->check(CLI::PositiveNumber);
        sc->add_option("--states", cfg.states, "re-base every variable to k states with uniform tables")
            ->check(CLI::Range(2, 64));
    };
    auto* compile_cmd = app.add_subcommand("compile", "compile and print size statistics");
    common(compile_cmd);
    compile_cmd->add_option("--emit", cfg.emit, "also print: backbone, circuit, moral, chordal, tree")
        ->check(CLI::IsMember({"backbone", "circuit", "moral", "chordal", "tree"}));
    auto* eval_cmd = app.add_subcommand("eval", "print P(e), MEU and the policy");
    common(eval_cmd);
    auto* grad_cmd = app.add_subcommand("grad", "print leaf sensitivities as CSV");
    common(grad_cmd);
    auto* compare_cmd = app.add_subcommand("compare", "branching against linear circuit size");
    common(compare_cmd);
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force check against the circuit");
    common(oracle_cmd);
    oracle_cmd->add_flag("--no-forgetting", cfg.no_forgetting, "strategies observe everything seen before");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : static_cast<int>(ErrorClass::usage);
    }
    try {
        if (*compile_cmd) return cmd_compile(cfg);
        if (*eval_cmd) return cmd_eval(cfg);
        if (*grad_cmd) return cmd_grad(cfg);
        if (*compare_cmd) return cmd_compare(cfg);
        if (*oracle_cmd) return cmd_oracle(cfg);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return static_cast<int>(err.error_class());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return static_cast<int>(ErrorClass::internal);
    }
    return 0;
}
