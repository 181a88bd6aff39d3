#include "dcc/pipeline.hpp"

namespace dcc {

EliminationOrder choose_order(const InfluenceDiagram& reduced, const std::optional<std::vector<std::string>>& names,
                              std::string* source) {
    auto set = [&](const char* s) {
        if (source) *source = s;
    };
    if (names && !names->empty()) {
        set("given");
        return EliminationOrder::from_names(reduced, *names);
    }
    if (!reduced.order_hint().empty()) {
        set("file");
        return EliminationOrder::from_names(reduced, reduced.order_hint());
    }
    set("heuristic");
    return heuristic_order(reduced);
}

Compiled compile(const InfluenceDiagram& d, const EvidenceVector& e, const PipelineOptions& opt) {
    Compiled out;
    out.reduced = requisite_reduce(d);
    out.reduced.require_connected("after removing non-requisite observations; remove the variables that no longer matter");
    out.order = choose_order(out.reduced, opt.order, &out.order_source);
    auto diag = check_order(out.reduced, out.order);
    if (!diag.consistent) throw Error(ErrorClass::order, "inconsistent order: " + diag.violation);
    out.chordal = triangulate(moralize(out.reduced), out.order);
    out.size = size_stats(out.chordal, out.reduced);
    CompileOptions co{opt.placement, opt.cap};
    if (opt.mode == CompileMode::branching) {
        out.tree = longest_path_tree(out.chordal);
        out.backbone = place_products(build_backbone(out.chordal, *out.tree, out.reduced), out.reduced, opt.placement);
        out.circuit = compile_branching(out.backbone, out.reduced, e, co);
    } else {
        out.circuit = compile_linear(d, out.order, e, co);
    }
    if (opt.prune) out.circuit = prune(out.circuit, out.circuit.bind_hard(d, e), out.circuit.defaults);
    if (opt.coalesce) out.circuit = coalesce_local(out.circuit);
    return out;
}

}  // namespace dcc
