#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcc/oracle.hpp"
#include "dcc/pipeline.hpp"
#include "dcc/sweep.hpp"

namespace py = pybind11;
using namespace dcc;

namespace {

CompileMode parse_mode(const std::string& s) {
    if (s == "branching") return CompileMode::branching;
    if (s == "linear") return CompileMode::linear;
    throw Error(ErrorClass::usage, "mode must be 'branching' or 'linear'");
}

// Evidence given as {variable: state name, or weight for values}.
EvidenceVector evidence_from(const InfluenceDiagram& d, const py::dict& ev, bool hard) {
    std::vector<EvidenceItem> items;
    for (auto [k, v] : ev) {
        EvidenceItem it;
        it.variable = py::cast<std::string>(k);
        if (py::isinstance<py::str>(v))
            it.state = py::cast<std::string>(v);
        else
            it.weight = py::cast<double>(v);
        it.hard = hard;
        items.push_back(std::move(it));
    }
    return set_evidence(d, items);
}

py::dict stats_dict(const CircuitStats& s) {
    py::dict out;
    out["nodes"] = s.nodes;
    out["drawn_nodes"] = s.drawn_nodes;
    out["arcs"] = s.arcs;
    out["constant_arcs"] = s.constant_arcs;
    out["depth"] = s.depth;
    return out;
}

py::dict policy_dict(const Policy& p) {
    py::dict out;
    for (const auto& r : p.rules) {
        py::dict rule;
        rule["observed"] = r.observed;
        rule["choice"] = r.choice;
        out[py::str(r.decision)] = rule;
    }
    return out;
}

struct PyCompiled {
    InfluenceDiagram diagram;
    Compiled r;
};

}  // namespace

PYBIND11_MODULE(_dcc, m) {
    m.doc() = "Decision circuits for influence diagrams";

    py::register_exception<Error>(m, "Error");

    py::class_<InfluenceDiagram>(m, "Diagram")
        .def_static("parse", &parse_diagram, py::arg("text"))
        .def_static("load", [](const std::string& path) { return parse_diagram(read_file(path)); }, py::arg("path"))
        .def("to_json", &serialize_diagram)
        .def("with_states", &with_uniform_states, py::arg("k"))
        .def_property_readonly("names", [](const InfluenceDiagram& d) {
            std::vector<std::string> out;
            for (VarId v = 0; v < d.size(); ++v) out.push_back(d.name(v));
            return out;
        })
        .def("kind", [](const InfluenceDiagram& d, const std::string& n) { return std::string(kind_name(d.kind(d.id(n)))); })
        .def("responsive", [](const InfluenceDiagram& d, const std::string& n) { return d.responsive(d.id(n)); })
        .def("__len__", &InfluenceDiagram::size);

    py::class_<PyCompiled>(m, "Circuit")
        .def_property_readonly("order", [](const PyCompiled& c) { return c.r.order.to_string(c.r.reduced); })
        .def_property_readonly("stats", [](const PyCompiled& c) { return stats_dict(circuit_stats(c.r.circuit)); })
        .def_property_readonly("arcs", [](const PyCompiled& c) { return circuit_stats(c.r.circuit).arcs; })
        .def("backbone", [](const PyCompiled& c) { return export_backbone(c.r.backbone, c.r.reduced); })
        .def("dot", [](const PyCompiled& c) { return circuit_dot(c.r.circuit); })
        .def(
            "query",
            [](const PyCompiled& c, const py::dict& evidence, bool hard) {
                auto q = query(c.r.circuit, c.diagram, evidence_from(c.diagram, evidence, hard));
                py::dict out;
                out["p_evidence"] = q.p_evidence;
                out["meu"] = q.meu;
                out["possible"] = q.possible;
                out["policy"] = policy_dict(q.policy);
                out["warnings"] = q.warnings;
                return out;
            },
            py::arg("evidence") = py::dict(), py::arg("hard") = false)
        .def(
            "gradient",
            [](const PyCompiled& c, const py::dict& evidence) {
                const auto& circ = c.r.circuit;
                auto s = evaluate(circ, circ.bind(c.diagram, evidence_from(c.diagram, evidence, false)));
                auto rows = leaf_sensitivities(circ, s, differentiate(circ, s));
                py::list out;
                for (const auto& r : rows) {
                    py::dict row;
                    row["leaf"] = r.label;
                    row["dg_e"] = r.d_ge;
                    row["dg_e_prime"] = r.d_gep;
                    out.append(row);
                }
                return out;
            },
            py::arg("evidence") = py::dict());

    m.def(
        "compile",
        [](const InfluenceDiagram& d, const std::string& mode, std::optional<std::vector<std::string>> order,
           bool prune, bool coalesce, const py::dict& evidence) {
            PipelineOptions o;
            o.mode = parse_mode(mode);
            o.order = std::move(order);
            o.prune = prune;
            o.coalesce = coalesce;
            auto e = evidence_from(d, evidence, true);
            return PyCompiled{d, compile(d, e, o)};
        },
        py::arg("diagram"), py::arg("mode") = "branching", py::arg("order") = py::none(), py::arg("prune") = false,
        py::arg("coalesce") = false, py::arg("evidence") = py::dict());

    m.def(
        "brute_force",
        [](const InfluenceDiagram& d, const py::dict& evidence, bool no_forgetting) {
            OracleOptions o;
            o.no_forgetting = no_forgetting;
            auto reduced = no_forgetting ? d : requisite_reduce(d);
            auto r = brute_force(reduced, evidence_from(d, evidence, false), o);
            py::dict out;
            out["p_evidence"] = r.p_evidence;
            out["meu"] = r.meu;
            out["strategies"] = r.strategies;
            py::dict strategy;
            for (const auto& rule : r.strategy) strategy[py::str(rule.decision)] = rule.choice;
            out["strategy"] = strategy;
            return out;
        },
        py::arg("diagram"), py::arg("evidence") = py::dict(), py::arg("no_forgetting") = false);
}
