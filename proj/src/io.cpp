#include <fstream>
#include <sstream>

#include "dcc/model.hpp"
#include "json.hpp"

namespace dcc {

using nlohmann::json;

namespace {

std::string position(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorClass::syntax, "syntax error at " + position(text, e.byte) + ": " + e.what());
    }
}

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorClass::syntax, msg); }

std::vector<std::string> string_list(const json& j, const std::string& what) {
    if (!j.is_array()) schema(what + " must be a list of names");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string()) schema(what + " must contain only strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

VarKind parse_kind(const std::string& s, const std::string& owner) {
    if (s == "chance") return VarKind::chance;
    if (s == "decision") return VarKind::decision;
    if (s == "value") return VarKind::value;
    schema("variable '" + owner + "' has unknown kind '" + s + "'");
}

}  // namespace

InfluenceDiagram parse_diagram(std::string_view text) {
    json root = parse_json(text);
    if (!root.is_object()) schema("top level must be an object with a 'variables' list");
    if (!root.contains("variables") || !root["variables"].is_array()) schema("missing 'variables' list");
    std::vector<VariableSpec> specs;
    for (const auto& jv : root["variables"]) {
        if (!jv.is_object()) schema("each variable must be an object");
        VariableSpec s;
        if (!jv.contains("name") || !jv["name"].is_string()) schema("variable without a string 'name'");
        s.name = jv["name"].get<std::string>();
        if (!jv.contains("kind") || !jv["kind"].is_string()) schema("variable '" + s.name + "' needs a 'kind'");
        s.kind = parse_kind(jv["kind"].get<std::string>(), s.name);
        if (jv.contains("states")) s.states = string_list(jv["states"], "states of '" + s.name + "'");
        if (jv.contains("parents")) s.parents = string_list(jv["parents"], "parents of '" + s.name + "'");
        if (jv.contains("table")) {
            if (!jv["table"].is_array()) schema("table of '" + s.name + "' must be a list of numbers");
            for (const auto& x : jv["table"]) {
                if (!x.is_number()) schema("table of '" + s.name + "' must contain only numbers");
                s.table.push_back(x.get<double>());
            }
        }
        if (jv.contains("hard")) {
            if (!jv["hard"].is_array()) schema("'hard' of '" + s.name + "' must list cell indices");
            for (const auto& x : jv["hard"]) {
                if (!x.is_number_unsigned()) schema("'hard' of '" + s.name + "' must list cell indices");
                s.hard_cells.push_back(x.get<std::size_t>());
            }
        }
        if (jv.contains("requisite")) s.requisite = string_list(jv["requisite"], "requisite of '" + s.name + "'");
        specs.push_back(std::move(s));
    }
    std::vector<std::string> dorder, order;
    if (root.contains("decision_order")) dorder = string_list(root["decision_order"], "decision_order");
    if (root.contains("order")) order = string_list(root["order"], "order");
    return InfluenceDiagram::build(std::move(specs), std::move(dorder), std::move(order));
}

std::string serialize_diagram(const InfluenceDiagram& d) {
    json root;
    root["decision_order"] = d.decision_order_names();
    if (!d.order_hint().empty()) root["order"] = d.order_hint();
    json vars = json::array();
    for (const auto& s : d.to_specs()) {
        json v;
        v["name"] = s.name;
        v["kind"] = kind_name(s.kind);
        if (s.kind != VarKind::value) v["states"] = s.states;
        v["parents"] = s.parents;
        if (s.kind != VarKind::decision) v["table"] = s.table;
        if (!s.hard_cells.empty()) v["hard"] = s.hard_cells;
        if (s.requisite) v["requisite"] = *s.requisite;
        vars.push_back(std::move(v));
    }
    root["variables"] = std::move(vars);
    return root.dump(2) + "\n";
}

std::vector<EvidenceItem> parse_evidence(std::string_view text) {
    json root = parse_json(text);
    const json* list = &root;
    if (root.is_object() && root.contains("evidence")) list = &root["evidence"];
    if (!list->is_array()) schema("evidence must be a list of {variable, state | weight, hard}");
    std::vector<EvidenceItem> out;
    for (const auto& j : *list) {
        if (!j.is_object() || !j.contains("variable") || !j["variable"].is_string())
            schema("evidence entry without a 'variable'");
        EvidenceItem it;
        it.variable = j["variable"].get<std::string>();
        if (j.contains("state")) {
            if (!j["state"].is_string()) schema("evidence 'state' must be a string");
            it.state = j["state"].get<std::string>();
        }
        if (j.contains("weight")) {
            if (!j["weight"].is_number()) schema("evidence 'weight' must be a number");
            it.weight = j["weight"].get<double>();
        }
        if (j.contains("hard")) {
            if (!j["hard"].is_boolean()) schema("evidence 'hard' must be true or false");
            it.hard = j["hard"].get<bool>();
        }
        out.push_back(std::move(it));
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorClass::usage, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace dcc
