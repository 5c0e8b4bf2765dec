#include "treeminer/trace.hpp"

#include <ostream>
#include <unordered_map>

#include "treeminer/error.hpp"

namespace treeminer {

namespace {

const char* step_name(StepKind k) {
    switch (k) {
    case StepKind::Fresh: return "fresh";
    case StepKind::Toward: return "toward";
    case StepKind::Probe: return "probe";
    }
    return "?";
}

} // namespace

Json game_header(int k, const PotentialParams& p, const std::string& adversary, std::uint64_t seed) {
    return {{"type", "header"},
            {"k", k},
            {"a", p.a},
            {"b", p.b},
            {"eps", p.epsilon},
            {"eps_prime", p.epsilon_prime},
            {"gamma", p.gamma},
            {"adversary", adversary},
            {"seed", seed}};
}

Json game_snapshot(std::size_t index, const GameState& state, const GameEvent& ev) {
    Json nodes = Json::array();
    for (NodeId u : state.tree.nodes()) {
        if (u == state.tree.root()) continue;
        nodes.push_back({u, state.tree.parent(u), state.tree.edge_length(u)});
    }
    Json x = Json::array();
    for (const auto& [leaf, w] : state.config.weights) x.push_back({leaf, w});
    Json e = {{"kind", to_string(ev.kind)}, {"leaf", ev.leaf}};
    if (ev.kind == EventKind::Move) e["dest"] = ev.dest;
    if (ev.kind == EventKind::Elongate || ev.kind == EventKind::Fork) e["amount"] = ev.amount;
    if (ev.kind == EventKind::Fork) e["children"] = ev.children;
    return {{"type", "event"},
            {"i", index},
            {"event", e},
            {"root", state.tree.root()},
            {"nodes", nodes},
            {"x", x},
            {"cost", state.cost}};
}

PotentialParams parse_header(const Json& line, int& k) {
    try {
        if (line.at("type") != "header") throw InputError("trace must start with a header line");
        k = line.at("k").get<int>();
        PotentialParams p;
        p.a = line.at("a").get<double>();
        p.b = line.at("b").get<double>();
        p.epsilon = line.at("eps").get<double>();
        p.epsilon_prime = line.at("eps_prime").get<double>();
        p.gamma = line.at("gamma").get<double>();
        return p;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed trace header: ") + e.what());
    }
}

Snapshot parse_snapshot(const Json& line) {
    try {
        if (line.at("type") != "event") throw InputError("expected an event line");
        Snapshot s;
        s.index = line.at("i").get<std::size_t>();
        NodeId root = line.at("root").get<NodeId>();
        std::unordered_map<NodeId, std::vector<std::pair<NodeId, double>>> kids;
        std::size_t count = 0;
        for (const auto& n : line.at("nodes")) {
            kids[n.at(1).get<NodeId>()].emplace_back(n.at(0).get<NodeId>(), n.at(2).get<double>());
            ++count;
        }
        s.state.tree = RootedTree(root);
        std::vector<NodeId> stack{root};
        while (!stack.empty()) {
            NodeId u = stack.back();
            stack.pop_back();
            auto it = kids.find(u);
            if (it == kids.end()) continue;
            for (auto [c, len] : it->second) {
                s.state.tree.add_child(u, len, c);
                stack.push_back(c);
            }
            kids.erase(it);
        }
        if (s.state.tree.size() != count + 1) throw InputError("snapshot tree is not connected");
        for (const auto& x : line.at("x")) s.state.config.weights[x.at(0).get<NodeId>()] = x.at(1).get<int>();
        s.state.cost = line.at("cost").get<double>();
        return s;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed trace line: ") + e.what());
    }
}

Json move_record(std::size_t index, const ActeMove& mv) {
    return {{"i", index}, {"robot", mv.robot}, {"from", mv.from}, {"to", mv.to}, {"kind", step_name(mv.kind)}};
}

Json layer_record(int layer, const FractionalPosition& pos) {
    Json d = Json::array();
    for (const auto& [v, w] : pos) d.push_back({v, w});
    return {{"layer", layer}, {"distribution", d}};
}

void write_line(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

} // namespace treeminer
