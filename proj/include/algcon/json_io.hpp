#ifndef ALGCON_JSON_IO_HPP
#define ALGCON_JSON_IO_HPP

#include <json.hpp>

#include "algcon/constraint.hpp"
#include "algcon/graph.hpp"
#include "algcon/htc.hpp"
#include "algcon/oracle.hpp"

namespace algcon {

using Json = nlohmann::json;

inline Json family_to_json(const IdentifyingFamily& fam) {
    Json sets = Json::object();
    for (const auto& [v, ys] : fam.sets) sets[v] = ys;
    return Json{{"order", fam.order}, {"sets", sets}};
}

inline IdentifyingFamily family_from_json(const Json& j) {
    IdentifyingFamily fam;
    fam.order = j.at("order").get<std::vector<std::string>>();
    for (const auto& [v, ys] : j.at("sets").items())
        fam.sets[v] = ys.get<std::vector<std::string>>();
    for (auto& [v, ys] : fam.sets) {
        (void)v;
        std::sort(ys.begin(), ys.end());
    }
    return fam;
}

inline Json constraint_to_json(const GraphicalConstraint& gc) {
    auto part = [](const std::vector<ConstraintNode>& ns) {
        Json arr = Json::array();
        for (const auto& n : ns) arr.push_back(Json{{"id", n.id}, {"label", n.label}});
        return arr;
    };
    Json edges = Json::array();
    for (const auto& [a, b] : gc.edges()) edges.push_back(Json::array({a, b}));
    return Json{{"partA", part(gc.part_a())}, {"partB", part(gc.part_b())}, {"edges", edges}};
}

inline GraphicalConstraint constraint_from_json(const Json& j) {
    auto part = [](const Json& arr) {
        std::vector<ConstraintNode> ns;
        for (const auto& n : arr)
            ns.push_back({n.at("id").get<std::string>(),
                          n.at("label").get<std::vector<std::string>>()});
        return ns;
    };
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : j.at("edges"))
        edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    return GraphicalConstraint(part(j.at("partA")), part(j.at("partB")), std::move(edges));
}

inline Json graph_to_json(const MixedGraph& g) {
    Json dir = Json::array(), bi = Json::array();
    for (const auto& [t, h] : g.directed()) dir.push_back(Json::array({g.name(t), g.name(h)}));
    for (const auto& [a, b] : g.bidirected()) bi.push_back(Json::array({g.name(a), g.name(b)}));
    return Json{{"nodes", g.nodes()}, {"dir", dir}, {"bi", bi}};
}

inline MixedGraph graph_from_json(const Json& j) {
    MixedGraph g{j.at("nodes").get<std::vector<std::string>>()};
    for (const auto& e : j.at("dir"))
        g.add_directed(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    for (const auto& e : j.at("bi"))
        g.add_bidirected(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    return g;
}

inline Json battery_to_json(const BatteryReport& r) {
    return Json{{"trials", r.trials},
                {"model_pass", r.model_pass},
                {"offmodel_reject", r.offmodel_reject}};
}

} // namespace algcon

#endif // ALGCON_JSON_IO_HPP
