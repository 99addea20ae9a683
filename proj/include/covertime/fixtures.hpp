#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/network.hpp"

namespace covertime {

inline ElectricalNetwork complete_graph(int n, double conductance = 1.0) {
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            edges.emplace_back("v" + std::to_string(i), "v" + std::to_string(j), conductance);
    return ElectricalNetwork(edges, "v0");
}

inline ElectricalNetwork torus_graph(int width, int height, double conductance = 1.0) {
    auto id = [](int x, int y) { return std::to_string(x) + "," + std::to_string(y); };
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            edges.emplace_back(id(x, y), id((x + 1) % width, y), conductance);
            edges.emplace_back(id(x, y), id(x, (y + 1) % height), conductance);
        }
    }
    return ElectricalNetwork(edges, id(0, 0));
}

inline ElectricalNetwork star_graph(int leaves, double conductance = 1.0) {
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (int i = 1; i <= leaves; ++i)
        edges.emplace_back("hub", "leaf" + std::to_string(i), conductance);
    return ElectricalNetwork(edges, "hub");
}

inline ElectricalNetwork unit_path_graph(int n_edges) {
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (int k = 0; k < n_edges; ++k)
        edges.emplace_back(std::to_string(k), std::to_string(k + 1), 1.0);
    return ElectricalNetwork(edges, "0");
}

/// Built-in networks used throughout the experiments, spanning the spectrum
/// from degenerate (two_vertex, where hitting and cover times coincide) to
/// strongly concentrated (k16, torus8). The four_cycle conductances were
/// drawn once from [0.5, 2] and are fixed so results are stable.
inline ElectricalNetwork fixture(const std::string& name) {
    if (name == "two_vertex" || name == "single_edge")
        return ElectricalNetwork({{"a", "b", 1.0}}, "a");
    if (name == "triangle")
        return ElectricalNetwork({{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}}, "a");
    if (name == "four_cycle")
        return ElectricalNetwork({{"a", "b", 1.3717},
                                  {"b", "c", 0.6241},
                                  {"c", "d", 1.8031},
                                  {"d", "a", 0.9444}},
                                 "a");
    if (name == "star5") return star_graph(5);
    if (name == "k8") return complete_graph(8);
    if (name == "k16") return complete_graph(16);
    if (name == "k32") return complete_graph(32);
    if (name == "k64") return complete_graph(64);
    if (name == "torus8") return torus_graph(8, 8);
    if (name == "path8") return unit_path_graph(8);
    if (name == "loop_vertex") return ElectricalNetwork({{"a", "a", 1.0}}, "a");
    throw ParseError("unknown fixture '" + name + "'");
}

inline std::vector<std::string> fixture_names() {
    return {"two_vertex", "triangle", "four_cycle", "star5",  "k8",         "k16",
            "k32",        "k64",      "torus8",     "path8",  "loop_vertex"};
}

}  // namespace covertime
