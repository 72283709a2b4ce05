#pragma once

#include "walkrank/graph.hpp"

#include <filesystem>
#include <iosfwd>

namespace walkrank
{
    // Edge list: header `source_label,target_label,weight`, weights with 17
    // significant digits. Node list: header `label`, every node in handle order
    // so isolated nodes survive and reloads reproduce the same handles.

    void write_edge_csv(std::ostream& out, const InteractionGraph& g);
    void write_node_csv(std::ostream& out, const InteractionGraph& g);

    /**
     * Rebuilds a graph: nodes from `nodes` (if given) in listed order, then
     * edges in file order, creating endpoints not yet seen. Throws FormatError
     * on a missing header column or unparsable row.
     */
    InteractionGraph read_graph_csv(std::istream& edges, std::istream* nodes = nullptr);

    /// Companion node-list path: `graph.csv` -> `graph.nodes.csv`.
    std::filesystem::path node_list_path(const std::filesystem::path& edge_path);

    void save_graph(const std::filesystem::path& edge_path, const InteractionGraph& g);
    /// Loads the edge list and, when present, the companion node list.
    InteractionGraph load_graph(const std::filesystem::path& edge_path);
}
