#include "walkrank/graph_io.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"

#include <fstream>
#include <ostream>

namespace walkrank
{
    void write_edge_csv(std::ostream& out, const InteractionGraph& g)
    {
        out << "source_label,target_label,weight\n";
        for (NodeId u : g.nodes())
        {
            const std::string source = g.display_label(u);
            for (const Edge& e : g.out_edges(u))
            {
                out << source << ',' << g.display_label(e.node) << ',' << csv::format_double(e.weight) << '\n';
            }
        }
    }

    void write_node_csv(std::ostream& out, const InteractionGraph& g)
    {
        out << "label\n";
        for (NodeId u : g.nodes())
        {
            out << g.display_label(u) << '\n';
        }
    }

    namespace
    {
        NodeId ensure_node(InteractionGraph& g, std::string_view label)
        {
            if (auto id = g.find(label))
            {
                return *id;
            }
            return g.add_node(std::string(label));
        }
    }

    InteractionGraph read_graph_csv(std::istream& edges, std::istream* nodes)
    {
        InteractionGraph g;
        if (nodes != nullptr)
        {
            csv::Reader reader(*nodes);
            if (!reader.has_header())
            {
                throw FormatError("node list: missing header");
            }
            const auto col = reader.column("label");
            if (!col)
            {
                throw FormatError("node list: missing column label");
            }
            while (reader.next())
            {
                const auto& f = reader.fields();
                if (*col >= f.size() || f[*col].empty())
                {
                    throw FormatError("node list: bad row at line " + std::to_string(reader.line_number()));
                }
                ensure_node(g, f[*col]);
            }
        }

        csv::Reader reader(edges);
        if (!reader.has_header())
        {
            throw FormatError("edge list: missing header");
        }
        const auto missing = reader.missing({"source_label", "target_label", "weight"});
        if (!missing.empty())
        {
            std::string msg = "edge list: missing column(s):";
            for (const auto& m : missing)
            {
                msg += " " + m;
            }
            throw FormatError(msg);
        }
        const std::size_t cs = *reader.column("source_label");
        const std::size_t ct = *reader.column("target_label");
        const std::size_t cw = *reader.column("weight");
        const std::size_t width = std::max({cs, ct, cw}) + 1;
        while (reader.next())
        {
            const auto& f = reader.fields();
            const auto where = " at line " + std::to_string(reader.line_number());
            if (f.size() < width)
            {
                throw FormatError("edge list: short row" + where);
            }
            const auto w = csv::parse_double(f[cw]);
            if (!w || !(*w > 0.0))
            {
                throw FormatError("edge list: weight must be a positive number" + where);
            }
            if (f[cs] == f[ct] || f[cs].empty() || f[ct].empty())
            {
                throw FormatError("edge list: invalid endpoints" + where);
            }
            const NodeId s = ensure_node(g, f[cs]);
            const NodeId t = ensure_node(g, f[ct]);
            if (g.net_flow(s, t) != 0.0)
            {
                throw FormatError("edge list: pair listed twice" + where);
            }
            g.add_directed_weight(s, t, *w);
        }
        return g;
    }

    std::filesystem::path node_list_path(const std::filesystem::path& edge_path)
    {
        auto p = edge_path;
        p.replace_extension();
        p += ".nodes.csv";
        return p;
    }

    void save_graph(const std::filesystem::path& edge_path, const InteractionGraph& g)
    {
        if (edge_path.has_parent_path())
        {
            std::filesystem::create_directories(edge_path.parent_path());
        }
        std::ofstream edges(edge_path, std::ios::binary);
        std::ofstream nodes(node_list_path(edge_path), std::ios::binary);
        if (!edges || !nodes)
        {
            throw FormatError("cannot write graph to " + edge_path.string());
        }
        write_edge_csv(edges, g);
        write_node_csv(nodes, g);
    }

    InteractionGraph load_graph(const std::filesystem::path& edge_path)
    {
        std::ifstream edges(edge_path, std::ios::binary);
        if (!edges)
        {
            throw FormatError("cannot read graph file " + edge_path.string());
        }
        std::ifstream nodes(node_list_path(edge_path), std::ios::binary);
        return read_graph_csv(edges, nodes ? &nodes : nullptr);
    }
}
