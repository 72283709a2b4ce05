#include "walkrank/delta_script.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"

#include <ostream>

namespace walkrank
{
    std::vector<DeltaOp> read_delta_ops(std::istream& in)
    {
        csv::Reader reader(in);
        std::vector<DeltaOp> ops;
        if (!reader.has_header())
        {
            return ops;
        }
        const auto missing = reader.missing({"op", "node_a", "node_b", "delta_flow"});
        if (!missing.empty())
        {
            std::string cols;
            for (const auto& m : missing)
            {
                cols += " " + m;
            }
            throw FormatError("delta file: missing column(s):" + cols);
        }
        const std::size_t c_op = *reader.column("op");
        const std::size_t c_a = *reader.column("node_a");
        const std::size_t c_b = *reader.column("node_b");
        const std::size_t c_x = *reader.column("delta_flow");
        while (reader.next())
        {
            const auto& f = reader.fields();
            const auto where = "delta file line " + std::to_string(reader.line_number());
            if (f.size() != reader.header().size())
            {
                throw FormatError(where + ": expected " + std::to_string(reader.header().size()) + " fields");
            }
            DeltaOp op;
            op.node_a = std::string(f[c_a]);
            op.node_b = std::string(f[c_b]);
            if (f[c_op] == "flow")
            {
                op.kind = DeltaOp::Kind::Flow;
                const auto x = csv::parse_double(f[c_x]);
                if (!x)
                {
                    throw FormatError(where + ": bad delta_flow `" + std::string(f[c_x]) + "`");
                }
                op.delta_flow = *x;
            }
            else if (f[c_op] == "add_node")
            {
                op.kind = DeltaOp::Kind::AddNode;
            }
            else if (f[c_op] == "remove_node")
            {
                op.kind = DeltaOp::Kind::RemoveNode;
            }
            else
            {
                throw FormatError(where + ": unknown op `" + std::string(f[c_op]) + "`");
            }
            if (op.node_a.empty())
            {
                throw FormatError(where + ": node_a is empty");
            }
            ops.push_back(std::move(op));
        }
        return ops;
    }

    void write_delta_ops(std::ostream& out, const std::vector<DeltaOp>& ops)
    {
        out << "op,node_a,node_b,delta_flow\n";
        for (const DeltaOp& op : ops)
        {
            switch (op.kind)
            {
            case DeltaOp::Kind::Flow:
                out << "flow," << op.node_a << ',' << op.node_b << ',' << csv::format_double(op.delta_flow) << '\n';
                break;
            case DeltaOp::Kind::AddNode:
                out << "add_node," << op.node_a << ",,\n";
                break;
            case DeltaOp::Kind::RemoveNode:
                out << "remove_node," << op.node_a << ",,\n";
                break;
            }
        }
    }

    std::vector<GraphDelta> apply_op(InteractionGraph& g, const DeltaOp& op)
    {
        switch (op.kind)
        {
        case DeltaOp::Kind::Flow:
            return {g.upsert_net_flow(g.require(op.node_a), g.require(op.node_b), op.delta_flow)};
        case DeltaOp::Kind::AddNode:
        {
            const NodeId u = g.add_node(op.node_a);
            return {GraphDelta{DeltaKind::NodeAdded, u, NodeId{}, 0.0, 0.0}};
        }
        case DeltaOp::Kind::RemoveNode:
            return g.remove_node(g.require(op.node_a));
        }
        return {};
    }
}
