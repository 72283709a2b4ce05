#pragma once

#include "walkrank/graph.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace walkrank
{
    /**
     * One line of a mutation script, CSV `op,node_a,node_b,delta_flow`:
     *   flow,a,b,x       a uploaded x more bytes to b (x may be negative)
     *   add_node,a,,     new node labelled a
     *   remove_node,a,,  drop a and its edges
     */
    struct DeltaOp
    {
        enum class Kind
        {
            Flow,
            AddNode,
            RemoveNode,
        };

        Kind kind = Kind::Flow;
        std::string node_a;
        std::string node_b;
        double delta_flow = 0.0;
    };

    /// Throws FormatError on a missing column, unknown op or bad number.
    std::vector<DeltaOp> read_delta_ops(std::istream& in);
    void write_delta_ops(std::ostream& out, const std::vector<DeltaOp>& ops);

    /// Applies one op; unknown labels throw GraphError.
    std::vector<GraphDelta> apply_op(InteractionGraph& g, const DeltaOp& op);
}
