#include "walkrank/convergence.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/graph.hpp"
#include "walkrank/graph_io.hpp"
#include "walkrank/ledger.hpp"
#include "walkrank/oracle.hpp"
#include "walkrank/walks.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <string>

namespace py = pybind11;
using namespace walkrank;

namespace
{
    std::map<std::string, double> by_label(const RankVector& ranks, const InteractionGraph& g)
    {
        std::map<std::string, double> out;
        for (NodeId u : g.nodes())
        {
            out.emplace(g.display_label(u), ranks[u]);
        }
        return out;
    }

    NodeId node(const InteractionGraph& g, const std::string& label)
    {
        return g.require(label);
    }

    py::dict report_dict(const IngestReport& r)
    {
        py::dict d;
        d["blocks_read"] = r.blocks_read;
        d["blocks_counted"] = r.blocks_counted;
        d["blocks_skipped"] = r.blocks_skipped;
        d["nodes_created"] = r.nodes_created;
        d["edges_created"] = r.edges_created;
        return d;
    }
}

PYBIND11_MODULE(_walkrank, m)
{
    m.doc() = "Personalized PageRank by seed-rooted random walks with incremental repair";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);

    py::enum_<DeltaKind>(m, "DeltaKind")
        .value("NODE_ADDED", DeltaKind::NodeAdded)
        .value("NODE_REMOVED", DeltaKind::NodeRemoved)
        .value("EDGE_ADDED", DeltaKind::EdgeAdded)
        .value("EDGE_REMOVED", DeltaKind::EdgeRemoved)
        .value("EDGE_REWEIGHTED", DeltaKind::EdgeReweighted)
        .value("EDGE_REVERSED", DeltaKind::EdgeReversed);

    py::class_<GraphDelta>(m, "Delta")
        .def_readonly("kind", &GraphDelta::kind)
        .def_readonly("old_weight", &GraphDelta::old_weight)
        .def_readonly("new_weight", &GraphDelta::new_weight)
        .def("__repr__", [](const GraphDelta& d) { return "<Delta " + std::string(to_string(d.kind)) + ">"; });

    py::class_<InteractionGraph>(m, "Graph")
        .def(py::init<>())
        .def_static("load", &load_graph, py::arg("path"))
        .def("save", [](const InteractionGraph& g, const std::filesystem::path& p) { save_graph(p, g); }, py::arg("path"))
        .def(
            "add_node",
            [](InteractionGraph& g, const std::string& label) {
                g.add_node(label);
                return GraphDelta{DeltaKind::NodeAdded, *g.find(label), NodeId{}, 0.0, 0.0};
            },
            py::arg("label")
        )
        .def(
            "add_edge",
            [](InteractionGraph& g, const std::string& s, const std::string& t, double w) {
                return g.add_directed_weight(node(g, s), node(g, t), w);
            },
            py::arg("source"), py::arg("target"), py::arg("weight"),
            "Adds `weight` to the flow from source to target."
        )
        .def(
            "upsert_net_flow",
            [](InteractionGraph& g, const std::string& a, const std::string& b, double delta) {
                return g.upsert_net_flow(node(g, a), node(g, b), delta);
            },
            py::arg("a"), py::arg("b"), py::arg("delta_up_a_to_b")
        )
        .def("remove_node", [](InteractionGraph& g, const std::string& label) { return g.remove_node(node(g, label)); })
        .def("net_flow", [](const InteractionGraph& g, const std::string& a, const std::string& b) {
            return g.net_flow(node(g, a), node(g, b));
        })
        .def("edge_weight", [](const InteractionGraph& g, const std::string& s, const std::string& t) {
            return g.edge_weight(node(g, s), node(g, t));
        })
        .def("nodes", [](const InteractionGraph& g) {
            std::vector<std::string> out;
            for (NodeId u : g.nodes())
            {
                out.push_back(g.display_label(u));
            }
            return out;
        })
        .def("edges", [](const InteractionGraph& g) {
            std::vector<std::tuple<std::string, std::string, double>> out;
            for (NodeId u : g.nodes())
            {
                for (const Edge& e : g.out_edges(u))
                {
                    out.emplace_back(g.display_label(u), g.display_label(e.node), e.weight);
                }
            }
            return out;
        })
        .def_property_readonly("node_count", &InteractionGraph::node_count)
        .def_property_readonly("edge_count", &InteractionGraph::edge_count)
        .def_property_readonly("version", &InteractionGraph::version)
        .def("__len__", &InteractionGraph::node_count);

    py::class_<WalkCorpus>(m, "Corpus")
        .def_property_readonly("version", &WalkCorpus::version)
        .def_property_readonly("total_visits", &WalkCorpus::total_visits)
        .def("__len__", [](const WalkCorpus& c) { return c.walks().size(); })
        .def("walks", [](const WalkCorpus& c, const InteractionGraph& g) {
            std::vector<std::vector<std::string>> out;
            for (const Walk& w : c.walks())
            {
                auto& labels = out.emplace_back();
                for (NodeId u : w.nodes)
                {
                    labels.push_back(g.display_label(u));
                }
            }
            return out;
        })
        .def(
            "apply",
            [](WalkCorpus& c, const InteractionGraph& g, const std::vector<GraphDelta>& deltas) {
                return apply_deltas(c, g, deltas);
            },
            py::arg("graph"), py::arg("deltas"),
            "Repairs walks after `graph` absorbed `deltas`; returns the number of suffixes recomputed."
        )
        .def("rank", [](const WalkCorpus& c, const InteractionGraph& g) { return by_label(rank(c, g), g); });

    m.def(
        "sample",
        [](const InteractionGraph& g, const std::string& seed, std::size_t walks, double reset, std::uint64_t rng_seed) {
            const WalkConfig cfg{walks, reset, rng_seed, node(g, seed)};
            cfg.validate();
            py::gil_scoped_release release;
            return sample_corpus(g, cfg);
        },
        py::arg("graph"), py::arg("seed"), py::arg("walks") = 300, py::arg("reset") = 0.3, py::arg("rng_seed") = 0
    );

    m.def(
        "power_iteration",
        [](const InteractionGraph& g, const std::string& seed, double reset, double tolerance) {
            PowerIterConfig cfg;
            cfg.reset_probability = reset;
            cfg.tolerance = tolerance;
            cfg.seed = node(g, seed);
            return by_label(personalized_power_iteration(g, cfg).ranks, g);
        },
        py::arg("graph"), py::arg("seed"), py::arg("reset") = 0.3, py::arg("tolerance") = 1e-10
    );

    m.def(
        "exact_solve",
        [](const InteractionGraph& g, const std::string& seed, double reset) {
            return by_label(exact_solve(g, reset, node(g, seed)), g);
        },
        py::arg("graph"), py::arg("seed"), py::arg("reset") = 0.3
    );

    m.def(
        "ingest",
        [](const std::filesystem::path& path, const std::string& format) {
            const auto stream = read_blocks(path, parse_ledger_format(format));
            auto result = flatten(stream);
            return py::make_tuple(std::move(result.graph), report_dict(result.report));
        },
        py::arg("path"), py::arg("format") = "sqlite",
        "Flattens a block ledger into a graph; returns (graph, report)."
    );

    m.def(
        "convergence_sweep",
        [](std::size_t nodes, std::vector<std::size_t> walks, std::vector<double> resets, std::size_t trials,
           std::uint64_t rng_seed) {
            ConvergenceConfig cfg;
            cfg.min_nodes = cfg.max_nodes = nodes;
            cfg.walks = std::move(walks);
            cfg.reset_probabilities = std::move(resets);
            cfg.trials = trials;
            cfg.rng_seed = rng_seed;
            std::vector<ConvergenceCell> cells;
            {
                py::gil_scoped_release release;
                cells = convergence_sweep(cfg);
            }
            py::list out;
            for (const auto& c : cells)
            {
                py::dict d;
                d["nodes"] = c.nodes;
                d["walks"] = c.walks;
                d["reset"] = c.reset_probability;
                d["linf_median"] = c.linf_median;
                d["l2_median"] = c.l2_median;
                out.append(d);
            }
            return out;
        },
        py::arg("nodes") = 15, py::arg("walks") = std::vector<std::size_t>{10, 100, 300, 500},
        py::arg("resets") = std::vector<double>{0.1, 0.3, 0.5}, py::arg("trials") = 20, py::arg("rng_seed") = 0
    );
}
