#pragma once

#include "walkrank/graph.hpp"
#include "walkrank/rank.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace walkrank
{
    struct SybilTopologyConfig
    {
        std::size_t honest_nodes = 500;
        std::size_t honest_edges = 2000;
        double weight_low = 0.0;
        double weight_high = 10.0;
        std::size_t sybil_nodes = 1000;
        std::size_t sybil_edges_per_node = 10;
        std::size_t attack_edges = 0;
        /// How many of the attack edges leave the seed. The first one is the 5th edge in insertion order.
        std::size_t attack_edges_to_seed = 0;
        std::uint64_t rng_seed = 0;

        void validate() const;
    };

    /// Insertion index of the first seed-sourced attack edge.
    inline constexpr std::size_t first_seed_attack_index = 4;

    enum class Region : std::uint8_t
    {
        Honest,
        Sybil,
    };

    struct AttackEdge
    {
        NodeId source;  // honest
        NodeId target;  // sybil
        double weight = 0.0;
    };

    /// Graph plus ground truth indexed by node handle. The seed is handle 0.
    struct LabeledGraph
    {
        InteractionGraph graph;
        std::vector<Region> regions;
        NodeId seed{0};

        bool is_sybil(NodeId u) const { return regions.at(u.value) == Region::Sybil; }
    };

    /**
     * Honest and sybil regions without attack edges, plus the deterministic
     * attack-edge schedule. Prefixes of the schedule give nested attack
     * scenarios, so a sweep over attack counts varies only the attack.
     */
    struct SybilScenario
    {
        LabeledGraph base;
        std::vector<AttackEdge> schedule;

        /// Base graph with the first `k` scheduled attack edges added.
        LabeledGraph with_attack_edges(std::size_t k) const;
    };

    /**
     * Honest nodes get handles [0, honest), sybils follow. Labels are
     * zero-padded numbers assigned through a random permutation, so the
     * label tie-break among equal scores carries no region information.
     * Throws ConfigError when a region cannot hold the requested edges.
     */
    SybilScenario make_scenario(const SybilTopologyConfig& cfg);
    LabeledGraph generate_topology(const SybilTopologyConfig& cfg);

    struct OrderedNodes
    {
        std::vector<ScoredNode> nodes;
        bool filtered = false;
        std::size_t dropped_zero = 0;
    };

    /// Descending score, ties by ascending label; optionally without exact zeros.
    OrderedNodes ordered_nodes(const RankVector& ranks, const InteractionGraph& g, bool filter_zero);

    struct RocResult
    {
        std::vector<NodeId> ordered;
        std::vector<std::pair<double, double>> points;  // (fpr, tpr) for cutoffs 0..n
        double auroc = 0.0;
        double fp_rate = 0.0;  // sybils predicted honest, at cutoff = honest count
        double fn_rate = 0.0;  // honest predicted sybil, same cutoff
        bool zero_filtered = false;
        std::size_t dropped_zero = 0;

        friend bool operator==(const RocResult&, const RocResult&) = default;
    };

    enum class SingleClass
    {
        Reject,  // throw "degenerate ROC"
        Resolve,  // no sybils listed: AUROC 1; no honest listed: AUROC 0
    };

    RocResult roc(const OrderedNodes& ordered, const LabeledGraph& truth, SingleClass policy = SingleClass::Reject);

    /// Trapezoidal area under (fpr, tpr) points.
    double trapezoid_area(std::span<const std::pair<double, double>> points);

    struct SweepConfig
    {
        std::vector<std::size_t> attack_edges;
        std::vector<double> reset_probabilities;
        std::size_t walks = 200;
        std::uint64_t rng_seed = 0;
    };

    struct SweepRow
    {
        std::size_t attack_edges = 0;
        double reset_probability = 0.0;
        bool filtered = false;
        RocResult result;

        friend bool operator==(const SweepRow&, const SweepRow&) = default;
    };

    /**
     * Full factorial sweep: for each (attack count, c) one corpus is sampled
     * from the seed and both the unfiltered and the zero-filtered ROC are
     * reported. Rows are ordered by attack count, then c, unfiltered first.
     * The scenario schedule must cover the largest attack count.
     */
    std::vector<SweepRow> sweep_attack_edges(const SybilScenario& scenario, const SweepConfig& cfg);

    /// Sweep CSV plus one `roc_<attack>_<c>_<filtered>.csv` per row; returns the files written.
    std::vector<std::filesystem::path> write_sweep(const std::filesystem::path& dir, std::span<const SweepRow> rows);

    /// `<attack>_<c>_<filtered>` key used in ROC point file names.
    std::string sweep_cell_key(const SweepRow& row);
}
