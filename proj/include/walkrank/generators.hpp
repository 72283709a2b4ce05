#pragma once

#include "walkrank/graph.hpp"
#include "walkrank/ledger.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace walkrank
{
    /// Zero-padded decimal label, width taken from `count - 1`.
    std::string padded_label(std::size_t index, std::size_t count, std::string_view prefix = "");

    struct RandomGraphConfig
    {
        std::size_t nodes = 10;
        std::size_t out_degree = 2;
        double weight_low = 0.0;
        double weight_high = 10.0;
        std::uint64_t rng_seed = 0;
    };

    /**
     * Each node picks up to `out_degree` distinct targets among nodes it has
     * no edge with yet (either direction); weights uniform in (low, high].
     * Node i gets label padded_label(i, nodes) and handle i.
     */
    InteractionGraph random_graph(const RandomGraphConfig& cfg);

    struct SyntheticLedgerConfig
    {
        std::size_t keys = 300;
        std::size_t blocks = 100000;
        std::size_t partners_per_key = 6;
        double agreement_fraction = 0.1;  // share of transactions also recorded on the responder's chain
        std::uint64_t rng_seed = 0;
    };

    /**
     * TrustChain-shaped ledger over `keys` 32-byte public keys. Partners form
     * a ring plus random chords, so every key transacts. Returns exactly
     * `blocks` rows (proposals, some followed by their agreement half), in
     * timestamp order.
     */
    std::vector<BlockRecord> synthetic_ledger(const SyntheticLedgerConfig& cfg);
}
