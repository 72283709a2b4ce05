#include "walkrank/generators.hpp"

#include "walkrank/errors.hpp"
#include "walkrank/rng.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace walkrank
{
    std::string padded_label(std::size_t index, std::size_t count, std::string_view prefix)
    {
        const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
        std::string digits = std::to_string(index);
        if (digits.size() < width)
        {
            digits.insert(0, width - digits.size(), '0');
        }
        return std::string(prefix) + digits;
    }

    InteractionGraph random_graph(const RandomGraphConfig& cfg)
    {
        InteractionGraph g;
        for (std::size_t i = 0; i < cfg.nodes; ++i)
        {
            g.add_node(padded_label(i, cfg.nodes));
        }
        StreamRng rng(cfg.rng_seed, 0x6772617068);
        std::vector<NodeId> candidates;
        for (std::size_t i = 0; i < cfg.nodes; ++i)
        {
            const NodeId u(static_cast<NodeId::value_type>(i));
            std::size_t placed = 0;
            std::size_t attempts = 0;
            // Rejection first; fall back to enumerating free partners for small or dense graphs.
            while (placed < cfg.out_degree && attempts < 8 * cfg.out_degree && cfg.nodes > 1)
            {
                ++attempts;
                const NodeId v(static_cast<NodeId::value_type>(rng.below(cfg.nodes)));
                if (v == u || g.net_flow(u, v) != 0.0)
                {
                    continue;
                }
                g.add_directed_weight(u, v, rng.uniform_open_closed(cfg.weight_low, cfg.weight_high));
                ++placed;
            }
            if (placed < cfg.out_degree)
            {
                candidates.clear();
                for (std::size_t j = 0; j < cfg.nodes; ++j)
                {
                    const NodeId v(static_cast<NodeId::value_type>(j));
                    if (v != u && g.net_flow(u, v) == 0.0)
                    {
                        candidates.push_back(v);
                    }
                }
                shuffle(std::span(candidates), rng);
                for (std::size_t k = 0; k < candidates.size() && placed < cfg.out_degree; ++k, ++placed)
                {
                    g.add_directed_weight(u, candidates[k], rng.uniform_open_closed(cfg.weight_low, cfg.weight_high));
                }
            }
        }
        return g;
    }

    namespace
    {
        Bytes random_bytes(StreamRng& rng, std::size_t n)
        {
            Bytes out(n);
            for (std::size_t i = 0; i < n; i += 8)
            {
                std::uint64_t word = rng();
                for (std::size_t j = i; j < std::min(n, i + 8); ++j)
                {
                    out[j] = static_cast<std::uint8_t>(word);
                    word >>= 8;
                }
            }
            return out;
        }

        // Heavy-ish tail: most exchanges are small, a few are large.
        std::uint64_t transfer_size(StreamRng& rng)
        {
            const double u = rng.uniform();
            return static_cast<std::uint64_t>(1024.0 * (1.0 + 4096.0 * u * u * u));
        }
    }

    std::vector<BlockRecord> synthetic_ledger(const SyntheticLedgerConfig& cfg)
    {
        if (cfg.keys < 2)
        {
            throw ConfigError("synthetic ledger needs at least two keys");
        }
        StreamRng rng(cfg.rng_seed, 0x6c6564676572);
        std::vector<Bytes> keys;
        keys.reserve(cfg.keys);
        for (std::size_t i = 0; i < cfg.keys; ++i)
        {
            keys.push_back(random_bytes(rng, 32));
        }

        std::set<std::pair<std::size_t, std::size_t>> pair_set;
        for (std::size_t i = 0; i < cfg.keys; ++i)
        {
            pair_set.emplace(std::min(i, (i + 1) % cfg.keys), std::max(i, (i + 1) % cfg.keys));
        }
        const std::size_t chords = cfg.keys * std::max<std::size_t>(cfg.partners_per_key, 2) / 2;
        const std::size_t max_pairs = cfg.keys * (cfg.keys - 1) / 2;
        while (pair_set.size() < std::min(chords, max_pairs))
        {
            const auto a = static_cast<std::size_t>(rng.below(cfg.keys));
            const auto b = static_cast<std::size_t>(rng.below(cfg.keys));
            if (a != b)
            {
                pair_set.emplace(std::min(a, b), std::max(a, b));
            }
        }
        const std::vector<std::pair<std::size_t, std::size_t>> pairs(pair_set.begin(), pair_set.end());

        std::vector<std::uint64_t> next_seq(cfg.keys, 1);
        std::vector<Bytes> last_hash(cfg.keys, Bytes(32, 0));
        // Running totals per ordered (requester, responder).
        std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint64_t, std::uint64_t>> totals;

        std::vector<BlockRecord> out;
        out.reserve(cfg.blocks);
        std::int64_t clock = 1'500'000'000'000;
        while (out.size() < cfg.blocks)
        {
            const auto& [x, y] = pairs[rng.below(pairs.size())];
            const bool flip = rng.bernoulli(0.5);
            const std::size_t req = flip ? y : x;
            const std::size_t resp = flip ? x : y;

            BlockRecord p;
            p.block_type = "tribler_bandwidth";
            // Requesters lean toward downloading; skew differs per pair so net flows vary.
            p.tx_up = rng.bernoulli(0.3 + 0.4 * static_cast<double>((req * 7 + resp) % 5) / 4.0) ? transfer_size(rng) : 0;
            p.tx_down = transfer_size(rng);
            auto& t = totals[{req, resp}];
            t.first += p.tx_up;
            t.second += p.tx_down;
            p.tx_total_up = t.first;
            p.tx_total_down = t.second;
            p.public_key = keys[req];
            p.sequence_number = next_seq[req]++;
            p.link_public_key = keys[resp];
            p.link_sequence_number = 0;
            p.previous_hash = last_hash[req];
            p.signature = random_bytes(rng, 64);
            clock += 1 + static_cast<std::int64_t>(rng.below(1000));
            p.block_timestamp = clock;
            p.insert_time = clock + static_cast<std::int64_t>(rng.below(50));
            p.block_hash = random_bytes(rng, 32);
            last_hash[req] = p.block_hash;
            const bool with_agreement = rng.bernoulli(cfg.agreement_fraction);
            out.push_back(p);

            if (with_agreement && out.size() < cfg.blocks)
            {
                BlockRecord a = p;
                a.public_key = keys[resp];
                a.sequence_number = next_seq[resp]++;
                a.link_public_key = keys[req];
                a.link_sequence_number = p.sequence_number;
                a.previous_hash = last_hash[resp];
                a.signature = random_bytes(rng, 64);
                clock += 1;
                a.block_timestamp = clock;
                a.insert_time = clock;
                a.block_hash = random_bytes(rng, 32);
                last_hash[resp] = a.block_hash;
                out.push_back(std::move(a));
            }
        }
        return out;
    }
}
