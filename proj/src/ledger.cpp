#include "walkrank/ledger.hpp"

#include "walkrank/csv.hpp"
#include "walkrank/errors.hpp"
#include "walkrank/rng.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

namespace walkrank
{
    std::string to_hex(const Bytes& bytes)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(bytes.size() * 2);
        for (std::uint8_t b : bytes)
        {
            out.push_back(digits[b >> 4]);
            out.push_back(digits[b & 0xf]);
        }
        return out;
    }

    std::optional<Bytes> from_hex(std::string_view hex)
    {
        if (hex.size() % 2 != 0)
        {
            return std::nullopt;
        }
        auto nibble = [](char c) -> int
        {
            if (c >= '0' && c <= '9')
            {
                return c - '0';
            }
            if (c >= 'a' && c <= 'f')
            {
                return c - 'a' + 10;
            }
            if (c >= 'A' && c <= 'F')
            {
                return c - 'A' + 10;
            }
            return -1;
        };
        Bytes out;
        out.reserve(hex.size() / 2);
        for (std::size_t i = 0; i < hex.size(); i += 2)
        {
            const int hi = nibble(hex[i]);
            const int lo = nibble(hex[i + 1]);
            if (hi < 0 || lo < 0)
            {
                return std::nullopt;
            }
            out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
        }
        return out;
    }

    std::string_view to_string(SkipReason reason)
    {
        switch (reason)
        {
            case SkipReason::SelfPair: return "self-pair";
            case SkipReason::MalformedTx: return "malformed-tx";
            case SkipReason::DuplicateHalfBlock: return "duplicate-half-block";
            case SkipReason::MalformedRow: return "malformed-row";
        }
        return "?";
    }

    LedgerFormat parse_ledger_format(std::string_view tag)
    {
        if (tag == "sqlite" || tag == "sqlite-file")
        {
            return LedgerFormat::Sqlite;
        }
        if (tag == "csv")
        {
            return LedgerFormat::Csv;
        }
        throw ConfigError("unknown ledger format: " + std::string(tag));
    }

    const std::vector<std::string>& sqlite_block_columns()
    {
        static const std::vector<std::string> columns = {
            "type",
            "tx",
            "public_key",
            "sequence_number",
            "link_public_key",
            "link_sequence_number",
            "previous_hash",
            "signature",
            "block_timestamp",
            "insert_time",
            "block_hash",
        };
        return columns;
    }

    const std::vector<std::string>& csv_block_columns()
    {
        static const std::vector<std::string> columns = {
            "type",
            "up",
            "down",
            "total_up",
            "total_down",
            "public_key",
            "sequence_number",
            "link_public_key",
            "link_sequence_number",
            "previous_hash",
            "signature",
            "block_timestamp",
            "insert_time",
            "block_hash",
        };
        return columns;
    }

    void sort_blocks(std::vector<BlockRecord>& records)
    {
        std::stable_sort(
            records.begin(),
            records.end(),
            [](const BlockRecord& a, const BlockRecord& b)
            {
                if (a.block_timestamp != b.block_timestamp)
                {
                    return a.block_timestamp < b.block_timestamp;
                }
                return a.block_hash < b.block_hash;
            }
        );
    }

    BlockStream read_blocks_csv(std::istream& in)
    {
        csv::Reader reader(in);
        BlockStream stream;
        if (!reader.has_header())
        {
            // An empty file is an empty ledger.
            return stream;
        }
        const auto missing = reader.missing(csv_block_columns());
        if (!missing.empty())
        {
            std::string msg = "ledger CSV: missing column(s):";
            for (const auto& m : missing)
            {
                msg += " " + m;
            }
            throw FormatError(msg);
        }
        std::vector<std::size_t> col;
        for (const auto& name : csv_block_columns())
        {
            col.push_back(*reader.column(name));
        }
        const std::size_t width = *std::max_element(col.begin(), col.end()) + 1;

        std::size_t row = 0;
        while (reader.next())
        {
            ++row;
            const auto& f = reader.fields();
            if (f.size() < width)
            {
                stream.skipped.push_back({row, SkipReason::MalformedRow, "short row"});
                continue;
            }
            auto field = [&](std::size_t i) { return f[col[i]]; };

            const auto up = csv::parse_u64(field(1));
            const auto down = csv::parse_u64(field(2));
            const auto total_up = field(3).empty() ? std::optional<std::uint64_t>(0) : csv::parse_u64(field(3));
            const auto total_down = field(4).empty() ? std::optional<std::uint64_t>(0) : csv::parse_u64(field(4));
            if (!up || !down || !total_up || !total_down)
            {
                stream.skipped.push_back({row, SkipReason::MalformedTx, "tx up/down missing or not a byte count"});
                continue;
            }

            BlockRecord b;
            b.block_type = std::string(field(0));
            b.tx_up = *up;
            b.tx_down = *down;
            b.tx_total_up = *total_up;
            b.tx_total_down = *total_down;
            auto pk = from_hex(field(5));
            auto seq = csv::parse_u64(field(6));
            auto link_pk = from_hex(field(7));
            auto link_seq = csv::parse_u64(field(8));
            auto prev = from_hex(field(9));
            auto sig = from_hex(field(10));
            auto ts = csv::parse_i64(field(11));
            auto ins = csv::parse_i64(field(12));
            auto hash = from_hex(field(13));
            if (!pk || pk->empty() || !seq || !link_pk || link_pk->empty() || !link_seq || !prev || !sig || !ts || !ins
                || !hash)
            {
                stream.skipped.push_back({row, SkipReason::MalformedRow, "bad key, integer or hex field"});
                continue;
            }
            b.public_key = std::move(*pk);
            b.sequence_number = *seq;
            b.link_public_key = std::move(*link_pk);
            b.link_sequence_number = *link_seq;
            b.previous_hash = std::move(*prev);
            b.signature = std::move(*sig);
            b.block_timestamp = *ts;
            b.insert_time = *ins;
            b.block_hash = std::move(*hash);
            stream.records.push_back(std::move(b));
        }
        sort_blocks(stream.records);
        return stream;
    }

    BlockStream read_sqlite_blocks(const std::filesystem::path& path);  // ledger_sqlite.cpp

    BlockStream read_blocks(const std::filesystem::path& source, LedgerFormat format)
    {
        if (!std::filesystem::is_regular_file(source))
        {
            throw FormatError("cannot read ledger file " + source.string());
        }
        if (format == LedgerFormat::Sqlite)
        {
            return read_sqlite_blocks(source);
        }
        std::ifstream in(source, std::ios::binary);
        if (!in)
        {
            throw FormatError("cannot read ledger file " + source.string());
        }
        return read_blocks_csv(in);
    }

    void write_blocks_csv(std::ostream& out, std::span<const BlockRecord> records)
    {
        const auto& cols = csv_block_columns();
        for (std::size_t i = 0; i < cols.size(); ++i)
        {
            out << (i ? "," : "") << cols[i];
        }
        out << '\n';
        for (const BlockRecord& b : records)
        {
            out << b.block_type << ',' << b.tx_up << ',' << b.tx_down << ',' << b.tx_total_up << ',' << b.tx_total_down
                << ',' << to_hex(b.public_key) << ',' << b.sequence_number << ',' << to_hex(b.link_public_key) << ','
                << b.link_sequence_number << ',' << to_hex(b.previous_hash) << ',' << to_hex(b.signature) << ','
                << b.block_timestamp << ',' << b.insert_time << ',' << to_hex(b.block_hash) << '\n';
        }
    }

    void IngestReport::count_skip(SkipReason reason)
    {
        ++blocks_skipped;
        switch (reason)
        {
            case SkipReason::SelfPair: ++skipped_self_pair; break;
            case SkipReason::MalformedTx: ++skipped_malformed_tx; break;
            case SkipReason::DuplicateHalfBlock: ++skipped_duplicate; break;
            case SkipReason::MalformedRow: ++skipped_malformed_row; break;
        }
    }

    LedgerFlattener::LedgerFlattener(InteractionGraph& graph)
        : m_graph(graph)
    {
    }

    NodeId LedgerFlattener::node_for(const Bytes& key, std::vector<GraphDelta>& deltas)
    {
        const std::string label = to_hex(key);
        if (auto id = m_graph.find(label))
        {
            return *id;
        }
        const NodeId id = m_graph.add_node(label);
        deltas.push_back({DeltaKind::NodeAdded, id, NodeId{}, 0.0, 0.0});
        ++m_report.nodes_created;
        return id;
    }

    void LedgerFlattener::tally(const GraphDelta& d)
    {
        switch (d.kind)
        {
            case DeltaKind::EdgeAdded: ++m_report.edges_created; break;
            case DeltaKind::EdgeRemoved: ++m_report.edges_removed; break;
            case DeltaKind::EdgeReversed: ++m_report.edges_reversed; break;
            default: break;
        }
    }

    std::optional<LedgerFlattener::Counted> LedgerFlattener::admit(const BlockRecord& b, std::vector<GraphDelta>& deltas)
    {
        ++m_report.blocks_read;
        if (b.public_key == b.link_public_key)
        {
            node_for(b.public_key, deltas);
            m_report.count_skip(SkipReason::SelfPair);
            return std::nullopt;
        }
        const bool proposal = b.link_sequence_number == 0;
        const Bytes& requester = proposal ? b.public_key : b.link_public_key;
        const Bytes& responder = proposal ? b.link_public_key : b.public_key;
        const std::uint64_t tx_seq = proposal ? b.sequence_number : b.link_sequence_number;

        Counted c;
        c.requester = node_for(requester, deltas);
        c.responder = node_for(responder, deltas);
        if (!m_seen.emplace(requester, tx_seq).second)
        {
            m_report.count_skip(SkipReason::DuplicateHalfBlock);
            return std::nullopt;
        }
        ++m_report.blocks_counted;
        c.surplus = static_cast<double>(b.tx_up) - static_cast<double>(b.tx_down);
        return c;
    }

    std::vector<GraphDelta> LedgerFlattener::ingest(std::span<const BlockRecord> records)
    {
        std::vector<GraphDelta> deltas;
        for (const BlockRecord& b : records)
        {
            auto counted = admit(b, deltas);
            if (!counted || counted->surplus == 0.0)
            {
                continue;
            }
            deltas.push_back(m_graph.upsert_net_flow(counted->requester, counted->responder, counted->surplus));
            tally(deltas.back());
        }
        return deltas;
    }

    std::vector<GraphDelta> LedgerFlattener::ingest_batch(std::span<const BlockRecord> records)
    {
        std::vector<GraphDelta> deltas;

        // New keys first, in label order, so handles do not depend on record order.
        std::set<std::string> fresh;
        for (const BlockRecord& b : records)
        {
            for (const Bytes* key : {&b.public_key, &b.link_public_key})
            {
                std::string label = to_hex(*key);
                if (!m_graph.find(label))
                {
                    fresh.insert(std::move(label));
                }
            }
        }
        for (const std::string& label : fresh)
        {
            const NodeId id = m_graph.add_node(label);
            deltas.push_back({DeltaKind::NodeAdded, id, NodeId{}, 0.0, 0.0});
            ++m_report.nodes_created;
        }

        // Net surplus of the lexicographically smaller label, per pair.
        std::map<std::pair<std::string, std::string>, __int128> net;
        std::vector<GraphDelta> scratch;
        for (const BlockRecord& b : records)
        {
            auto counted = admit(b, scratch);
            if (!counted)
            {
                continue;
            }
            const std::string a = m_graph.display_label(counted->requester);
            const std::string r = m_graph.display_label(counted->responder);
            const __int128 s = static_cast<__int128>(b.tx_up) - static_cast<__int128>(b.tx_down);
            if (a < r)
            {
                net[{a, r}] += s;
            }
            else
            {
                net[{r, a}] -= s;
            }
        }
        for (const auto& [pair, amount] : net)
        {
            if (amount == 0)
            {
                continue;
            }
            const NodeId lo = *m_graph.find(pair.first);
            const NodeId hi = *m_graph.find(pair.second);
            deltas.push_back(m_graph.upsert_net_flow(lo, hi, static_cast<double>(amount)));
            tally(deltas.back());
        }
        return deltas;
    }

    void LedgerFlattener::note_skips(std::span<const SkipEvent> skipped)
    {
        for (const SkipEvent& e : skipped)
        {
            ++m_report.blocks_read;
            m_report.count_skip(e.reason);
        }
    }

    FlattenResult flatten(std::span<const BlockRecord> records)
    {
        FlattenResult result;
        LedgerFlattener flattener(result.graph);
        flattener.ingest(records);
        result.report = flattener.report();
        return result;
    }

    FlattenResult flatten(const BlockStream& stream)
    {
        FlattenResult result;
        LedgerFlattener flattener(result.graph);
        flattener.note_skips(stream.skipped);
        flattener.ingest(stream.records);
        result.report = flattener.report();
        return result;
    }

    HoldbackSplit holdback_split(
        std::span<const BlockRecord> records,
        std::size_t n_nodes,
        std::size_t n_edges,
        std::optional<std::uint64_t> rng_seed
    )
    {
        using Pair = std::pair<Bytes, Bytes>;
        auto pair_of = [](const BlockRecord& b)
        { return b.public_key < b.link_public_key ? Pair{b.public_key, b.link_public_key} : Pair{b.link_public_key, b.public_key}; };

        std::vector<Bytes> keys;
        std::set<Bytes> key_seen;
        std::vector<Pair> pairs;
        std::set<Pair> pair_seen;
        for (const BlockRecord& b : records)
        {
            for (const Bytes* k : {&b.public_key, &b.link_public_key})
            {
                if (key_seen.insert(*k).second)
                {
                    keys.push_back(*k);
                }
            }
            if (b.public_key != b.link_public_key)
            {
                Pair p = pair_of(b);
                if (pair_seen.insert(p).second)
                {
                    pairs.push_back(std::move(p));
                }
            }
        }
        if (n_nodes > keys.size())
        {
            throw ConfigError(
                "holdback of " + std::to_string(n_nodes) + " nodes exceeds the " + std::to_string(keys.size())
                + " keys in the ledger"
            );
        }

        std::optional<StreamRng> rng;
        if (rng_seed)
        {
            rng.emplace(*rng_seed, 0x686f6c64);
        }
        auto choose_tail = [&](auto& items, std::size_t n)
        {
            if (rng)
            {
                shuffle(std::span(items), *rng);
            }
            return std::vector(items.end() - static_cast<std::ptrdiff_t>(n), items.end());
        };

        HoldbackSplit split;
        split.held_nodes = choose_tail(keys, n_nodes);
        const std::set<Bytes> held_nodes(split.held_nodes.begin(), split.held_nodes.end());

        std::vector<Pair> candidates;
        for (const Pair& p : pairs)
        {
            if (!held_nodes.contains(p.first) && !held_nodes.contains(p.second))
            {
                candidates.push_back(p);
            }
        }
        if (n_edges > candidates.size())
        {
            throw ConfigError(
                "holdback of " + std::to_string(n_edges) + " edges exceeds the " + std::to_string(candidates.size())
                + " eligible node pairs"
            );
        }
        split.held_pairs = choose_tail(candidates, n_edges);
        const std::set<Pair> held_pairs(split.held_pairs.begin(), split.held_pairs.end());

        for (const BlockRecord& b : records)
        {
            const bool held = held_nodes.contains(b.public_key) || held_nodes.contains(b.link_public_key)
                              || held_pairs.contains(pair_of(b));
            (held ? split.delta : split.initial).push_back(b);
        }
        return split;
    }
}
