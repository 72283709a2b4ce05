#pragma once

#include "walkrank/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace walkrank
{
    using Bytes = std::vector<std::uint8_t>;

    std::string to_hex(const Bytes& bytes);
    std::optional<Bytes> from_hex(std::string_view hex);

    /// One TrustChain half-block. `up`/`down` are from the requester's perspective.
    struct BlockRecord
    {
        std::string block_type;
        std::uint64_t tx_total_up = 0;
        std::uint64_t tx_total_down = 0;
        std::uint64_t tx_up = 0;
        std::uint64_t tx_down = 0;
        Bytes public_key;
        std::uint64_t sequence_number = 0;
        Bytes link_public_key;
        std::uint64_t link_sequence_number = 0;
        Bytes previous_hash;
        Bytes signature;
        std::int64_t block_timestamp = 0;
        std::int64_t insert_time = 0;
        Bytes block_hash;

        friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
    };

    enum class SkipReason
    {
        SelfPair,
        MalformedTx,
        DuplicateHalfBlock,
        MalformedRow,
    };

    std::string_view to_string(SkipReason reason);

    struct SkipEvent
    {
        std::size_t row = 0;  // 1-based row number in the source
        SkipReason reason = SkipReason::MalformedRow;
        std::string detail;
    };

    /// Parsed blocks in (block_timestamp, block_hash) order plus the rows that could not be parsed.
    struct BlockStream
    {
        std::vector<BlockRecord> records;
        std::vector<SkipEvent> skipped;
    };

    enum class LedgerFormat
    {
        Sqlite,
        Csv,
    };

    LedgerFormat parse_ledger_format(std::string_view tag);

    /// Columns of the `blocks` table.
    const std::vector<std::string>& sqlite_block_columns();
    /// Header of the CSV export (byte strings hex-encoded).
    const std::vector<std::string>& csv_block_columns();

    /**
     * Reads a ledger. Unreadable files and missing columns throw FormatError
     * (the message lists the missing columns). Rows with a bad tx payload or
     * bad field encodings become skip events.
     */
    BlockStream read_blocks(const std::filesystem::path& source, LedgerFormat format);
    BlockStream read_blocks_csv(std::istream& in);

    void write_blocks_csv(std::ostream& out, std::span<const BlockRecord> records);
    /// Creates (or replaces) the `blocks` table in a SQLite file. tx is stored as JSON text.
    void write_blocks_sqlite(const std::filesystem::path& path, std::span<const BlockRecord> records);

    /// Orders records by (block_timestamp, block_hash).
    void sort_blocks(std::vector<BlockRecord>& records);

    struct IngestReport
    {
        std::size_t blocks_read = 0;
        std::size_t blocks_counted = 0;
        std::size_t blocks_skipped = 0;
        std::size_t skipped_self_pair = 0;
        std::size_t skipped_malformed_tx = 0;
        std::size_t skipped_duplicate = 0;
        std::size_t skipped_malformed_row = 0;
        std::size_t nodes_created = 0;
        std::size_t edges_created = 0;
        std::size_t edges_removed = 0;
        std::size_t edges_reversed = 0;

        void count_skip(SkipReason reason);
    };

    /**
     * Stateful block -> graph transform.
     *
     * A transaction is identified by its proposal half: (public_key,
     * sequence_number) for a proposal (link_sequence_number == 0), and
     * (link_public_key, link_sequence_number) for the agreement half. The
     * second half seen of any transaction is counted as a duplicate, so the
     * two chains holding one exchange contribute it once. Each counted block
     * moves (up - down) bytes of surplus to the requester.
     */
    class LedgerFlattener
    {
    public:
        explicit LedgerFlattener(InteractionGraph& graph);

        /// One upsert per counted block, in stream order.
        std::vector<GraphDelta> ingest(std::span<const BlockRecord> records);

        /**
         * Nets all counted blocks per node pair first, then applies one
         * upsert per pair with a non-zero net change. New nodes are added in
         * label order and pairs are applied in label order, so the resulting
         * deltas do not depend on the order of `records`.
         */
        std::vector<GraphDelta> ingest_batch(std::span<const BlockRecord> records);

        void note_skips(std::span<const SkipEvent> skipped);

        const IngestReport& report() const noexcept { return m_report; }

    private:
        struct Counted
        {
            NodeId requester;
            NodeId responder;
            double surplus = 0.0;  // requester's upload surplus
        };

        std::optional<Counted> admit(const BlockRecord& b, std::vector<GraphDelta>& deltas);
        NodeId node_for(const Bytes& key, std::vector<GraphDelta>& deltas);
        void tally(const GraphDelta& d);

        InteractionGraph& m_graph;
        IngestReport m_report;
        std::set<std::pair<Bytes, std::uint64_t>> m_seen;
    };

    struct FlattenResult
    {
        InteractionGraph graph;
        IngestReport report;
    };

    FlattenResult flatten(const BlockStream& stream);
    FlattenResult flatten(std::span<const BlockRecord> records);

    struct HoldbackSplit
    {
        std::vector<BlockRecord> initial;
        std::vector<BlockRecord> delta;
        std::vector<Bytes> held_nodes;
        std::vector<std::pair<Bytes, Bytes>> held_pairs;
    };

    /**
     * Moves every block touching `n_nodes` held-back keys or `n_edges`
     * held-back pairs into the delta stream. Without `rng_seed` the most
     * recently first-seen keys and pairs are held back; with a seed they are
     * drawn at random. Relative order is preserved in both outputs.
     */
    HoldbackSplit holdback_split(
        std::span<const BlockRecord> records,
        std::size_t n_nodes,
        std::size_t n_edges,
        std::optional<std::uint64_t> rng_seed = std::nullopt
    );
}
