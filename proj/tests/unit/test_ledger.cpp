#include "walkrank/errors.hpp"
#include "walkrank/generators.hpp"
#include "walkrank/ledger.hpp"
#include "walkrank/rng.hpp"

#include <doctest.h>
#include <sqlite3.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace walkrank;

namespace
{
    Bytes key(std::uint8_t tag) { return Bytes(4, tag); }

    std::uint64_t g_hash = 0;

    BlockRecord block(std::uint8_t from, std::uint8_t to, std::uint64_t up, std::uint64_t down, std::uint64_t seq,
                      std::uint64_t link_seq = 0)
    {
        BlockRecord b;
        b.block_type = "tribler_bandwidth";
        b.tx_up = up;
        b.tx_down = down;
        b.public_key = key(from);
        b.link_public_key = key(to);
        b.sequence_number = seq;
        b.link_sequence_number = link_seq;
        b.block_timestamp = static_cast<std::int64_t>(++g_hash);
        b.block_hash = Bytes{static_cast<std::uint8_t>(g_hash), 1};
        return b;
    }

    // label -> (label -> weight)
    std::map<std::string, std::map<std::string, double>> adjacency(const InteractionGraph& g)
    {
        std::map<std::string, std::map<std::string, double>> out;
        for (NodeId u : g.nodes())
        {
            auto& row = out[g.display_label(u)];
            for (const Edge& e : g.out_edges(u))
            {
                row[g.display_label(e.node)] = e.weight;
            }
        }
        return out;
    }

    void sql(const std::filesystem::path& path, const char* statement)
    {
        sqlite3* db = nullptr;
        REQUIRE(sqlite3_open(path.string().c_str(), &db) == SQLITE_OK);
        const int rc = sqlite3_exec(db, statement, nullptr, nullptr, nullptr);
        sqlite3_close(db);
        REQUIRE(rc == SQLITE_OK);
    }

    std::filesystem::path temp_path(const std::string& name)
    {
        return std::filesystem::temp_directory_path() / ("walkrank_test_" + name);
    }
}

TEST_CASE("hex helpers round-trip")
{
    const Bytes b{0x00, 0xab, 0xff};
    CHECK(to_hex(b) == "00abff");
    CHECK(from_hex("00ABff") == b);
    CHECK_FALSE(from_hex("abc").has_value());
    CHECK_FALSE(from_hex("zz").has_value());
}

TEST_CASE("opposite transfers net into one edge toward the net uploader")
{
    const std::vector<BlockRecord> blocks{block(0xA, 0xB, 10, 0, 1), block(0xB, 0xA, 4, 0, 1)};
    const FlattenResult r = flatten(blocks);
    const NodeId a = r.graph.require(to_hex(key(0xA)));
    const NodeId b = r.graph.require(to_hex(key(0xB)));
    CHECK(r.graph.edge_count() == 1);
    CHECK(r.graph.edge_weight(b, a) == 6.0);
    CHECK(r.report.blocks_counted == 2);
    CHECK(r.report.nodes_created == 2);
}

TEST_CASE("self-pairs are skipped but counted")
{
    const std::vector<BlockRecord> blocks{block(1, 1, 5, 0, 1)};
    const FlattenResult r = flatten(blocks);
    CHECK(r.report.skipped_self_pair == 1);
    CHECK(r.report.blocks_read == 1);
    CHECK(r.report.blocks_skipped == 1);
    CHECK(r.graph.edge_count() == 0);
}

TEST_CASE("the agreement half of a transaction is a duplicate")
{
    const BlockRecord proposal = block(1, 2, 100, 20, 7);
    BlockRecord agreement = block(2, 1, 100, 20, 3, /*link_seq=*/7);
    const std::vector<BlockRecord> blocks{proposal, agreement};
    const FlattenResult r = flatten(blocks);
    CHECK(r.report.skipped_duplicate == 1);
    CHECK(r.report.blocks_counted == 1);
    CHECK(r.graph.edge_weight(r.graph.require(to_hex(key(2))), r.graph.require(to_hex(key(1)))) == 80.0);
    CHECK(r.report.blocks_read == r.report.blocks_counted + r.report.blocks_skipped);
}

TEST_CASE("running totals never feed edge weights")
{
    BlockRecord b1 = block(1, 2, 10, 0, 1);
    BlockRecord b2 = block(1, 2, 10, 0, 2);
    b1.tx_total_up = 999;
    b2.tx_total_up = 123456;
    b2.tx_total_down = 77;
    const std::vector<BlockRecord> blocks{b1, b2};
    const FlattenResult r = flatten(blocks);
    CHECK(r.graph.edge_weight(r.graph.require(to_hex(key(2))), r.graph.require(to_hex(key(1)))) == 20.0);
}

TEST_CASE("flatten does not depend on block order")
{
    const auto ledger = synthetic_ledger({20, 3000, 4, 0.2, 11});
    const auto reference = adjacency(flatten(ledger).graph);
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        auto shuffled = ledger;
        StreamRng rng(seed, 1);
        shuffle(std::span(shuffled), rng);
        CHECK(adjacency(flatten(shuffled).graph) == reference);

        InteractionGraph g;
        LedgerFlattener f(g);
        f.ingest_batch(shuffled);
        CHECK(adjacency(g) == reference);
    }
}

TEST_CASE("ingest_batch emits the same deltas for any record order")
{
    const auto ledger = synthetic_ledger({12, 600, 3, 0.2, 4});
    const auto split = holdback_split(ledger, 2, 5);
    std::vector<GraphDelta> first;
    for (std::uint64_t seed = 0; seed < 4; ++seed)
    {
        InteractionGraph g = flatten(split.initial).graph;
        LedgerFlattener f(g);
        auto delta = split.delta;
        StreamRng rng(seed, 2);
        shuffle(std::span(delta), rng);
        // Dedup state from the initial phase is irrelevant here: held-back blocks never appear there.
        const auto d = f.ingest_batch(delta);
        if (seed == 0)
        {
            first = d;
        }
        CHECK(d == first);
    }
}

TEST_CASE("holdback partitions the stream and reassembles to the same graph")
{
    const auto ledger = synthetic_ledger({40, 4000, 4, 0.1, 8});
    SUBCASE("nothing held back")
    {
        const auto s = holdback_split(ledger, 0, 0);
        CHECK(s.delta.empty());
        CHECK(s.initial.size() == ledger.size());
    }
    SUBCASE("nodes and pairs held back")
    {
        for (std::optional<std::uint64_t> seed : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{9}})
        {
            const auto s = holdback_split(ledger, 5, 20, seed);
            CHECK(s.held_nodes.size() == 5);
            CHECK(s.held_pairs.size() == 20);
            CHECK(s.initial.size() + s.delta.size() == ledger.size());
            for (const BlockRecord& b : s.initial)
            {
                for (const Bytes& k : s.held_nodes)
                {
                    CHECK(b.public_key != k);
                    CHECK(b.link_public_key != k);
                }
            }
            const FlattenResult base = flatten(s.initial);
            InteractionGraph g = base.graph;
            LedgerFlattener f(g);
            f.ingest_batch(s.delta);
            CHECK(adjacency(g) == adjacency(flatten(ledger).graph));
        }
    }
    SUBCASE("too many")
    {
        CHECK_THROWS_AS(holdback_split(ledger, 41, 0), ConfigError);
        CHECK_THROWS_AS(holdback_split(ledger, 0, 100000), ConfigError);
    }
}

TEST_CASE("CSV ledger reading")
{
    SUBCASE("empty file gives an empty stream")
    {
        std::stringstream in("");
        const BlockStream s = read_blocks_csv(in);
        CHECK(s.records.empty());
        CHECK(s.skipped.empty());
        const FlattenResult r = flatten(s);
        CHECK(r.report.blocks_read == 0);
        CHECK(r.graph.node_count() == 0);
    }
    SUBCASE("missing columns are listed")
    {
        std::stringstream in("type,up,total_up,total_down,public_key\n");
        CHECK_THROWS_WITH_AS(read_blocks_csv(in), doctest::Contains("down"), FormatError);
    }
    SUBCASE("round trip with a malformed tx row")
    {
        const std::vector<BlockRecord> blocks{block(1, 2, 10, 3, 1), block(2, 3, 0, 8, 1)};
        std::stringstream out;
        write_blocks_csv(out, blocks);
        std::string text = out.str();
        text += "tribler_bandwidth,,5,0,0,01010101,9,02020202,0,,,999,999,ff\n";
        std::stringstream in(text);
        const BlockStream s = read_blocks_csv(in);
        CHECK(s.records == blocks);
        REQUIRE(s.skipped.size() == 1);
        CHECK(s.skipped[0].reason == SkipReason::MalformedTx);
        const FlattenResult r = flatten(s);
        CHECK(r.report.skipped_malformed_tx == 1);
        CHECK(r.report.blocks_read == 3);
    }
}

TEST_CASE("SQLite ledger reading")
{
    const auto path = temp_path("ledger.db");
    SUBCASE("round trip sorts by timestamp then hash")
    {
        auto blocks = synthetic_ledger({10, 200, 3, 0.3, 2});
        std::reverse(blocks.begin(), blocks.end());
        write_blocks_sqlite(path, blocks);
        const BlockStream s = read_blocks(path, LedgerFormat::Sqlite);
        CHECK(s.skipped.empty());
        sort_blocks(blocks);
        CHECK(s.records == blocks);
    }
    SUBCASE("empty table")
    {
        write_blocks_sqlite(path, {});
        const BlockStream s = read_blocks(path, parse_ledger_format("sqlite-file"));
        CHECK(s.records.empty());
    }
    SUBCASE("tx without up is a malformed-tx skip")
    {
        write_blocks_sqlite(path, std::vector<BlockRecord>{block(1, 2, 1, 0, 1), block(1, 2, 1, 0, 2)});
        sql(path, "UPDATE blocks SET tx='{\"down\": 4}' WHERE sequence_number = 1");
        const BlockStream s = read_blocks(path, LedgerFormat::Sqlite);
        CHECK(s.records.size() == 1);
        REQUIRE(s.skipped.size() == 1);
        CHECK(s.skipped[0].reason == SkipReason::MalformedTx);
        CHECK(flatten(s).report.skipped_malformed_tx == 1);
    }
    SUBCASE("missing column is named")
    {
        sql(path, "DROP TABLE IF EXISTS blocks; CREATE TABLE blocks (type TEXT, tx TEXT, public_key BLOB)");
        CHECK_THROWS_WITH_AS(read_blocks(path, LedgerFormat::Sqlite), doctest::Contains("link_public_key"), FormatError);
    }
    SUBCASE("missing file and wrong schema are fatal")
    {
        CHECK_THROWS_AS(read_blocks(temp_path("does_not_exist.db"), LedgerFormat::Sqlite), FormatError);
        const auto junk = temp_path("junk.db");
        {
            std::ofstream(junk) << "not a database";
        }
        CHECK_THROWS_AS(read_blocks(junk, LedgerFormat::Sqlite), FormatError);
    }
    std::filesystem::remove(path);
}

TEST_CASE("synthetic ledger has the requested shape")
{
    const auto ledger = synthetic_ledger({300, 20000, 6, 0.1, 1});
    CHECK(ledger.size() == 20000);
    const FlattenResult r = flatten(ledger);
    CHECK(r.graph.node_count() == 300);
    CHECK(r.report.skipped_duplicate > 0);
    CHECK(std::is_sorted(ledger.begin(), ledger.end(), [](const BlockRecord& a, const BlockRecord& b) {
        return a.block_timestamp < b.block_timestamp;
    }));
}
