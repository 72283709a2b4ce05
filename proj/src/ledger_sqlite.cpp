// SQLite side of the ledger reader/writer. The `tx` column holds a JSON
// object with keys total_up, total_down, up, down.

#include "walkrank/errors.hpp"
#include "walkrank/ledger.hpp"

#include <json.hpp>
#include <sqlite3.h>

#include <memory>
#include <set>

namespace walkrank
{
    namespace
    {
        struct DbCloser
        {
            void operator()(sqlite3* db) const { sqlite3_close(db); }
        };
        struct StmtFinalizer
        {
            void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
        };
        using Db = std::unique_ptr<sqlite3, DbCloser>;
        using Stmt = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

        Db open(const std::filesystem::path& path, int flags)
        {
            sqlite3* raw = nullptr;
            const int rc = sqlite3_open_v2(path.string().c_str(), &raw, flags, nullptr);
            Db db(raw);
            if (rc != SQLITE_OK)
            {
                throw FormatError(
                    "cannot open SQLite file " + path.string() + ": " + (raw ? sqlite3_errmsg(raw) : "out of memory")
                );
            }
            return db;
        }

        Stmt prepare(sqlite3* db, const std::string& sql)
        {
            sqlite3_stmt* raw = nullptr;
            if (sqlite3_prepare_v2(db, sql.c_str(), -1, &raw, nullptr) != SQLITE_OK)
            {
                throw FormatError(std::string("SQLite: ") + sqlite3_errmsg(db));
            }
            return Stmt(raw);
        }

        void exec(sqlite3* db, const char* sql)
        {
            char* err = nullptr;
            if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK)
            {
                std::string msg = err ? err : "unknown error";
                sqlite3_free(err);
                throw FormatError("SQLite: " + msg);
            }
        }

        Bytes column_bytes(sqlite3_stmt* s, int i)
        {
            const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(s, i));
            const int n = sqlite3_column_bytes(s, i);
            return p ? Bytes(p, p + n) : Bytes{};
        }

        std::optional<std::uint64_t> json_count(const nlohmann::json& tx, const char* key)
        {
            auto it = tx.find(key);
            if (it == tx.end() || !it->is_number_integer())
            {
                return std::nullopt;
            }
            if (it->is_number_unsigned())
            {
                return it->get<std::uint64_t>();
            }
            const auto v = it->get<std::int64_t>();
            if (v < 0)
            {
                return std::nullopt;
            }
            return static_cast<std::uint64_t>(v);
        }
    }

    BlockStream read_sqlite_blocks(const std::filesystem::path& path)
    {
        Db db = open(path, SQLITE_OPEN_READONLY);

        std::set<std::string> present;
        {
            // Also fails here when the file is not a database at all.
            Stmt info = prepare(db.get(), "PRAGMA table_info(blocks)");
            while (sqlite3_step(info.get()) == SQLITE_ROW)
            {
                present.insert(reinterpret_cast<const char*>(sqlite3_column_text(info.get(), 1)));
            }
        }
        std::string missing;
        for (const auto& col : sqlite_block_columns())
        {
            if (!present.contains(col))
            {
                missing += " " + col;
            }
        }
        if (!missing.empty())
        {
            throw FormatError("ledger table `blocks`: missing column(s):" + missing);
        }

        Stmt q = prepare(
            db.get(),
            "SELECT type, tx, public_key, sequence_number, link_public_key, link_sequence_number, "
            "previous_hash, signature, block_timestamp, insert_time, block_hash FROM blocks"
        );

        BlockStream stream;
        std::size_t row = 0;
        int rc = 0;
        while ((rc = sqlite3_step(q.get())) == SQLITE_ROW)
        {
            ++row;
            sqlite3_stmt* s = q.get();
            BlockRecord b;
            if (const auto* t = sqlite3_column_text(s, 0))
            {
                b.block_type = reinterpret_cast<const char*>(t);
            }

            const auto* tx_text = sqlite3_column_text(s, 1);
            const auto tx = nlohmann::json::parse(
                tx_text ? reinterpret_cast<const char*>(tx_text) : "",
                nullptr,
                /*allow_exceptions=*/false
            );
            if (tx.is_discarded() || !tx.is_object())
            {
                stream.skipped.push_back({row, SkipReason::MalformedTx, "tx is not a JSON object"});
                continue;
            }
            const auto up = json_count(tx, "up");
            const auto down = json_count(tx, "down");
            if (!up || !down)
            {
                stream.skipped.push_back({row, SkipReason::MalformedTx, "tx lacks non-negative up/down"});
                continue;
            }
            b.tx_up = *up;
            b.tx_down = *down;
            b.tx_total_up = json_count(tx, "total_up").value_or(0);
            b.tx_total_down = json_count(tx, "total_down").value_or(0);

            b.public_key = column_bytes(s, 2);
            b.sequence_number = static_cast<std::uint64_t>(sqlite3_column_int64(s, 3));
            b.link_public_key = column_bytes(s, 4);
            b.link_sequence_number = static_cast<std::uint64_t>(sqlite3_column_int64(s, 5));
            b.previous_hash = column_bytes(s, 6);
            b.signature = column_bytes(s, 7);
            b.block_timestamp = sqlite3_column_int64(s, 8);
            b.insert_time = sqlite3_column_int64(s, 9);
            b.block_hash = column_bytes(s, 10);
            if (b.public_key.empty() || b.link_public_key.empty())
            {
                stream.skipped.push_back({row, SkipReason::MalformedRow, "empty public key"});
                continue;
            }
            stream.records.push_back(std::move(b));
        }
        if (rc != SQLITE_DONE)
        {
            throw FormatError(std::string("SQLite: ") + sqlite3_errmsg(db.get()));
        }
        sort_blocks(stream.records);
        return stream;
    }

    void write_blocks_sqlite(const std::filesystem::path& path, std::span<const BlockRecord> records)
    {
        Db db = open(path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
        exec(db.get(), "DROP TABLE IF EXISTS blocks");
        exec(
            db.get(),
            "CREATE TABLE blocks (type TEXT NOT NULL, tx TEXT NOT NULL, public_key BLOB NOT NULL, "
            "sequence_number INTEGER NOT NULL, link_public_key BLOB NOT NULL, link_sequence_number INTEGER NOT NULL, "
            "previous_hash BLOB NOT NULL, signature BLOB NOT NULL, block_timestamp INTEGER NOT NULL, "
            "insert_time INTEGER NOT NULL, block_hash BLOB NOT NULL)"
        );
        exec(db.get(), "BEGIN");
        Stmt ins = prepare(db.get(), "INSERT INTO blocks VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)");
        auto bind_blob = [&](int i, const Bytes& v)
        {
            if (v.empty())
            {
                // a null data pointer would bind SQL NULL
                sqlite3_bind_zeroblob(ins.get(), i, 0);
                return;
            }
            sqlite3_bind_blob(ins.get(), i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
        };
        for (const BlockRecord& b : records)
        {
            const std::string tx = nlohmann::json{
                {"total_up", b.tx_total_up},
                {"total_down", b.tx_total_down},
                {"up", b.tx_up},
                {"down", b.tx_down},
            }
                                       .dump();
            sqlite3_bind_text(ins.get(), 1, b.block_type.c_str(), -1, SQLITE_TRANSIENT);
            sqlite3_bind_text(ins.get(), 2, tx.c_str(), -1, SQLITE_TRANSIENT);
            bind_blob(3, b.public_key);
            sqlite3_bind_int64(ins.get(), 4, static_cast<sqlite3_int64>(b.sequence_number));
            bind_blob(5, b.link_public_key);
            sqlite3_bind_int64(ins.get(), 6, static_cast<sqlite3_int64>(b.link_sequence_number));
            bind_blob(7, b.previous_hash);
            bind_blob(8, b.signature);
            sqlite3_bind_int64(ins.get(), 9, b.block_timestamp);
            sqlite3_bind_int64(ins.get(), 10, b.insert_time);
            bind_blob(11, b.block_hash);
            if (sqlite3_step(ins.get()) != SQLITE_DONE)
            {
                throw FormatError(std::string("SQLite insert: ") + sqlite3_errmsg(db.get()));
            }
            sqlite3_reset(ins.get());
        }
        exec(db.get(), "COMMIT");
    }
}
