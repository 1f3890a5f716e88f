#pragma once

#include "pubflow/common/codec.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pubflow {

// Append-only event journal with periodic full-state snapshots.
//
// On disk, inside one directory:
//   journal.log          sequence of records, each a 4-byte big-endian length
//                        followed by that many bytes of UTF-8 JSON
//                        {"seq":N,"ts":"...","kind":"...","payload":{...}}
//   snapshot-<seq>.json  {"seq":N,"state":{...}}: state after applying record N
//
// A record cut short by a crash is dropped (and the file truncated) on
// recovery. Any other damage is reported as CORRUPT_JOURNAL.
class Journal {
public:
    struct Record {
        std::uint64_t seq = 0;
        Timestamp ts{};
        std::string kind;
        nlohmann::json payload;
    };

    struct Recovered {
        std::optional<nlohmann::json> snapshot;
        std::uint64_t snapshot_seq = 0;
        std::vector<Record> records;  // records after snapshot_seq, in order
    };

    struct Options {
        bool fsync = false;
        std::uint64_t snapshot_every = 1000;
    };

    Journal(std::filesystem::path dir, Options options);
    explicit Journal(std::filesystem::path dir) : Journal(std::move(dir), Options{}) {}
    ~Journal();

    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;

    // Reads the newest snapshot and all later records. Call once, before append.
    Recovered recover();

    // Durably appends one record (fsync when configured); returns its seq.
    std::uint64_t append(std::string_view kind, nlohmann::json payload, Timestamp ts = now_ms());

    // Writes snapshot-<seq>.json atomically and prunes older snapshots.
    void write_snapshot(std::uint64_t seq, const nlohmann::json& state);

    std::uint64_t last_seq() const;
    bool snapshot_due() const;

    const std::filesystem::path& directory() const { return dir_; }

    static std::string encode_record(const Record& r);

private:
    std::filesystem::path dir_;
    Options options_;
    int fd_ = -1;
    mutable std::mutex mutex_;
    std::uint64_t last_seq_ = 0;
    std::uint64_t last_snapshot_seq_ = 0;
};

} // namespace pubflow
