#pragma once

#include "pubflow/common/journal.hpp"
#include "pubflow/repository/fetch.hpp"
#include "pubflow/repository/blob_store.hpp"
#include "pubflow/repository/types.hpp"

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace pubflow::repository {

class Repository {
public:
    struct Options {
        std::filesystem::path data_dir;
        std::string pid_namespace = "escipub";
        Journal::Options journal;
        std::shared_ptr<Fetcher> fetcher;  // DefaultFetcher when unset
    };

    // Opens (or creates) data_dir/repository and data_dir/blobs and replays
    // the journal.
    explicit Repository(Options options);

    Repository(const Repository&) = delete;
    Repository& operator=(const Repository&) = delete;

    // Errors: UNSUPPORTED_FORMAT, XML_SYNTAX, SCHEMA_VIOLATION.
    Pid ingest(std::string_view object_xml, std::string_view format, const std::string& log_message);

    // Errors: UNKNOWN_PID, UNKNOWN_DATASTREAM, UNRESOLVABLE_LOCATION,
    // STATE_CONFLICT, SCHEMA_VIOLATION (DC content that does not parse or
    // lacks the pid among its identifiers).
    std::uint64_t modify_datastream(const std::string& pid, const std::string& ds_id, const DatastreamSource& source,
                                    const DatastreamProps& props, std::optional<DatastreamState> ds_state,
                                    const std::string& log_message, bool force);

    // Errors: UNKNOWN_PID, DATASTREAM_EXISTS, UNRESOLVABLE_LOCATION, BAD_REQUEST.
    std::uint64_t add_datastream(const std::string& pid, const std::string& ds_id, const DatastreamSource& source,
                                 const DatastreamProps& props, const std::string& log_message);

    bool ds_exists(const std::string& pid, const std::string& ds_id) const;

    // Errors: UNKNOWN_PID, UNKNOWN_DATASTREAM, UNKNOWN_VERSION.
    DatastreamContent get_datastream(const std::string& pid, const std::string& ds_id,
                                     std::optional<std::uint64_t> version_no = std::nullopt) const;

    DigitalObject get_object(const std::string& pid) const;  // UNKNOWN_PID

    // Errors: UNKNOWN_FIELD, UNSUPPORTED_OPERATOR, BAD_REQUEST (no conditions,
    // max_results < 1).
    FieldSearchResult find_objects(const std::vector<SearchCondition>& conditions, std::size_t max_results) const;

    Pid generate_pid();

    // Transport-reported type for URLs that resolve, else the extension table.
    std::string detect_mime(const std::string& location_or_filename) const;

    const std::string& pid_namespace() const { return options_.pid_namespace; }

    // Canonical JSON of all metadata; equal before a crash and after replay.
    nlohmann::json dump_state() const;

private:
    struct Slot {
        std::mutex op;
        DigitalObject committed;
        ObjectFields fields;  // search view of the latest DC
    };

    std::shared_ptr<Slot> slot(const std::string& pid) const;
    Bytes resolve(const DatastreamSource& source, std::optional<std::string>& reported_type) const;
    void check_dc(const DigitalObject& o, std::span<const std::uint8_t> content) const;
    void commit(const DigitalObject& updated);
    void apply(DigitalObject o);
    void note_serial(const Pid& pid);
    void replay();
    nlohmann::json state_locked() const;
    Pid mint_locked();

    Options options_;
    Journal journal_;
    BlobStore blobs_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Slot>> objects_;  // keyed by rendered pid
    std::map<std::string, std::uint64_t> last_serial_;      // per namespace
};

} // namespace pubflow::repository
