#pragma once

#include "pubflow/common/codec.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

namespace pubflow::service {

struct StagingRef {
    std::string name;
    std::string url;
    std::uint64_t size = 0;
    std::string mime_type;
    std::string uploaded_by;
    Timestamp expires_at{};
};

nlohmann::json to_json(const StagingRef& ref);

// Upload directory whose files are served under <base_url>/staging/<name>
// until consumed or expired. Names are 128-bit random prefixes plus a
// sanitized copy of the client's file name.
class StagingArea {
public:
    StagingArea(std::filesystem::path dir, std::chrono::seconds ttl, std::uint64_t limit);

    // Errors: PAYLOAD_TOO_LARGE, IO_ERROR.
    StagingRef put(const std::string& filename, std::string_view content, const std::string& uploaded_by,
                   const std::string& base_url);

    // Path of a live file; nullopt for unknown, consumed or expired names.
    std::optional<std::filesystem::path> path_of(const std::string& name);
    // Maps <base_url>/staging/<name> back to <name>.
    std::optional<std::string> name_from_url(const std::string& url, const std::string& base_url) const;

    void consume(const std::string& name);
    // Removes expired files; returns how many.
    std::size_t sweep(std::chrono::system_clock::time_point now = std::chrono::system_clock::now());

    const std::filesystem::path& directory() const { return dir_; }
    std::uint64_t limit() const { return limit_; }

private:
    bool expired(const std::filesystem::path& p, std::chrono::system_clock::time_point now) const;

    std::filesystem::path dir_;
    std::chrono::seconds ttl_;
    std::uint64_t limit_;
    std::mutex mu_;
};

bool valid_staging_name(std::string_view name);

} // namespace pubflow::service
