#include "pubflow/service/staging.hpp"

#include "pubflow/common/error.hpp"
#include "pubflow/repository/mime.hpp"

#include <sys/stat.h>

#include <fstream>

namespace pubflow::service {

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& filename) {
    auto base = filename.substr(filename.find_last_of("/\\") == std::string::npos ? 0 : filename.find_last_of("/\\") + 1);
    std::string out;
    for (char c : base) {
        bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                    c == '_';
        out += keep ? c : '_';
    }
    while (!out.empty() && out.front() == '.') out.erase(out.begin());
    if (out.size() > 80) out = out.substr(out.size() - 80);
    return out.empty() ? "upload" : out;
}

} // namespace

bool valid_staging_name(std::string_view name) {
    if (name.size() < 34 || name[32] != '-') return false;
    if (name.substr(0, 32).find_first_not_of("0123456789abcdef") != std::string_view::npos) return false;
    for (char c : name.substr(33)) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                  c == '_';
        if (!ok) return false;
    }
    return name[33] != '.';
}

nlohmann::json to_json(const StagingRef& ref) {
    return {{"name", ref.name},
            {"url", ref.url},
            {"size", ref.size},
            {"mimeType", ref.mime_type},
            {"uploadedBy", ref.uploaded_by},
            {"expiresAt", format_iso8601(ref.expires_at)}};
}

StagingArea::StagingArea(fs::path dir, std::chrono::seconds ttl, std::uint64_t limit)
    : dir_(std::move(dir)), ttl_(ttl), limit_(limit) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IO_ERROR, "cannot create staging directory " + dir_.string() + ": " + ec.message());
}

StagingRef StagingArea::put(const std::string& filename, std::string_view content, const std::string& uploaded_by,
                            const std::string& base_url) {
    if (content.size() > limit_) {
        throw Error(Errc::PAYLOAD_TOO_LARGE,
                    "upload of " + std::to_string(content.size()) + " bytes exceeds the limit of " + std::to_string(limit_),
                    {{"limit", limit_}});
    }
    sweep();
    StagingRef ref;
    ref.name = random_hex(16) + "-" + sanitize(filename);
    auto tmp = dir_ / ("." + ref.name + ".part");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(Errc::IO_ERROR, "cannot write staging file");
    }
    fs::rename(tmp, dir_ / ref.name);
    ref.url = base_url + "/staging/" + ref.name;
    ref.size = content.size();
    ref.mime_type = repository::mime_for_name(filename);
    ref.uploaded_by = uploaded_by;
    ref.expires_at = std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now() + ttl_);
    return ref;
}

bool StagingArea::expired(const fs::path& p, std::chrono::system_clock::time_point now) const {
    struct stat st {};
    if (::stat(p.c_str(), &st) != 0) return true;
    auto written = std::chrono::system_clock::from_time_t(st.st_mtime);
    return written + ttl_ <= now;
}

std::optional<fs::path> StagingArea::path_of(const std::string& name) {
    if (!valid_staging_name(name)) return std::nullopt;
    auto p = dir_ / name;
    std::lock_guard lock(mu_);
    if (!fs::is_regular_file(p)) return std::nullopt;
    if (expired(p, std::chrono::system_clock::now())) {
        std::error_code ec;
        fs::remove(p, ec);
        return std::nullopt;
    }
    return p;
}

std::optional<std::string> StagingArea::name_from_url(const std::string& url, const std::string& base_url) const {
    auto prefix = base_url + "/staging/";
    if (url.rfind(prefix, 0) != 0) return std::nullopt;
    auto name = url.substr(prefix.size());
    if (!valid_staging_name(name)) return std::nullopt;
    return name;
}

void StagingArea::consume(const std::string& name) {
    if (!valid_staging_name(name)) return;
    std::lock_guard lock(mu_);
    std::error_code ec;
    fs::remove(dir_ / name, ec);
}

std::size_t StagingArea::sweep(std::chrono::system_clock::time_point now) {
    std::lock_guard lock(mu_);
    std::size_t removed = 0;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir_, ec)) {
        auto name = entry.path().filename().string();
        if (!valid_staging_name(name) && !name.ends_with(".part")) continue;
        if (expired(entry.path(), now)) {
            fs::remove(entry.path(), ec);
            ++removed;
        }
    }
    return removed;
}

} // namespace pubflow::service
