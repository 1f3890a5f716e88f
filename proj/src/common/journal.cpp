#include "pubflow/common/journal.hpp"

#include "pubflow/common/error.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pubflow {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kLogName = "journal.log";
constexpr std::string_view kSnapshotPrefix = "snapshot-";
constexpr std::string_view kSnapshotSuffix = ".json";

[[noreturn]] void io_failure(const std::string& what) {
    throw Error(Errc::IO_ERROR, what + ": " + std::strerror(errno));
}

void write_all(int fd, const char* data, std::size_t size) {
    while (size > 0) {
        ssize_t n = ::write(fd, data, size);
        if (n < 0) {
            if (errno == EINTR) continue;
            io_failure("journal write failed");
        }
        data += n;
        size -= static_cast<std::size_t>(n);
    }
}

std::optional<std::uint64_t> snapshot_seq_of(const fs::path& p) {
    auto name = p.filename().string();
    if (!name.starts_with(kSnapshotPrefix) || !name.ends_with(kSnapshotSuffix)) return std::nullopt;
    auto digits = name.substr(kSnapshotPrefix.size(), name.size() - kSnapshotPrefix.size() - kSnapshotSuffix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return std::stoull(digits);
}

} // namespace

Journal::Journal(fs::path dir, Options options) : dir_(std::move(dir)), options_(options) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IO_ERROR, "cannot create journal directory " + dir_.string() + ": " + ec.message());
    fd_ = ::open((dir_ / kLogName).c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) io_failure("cannot open journal " + (dir_ / kLogName).string());
}

Journal::~Journal() {
    if (fd_ >= 0) ::close(fd_);
}

std::string Journal::encode_record(const Record& r) {
    nlohmann::json j = {{"seq", r.seq}, {"ts", format_iso8601(r.ts)}, {"kind", r.kind}, {"payload", r.payload}};
    std::string body = j.dump();
    auto n = static_cast<std::uint32_t>(body.size());
    std::string out;
    out.reserve(4 + body.size());
    out += static_cast<char>((n >> 24) & 0xff);
    out += static_cast<char>((n >> 16) & 0xff);
    out += static_cast<char>((n >> 8) & 0xff);
    out += static_cast<char>(n & 0xff);
    out += body;
    return out;
}

Journal::Recovered Journal::recover() {
    std::lock_guard lock(mutex_);
    Recovered out;

    // Newest readable snapshot wins.
    std::vector<std::pair<std::uint64_t, fs::path>> snapshots;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (auto seq = snapshot_seq_of(entry.path())) snapshots.emplace_back(*seq, entry.path());
    }
    std::sort(snapshots.rbegin(), snapshots.rend());
    for (const auto& [seq, path] : snapshots) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        auto parsed = nlohmann::json::parse(ss.str(), nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("state") || parsed.value("seq", 0ULL) != seq) continue;
        out.snapshot = std::move(parsed["state"]);
        out.snapshot_seq = seq;
        break;
    }

    struct stat st {};
    if (::fstat(fd_, &st) != 0) io_failure("cannot stat journal");
    std::string data(static_cast<std::size_t>(st.st_size), '\0');
    std::size_t got = 0;
    while (got < data.size()) {
        ssize_t n = ::pread(fd_, data.data() + got, data.size() - got, static_cast<off_t>(got));
        if (n < 0) {
            if (errno == EINTR) continue;
            io_failure("cannot read journal");
        }
        if (n == 0) break;
        got += static_cast<std::size_t>(n);
    }
    data.resize(got);

    std::size_t at = 0;
    std::uint64_t expected = 0;
    while (at < data.size()) {
        if (data.size() - at < 4) break;  // torn length prefix
        auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + i])); };
        std::uint32_t len = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
        if (data.size() - at - 4 < len) break;  // torn body
        auto j = nlohmann::json::parse(std::string_view(data).substr(at + 4, len), nullptr, false);
        bool last = at + 4 + len == data.size();
        if (j.is_discarded() || !j.is_object() || !j.contains("seq") || !j.contains("kind")) {
            if (last) break;
            throw Error(Errc::CORRUPT_JOURNAL, "unreadable journal record at offset " + std::to_string(at));
        }
        Record r;
        r.seq = j["seq"].get<std::uint64_t>();
        r.ts = parse_iso8601(j.value("ts", std::string("1970-01-01T00:00:00.000Z")));
        r.kind = j["kind"].get<std::string>();
        r.payload = j.value("payload", nlohmann::json::object());
        if (expected != 0 && r.seq != expected) {
            throw Error(Errc::CORRUPT_JOURNAL, "journal sequence gap at seq " + std::to_string(r.seq));
        }
        expected = r.seq + 1;
        last_seq_ = r.seq;
        if (r.seq > out.snapshot_seq) out.records.push_back(std::move(r));
        at += 4 + len;
    }
    if (at < data.size()) {
        if (::ftruncate(fd_, static_cast<off_t>(at)) != 0) io_failure("cannot truncate torn journal tail");
    }
    if (out.snapshot_seq > last_seq_) last_seq_ = out.snapshot_seq;
    if (!out.records.empty() && out.snapshot && out.records.front().seq != out.snapshot_seq + 1) {
        throw Error(Errc::CORRUPT_JOURNAL, "journal does not continue snapshot " + std::to_string(out.snapshot_seq));
    }
    last_snapshot_seq_ = out.snapshot_seq;
    return out;
}

std::uint64_t Journal::append(std::string_view kind, nlohmann::json payload, Timestamp ts) {
    std::lock_guard lock(mutex_);
    Record r;
    r.seq = last_seq_ + 1;
    r.ts = ts;
    r.kind = std::string(kind);
    r.payload = std::move(payload);
    auto bytes = encode_record(r);
    write_all(fd_, bytes.data(), bytes.size());
    if (options_.fsync && ::fdatasync(fd_) != 0) io_failure("journal fsync failed");
    last_seq_ = r.seq;
    return r.seq;
}

void Journal::write_snapshot(std::uint64_t seq, const nlohmann::json& state) {
    std::lock_guard lock(mutex_);
    auto name = std::string(kSnapshotPrefix) + std::to_string(seq) + std::string(kSnapshotSuffix);
    auto tmp = dir_ / (name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << nlohmann::json{{"seq", seq}, {"state", state}}.dump();
        out.flush();
        if (!out) throw Error(Errc::IO_ERROR, "cannot write snapshot " + tmp.string());
    }
    fs::rename(tmp, dir_ / name);
    last_snapshot_seq_ = seq;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        auto s = snapshot_seq_of(entry.path());
        if (s && *s < seq) {
            std::error_code ec;
            fs::remove(entry.path(), ec);
        }
    }
}

std::uint64_t Journal::last_seq() const {
    std::lock_guard lock(mutex_);
    return last_seq_;
}

bool Journal::snapshot_due() const {
    std::lock_guard lock(mutex_);
    return options_.snapshot_every > 0 && last_seq_ - last_snapshot_seq_ >= options_.snapshot_every;
}

} // namespace pubflow
