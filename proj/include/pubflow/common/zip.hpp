#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

// Reader and writer for the subset of the zip container used by process
// archives: stored (0) and deflated (8) entries, no encryption, no zip64,
// no multi-disk archives.
namespace pubflow::zip {

using Bytes = std::vector<std::uint8_t>;

struct EntryInfo {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t crc32 = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;
};

// Indexes the central directory on construction. The archive bytes must
// outlive the reader. Entry data is only decoded by read().
class Reader {
public:
    // Throws Error{MALFORMED_ZIP}.
    explicit Reader(std::span<const std::uint8_t> archive);

    const std::vector<EntryInfo>& entries() const { return entries_; }
    const EntryInfo* find(std::string_view name) const;

    // Decompresses and CRC-checks one entry. Throws Error{MALFORMED_ZIP}.
    Bytes read(const EntryInfo& entry) const;

    // The entry's stored (possibly compressed) bytes, undecoded.
    std::span<const std::uint8_t> raw(const EntryInfo& entry) const;

private:
    std::span<const std::uint8_t> data_;
    std::vector<EntryInfo> entries_;
};

// Decodes a stored payload described by `entry`. Throws Error{MALFORMED_ZIP}.
Bytes decode(const EntryInfo& entry, std::span<const std::uint8_t> payload);

enum class Method { stored, deflated };

class Writer {
public:
    void add(const std::string& name, std::span<const std::uint8_t> content, Method method = Method::deflated);
    void add(const std::string& name, std::string_view content, Method method = Method::deflated);
    Bytes finish() const;

private:
    struct Pending {
        EntryInfo info;
        Bytes payload;
    };
    std::vector<Pending> pending_;
};

} // namespace pubflow::zip
