#include "pubflow/common/zip.hpp"

#include "pubflow/common/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>

namespace pubflow::zip {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::size_t kEndRecordSize = 22;
constexpr std::size_t kCentralHeaderSize = 46;
constexpr std::size_t kLocalHeaderSize = 30;

[[noreturn]] void malformed(const std::string& why) {
    throw Error(Errc::MALFORMED_ZIP, "malformed zip archive: " + why);
}

std::uint16_t u16(std::span<const std::uint8_t> d, std::size_t at) {
    if (at + 2 > d.size()) malformed("truncated record");
    return static_cast<std::uint16_t>(d[at] | (d[at + 1] << 8));
}

std::uint32_t u32(std::span<const std::uint8_t> d, std::size_t at) {
    if (at + 4 > d.size()) malformed("truncated record");
    return static_cast<std::uint32_t>(d[at]) | (static_cast<std::uint32_t>(d[at + 1]) << 8) |
           (static_cast<std::uint32_t>(d[at + 2]) << 16) | (static_cast<std::uint32_t>(d[at + 3]) << 24);
}

void put16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(Bytes& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(std::span<const std::uint8_t> data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    return static_cast<std::uint32_t>(crc32(crc, data.data(), static_cast<uInt>(data.size())));
}

Bytes raw_inflate(std::span<const std::uint8_t> in, std::size_t expected) {
    Bytes out(expected);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) malformed("inflate init failed");
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected) malformed("corrupt deflate stream");
    return out;
}

Bytes raw_deflate(std::span<const std::uint8_t> in) {
    z_stream zs{};
    if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(Errc::IO_ERROR, "deflate init failed");
    }
    Bytes out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error(Errc::IO_ERROR, "deflate failed");
    out.resize(zs.total_out);
    return out;
}

} // namespace

Reader::Reader(std::span<const std::uint8_t> archive) : data_(archive) {
    if (data_.size() < kEndRecordSize) malformed("too short for an end-of-central-directory record");

    // The end record sits at the tail, possibly followed by a comment of up to 64 KiB.
    std::size_t lowest = data_.size() > kEndRecordSize + 0xffff ? data_.size() - kEndRecordSize - 0xffff : 0;
    std::size_t eocd = std::numeric_limits<std::size_t>::max();
    for (std::size_t at = data_.size() - kEndRecordSize + 1; at-- > lowest;) {
        if (u32(data_, at) == kEndSig) {
            eocd = at;
            break;
        }
    }
    if (eocd == std::numeric_limits<std::size_t>::max()) malformed("no end-of-central-directory record");

    std::uint16_t count = u16(data_, eocd + 10);
    std::uint32_t cd_size = u32(data_, eocd + 12);
    std::uint32_t cd_offset = u32(data_, eocd + 16);
    if (static_cast<std::size_t>(cd_offset) + cd_size > eocd) malformed("central directory out of range");

    std::size_t at = cd_offset;
    entries_.reserve(count);
    for (std::uint16_t i = 0; i < count; ++i) {
        if (u32(data_, at) != kCentralSig) malformed("bad central directory signature");
        EntryInfo e;
        std::uint16_t flags = u16(data_, at + 8);
        e.method = u16(data_, at + 10);
        e.crc32 = u32(data_, at + 16);
        e.compressed_size = u32(data_, at + 20);
        e.uncompressed_size = u32(data_, at + 24);
        std::uint16_t name_len = u16(data_, at + 28);
        std::uint16_t extra_len = u16(data_, at + 30);
        std::uint16_t comment_len = u16(data_, at + 32);
        e.local_header_offset = u32(data_, at + 42);
        if (at + kCentralHeaderSize + name_len > data_.size()) malformed("entry name out of range");
        e.name.assign(reinterpret_cast<const char*>(data_.data() + at + kCentralHeaderSize), name_len);
        if (flags & 0x1) malformed("encrypted entry '" + e.name + "'");
        at += kCentralHeaderSize + name_len + extra_len + comment_len;
        entries_.push_back(std::move(e));
    }
}

const EntryInfo* Reader::find(std::string_view name) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const EntryInfo& e) { return e.name == name; });
    return it == entries_.end() ? nullptr : &*it;
}

std::span<const std::uint8_t> Reader::raw(const EntryInfo& entry) const {
    std::size_t at = entry.local_header_offset;
    if (u32(data_, at) != kLocalSig) malformed("bad local header for '" + entry.name + "'");
    std::uint16_t name_len = u16(data_, at + 26);
    std::uint16_t extra_len = u16(data_, at + 28);
    std::size_t start = at + kLocalHeaderSize + name_len + extra_len;
    if (start + entry.compressed_size > data_.size()) malformed("entry data out of range for '" + entry.name + "'");
    return data_.subspan(start, entry.compressed_size);
}

Bytes Reader::read(const EntryInfo& entry) const { return decode(entry, raw(entry)); }

Bytes decode(const EntryInfo& entry, std::span<const std::uint8_t> payload) {
    Bytes out;
    if (entry.method == 0) {
        if (payload.size() != entry.uncompressed_size) malformed("size mismatch for stored entry");
        out.assign(payload.begin(), payload.end());
    } else if (entry.method == 8) {
        out = raw_inflate(payload, entry.uncompressed_size);
    } else {
        malformed("unsupported compression method " + std::to_string(entry.method));
    }
    if (crc_of(out) != entry.crc32) malformed("CRC mismatch for '" + entry.name + "'");
    return out;
}

void Writer::add(const std::string& name, std::span<const std::uint8_t> content, Method method) {
    Pending p;
    p.info.name = name;
    p.info.crc32 = crc_of(content);
    p.info.uncompressed_size = static_cast<std::uint32_t>(content.size());
    if (method == Method::deflated) {
        p.info.method = 8;
        p.payload = raw_deflate(content);
    } else {
        p.info.method = 0;
        p.payload.assign(content.begin(), content.end());
    }
    p.info.compressed_size = static_cast<std::uint32_t>(p.payload.size());
    pending_.push_back(std::move(p));
}

void Writer::add(const std::string& name, std::string_view content, Method method) {
    add(name, std::span(reinterpret_cast<const std::uint8_t*>(content.data()), content.size()), method);
}

Bytes Writer::finish() const {
    Bytes out;
    std::vector<std::uint32_t> offsets;
    for (const auto& p : pending_) {
        offsets.push_back(static_cast<std::uint32_t>(out.size()));
        put32(out, kLocalSig);
        put16(out, 20);  // version needed
        put16(out, 0x0800);  // UTF-8 names
        put16(out, p.info.method);
        put16(out, 0);  // mod time
        put16(out, 0x21);  // mod date: 1980-01-01
        put32(out, p.info.crc32);
        put32(out, p.info.compressed_size);
        put32(out, p.info.uncompressed_size);
        put16(out, static_cast<std::uint16_t>(p.info.name.size()));
        put16(out, 0);
        out.insert(out.end(), p.info.name.begin(), p.info.name.end());
        out.insert(out.end(), p.payload.begin(), p.payload.end());
    }
    auto cd_offset = static_cast<std::uint32_t>(out.size());
    for (std::size_t i = 0; i < pending_.size(); ++i) {
        const auto& info = pending_[i].info;
        put32(out, kCentralSig);
        put16(out, 20);  // version made by
        put16(out, 20);
        put16(out, 0x0800);
        put16(out, info.method);
        put16(out, 0);
        put16(out, 0x21);
        put32(out, info.crc32);
        put32(out, info.compressed_size);
        put32(out, info.uncompressed_size);
        put16(out, static_cast<std::uint16_t>(info.name.size()));
        put16(out, 0);  // extra
        put16(out, 0);  // comment
        put16(out, 0);  // disk
        put16(out, 0);  // internal attrs
        put32(out, 0);  // external attrs
        put32(out, offsets[i]);
        out.insert(out.end(), info.name.begin(), info.name.end());
    }
    auto cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;
    put32(out, kEndSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(pending_.size()));
    put16(out, static_cast<std::uint16_t>(pending_.size()));
    put32(out, cd_size);
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

} // namespace pubflow::zip
