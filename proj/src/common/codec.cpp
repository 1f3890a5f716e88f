#include "pubflow/common/codec.hpp"

#include "pubflow/common/error.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <ctime>

namespace pubflow {

std::string base64_encode(std::span<const std::uint8_t> data) {
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

Bytes base64_decode(std::string_view text) {
    std::string compact;
    compact.reserve(text.size());
    for (char c : text) {
        if (c != ' ' && c != '\n' && c != '\r' && c != '\t') compact += c;
    }
    if (compact.size() % 4 != 0) throw Error(Errc::BAD_REQUEST, "invalid base64 length");
    Bytes out(compact.size() / 4 * 3);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(compact.data()),
                            static_cast<int>(compact.size()));
    if (n < 0) throw Error(Errc::BAD_REQUEST, "invalid base64 data");
    // EVP_DecodeBlock counts padding as zero bytes.
    std::size_t pad = 0;
    if (!compact.empty() && compact.back() == '=') ++pad;
    if (compact.size() > 1 && compact[compact.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

std::string hex_encode(std::span<const std::uint8_t> data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error(Errc::IO_ERROR, "sha256 failed");
    }
    return hex_encode(std::span(md.data(), len));
}

std::string random_hex(std::size_t bytes) {
    Bytes buf(bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
        throw Error(Errc::IO_ERROR, "system random source unavailable");
    }
    return hex_encode(buf);
}

std::string pbkdf2_sha256_hex(std::string_view password, std::string_view salt, int iterations) {
    std::array<std::uint8_t, 32> out{};
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                          reinterpret_cast<const unsigned char*>(salt.data()), static_cast<int>(salt.size()),
                          iterations, EVP_sha256(), static_cast<int>(out.size()), out.data()) != 1) {
        throw Error(Errc::IO_ERROR, "pbkdf2 failed");
    }
    return hex_encode(out);
}

bool secure_equals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

Timestamp now_ms() { return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now()); }

std::string format_iso8601(Timestamp t) {
    auto ms = t.time_since_epoch().count();
    auto secs = static_cast<std::time_t>(ms >= 0 ? ms / 1000 : (ms - 999) / 1000);
    int millis = static_cast<int>(ms - static_cast<long long>(secs) * 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
    return buf;
}

Timestamp parse_iso8601(std::string_view s) {
    auto bad = [&] { return Error(Errc::BAD_REQUEST, "invalid timestamp '" + std::string(s) + "'"); };
    if (s.size() != 24 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' ||
        s[19] != '.' || s[23] != 'Z') {
        throw bad();
    }
    auto num = [&](std::size_t at, std::size_t len) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data() + at, s.data() + at + len, v);
        if (ec != std::errc() || p != s.data() + at + len) throw bad();
        return v;
    };
    std::tm tm{};
    tm.tm_year = num(0, 4) - 1900;
    tm.tm_mon = num(5, 2) - 1;
    tm.tm_mday = num(8, 2);
    tm.tm_hour = num(11, 2);
    tm.tm_min = num(14, 2);
    tm.tm_sec = num(17, 2);
    int millis = num(20, 3);
    std::time_t secs = timegm(&tm);
    return Timestamp(std::chrono::milliseconds(static_cast<long long>(secs) * 1000 + millis));
}

} // namespace pubflow
