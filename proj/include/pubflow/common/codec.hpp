#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pubflow {

using Bytes = std::vector<std::uint8_t>;

inline std::string_view as_chars(std::span<const std::uint8_t> b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}
inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

std::string base64_encode(std::span<const std::uint8_t> data);
// Whitespace is ignored. Throws Error{BAD_REQUEST} on invalid input.
Bytes base64_decode(std::string_view text);

std::string hex_encode(std::span<const std::uint8_t> data);
std::string sha256_hex(std::span<const std::uint8_t> data);

// Cryptographically random bytes, hex encoded.
std::string random_hex(std::size_t bytes);

// PBKDF2-HMAC-SHA256, hex encoded.
std::string pbkdf2_sha256_hex(std::string_view password, std::string_view salt, int iterations);

// Constant-time comparison for equal-length secrets.
bool secure_equals(std::string_view a, std::string_view b);

// Millisecond-precision UTC timestamps, rendered as 2026-10-19T12:00:00.000Z.
using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::milliseconds>;

Timestamp now_ms();
std::string format_iso8601(Timestamp t);
// Throws Error{BAD_REQUEST} on anything not produced by format_iso8601.
Timestamp parse_iso8601(std::string_view s);

} // namespace pubflow
