#pragma once

#include "pubflow/common/codec.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace pubflow::repository {

// Content-addressed files: <dir>/<first two hex digits>/<sha256>.
class BlobStore {
public:
    explicit BlobStore(std::filesystem::path dir);

    // Stores the bytes (atomically, once per digest) and returns the digest.
    std::string put(std::span<const std::uint8_t> content);
    // Throws IO_ERROR when the blob is missing or fails its digest check.
    Bytes get(const std::string& digest) const;
    bool contains(const std::string& digest) const;

private:
    std::filesystem::path path_of(const std::string& digest) const;

    std::filesystem::path dir_;
};

} // namespace pubflow::repository
