#include "pubflow/repository/blob_store.hpp"

#include "pubflow/common/error.hpp"

#include <fstream>
#include <iterator>

namespace pubflow::repository {

namespace fs = std::filesystem;

BlobStore::BlobStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::IO_ERROR, "cannot create blob directory " + dir_.string() + ": " + ec.message());
}

fs::path BlobStore::path_of(const std::string& digest) const {
    if (digest.size() != 64 || digest.find_first_not_of("0123456789abcdef") != std::string::npos) {
        throw Error(Errc::IO_ERROR, "malformed blob digest '" + digest + "'");
    }
    return dir_ / digest.substr(0, 2) / digest;
}

std::string BlobStore::put(std::span<const std::uint8_t> content) {
    auto digest = sha256_hex(content);
    auto path = path_of(digest);
    if (fs::exists(path)) return digest;
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += "." + random_hex(8) + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(content.data()), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(Errc::IO_ERROR, "cannot write blob " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::IO_ERROR, "cannot store blob " + digest);
    }
    return digest;
}

Bytes BlobStore::get(const std::string& digest) const {
    std::ifstream in(path_of(digest), std::ios::binary);
    if (!in) throw Error(Errc::IO_ERROR, "missing blob " + digest);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (sha256_hex(data) != digest) throw Error(Errc::IO_ERROR, "blob " + digest + " fails its digest check");
    return data;
}

bool BlobStore::contains(const std::string& digest) const { return fs::exists(path_of(digest)); }

} // namespace pubflow::repository
