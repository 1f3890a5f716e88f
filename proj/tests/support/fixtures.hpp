#pragma once

#include "pubflow/common/codec.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef PUBFLOW_FIXTURE_DIR
#error "PUBFLOW_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace pubflow::testing {

inline std::string fixture(const std::string& name) {
    std::ifstream in(std::filesystem::path(PUBFLOW_FIXTURE_DIR) / name, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() / ("pubflow-test-" + random_hex(8));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace pubflow::testing
