// Shared helpers for the test binaries: temporary directories and a small
// wrapper for running the CLI executable and capturing its output.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef LSI_CLI_PATH
#define LSI_CLI_PATH "lsi"
#endif

namespace testutil {

// RAII temporary directory; removed (recursively) on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        std::mt19937_64 rng(rd());
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::ostringstream name;
            name << "lsikit-test-" << std::hex << rng();
            auto candidate = base / name.str();
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("TempDir: could not create a unique directory");
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    ~TempDir() {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove_all(path_, ec);
        }
    }

    const std::filesystem::path& path() const { return path_; }

    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

// Run a shell command, capturing stdout+stderr and the exit status.
inline CommandResult run_cmd(const std::string& command) {
    CommandResult result;
    std::string full = command + " 2>&1";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + command);
    char buffer[4096];
    size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    int status = ::pclose(pipe);
    if (status == -1) throw std::runtime_error("pclose failed for: " + command);
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else {
        result.exit_code = -1;
    }
    return result;
}

inline std::string cli_path() { return std::string(LSI_CLI_PATH); }

// Quote a path for the shell (paths we generate contain no single quotes).
inline std::string shq(const std::string& s) { return "'" + s + "'"; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_file: cannot open " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace testutil
