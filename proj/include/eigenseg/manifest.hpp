#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace eigenseg {

/// FNV-1a digest of a file's bytes, formatted as "fnv1a64:<hex>".
std::string file_digest(const std::filesystem::path& path);

/// Run manifest, emitted for every successful CLI run: command, resolved
/// configuration, gamma, weight law, timings, and input/output digests.
/// Re-running the recorded command with the same config reproduces the
/// outputs bitwise.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    nlohmann::json& config() { return json_["config"]; }
    void set_gamma(double gamma, bool degenerate);
    void set_weight_law(const std::string& name);
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void add_timing_ms(const std::string& stage, double ms);

    void write(const std::filesystem::path& path) const;

    /// Milliseconds since construction; convenience for stage timings.
    double elapsed_ms() const;

private:
    nlohmann::json json_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace eigenseg
