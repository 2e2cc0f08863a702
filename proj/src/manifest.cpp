#include "eigenseg/manifest.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "eigenseg/errors.hpp"

namespace eigenseg {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string() + " for digest", 0);
    }
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[1 << 16];
    while (in) {
        in.read(buffer, sizeof(buffer));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << hash;
    return out.str();
}

RunManifest::RunManifest(std::string command) : start_(std::chrono::steady_clock::now()) {
    json_["command"] = std::move(command);
    json_["config"] = nlohmann::json::object();
    json_["timings_ms"] = nlohmann::json::object();
    json_["inputs"] = nlohmann::json::object();
    json_["outputs"] = nlohmann::json::object();
}

void RunManifest::set_gamma(double gamma, bool degenerate) {
    json_["gamma"] = gamma;
    json_["gamma_degenerate"] = degenerate;
}

void RunManifest::set_weight_law(const std::string& name) { json_["weight_law"] = name; }

void RunManifest::add_input(const std::filesystem::path& path) {
    json_["inputs"][path.filename().string()] = file_digest(path);
}

void RunManifest::add_output(const std::filesystem::path& path) {
    json_["outputs"][path.filename().string()] = file_digest(path);
}

void RunManifest::add_timing_ms(const std::string& stage, double ms) {
    json_["timings_ms"][stage] = ms;
}

double RunManifest::elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start_)
        .count();
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) {
        throw ParseError("cannot open " + path.string() + " for writing", 0);
    }
    out << json_.dump(2) << "\n";
}

}  // namespace eigenseg
