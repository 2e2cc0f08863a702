#include "eigenseg/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace eigenseg {

namespace {

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string(), 0);
    }
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_bytes(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParseError("cannot open " + path.string() + " for writing", 0);
    }
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw ParseError("short write to " + path.string(), 0);
    }
}

// Token scanner for netpbm headers: skips whitespace and '#' comments.
struct HeaderScanner {
    const std::string& data;
    std::size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < data.size()) {
            const char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    long next_int(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) ++pos;
        if (pos == start) {
            throw ParseError(std::string("expected ") + what, start);
        }
        return std::stol(data.substr(start, pos - start));
    }
};

float load_le_float(const char* p) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, p, 4);
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap32(bits);
    }
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

void store_le_float(float f, char* p) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &f, 4);
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap32(bits);
    }
    std::memcpy(p, &bits, 4);
}

}  // namespace

ScalarField read_image(const std::filesystem::path& path) {
    const std::string data = read_bytes(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
        throw ParseError("not a binary PGM (magic 'P5' missing)", 0);
    }
    HeaderScanner scan{data, 2};
    const long w = scan.next_int("width");
    const long h = scan.next_int("height");
    const long maxval = scan.next_int("maxval");
    if (w < 2 || h < 1 || w * h > (1L << 28)) {
        throw ParseError("implausible PGM dimensions", scan.pos);
    }
    if (maxval != 255) {
        throw ParseError("unsupported maxval " + std::to_string(maxval), scan.pos);
    }
    // exactly one whitespace byte between maxval and the payload
    if (scan.pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[scan.pos]))) {
        throw ParseError("missing separator before PGM payload", scan.pos);
    }
    ++scan.pos;
    const std::size_t need = static_cast<std::size_t>(w) * h;
    if (data.size() - scan.pos < need) {
        throw ParseError("truncated PGM payload", data.size());
    }
    ScalarField field(static_cast<int>(w), static_cast<int>(h));
    for (std::size_t i = 0; i < need; ++i) {
        field.values[i] = static_cast<unsigned char>(data[scan.pos + i]) / 255.0;
    }
    return field;
}

void write_image(const ScalarField& field, const std::filesystem::path& path) {
    field.validate();
    std::string out = "P5\n" + std::to_string(field.width) + " " +
                      std::to_string(field.height) + "\n255\n";
    out.reserve(out.size() + field.size());
    for (double v : field.values) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        const int level = static_cast<int>(std::floor(clamped * 255.0 + 0.5));
        out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
    }
    write_bytes(path, out);
}

ScalarField read_field(const std::filesystem::path& path) {
    const std::string data = read_bytes(path);
    if (data.size() < 2 || data[0] != 'P' || data[1] != 'f') {
        throw ParseError("not a grayscale PFM (magic 'Pf' missing)", 0);
    }
    HeaderScanner scan{data, 2};
    const long w = scan.next_int("width");
    const long h = scan.next_int("height");
    scan.skip_space_and_comments();
    const std::size_t scale_start = scan.pos;
    while (scan.pos < data.size() && !std::isspace(static_cast<unsigned char>(data[scan.pos]))) {
        ++scan.pos;
    }
    double scale = 0.0;
    try {
        scale = std::stod(data.substr(scale_start, scan.pos - scale_start));
    } catch (const std::exception&) {
        throw ParseError("bad PFM scale", scale_start);
    }
    if (!(scale < 0.0)) {
        throw ParseError("big-endian PFM not supported (scale must be negative)", scale_start);
    }
    if (scan.pos >= data.size()) {
        throw ParseError("missing separator before PFM payload", scan.pos);
    }
    ++scan.pos;  // single whitespace byte
    if (w < 2 || h < 1 || w * h > (1L << 28)) {
        throw ParseError("implausible PFM dimensions", scan.pos);
    }
    const std::size_t need = static_cast<std::size_t>(w) * h * 4;
    if (data.size() - scan.pos != need) {
        throw ParseError("PFM payload byte count mismatch", data.size());
    }
    ScalarField field(static_cast<int>(w), static_cast<int>(h));
    // PFM rows run bottom to top.
    for (long row = 0; row < h; ++row) {
        const long y = h - 1 - row;
        for (long x = 0; x < w; ++x) {
            const char* p = data.data() + scan.pos + (static_cast<std::size_t>(row) * w + x) * 4;
            const float f = load_le_float(p);
            if (!std::isfinite(f)) {
                throw ParseError("non-finite value in PFM payload",
                                 scan.pos + (static_cast<std::size_t>(row) * w + x) * 4);
            }
            field.at(static_cast<int>(x), static_cast<int>(y)) = f;
        }
    }
    return field;
}

void write_field(const ScalarField& field, const std::filesystem::path& path) {
    field.validate();
    std::string out = "Pf\n" + std::to_string(field.width) + " " +
                      std::to_string(field.height) + "\n-1.0\n";
    const std::size_t header = out.size();
    out.resize(header + field.size() * 4);
    for (int row = 0; row < field.height; ++row) {
        const int y = field.height - 1 - row;
        for (int x = 0; x < field.width; ++x) {
            const std::size_t off = header + (static_cast<std::size_t>(row) * field.width + x) * 4;
            store_le_float(static_cast<float>(field.at(x, y)), out.data() + off);
        }
    }
    write_bytes(path, out);
}

}  // namespace eigenseg
