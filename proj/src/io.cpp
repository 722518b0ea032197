#include "lvae/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace lvae {

namespace {

constexpr uint32_t kMaxDim = 1u << 20;

void put_u32_le(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_f32_le(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32_le(out, bits);
}

float get_f32_le(const unsigned char* p) {
    const uint32_t bits = get_u32_le(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace

void write_pgm(const std::string& path, const Field2D& img) {
    if (img.width < 1 || img.height < 1) throw DimensionError("write_pgm: empty image");
    std::string bytes;
    bytes += "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    bytes.reserve(bytes.size() + img.size());
    for (double v : img.data) {
        const double clamped = std::clamp(v, 0.0, 1.0);
        bytes.push_back(static_cast<char>(static_cast<int>(std::lround(255.0 * clamped))));
    }
    write_all(path, bytes);
}

namespace {

// Skips PGM whitespace and '#' comments; returns the next integer token.
long next_pgm_int(const std::string& bytes, size_t& pos, const std::string& path) {
    while (pos < bytes.size()) {
        const char c = bytes[pos];
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        throw MalformedHeaderError("PGM '" + path + "': expected integer in header");
    }
    long value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        value = value * 10 + (bytes[pos] - '0');
        if (value > std::numeric_limits<int>::max()) {
            throw DimensionOverflowError("PGM '" + path + "': header value overflow");
        }
        ++pos;
    }
    return value;
}

}  // namespace

Field2D read_pgm(const std::string& path) {
    const std::string bytes = read_all(path);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw MalformedHeaderError("PGM '" + path + "': missing P5 magic");
    }
    size_t pos = 2;
    const long w = next_pgm_int(bytes, pos, path);
    const long h = next_pgm_int(bytes, pos, path);
    const long maxval = next_pgm_int(bytes, pos, path);
    if (w < 1 || h < 1 || w > kMaxDim || h > kMaxDim) {
        throw DimensionOverflowError("PGM '" + path + "': bad dimensions " + std::to_string(w) +
                                     "x" + std::to_string(h));
    }
    if (maxval != 255) {
        throw MalformedHeaderError("PGM '" + path + "': maxval must be 255, got " +
                                   std::to_string(maxval));
    }
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw MalformedHeaderError("PGM '" + path + "': missing separator after maxval");
    }
    ++pos;  // single whitespace byte before payload
    const size_t need = static_cast<size_t>(w) * static_cast<size_t>(h);
    if (bytes.size() - pos < need) {
        throw TruncatedPayloadError("PGM '" + path + "': payload has " +
                                    std::to_string(bytes.size() - pos) + " bytes, need " +
                                    std::to_string(need));
    }
    Field2D img(static_cast<int>(w), static_cast<int>(h));
    for (size_t i = 0; i < need; ++i) {
        img.data[i] = static_cast<unsigned char>(bytes[pos + i]) / 255.0;
    }
    return img;
}

void write_dataset(const std::string& path, const std::vector<Field2D>& records) {
    if (records.empty()) throw IoError("write_dataset: no records");
    const int w = records.front().width;
    const int h = records.front().height;
    for (const Field2D& rec : records) {
        if (rec.width != w || rec.height != h) {
            throw DimensionError("write_dataset: records have mixed dimensions");
        }
    }
    std::string bytes;
    bytes.reserve(24 + records.size() * records.front().size() * 4);
    bytes += "LVAE";
    put_u32_le(bytes, kDatasetVersion);
    put_u32_le(bytes, static_cast<uint32_t>(records.size()));
    put_u32_le(bytes, static_cast<uint32_t>(h));
    put_u32_le(bytes, static_cast<uint32_t>(w));
    put_u32_le(bytes, 4);
    for (const Field2D& rec : records) {
        for (double v : rec.data) put_f32_le(bytes, static_cast<float>(v));
    }
    write_all(path, bytes);
}

std::vector<Field2D> read_dataset(const std::string& path) {
    const std::string bytes = read_all(path);
    if (bytes.size() < 24) throw MalformedHeaderError("dataset '" + path + "': header too short");
    if (std::memcmp(bytes.data(), "LVAE", 4) != 0) {
        throw MalformedHeaderError("dataset '" + path + "': missing LVAE magic");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const uint32_t version = get_u32_le(p + 4);
    const uint32_t count = get_u32_le(p + 8);
    const uint32_t h = get_u32_le(p + 12);
    const uint32_t w = get_u32_le(p + 16);
    const uint32_t bpv = get_u32_le(p + 20);
    if (version != kDatasetVersion) {
        throw MalformedHeaderError("dataset '" + path + "': unsupported version " +
                                   std::to_string(version));
    }
    if (bpv != 4) {
        throw MalformedHeaderError("dataset '" + path + "': bytes-per-value must be 4, got " +
                                   std::to_string(bpv));
    }
    if (w < 1 || h < 1 || w > kMaxDim || h > kMaxDim || count > kMaxDim) {
        throw DimensionOverflowError("dataset '" + path + "': bad header " + std::to_string(count) +
                                     " records of " + std::to_string(w) + "x" + std::to_string(h));
    }
    const uint64_t pixels = static_cast<uint64_t>(w) * h;
    const uint64_t need = 24 + static_cast<uint64_t>(count) * pixels * 4;
    if (pixels * 4 > std::numeric_limits<uint32_t>::max()) {
        throw DimensionOverflowError("dataset '" + path + "': record size overflow");
    }
    if (bytes.size() < need) {
        throw TruncatedPayloadError("dataset '" + path + "': " + std::to_string(bytes.size()) +
                                    " bytes, need " + std::to_string(need));
    }
    std::vector<Field2D> records;
    records.reserve(count);
    size_t pos = 24;
    for (uint32_t i = 0; i < count; ++i) {
        Field2D rec(static_cast<int>(w), static_cast<int>(h));
        for (uint64_t j = 0; j < pixels; ++j, pos += 4) {
            rec.data[j] = get_f32_le(p + pos);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_text_file(const std::string& path, const std::string& text) {
    write_all(path, text);
}

std::string read_text_file(const std::string& path) {
    return read_all(path);
}

}  // namespace lvae
