#include "lvae/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>

namespace lvae {

namespace {

void put_u32(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct Reader {
    const unsigned char* p;
    size_t size;
    size_t pos = 0;
    std::string path;

    uint32_t u32() {
        if (pos + 4 > size) {
            throw TruncatedPayloadError("checkpoint '" + path + "': truncated at byte " +
                                        std::to_string(pos));
        }
        const uint32_t v = static_cast<uint32_t>(p[pos]) | (static_cast<uint32_t>(p[pos + 1]) << 8) |
                           (static_cast<uint32_t>(p[pos + 2]) << 16) |
                           (static_cast<uint32_t>(p[pos + 3]) << 24);
        pos += 4;
        return v;
    }
    float f32() {
        const uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
};

void put_layer_block(std::string& out, const MatrixX<float>& w, const VectorX<float>& b,
                     Activation act) {
    put_u32(out, static_cast<uint32_t>(w.rows()));
    put_u32(out, static_cast<uint32_t>(w.cols()));
    put_u32(out, static_cast<uint32_t>(act));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) put_f32(out, w(r, c));
    }
    for (Eigen::Index i = 0; i < b.size(); ++i) put_f32(out, b(i));
}

void read_layer_block(Reader& in, MatrixX<float>& w, VectorX<float>& b, Activation& act) {
    const uint32_t rows = in.u32();
    const uint32_t cols = in.u32();
    const uint32_t tag = in.u32();
    if (rows < 1 || cols < 1 || rows > (1u << 24) || cols > (1u << 24)) {
        throw MalformedHeaderError("checkpoint '" + in.path + "': bad layer shape " +
                                   std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (tag > 2) {
        throw MalformedHeaderError("checkpoint '" + in.path + "': unknown activation tag " +
                                   std::to_string(tag));
    }
    act = static_cast<Activation>(tag);
    w.resize(rows, cols);
    for (uint32_t r = 0; r < rows; ++r) {
        for (uint32_t c = 0; c < cols; ++c) w(r, c) = in.f32();
    }
    b.resize(rows);
    for (uint32_t i = 0; i < rows; ++i) b(i) = in.f32();
}

}  // namespace

void save_checkpoint(const std::string& path, const Vae<float>& model,
                     const AdamState<float>* adam) {
    std::string bytes;
    bytes += "LVNN";
    put_u32(bytes, kCheckpointVersion);
    put_u32(bytes, static_cast<uint32_t>(model.layers.size()));
    for (const DenseLayer<float>& l : model.layers) {
        put_layer_block(bytes, l.weights, l.bias, l.activation);
    }
    put_u32(bytes, adam ? 1u : 0u);
    if (adam) {
        put_u32(bytes, static_cast<uint32_t>(adam->step));
        for (size_t i = 0; i < model.layers.size(); ++i) {
            put_layer_block(bytes, adam->m[i].weights, adam->m[i].bias,
                            model.layers[i].activation);
        }
        for (size_t i = 0; i < model.layers.size(); ++i) {
            put_layer_block(bytes, adam->v[i].weights, adam->v[i].bias,
                            model.layers[i].activation);
        }
    }
    const uint32_t crc = static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
    put_u32(bytes, crc);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    if (bytes.size() < 16 || std::memcmp(bytes.data(), "LVNN", 4) != 0) {
        throw MalformedHeaderError("checkpoint '" + path + "': missing LVNN magic");
    }
    const uint32_t stored_crc = static_cast<uint32_t>(
        static_cast<unsigned char>(bytes[bytes.size() - 4]) |
        (static_cast<unsigned char>(bytes[bytes.size() - 3]) << 8) |
        (static_cast<unsigned char>(bytes[bytes.size() - 2]) << 16) |
        (static_cast<unsigned char>(bytes[bytes.size() - 1]) << 24));
    const uint32_t actual_crc = static_cast<uint32_t>(crc32(
        0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size() - 4)));
    if (stored_crc != actual_crc) {
        throw IoError("checkpoint '" + path + "': CRC mismatch");
    }

    Reader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size() - 4, 0, path};
    r.pos = 4;  // magic
    const uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw MalformedHeaderError("checkpoint '" + path + "': unsupported version " +
                                   std::to_string(version));
    }
    const uint32_t count = r.u32();
    if (count < 3 || count % 2 == 0) {
        throw MalformedHeaderError("checkpoint '" + path + "': layer count " +
                                   std::to_string(count) + " does not fit 2*depth+3");
    }

    LoadedCheckpoint loaded;
    Vae<float>& model = loaded.model;
    model.layers.resize(count);
    for (uint32_t i = 0; i < count; ++i) {
        read_layer_block(r, model.layers[i].weights, model.layers[i].bias,
                         model.layers[i].activation);
    }
    model.depth = (static_cast<int>(count) - 3) / 2;
    model.input_dim = model.layers.front().in_dim();
    model.hidden_width = model.layers.front().out_dim();
    model.latent_dim = model.layers[model.mu_idx()].out_dim();
    // sanity: decoder output must mirror the encoder input
    if (model.layers[model.out_idx()].out_dim() != model.input_dim ||
        model.layers[model.dec_idx(0)].in_dim() != model.latent_dim) {
        throw MalformedHeaderError("checkpoint '" + path + "': inconsistent layer shapes");
    }

    if (r.u32() == 1) {
        AdamState<float> adam = AdamState<float>::init(model);
        adam.step = r.u32();
        Activation ignored;
        for (uint32_t i = 0; i < count; ++i) {
            read_layer_block(r, adam.m[i].weights, adam.m[i].bias, ignored);
        }
        for (uint32_t i = 0; i < count; ++i) {
            read_layer_block(r, adam.v[i].weights, adam.v[i].bias, ignored);
        }
        loaded.adam = std::move(adam);
    }
    return loaded;
}

}  // namespace lvae
