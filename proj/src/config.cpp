#include "lvae/config.hpp"

#include <zlib.h>

#include <cstdlib>
#include <sstream>

#include "lvae/error.hpp"
#include "lvae/io.hpp"

namespace lvae {

namespace {

struct Default {
    const char* key;
    const char* value;
};

// Single source of truth for every tunable. "0" means "derive from the
// grid" where noted.
constexpr Default kDefaults[] = {
    {"fields.binarize_threshold", "0.5"},

    {"solver.lx", "1.0"},
    {"solver.ly", "0"},             // 0 = square pixels: ly = lx * ny / nx
    {"solver.epsilon", "0"},        // 0 = interface width of interface_cells grid cells
    {"solver.interface_cells", "4.0"},
    {"solver.dt", "0"},             // 0 = auto from grid, scaled by dt_scale
    {"solver.dt_scale", "1.0"},
    {"solver.stab_b", "0"},         // 0 = (9/(4 eps)) * eps
    {"solver.stab_s", "0"},         // 0 = 2 * (9/(4 eps))
    {"solver.steady_tol", "1e-6"},
    {"solver.max_steps", "400000"},
    {"solver.check_interval", "100"},
    {"solver.max_escalations", "3"},
    {"solver.smooth_iters", "20"},
    {"solver.smooth_dt_factor", "0.01"},

    {"litho.sigma", "0"},           // 0 = sigma_frac * mask width
    {"litho.sigma_frac", "0.06"},
    {"litho.kernel_radius", "0"},   // 0 = ceil(3 sigma)
    {"litho.threshold", "0.5"},

    {"datagen.count", "10800"},
    {"datagen.train_count", "10000"},
    {"datagen.cell_width", "64"},
    {"datagen.cell_height", "256"},
    {"datagen.surface_row", "64"},
    {"datagen.trench_width_min", "4"},
    {"datagen.trench_width_max", "20"},
    {"datagen.trench_depth_min", "8"},
    {"datagen.trench_depth_max", "120"},
    {"datagen.trench_gap", "1"},
    {"datagen.retries", "20"},
    {"datagen.mask_canvas", "64"},
    {"datagen.square_size", "16"},
    {"datagen.square_gap", "12"},
    {"datagen.edits_min", "3"},
    {"datagen.edits_max", "6"},
    {"datagen.rect_min", "4"},
    {"datagen.rect_max", "12"},
    {"datagen.corner_offset", "4"},

    {"vae.hidden_width", "512"},
    {"vae.hidden_layers", "4"},
    {"vae.latent_dim", "100"},
    {"vae.lr", "1e-4"},
    {"vae.batch_size", "128"},
    {"vae.epochs", "200"},
    {"vae.plateau_window", "20"},
    {"vae.plateau_tol", "1e-4"},
    {"vae.seed", "1"},

    {"design.alpha", "0.1"},
    {"design.beta", "0.2"},
    {"design.bound", "3.0"},
    {"design.restarts", "8"},
    {"design.lbfgs_memory", "10"},
    {"design.max_iter", "500"},
    {"design.tol", "1e-6"},
    {"design.seed", "1"},

    {"eval.smooth_iters", "20"},
    {"eval.smooth_dt_factor", "0.01"},
};

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

Config::Config() {
    for (const Default& d : kDefaults) values_[d.key] = d.value;
}

Config Config::load(const std::string& path) {
    Config cfg;
    cfg.apply_file(path);
    return cfg;
}

void Config::apply_file(const std::string& path) {
    apply_text(read_text_file(path), path);
}

void Config::apply_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty value for '" +
                              key + "'");
        }
        set(key, value);
    }
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second = value;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double Config::get_real(const std::string& key) const {
    const std::string& s = get(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw ConfigError("config key '" + key + "': '" + s + "' is not a number");
    }
    return v;
}

long Config::get_int(const std::string& key) const {
    const std::string& s = get(key);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw ConfigError("config key '" + key + "': '" + s + "' is not an integer");
    }
    return v;
}

std::string Config::snapshot() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += " = ";
        out += value;
        out += "\n";
    }
    return out;
}

uint32_t Config::hash() const {
    const std::string text = snapshot();
    return static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size())));
}

}  // namespace lvae
