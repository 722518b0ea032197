#include "lvae/datagen.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "lvae/threading.hpp"

namespace lvae {

namespace {
// Offset mixed into retry seeds so they never collide with base + index.
constexpr uint64_t kRetryStride = 0x9e3779b97f4a7c15ull;
}  // namespace

// ---------------------------------------------------------------- trenches

TrenchConfig TrenchConfig::from_config(const Config& cfg) {
    TrenchConfig t;
    t.cell_width = static_cast<int>(cfg.get_int("datagen.cell_width"));
    t.cell_height = static_cast<int>(cfg.get_int("datagen.cell_height"));
    t.surface_row = static_cast<int>(cfg.get_int("datagen.surface_row"));
    t.width_min = static_cast<int>(cfg.get_int("datagen.trench_width_min"));
    t.width_max = static_cast<int>(cfg.get_int("datagen.trench_width_max"));
    t.depth_min = static_cast<int>(cfg.get_int("datagen.trench_depth_min"));
    t.depth_max = static_cast<int>(cfg.get_int("datagen.trench_depth_max"));
    t.gap = static_cast<int>(cfg.get_int("datagen.trench_gap"));
    t.retries = static_cast<int>(cfg.get_int("datagen.retries"));
    return t;
}

void TrenchConfig::validate() const {
    if (cell_width < 8 || cell_height < 8) throw ConfigError("TrenchConfig: cell too small");
    if (surface_row < 2 || surface_row >= cell_height) {
        throw ConfigError("TrenchConfig: surface_row outside the cell");
    }
    if (width_min < 3 || width_min > width_max || width_max > cell_width) {
        throw ConfigError("TrenchConfig: bad trench width range");
    }
    if (depth_min < 3 || depth_min > depth_max) {
        throw ConfigError("TrenchConfig: bad trench depth range");
    }
    if (surface_row + depth_max > cell_height - 4) {
        throw ConfigError("TrenchConfig: deepest trench leaves < 4 solid rows at the bottom");
    }
    if (gap < 1) throw ConfigError("TrenchConfig: gap must be >= 1");
    if (retries < 1) throw ConfigError("TrenchConfig: retries must be >= 1");
}

TrenchSpec sample_trench_spec(uint64_t seed, const TrenchConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count_dist(1, 2);
    std::uniform_int_distribution<int> width_dist(cfg.width_min, cfg.width_max);
    std::uniform_int_distribution<int> depth_dist(cfg.depth_min, cfg.depth_max);

    const int count = count_dist(rng);
    for (int attempt = 0; attempt < cfg.retries; ++attempt) {
        TrenchSpec spec;
        bool ok = true;
        for (int t = 0; t < count; ++t) {
            Trench tr;
            tr.width = width_dist(rng);
            tr.depth = depth_dist(rng);
            if (tr.width > cfg.cell_width) {
                ok = false;
                break;
            }
            std::uniform_int_distribution<int> x_dist(0, cfg.cell_width - tr.width);
            tr.x = x_dist(rng);
            spec.trenches.push_back(tr);
        }
        if (ok && spec.trenches.size() == 2) {
            const Trench& a = spec.trenches[0];
            const Trench& b = spec.trenches[1];
            // require `gap` solid columns between them
            const bool disjoint =
                a.x + a.width + cfg.gap <= b.x || b.x + b.width + cfg.gap <= a.x;
            if (!disjoint) ok = false;
        }
        if (ok) return spec;
    }
    throw Error("sample_trench_spec: could not place non-overlapping trenches after " +
                std::to_string(cfg.retries) + " retries");
}

BinaryImage render_trench_cell(const TrenchSpec& spec, const TrenchConfig& cfg) {
    cfg.validate();
    BinaryImage cell(cfg.cell_width, cfg.cell_height, 0);
    for (int r = cfg.surface_row; r < cfg.cell_height; ++r) {
        for (int c = 0; c < cfg.cell_width; ++c) cell.at(r, c) = 1;
    }
    for (const Trench& t : spec.trenches) {
        for (int r = cfg.surface_row; r < cfg.surface_row + t.depth; ++r) {
            for (int c = t.x; c < t.x + t.width; ++c) cell.at(r, c) = 0;
        }
    }
    return cell;
}

BinaryImage sample_trench_cell(uint64_t seed, const TrenchConfig& cfg) {
    return render_trench_cell(sample_trench_spec(seed, cfg), cfg);
}

// ------------------------------------------------------------------ masks

MaskConfig MaskConfig::from_config(const Config& cfg) {
    MaskConfig m;
    m.canvas = static_cast<int>(cfg.get_int("datagen.mask_canvas"));
    m.square_size = static_cast<int>(cfg.get_int("datagen.square_size"));
    m.square_gap = static_cast<int>(cfg.get_int("datagen.square_gap"));
    m.edits_min = static_cast<int>(cfg.get_int("datagen.edits_min"));
    m.edits_max = static_cast<int>(cfg.get_int("datagen.edits_max"));
    m.rect_min = static_cast<int>(cfg.get_int("datagen.rect_min"));
    m.rect_max = static_cast<int>(cfg.get_int("datagen.rect_max"));
    m.corner_offset = static_cast<int>(cfg.get_int("datagen.corner_offset"));
    return m;
}

void MaskConfig::validate() const {
    if (canvas < 16) throw ConfigError("MaskConfig: canvas too small");
    if (square_size < 4) throw ConfigError("MaskConfig: square_size too small");
    if (2 * square_size + square_gap >= canvas) {
        throw ConfigError("MaskConfig: squares do not fit the canvas");
    }
    if (edits_min < 0 || edits_min > edits_max) throw ConfigError("MaskConfig: bad edit range");
    if (rect_min < 1 || rect_min > rect_max) throw ConfigError("MaskConfig: bad rect range");
    if (corner_offset < 1) throw ConfigError("MaskConfig: corner_offset must be >= 1");
}

namespace {

struct SquareFrame {
    int r0, c0, r1, c1;  // inclusive corner pixels of the left square
};

SquareFrame left_square(const MaskConfig& cfg) {
    const int pair_width = 2 * cfg.square_size + cfg.square_gap;
    const int c0 = (cfg.canvas - pair_width) / 2;
    const int r0 = (cfg.canvas - cfg.square_size) / 2;
    return {r0, c0, r0 + cfg.square_size - 1, c0 + cfg.square_size - 1};
}

}  // namespace

std::vector<std::pair<int, int>> control_points(const MaskConfig& cfg) {
    cfg.validate();
    const SquareFrame s = left_square(cfg);
    const int rm = (s.r0 + s.r1) / 2;
    const int cm = (s.c0 + s.c1) / 2;
    const int d = cfg.corner_offset;
    return {
        {s.r0, s.c0}, {s.r0, s.c1}, {s.r1, s.c0}, {s.r1, s.c1},          // corners
        {s.r0, cm},   {s.r1, cm},   {rm, s.c0},   {rm, s.c1},            // edge midpoints
        {s.r0 - d, s.c0 - d}, {s.r0 - d, s.c1 + d},                      // outward offsets
        {s.r1 + d, s.c0 - d}, {s.r1 + d, s.c1 + d},
    };
}

BinaryImage base_two_squares(const MaskConfig& cfg) {
    cfg.validate();
    const SquareFrame s = left_square(cfg);
    BinaryImage mask(cfg.canvas, cfg.canvas, 0);
    const int mirror = cfg.canvas - 1;
    for (int r = s.r0; r <= s.r1; ++r) {
        for (int c = s.c0; c <= s.c1; ++c) {
            mask.at(r, c) = 1;
            mask.at(r, mirror - c) = 1;
        }
    }
    return mask;
}

MaskSpec sample_mask_spec(uint64_t seed, const MaskConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count_dist(cfg.edits_min, cfg.edits_max);
    std::uniform_int_distribution<int> point_dist(0, 11);
    std::uniform_int_distribution<int> w_dist(cfg.rect_min, cfg.rect_max);
    std::bernoulli_distribution add_dist(0.5);

    MaskSpec spec;
    const int count = count_dist(rng);
    for (int i = 0; i < count; ++i) {
        MaskEdit e;
        e.point_id = point_dist(rng);
        e.add = add_dist(rng);
        e.rect_w = w_dist(rng);
        // keep w/h within [kAspectLo, kAspectHi]
        const int h_lo = std::max(cfg.rect_min, (e.rect_w + 1) / 2);
        const int h_hi = std::min(cfg.rect_max, 2 * e.rect_w);
        std::uniform_int_distribution<int> h_dist(h_lo, h_hi);
        e.rect_h = h_dist(rng);
        spec.edits.push_back(e);
    }
    return spec;
}

BinaryImage render_mask(const MaskSpec& spec, const MaskConfig& cfg) {
    BinaryImage mask = base_two_squares(cfg);
    const auto points = control_points(cfg);
    const int mirror = cfg.canvas - 1;
    for (const MaskEdit& e : spec.edits) {
        if (e.point_id < 0 || e.point_id >= static_cast<int>(points.size())) {
            throw Error("render_mask: control point id out of range");
        }
        const double ratio = static_cast<double>(e.rect_w) / e.rect_h;
        if (ratio < kAspectLo - 1e-12 || ratio > kAspectHi + 1e-12) {
            throw Error("render_mask: edit aspect ratio outside [0.5, 2]");
        }
        const auto [pr, pc] = points[e.point_id];
        const int r_begin = pr - e.rect_h / 2;
        const int c_begin = pc - e.rect_w / 2;
        const uint8_t value = e.add ? 1 : 0;
        for (int r = r_begin; r < r_begin + e.rect_h; ++r) {
            for (int c = c_begin; c < c_begin + e.rect_w; ++c) {
                if (r < 0 || r >= cfg.canvas || c < 0 || c >= cfg.canvas) continue;
                // apply at all four mirror images of the pixel
                mask.at(r, c) = value;
                mask.at(r, mirror - c) = value;
                mask.at(mirror - r, c) = value;
                mask.at(mirror - r, mirror - c) = value;
            }
        }
    }
    return mask;
}

BinaryImage sample_mask(uint64_t seed, const MaskConfig& cfg) {
    return render_mask(sample_mask_spec(seed, cfg), cfg);
}

// ---------------------------------------------------------------- dataset

namespace {

Dataset assemble(std::vector<PairedSample> samples, int train_count, uint64_t seed) {
    const int n = static_cast<int>(samples.size());
    if (train_count < 0 || train_count > n) {
        throw ConfigError("dataset: train_count " + std::to_string(train_count) +
                          " out of range for " + std::to_string(n) + " samples");
    }
    Dataset ds;
    ds.samples = std::move(samples);
    ds.seed = seed;
    for (int i = 0; i < train_count; ++i) ds.train_idx.push_back(i);
    for (int i = train_count; i < n; ++i) ds.test_idx.push_back(i);
    return ds;
}

}  // namespace

Dataset generate_diffusion_dataset(int count, uint64_t seed, const PhaseParams& solver_params,
                                   const TrenchConfig& cfg, int train_count, int threads,
                                   GenStats* stats) {
    cfg.validate();
    if (count < 1) throw ConfigError("generate_diffusion_dataset: count must be >= 1");
    PhaseParams params = solver_params;
    params.nx = cfg.cell_width;
    params.ny = cfg.cell_height;
    params = params.resolved();

    std::vector<PairedSample> samples(count);
    std::vector<long> steps(count, 0);
    std::vector<int> retries(count, 0);
    std::vector<int> unconverged(count, 0);

    parallel_for(count, threads, [&](int i) {
        PhaseFieldSolver solver(params);
        uint64_t sample_seed = seed + static_cast<uint64_t>(i);
        for (int attempt = 0;; ++attempt) {
            try {
                const BinaryImage cell = sample_trench_cell(sample_seed, cfg);
                const Field2D initial = cell.to_field();
                const Field2D phi0 = solver.smooth_constant_mobility(
                    initial, params.smooth_iters, params.dt * params.smooth_dt_factor);
                EvolveResult evolved = solver.evolve_to_steady(phi0);
                const BinaryImage final_cell = binarize(phase_to_gray(evolved.phi), 0.5);
                samples[i] = concat_pair(initial, final_cell.to_field());
                steps[i] = evolved.steps;
                unconverged[i] = evolved.converged ? 0 : 1;
                break;
            } catch (const SolverError&) {
                if (attempt + 1 >= cfg.retries) throw;
                ++retries[i];
                sample_seed += kRetryStride;
            }
        }
    });

    if (stats) {
        for (int i = 0; i < count; ++i) {
            stats->solver_steps += steps[i];
            stats->solver_retries += retries[i];
            stats->unconverged += unconverged[i];
        }
    }
    return assemble(std::move(samples), train_count, seed);
}

Dataset generate_litho_dataset(int count, uint64_t seed, const LithoParams& litho_params,
                               const MaskConfig& cfg, int train_count, int threads,
                               GenStats* stats) {
    cfg.validate();
    if (count < 1) throw ConfigError("generate_litho_dataset: count must be >= 1");
    const LithoParams params = litho_params.resolved(cfg.canvas);

    std::vector<PairedSample> samples(count);
    parallel_for(count, threads, [&](int i) {
        const BinaryImage mask = sample_mask(seed + static_cast<uint64_t>(i), cfg);
        const BinaryImage pattern = litho_forward(mask.to_field(), params);
        samples[i] = concat_pair(mask.to_field(), pattern.to_field());
    });

    if (stats) {
        std::set<std::vector<double>> unique;
        for (const PairedSample& s : samples) {
            if (!unique.insert(s.combined().data).second) ++stats->duplicates;
        }
    }
    return assemble(std::move(samples), train_count, seed);
}

std::vector<Field2D> dataset_records(const Dataset& ds) {
    std::vector<Field2D> records;
    records.reserve(ds.samples.size());
    for (const PairedSample& s : ds.samples) records.push_back(s.combined());
    return records;
}

Dataset dataset_from_records(std::vector<Field2D> records, int train_count, uint64_t seed) {
    std::vector<PairedSample> samples;
    samples.reserve(records.size());
    for (Field2D& rec : records) samples.push_back(PairedSample::from_combined(std::move(rec)));
    return assemble(std::move(samples), train_count, seed);
}

}  // namespace lvae
