#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lvae/config.hpp"
#include "lvae/field.hpp"
#include "lvae/litho.hpp"
#include "lvae/phase_field.hpp"

namespace lvae {

// ---------------------------------------------------------------- trenches

/// Geometry of the periodic trench unit cell: a solid slab whose top
/// surface sits at surface_row, with 1-2 rectangular trenches cut downward
/// from that surface. Rows above the surface are void.
struct TrenchConfig {
    int cell_width = 64;
    int cell_height = 256;
    int surface_row = 64;
    int width_min = 4, width_max = 20;
    int depth_min = 8, depth_max = 120;
    int gap = 1;          // solid columns required between two trenches
    int retries = 20;

    static TrenchConfig from_config(const Config& cfg);
    void validate() const;
};

struct Trench {
    int x = 0;      // leftmost column
    int width = 0;
    int depth = 0;  // rows below surface_row
};

struct TrenchSpec {
    std::vector<Trench> trenches;  // 1 or 2, non-overlapping
};

TrenchSpec sample_trench_spec(uint64_t seed, const TrenchConfig& cfg);
BinaryImage render_trench_cell(const TrenchSpec& spec, const TrenchConfig& cfg);
BinaryImage sample_trench_cell(uint64_t seed, const TrenchConfig& cfg);

// ------------------------------------------------------------------ masks

/// Base two-squares mask plus rectangular add/remove edits anchored at
/// control points. Every edit is replicated under the canvas's horizontal
/// and vertical mirrors, so masks keep the target's symmetry; edit
/// rectangles keep aspect ratio within [0.5, 2].
struct MaskConfig {
    int canvas = 64;       // square canvas
    int square_size = 16;
    int square_gap = 12;   // gap between the two squares
    int edits_min = 3, edits_max = 6;
    int rect_min = 4, rect_max = 12;
    int corner_offset = 4;

    static MaskConfig from_config(const Config& cfg);
    void validate() const;
};

inline constexpr double kAspectLo = 0.5;
inline constexpr double kAspectHi = 2.0;

struct MaskEdit {
    int point_id = 0;  // index into control_points()
    bool add = true;
    int rect_w = 0, rect_h = 0;
};

struct MaskSpec {
    std::vector<MaskEdit> edits;
};

/// The 12 control points of the left square: 4 corners, 4 edge midpoints,
/// 4 outward corner offsets. (row, col) pairs.
std::vector<std::pair<int, int>> control_points(const MaskConfig& cfg);

BinaryImage base_two_squares(const MaskConfig& cfg);
MaskSpec sample_mask_spec(uint64_t seed, const MaskConfig& cfg);
BinaryImage render_mask(const MaskSpec& spec, const MaskConfig& cfg);
BinaryImage sample_mask(uint64_t seed, const MaskConfig& cfg);

// ---------------------------------------------------------------- dataset

struct Dataset {
    std::vector<PairedSample> samples;
    std::vector<int> train_idx, test_idx;
    uint64_t seed = 0;
};

struct GenStats {
    long solver_steps = 0;     // total over all samples
    int solver_retries = 0;
    int unconverged = 0;       // samples that hit max_steps
    int duplicates = 0;        // identical combined images (litho)
};

/// Paired (initial trench cell | binarized steady state) samples. Sample i
/// uses seed base_seed + i; a diverging solve retries with a derived seed,
/// at most cfg.retries times. Samples are generated in parallel but stored
/// in index order, so output is independent of scheduling.
Dataset generate_diffusion_dataset(int count, uint64_t seed, const PhaseParams& solver_params,
                                   const TrenchConfig& cfg, int train_count, int threads,
                                   GenStats* stats = nullptr);

/// Paired (mask | litho_forward(mask)) samples; deterministic per seed.
Dataset generate_litho_dataset(int count, uint64_t seed, const LithoParams& litho_params,
                               const MaskConfig& cfg, int train_count, int threads,
                               GenStats* stats = nullptr);

/// Records of a dataset's combined images, for serialization.
std::vector<Field2D> dataset_records(const Dataset& ds);
Dataset dataset_from_records(std::vector<Field2D> records, int train_count, uint64_t seed);

}  // namespace lvae
