#pragma once

#include "lvae/field.hpp"
#include "lvae/phase_field.hpp"

namespace lvae {

struct AccuracyReport {
    double accuracy = 0.0;  // matched / total
    long matched = 0;
    long total = 0;
};

/// Fraction of pixels where the two binary images agree.
AccuracyReport binary_accuracy(const BinaryImage& pred, const BinaryImage& target);

struct RoundtripResult {
    AccuracyReport accuracy;
    long solver_steps = 0;
    bool converged = false;
    BinaryImage simulated_final;
};

/// The full physics check of a designed initial layout: smooth with
/// constant mobility, evolve to steady state, binarize, compare against
/// the target final shape.
RoundtripResult roundtrip_evaluate(const BinaryImage& design_half, const BinaryImage& target_half,
                                   const PhaseParams& params, int smooth_iters,
                                   double smooth_dt_factor);

/// 4-connectivity component count of the void (0) phase; x wraps
/// periodically, y does not.
int count_void_components(const BinaryImage& img);

/// True iff some void region is not connected to the top row's void band
/// (i.e. the structure encloses a cavity).
bool has_enclosed_void(const BinaryImage& img);

/// Scanline classifier for "trench-like" initial layouts: a single solid
/// slab whose top surface carries 1..max_trenches roughly rectangular
/// depressions. The thresholds below are fixed so the check is
/// reproducible.
struct TrenchLikeOptions {
    int max_trenches = 3;
    int min_trench_width = 2;
    int min_trench_depth = 3;      // px below the baseline surface
    double max_violation_frac = 0.01;  // void pixels below the surface profile
    double rect_tolerance = 0.25;  // allowed per-column depth deviation (of depth)
    double rect_min_conforming = 0.75;
};

struct TrenchLikeReport {
    bool trench_like = false;
    int trench_count = 0;
    std::string reason;  // first failed criterion, empty when trench_like
};

TrenchLikeReport analyze_trench_like(const BinaryImage& cell, const TrenchLikeOptions& opt = {});

/// Baseline surface row (minimum first-solid row over columns) and the
/// per-column first-solid profile; H means an empty column.
std::vector<int> surface_profile(const BinaryImage& cell);

}  // namespace lvae
