#include "lvae/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace lvae {

AccuracyReport binary_accuracy(const BinaryImage& pred, const BinaryImage& target) {
    if (!pred.same_shape(target)) {
        throw DimensionError("binary_accuracy: " + std::to_string(pred.width) + "x" +
                             std::to_string(pred.height) + " vs " + std::to_string(target.width) +
                             "x" + std::to_string(target.height));
    }
    AccuracyReport report;
    report.total = static_cast<long>(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred.data[i] == target.data[i]) ++report.matched;
    }
    report.accuracy = static_cast<double>(report.matched) / report.total;
    return report;
}

RoundtripResult roundtrip_evaluate(const BinaryImage& design_half, const BinaryImage& target_half,
                                   const PhaseParams& params, int smooth_iters,
                                   double smooth_dt_factor) {
    if (!design_half.same_shape(target_half)) {
        throw DimensionError("roundtrip_evaluate: design/target dims differ");
    }
    PhaseParams p = params;
    p.nx = design_half.width;
    p.ny = design_half.height;
    p = p.resolved();

    PhaseFieldSolver solver(p);
    const Field2D phi0 = solver.smooth_constant_mobility(design_half.to_field(), smooth_iters,
                                                         p.dt * smooth_dt_factor);
    EvolveResult evolved = solver.evolve_to_steady(phi0);

    RoundtripResult result;
    result.simulated_final = binarize(phase_to_gray(evolved.phi), 0.5);
    result.accuracy = binary_accuracy(result.simulated_final, target_half);
    result.solver_steps = evolved.steps;
    result.converged = evolved.converged;
    return result;
}

namespace {

// BFS labelling of the void phase; x periodic, y not.
std::vector<int> void_labels(const BinaryImage& img, int& component_count) {
    const int w = img.width;
    const int h = img.height;
    std::vector<int> label(img.size(), -1);
    component_count = 0;
    for (size_t start = 0; start < img.size(); ++start) {
        if (img.data[start] != 0 || label[start] >= 0) continue;
        const int id = component_count++;
        std::queue<int> queue;
        queue.push(static_cast<int>(start));
        label[start] = id;
        while (!queue.empty()) {
            const int i = queue.front();
            queue.pop();
            const int r = i / w;
            const int c = i % w;
            const int neighbors[4][2] = {
                {r - 1, c}, {r + 1, c}, {r, (c + 1) % w}, {r, (c - 1 + w) % w}};
            for (const auto& [nr, nc] : neighbors) {
                if (nr < 0 || nr >= h) continue;
                const int j = nr * w + nc;
                if (img.data[j] == 0 && label[j] < 0) {
                    label[j] = id;
                    queue.push(j);
                }
            }
        }
    }
    return label;
}

}  // namespace

int count_void_components(const BinaryImage& img) {
    int count = 0;
    void_labels(img, count);
    return count;
}

bool has_enclosed_void(const BinaryImage& img) {
    int count = 0;
    const std::vector<int> label = void_labels(img, count);
    if (count == 0) return false;
    // components touching the top row are the open surface band
    std::vector<char> open(count, 0);
    for (int c = 0; c < img.width; ++c) {
        if (img.at(0, c) == 0) open[label[c]] = 1;
    }
    for (int id = 0; id < count; ++id) {
        if (!open[id]) return true;
    }
    return false;
}

std::vector<int> surface_profile(const BinaryImage& cell) {
    std::vector<int> profile(cell.width, cell.height);
    for (int c = 0; c < cell.width; ++c) {
        for (int r = 0; r < cell.height; ++r) {
            if (cell.at(r, c)) {
                profile[c] = r;
                break;
            }
        }
    }
    return profile;
}

TrenchLikeReport analyze_trench_like(const BinaryImage& cell, const TrenchLikeOptions& opt) {
    TrenchLikeReport report;
    const int w = cell.width;
    const int h = cell.height;
    const std::vector<int> profile = surface_profile(cell);

    for (int c = 0; c < w; ++c) {
        if (profile[c] >= h) {
            report.reason = "empty column";
            return report;
        }
    }
    const int baseline = *std::min_element(profile.begin(), profile.end());
    if (baseline < 1) {
        report.reason = "solid reaches the top edge";
        return report;
    }

    // penalty for anything that is not "void above the profile, solid below"
    long violations = 0;
    for (int c = 0; c < w; ++c) {
        for (int r = profile[c]; r < h; ++r) {
            if (!cell.at(r, c)) ++violations;
        }
    }
    if (violations > opt.max_violation_frac * static_cast<double>(cell.size())) {
        report.reason = "void pockets below the surface";
        return report;
    }

    // depressions: maximal runs of columns at least min_trench_depth below
    // the baseline (x treated as non-periodic: generated trenches never
    // wrap the seam)
    struct Run {
        int begin, end;  // [begin, end)
    };
    std::vector<Run> runs;
    int c = 0;
    while (c < w) {
        if (profile[c] - baseline >= opt.min_trench_depth) {
            int begin = c;
            while (c < w && profile[c] - baseline >= opt.min_trench_depth) ++c;
            runs.push_back({begin, c});
        } else {
            ++c;
        }
    }
    report.trench_count = static_cast<int>(runs.size());
    if (runs.empty()) {
        report.reason = "no surface depression";
        return report;
    }
    if (static_cast<int>(runs.size()) > opt.max_trenches) {
        report.reason = "too many depressions";
        return report;
    }

    for (const Run& run : runs) {
        const int width = run.end - run.begin;
        if (width < opt.min_trench_width) {
            report.reason = "depression narrower than minimum";
            return report;
        }
        // rectangular-ish: most columns near the run's median depth
        std::vector<int> depths;
        for (int i = run.begin; i < run.end; ++i) depths.push_back(profile[i] - baseline);
        std::vector<int> sorted = depths;
        std::sort(sorted.begin(), sorted.end());
        const int median = sorted[sorted.size() / 2];
        const double tol = std::max(2.0, opt.rect_tolerance * median);
        int conforming = 0;
        for (int d : depths) {
            if (std::abs(d - median) <= tol) ++conforming;
        }
        if (conforming < opt.rect_min_conforming * width) {
            report.reason = "depression is not rectangular";
            return report;
        }
    }

    report.trench_like = true;
    return report;
}

}  // namespace lvae
