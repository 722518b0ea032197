#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lvae/datagen.hpp"
#include "lvae/evaluate.hpp"

using namespace lvae;

namespace {

BinaryImage random_binary(int w, int h, uint64_t seed) {
    std::mt19937_64 rng(seed);
    BinaryImage img(w, h);
    for (auto& v : img.data) v = rng() & 1;
    return img;
}

TrenchConfig desk_trenches() {
    TrenchConfig t;
    t.cell_width = 32;
    t.cell_height = 64;
    t.surface_row = 16;
    t.width_min = 3;
    t.width_max = 10;
    t.depth_min = 4;
    t.depth_max = 20;
    return t;
}

PhaseParams desk_params() {
    PhaseParams p;
    p.nx = 32;
    p.ny = 64;
    p.dt_scale = 5.0;
    p.max_steps = 60000;
    p.steady_tol = 5.0;
    return p;
}

}  // namespace

TEST_CASE("binary accuracy basics") {
    const BinaryImage img = random_binary(8, 8, 3);
    CHECK(binary_accuracy(img, img).accuracy == 1.0);

    BinaryImage flipped = img;
    for (auto& v : flipped.data) v = 1 - v;
    CHECK(binary_accuracy(img, flipped).accuracy == 0.0);

    BinaryImage half = img;
    for (size_t i = 0; i < half.size() / 2; ++i) half.data[i] = 1 - half.data[i];
    const AccuracyReport r = binary_accuracy(img, half);
    CHECK(r.accuracy == 0.5);
    CHECK(r.matched == 32);
    CHECK(r.total == 64);

    CHECK_THROWS_AS(binary_accuracy(img, random_binary(9, 8, 4)), DimensionError);
}

TEST_CASE("binary accuracy is symmetric and complement-invariant") {
    const BinaryImage a = random_binary(12, 7, 5);
    const BinaryImage b = random_binary(12, 7, 6);
    CHECK(binary_accuracy(a, b).accuracy == binary_accuracy(b, a).accuracy);
    BinaryImage ac = a, bc = b;
    for (auto& v : ac.data) v = 1 - v;
    for (auto& v : bc.data) v = 1 - v;
    CHECK(binary_accuracy(ac, bc).accuracy == binary_accuracy(a, b).accuracy);
}

TEST_CASE("connected components and enclosed voids") {
    // solid frame with a hole inside: enclosed
    BinaryImage img(8, 8, 1);
    img.at(4, 4) = 0;
    CHECK(count_void_components(img) == 1);
    CHECK(has_enclosed_void(img));

    // top band void connected to a trench: open
    BinaryImage cell(8, 8, 1);
    for (int c = 0; c < 8; ++c) cell.at(0, c) = 0;
    cell.at(1, 3) = 0;
    cell.at(2, 3) = 0;
    CHECK(count_void_components(cell) == 1);
    CHECK(!has_enclosed_void(cell));

    // both: open band plus a buried bubble
    cell.at(5, 6) = 0;
    CHECK(count_void_components(cell) == 2);
    CHECK(has_enclosed_void(cell));

    // x wraps periodically: a void strip crossing the seam is one component
    BinaryImage wrap(8, 4, 1);
    wrap.at(2, 0) = 0;
    wrap.at(2, 7) = 0;
    CHECK(count_void_components(wrap) == 1);
}

TEST_CASE("trench-likeness accepts generated cells and rejects junk") {
    const TrenchConfig cfg = desk_trenches();
    int ok = 0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        const TrenchLikeReport r = analyze_trench_like(sample_trench_cell(seed, cfg));
        if (r.trench_like) ++ok;
    }
    CHECK(ok == 200);

    // random noise is not trench-like
    CHECK(!analyze_trench_like(random_binary(32, 64, 11)).trench_like);
    // a flat slab with no trench is not trench-like (no depression)
    TrenchConfig flat_cfg = cfg;
    const BinaryImage flat = render_trench_cell(TrenchSpec{}, flat_cfg);
    const TrenchLikeReport flat_report = analyze_trench_like(flat);
    CHECK(!flat_report.trench_like);
    CHECK(flat_report.reason == "no surface depression");
    // an empty image is not trench-like
    CHECK(!analyze_trench_like(BinaryImage(32, 64, 0)).trench_like);
    // four separate trenches exceed the 1..3 budget
    TrenchSpec four;
    four.trenches = {{1, 3, 8}, {9, 3, 8}, {17, 3, 8}, {25, 3, 8}};
    TrenchConfig wide = cfg;
    const TrenchLikeReport too_many = analyze_trench_like(render_trench_cell(four, wide));
    CHECK(!too_many.trench_like);
    CHECK(too_many.reason == "too many depressions");
}

TEST_CASE("roundtrip of a freshly generated pair reproduces the stored final") {
    const TrenchConfig cfg = desk_trenches();
    const PhaseParams params = desk_params();
    const Dataset ds = generate_diffusion_dataset(2, 777, params, cfg, 2, 2);

    const BinaryImage design = binarize(ds.samples[0].initial(), 0.5);
    const BinaryImage target = binarize(ds.samples[0].final_shape(), 0.5);
    const RoundtripResult r = roundtrip_evaluate(design, target, params, params.smooth_iters,
                                                 params.smooth_dt_factor);
    // identical protocol and deterministic solver: exact reproduction
    CHECK(r.accuracy.accuracy > 0.97);
}

TEST_CASE("all-void design scores the target's background fraction") {
    const TrenchConfig cfg = desk_trenches();
    const PhaseParams params = desk_params();
    const BinaryImage target = sample_trench_cell(5, cfg);

    const BinaryImage empty(cfg.cell_width, cfg.cell_height, 0);
    // an all-void initial stays all-void under evolution
    const RoundtripResult r =
        roundtrip_evaluate(empty, target, params, params.smooth_iters, params.smooth_dt_factor);
    long void_pixels = 0;
    for (uint8_t v : target.data) void_pixels += v == 0;
    CHECK(r.accuracy.accuracy ==
          doctest::Approx(static_cast<double>(void_pixels) / target.size()).epsilon(1e-12));
}
