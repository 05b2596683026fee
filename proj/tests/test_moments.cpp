#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "densenorm/json_io.hpp"
#include "densenorm/moments.hpp"
#include "densenorm/synthetic.hpp"

using namespace densenorm;

namespace {

Image patch_from(std::initializer_list<float> values, int h, int w) {
    Image img(h, w, 1);
    std::copy(values.begin(), values.end(), img.data.begin());
    return img;
}

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error to be thrown");
    return Errc::bad_config;
}

}  // namespace

TEST_CASE("patch statistics (population variance + epsilon under the root)") {
    const Image patch = patch_from({1, 3, 3, 5}, 2, 2);
    const ChannelMoments m = compute_moments(patch);
    CHECK(m.mean[0] == doctest::Approx(3.0).epsilon(1e-12));
    // sqrt(2 + 1e-5): population variance, not sample variance.
    CHECK(m.stddev[0] == doctest::Approx(std::sqrt(2.00001)).epsilon(1e-12));
    CHECK(m.stddev[0] == doctest::Approx(1.414217).epsilon(1e-6));

    const Image flat = patch_from({4, 4, 4, 4}, 2, 2);
    const ChannelMoments mf = compute_moments(flat, 1e-5);
    CHECK(mf.mean[0] == doctest::Approx(4.0));
    CHECK(mf.stddev[0] == doctest::Approx(std::sqrt(1e-5)).epsilon(1e-12));
}

TEST_CASE("per-channel statistics are independent") {
    Image patch(2, 2, 2);
    // channel 0 all zeros; channel 1 = {0,2,2,0}
    patch.at(1, 0, 0) = 0;
    patch.at(1, 0, 1) = 2;
    patch.at(1, 1, 0) = 2;
    patch.at(1, 1, 1) = 0;
    const ChannelMoments m = compute_moments(patch);
    CHECK(m.mean[0] == doctest::Approx(0.0));
    CHECK(m.stddev[0] == doctest::Approx(std::sqrt(1e-5)).epsilon(1e-12));
    CHECK(m.mean[1] == doctest::Approx(1.0));
    CHECK(m.stddev[1] == doctest::Approx(std::sqrt(1.00001)).epsilon(1e-12));
}

TEST_CASE("statistics floor: stddev >= sqrt(epsilon)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (int trial = 0; trial < 50; ++trial) {
        Image patch(6, 6, 2);
        for (auto& v : patch.data) v = dist(rng);
        const ChannelMoments m = compute_moments(patch, 1e-5);
        for (double s : m.stddev) CHECK(s >= std::sqrt(1e-5) - 1e-15);
    }
}

TEST_CASE("moment table is write-once and ordered") {
    const GridSpec g = make_grid(8, 8, 4);  // 2x2 patches
    MomentTable table(g);
    ChannelMoments m;
    m.mean = {0.5};
    m.stddev = {1.0};

    CHECK_FALSE(table.contains(PatchCoord{0, 0}));
    table.store(PatchCoord{0, 0}, m);
    CHECK(table.contains(PatchCoord{0, 0}));
    CHECK(table.at(PatchCoord{0, 0}).mean[0] == doctest::Approx(0.5));

    CHECK(code_of([&] { table.store(PatchCoord{0, 0}, m); }) == Errc::duplicate_write);
    CHECK(code_of([&] { table.store(PatchCoord{2, 0}, m); }) == Errc::out_of_grid);
    CHECK(code_of([&] { table.at(PatchCoord{1, 1}); }) == Errc::missing_entry);
}

TEST_CASE("missing neighbour is reported by its clamped coordinate") {
    const GridSpec g = make_grid(8, 8, 4);
    MomentTable table(g);
    ChannelMoments m;
    m.mean = {0.0};
    m.stddev = {1.0};
    table.store(PatchCoord{0, 0}, m);
    table.store(PatchCoord{1, 0}, m);
    table.store(PatchCoord{1, 1}, m);
    // right neighbour (0,1) never stored
    try {
        table.query_neighborhood(PatchCoord{0, 0});
        FAIL("expected MissingEntry");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_entry);
        CHECK(std::string(e.what()).find("(0,1)") != std::string::npos);
    }
}

TEST_CASE("neighbourhood clamps to the grid edge") {
    const GridSpec g = make_grid(12, 12, 4);  // 3x3 patches
    MomentTable table(g);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            ChannelMoments m;
            m.mean = {static_cast<double>(10 * c + r)};
            m.stddev = {1.0 + 0.1 * (3 * c + r)};
            table.store(PatchCoord{c, r}, m);
        }
    }

    SUBCASE("interior centre sees the raw 3x3 block") {
        const Neighborhood3x3 nb = table.query_neighborhood(PatchCoord{1, 1});
        CHECK(nb.mu_at(1, 1, 0) == doctest::Approx(11.0));
        CHECK(nb.mu_at(0, 0, 0) == doctest::Approx(0.0));
        CHECK(nb.mu_at(2, 2, 0) == doctest::Approx(22.0));
    }
    SUBCASE("corner centre replicates edge entries") {
        const Neighborhood3x3 nb = table.query_neighborhood(PatchCoord{0, 0});
        CHECK(nb.mu_at(1, 1, 0) == doctest::Approx(0.0));   // centre
        CHECK(nb.mu_at(0, 0, 0) == doctest::Approx(0.0));   // clamped to (0,0)
        CHECK(nb.mu_at(0, 1, 0) == doctest::Approx(0.0));   // clamped to (0,0)
        CHECK(nb.mu_at(1, 0, 0) == doctest::Approx(0.0));   // clamped to (0,0)
        CHECK(nb.mu_at(2, 2, 0) == doctest::Approx(11.0));  // true diagonal
        CHECK(nb.mu_at(0, 2, 0) == doctest::Approx(1.0));   // clamped row
    }
    SUBCASE("centre cell always equals the entry itself") {
        for (int c = 0; c < 3; ++c)
            for (int r = 0; r < 3; ++r)
                CHECK(table.query_neighborhood(PatchCoord{c, r}).mu_at(1, 1, 0) ==
                      doctest::Approx(10.0 * c + r));
    }
}

TEST_CASE("single-patch grid: all nine neighbourhood cells coincide") {
    const GridSpec g = make_grid(4, 4, 4);
    MomentTable table(g);
    ChannelMoments m;
    m.mean = {0.25, 0.75};
    m.stddev = {1.5, 2.5};
    table.store(PatchCoord{0, 0}, m);
    const Neighborhood3x3 nb = table.query_neighborhood(PatchCoord{0, 0});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(nb.mu_at(i, j, 0) == doctest::Approx(0.25));
            CHECK(nb.sigma_at(i, j, 1) == doctest::Approx(2.5));
        }
    }
}

// Re-derivation oracle: after filling a table from an image, every entry must
// equal the statistics computed directly from the raw patch.
TEST_CASE("table entries match direct patch statistics") {
    const Image image = make_noise_image(12, 20, 3, 99);
    const GridSpec g = make_grid(12, 20, 4);
    MomentTable table(g);
    for (long long i = 0; i < g.patch_count(); ++i) {
        const PatchCoord coord = coord_of(i, g);
        Image patch(4, 4, 3);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x)
                    patch.at(c, y, x) = image.at(c, coord.c * 4 + y, coord.r * 4 + x);
        table.store(coord, compute_moments(patch));
    }
    for (long long i = 0; i < g.patch_count(); ++i) {
        const PatchCoord coord = coord_of(i, g);
        Image patch(4, 4, 3);
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < 4; ++y)
                for (int x = 0; x < 4; ++x)
                    patch.at(c, y, x) = image.at(c, coord.c * 4 + y, coord.r * 4 + x);
        const ChannelMoments direct = compute_moments(patch);
        const ChannelMoments& stored = table.at(coord);
        for (int c = 0; c < 3; ++c) {
            CHECK(stored.mean[c] == direct.mean[c]);
            CHECK(stored.stddev[c] == direct.stddev[c]);
        }
    }
}

TEST_CASE("moment table JSON round trip") {
    const GridSpec g = make_grid(8, 12, 4);  // 2x3 patches
    MomentTable table(g);
    for (long long i = 0; i < g.patch_count(); ++i) {
        ChannelMoments m;
        m.mean = {0.1 * static_cast<double>(i), 0.2};
        m.stddev = {1.0 + 0.01 * static_cast<double>(i), 0.5};
        table.store(coord_of(i, g), m);
    }
    const nlohmann::json j = table_to_json(table);
    CHECK(j.contains("(1,2)"));
    CHECK(j.at("(0,0)").at("mean")[0] == doctest::Approx(0.0));

    const MomentTable restored = table_from_json(j, g);
    for (long long i = 0; i < g.patch_count(); ++i) {
        const PatchCoord coord = coord_of(i, g);
        CHECK(restored.at(coord).mean == table.at(coord).mean);
        CHECK(restored.at(coord).stddev == table.at(coord).stddev);
    }
}
