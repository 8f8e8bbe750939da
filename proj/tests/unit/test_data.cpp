#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "oracles.hpp"

using namespace sketchnet;
using namespace sketchnet::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("sketchnet_data_" + std::to_string(std::random_device{}())))
    {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& bytes)
{
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

// Image with a Gaussian spot of width ~1 px at each point.
TensorF spots(std::size_t h, std::size_t w, std::initializer_list<Point> points)
{
    TensorF img(Shape{1, h, w});
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            float v = 0.0f;
            for (const auto& p : points) {
                const double dx = static_cast<double>(j) - p.x;
                const double dy = static_cast<double>(i) - p.y;
                v += static_cast<float>(255.0 * std::exp(-(dx * dx + dy * dy) / 2.0));
            }
            img(0, i, j) = v;
        }
    }
    return img;
}

// Intensity-weighted centroid within `radius` of `around`.
Point centroid(const TensorF& img, Point around, double radius)
{
    double sx = 0.0;
    double sy = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < img.height(); ++i) {
        for (std::size_t j = 0; j < img.width(); ++j) {
            const double dx = static_cast<double>(j) - around.x;
            const double dy = static_cast<double>(i) - around.y;
            if (dx * dx + dy * dy > radius * radius) continue;
            const double v = img(0, i, j);
            sx += v * static_cast<double>(j);
            sy += v * static_cast<double>(i);
            total += v;
        }
    }
    return {sx / total, sy / total};
}

}  // namespace

TEST_CASE("PGM and PPM loading")
{
    TempDir dir;
    write_file(dir.path / "a.pgm", std::string("P5\n2 2\n255\n") + std::string("\x00\x55\xaa\xff", 4));
    const auto gray = load_image(dir.path / "a.pgm");
    CHECK(gray.shape() == Shape{1, 2, 2});
    CHECK(gray.values() == std::vector<float>{0.0f, 85.0f, 170.0f, 255.0f});

    write_file(dir.path / "c.pgm", std::string("P5 # comment\n# another\n2 1 255\n") + std::string("\x01\x02", 2));
    CHECK(load_image(dir.path / "c.pgm").values() == std::vector<float>{1.0f, 2.0f});

    write_file(dir.path / "b.ppm", std::string("P6\n1 2\n255\n") + std::string("\x0a\x14\x1e\x28\x32\x3c", 6));
    const auto rgb = load_image(dir.path / "b.ppm");
    CHECK(rgb.shape() == Shape{3, 2, 1});
    CHECK(rgb(0, 0, 0) == 10.0f);
    CHECK(rgb(1, 0, 0) == 20.0f);
    CHECK(rgb(2, 0, 0) == 30.0f);
    CHECK(rgb(0, 1, 0) == 40.0f);
    CHECK(rgb(2, 1, 0) == 60.0f);

    write_file(dir.path / "w.pgm", std::string("P5\n1 1\n65535\n") + std::string("\xff\xff", 2));
    CHECK(load_image(dir.path / "w.pgm").values()[0] == doctest::Approx(255.0f));
}

TEST_CASE("image loading errors")
{
    TempDir dir;
    CHECK_THROWS_AS(load_image(dir.path / "nope.pgm"), FileNotFoundError);
    write_file(dir.path / "empty.pgm", "");
    CHECK_THROWS_AS(load_image(dir.path / "empty.pgm"), CorruptDataError);
    write_file(dir.path / "ascii.pgm", "P2\n1 1\n255\n7\n");
    CHECK_THROWS_AS(load_image(dir.path / "ascii.pgm"), UnsupportedFormatError);
    write_file(dir.path / "png.png", "\x89PNG\r\n");
    CHECK_THROWS_AS(load_image(dir.path / "png.png"), UnsupportedFormatError);
    write_file(dir.path / "short.pgm", std::string("P5\n2 2\n255\n") + std::string("\x00\x01", 2));
    CHECK_THROWS_AS(load_image(dir.path / "short.pgm"), CorruptDataError);
}

TEST_CASE("image save and reload")
{
    TempDir dir;
    std::mt19937_64 rng(1);
    TensorF img = random_tensor<float>(Shape{3, 7, 5}, rng, 0.0, 255.0);
    for (auto& v : img.data()) v = std::round(v);
    save_image(img, dir.path / "x.ppm");
    CHECK(load_image(dir.path / "x.ppm") == img);

    CHECK(to_byte(-3.0f) == 0);
    CHECK(to_byte(300.0f) == 255);
    CHECK(to_byte(2.5f) == 2);
    CHECK(to_byte(3.5f) == 4);
    CHECK_THROWS_AS(save_image(TensorF(Shape{2, 2, 2}), dir.path / "bad.pgm"), DimensionError);
}

TEST_CASE("eye alignment with canonical eyes is the identity")
{
    std::mt19937_64 rng(2);
    const auto img = random_tensor<float>(Shape{3, 250, 200}, rng, 0.0, 255.0);
    const auto out = align_by_eyes(img, kCanonicalLeftEye, kCanonicalRightEye);
    REQUIRE(out.shape() == img.shape());
    for (std::size_t n = 0; n < img.size(); ++n) REQUIRE(std::abs(out.data()[n] - img.data()[n]) < 1e-3f);
}

TEST_CASE("eye alignment places the eyes on the canonical positions")
{
    const Point left{112.3, 151.8};
    const Point right{171.6, 139.2};
    const auto img = spots(320, 280, {left, right});
    const auto out = align_by_eyes(img, left, right);
    CHECK(out.shape() == Shape{1, kAlignedHeight, kAlignedWidth});
    const auto l = centroid(out, kCanonicalLeftEye, 6.0);
    const auto r = centroid(out, kCanonicalRightEye, 6.0);
    CHECK(std::hypot(l.x - kCanonicalLeftEye.x, l.y - kCanonicalLeftEye.y) <= 1.0);
    CHECK(std::hypot(r.x - kCanonicalRightEye.x, r.y - kCanonicalRightEye.y) <= 1.0);
}

TEST_CASE("swapping the eyes rotates the aligned face by 180 degrees")
{
    std::mt19937_64 rng(3);
    const auto img = random_tensor<float>(Shape{1, 300, 260}, rng, 0.0, 255.0);
    const Point a{101.0, 140.0};
    const Point b{162.0, 131.0};
    const auto out = align_by_eyes(img, a, b);
    const auto swapped = align_by_eyes(img, b, a);
    for (std::size_t r = 1; r < kAlignedHeight; ++r) {
        for (std::size_t c = 1; c < kAlignedWidth; ++c) {
            REQUIRE(std::abs(swapped(0, r, c) - out(0, kAlignedHeight - r, kAlignedWidth - c)) < 1e-2f);
        }
    }
}

TEST_CASE("eye alignment argument checks")
{
    const TensorF img(Shape{3, 100, 100});
    CHECK_THROWS_AS(align_by_eyes(img, {50, 50}, {50, 50}), ArgumentError);
    CHECK_THROWS_AS(align_by_eyes(img, {50, 50}, {150, 50}), ArgumentError);
}

TEST_CASE("crops")
{
    TensorF aligned(Shape{1, 250, 200});
    for (std::size_t i = 0; i < 250; ++i) {
        for (std::size_t j = 0; j < 200; ++j) aligned(0, i, j) = static_cast<float>(i * 1000 + j);
    }
    const auto photo = crop_center(aligned, kPhotoHeight, kPhotoWidth);
    CHECK(photo.shape() == Shape{1, 200, 155});
    CHECK(photo(0, 0, 0) == aligned(0, 25, 22));
    const auto sketch = crop_center(photo, kSketchHeight, kSketchWidth);
    CHECK(sketch.shape() == Shape{1, 188, 143});
    CHECK(sketch(0, 0, 0) == photo(0, 6, 6));
    CHECK(sketch(0, 187, 142) == photo(0, 193, 148));

    CHECK(crop(aligned, 3, 4, 2, 2)(0, 1, 1) == aligned(0, 4, 5));
    CHECK_THROWS_AS(crop(aligned, 249, 0, 2, 2), DimensionError);
    CHECK_THROWS_AS(crop_center(photo, 201, 10), DimensionError);
}

TEST_CASE("XY coordinate channels")
{
    const auto xy = add_xy_channels(TensorF(Shape{3, 200, 155}));
    REQUIRE(xy.shape() == Shape{5, 200, 155});
    CHECK(xy(3, 0, 0) == 0.0f);
    CHECK(xy(3, 199, 0) == doctest::Approx(255.0f));
    CHECK(xy(4, 0, 0) == 0.0f);
    CHECK(xy(4, 0, 154) == doctest::Approx(255.0f));
    CHECK(xy(4, 0, 77) == doctest::Approx(127.5f));
    CHECK((xy(3, 99, 0) + xy(3, 100, 0)) / 2.0f == doctest::Approx(127.5f));
    CHECK_THROWS_AS(add_xy_channels(TensorF(Shape{1, 4, 4})), DimensionError);

    const auto photo = TensorF(Shape{3, 4, 4}, 9.0f);
    CHECK(network_input(photo, false) == photo);
    CHECK(take_channels(network_input(photo, true), 3) == photo);
}

TEST_CASE("grayscale conversion")
{
    const TensorF red(Shape{3, 1, 1}, std::vector<float>{255.0f, 0.0f, 0.0f});
    CHECK(to_grayscale(red)(0, 0, 0) == doctest::Approx(76.245f));
    const TensorF white(Shape{3, 1, 1}, 255.0f);
    CHECK(to_grayscale(white)(0, 0, 0) == doctest::Approx(255.0f));
    CHECK(to_rgb(TensorF(Shape{1, 1, 1}, 4.0f)).shape() == Shape{3, 1, 1});
}

TEST_CASE("synthetic pairs")
{
    const auto ds = synth_pairs(7, 6);
    REQUIRE(ds.size() == 6);
    CHECK_NOTHROW(ds.validate());
    CHECK(ds.pairs[0].identity == "synth-0001");
    CHECK(ds.pairs[5].identity == "synth-0006");
    for (const auto& p : ds.pairs) {
        CHECK(p.photo.shape() == Shape{3, 200, 155});
        CHECK(p.sketch.shape() == Shape{1, 188, 143});
        CHECK(p.shrink() == 12);
        for (float v : p.photo.data()) REQUIRE(v == std::round(v));
        for (float v : p.sketch.data()) REQUIRE(v == std::round(v));
        CHECK(p.sketch == render_synthetic_sketch(p.photo));
    }

    const auto again = synth_pairs(7, 6);
    for (std::size_t n = 0; n < ds.size(); ++n) {
        CHECK(again.pairs[n].photo == ds.pairs[n].photo);
        CHECK(again.pairs[n].sketch == ds.pairs[n].sketch);
    }
    CHECK_FALSE(synth_pairs(8, 1).pairs[0].photo == ds.pairs[0].photo);
    CHECK_THROWS_AS(synth_pairs(7, 0), ArgumentError);

    // Each sketch is closer to the tone-mapped grayscale of its own photo than
    // to that of any other, so identities are separable by a plain distance.
    std::vector<TensorF> toned;
    for (const auto& p : ds.pairs) {
        TensorF g = crop_center(to_grayscale(p.photo), 188, 143);
        for (auto& v : g.data()) v = 0.75f * v + 64.0f;
        toned.push_back(g);
    }
    for (std::size_t q = 0; q < ds.size(); ++q) {
        const double own = pair_sqdist(ds.pairs[q].sketch, toned[q]);
        for (std::size_t g = 0; g < ds.size(); ++g) {
            if (g != q) CHECK(pair_sqdist(ds.pairs[q].sketch, toned[g]) > 4.0 * own);
        }
    }
}

TEST_CASE("dataset validation and cropping")
{
    auto ds = synth_pairs(3, 3);
    const auto cropped = crop_dataset(ds, 41, 41, 6);
    CHECK_NOTHROW(cropped.validate());
    for (std::size_t n = 0; n < cropped.size(); ++n) {
        const auto& p = cropped.pairs[n];
        CHECK(p.photo.shape() == Shape{3, 41, 41});
        CHECK(p.sketch.shape() == Shape{1, 35, 35});
        // Photo window starts at ((200-41)/2, (155-41)/2) = (79, 57); sketch at +3.
        CHECK(p.photo(1, 0, 0) == ds.pairs[n].photo(1, 79, 57));
        CHECK(p.sketch(0, 0, 0) == ds.pairs[n].sketch(0, 79 + 3 - 6, 57 + 3 - 6));
    }
    CHECK(take_subset(ds, 2).size() == 2);
    CHECK(take_subset(ds, 2).pairs[1].identity == ds.pairs[1].identity);
    CHECK_THROWS_AS(take_subset(ds, 4), ArgumentError);
    CHECK_THROWS_AS(crop_dataset(ds, 41, 41, 7), ArgumentError);

    auto dup = ds;
    dup.pairs[1].identity = dup.pairs[0].identity;
    CHECK_THROWS_AS(dup.validate(), ArgumentError);
    auto bright = ds;
    bright.pairs[0].photo(0, 0, 0) = 300.0f;
    CHECK_THROWS_AS(bright.validate(), ArgumentError);
    auto skewed = ds;
    skewed.pairs[0].sketch = TensorF(Shape{1, 188, 141});
    CHECK_THROWS_AS(skewed.validate(), DimensionError);
}

TEST_CASE("manifest round-trip and loading")
{
    TempDir dir;
    const auto ds = synth_pairs(5, 2);
    fs::create_directories(dir.path / "img");
    std::vector<ManifestRecord> records;
    for (const auto& p : ds.pairs) {
        save_image(p.photo, dir.path / "img" / (p.identity + ".ppm"));
        save_image(p.sketch, dir.path / "img" / (p.identity + ".pgm"));
        records.push_back({"img/" + p.identity + ".ppm", "img/" + p.identity + ".pgm", p.identity, {}, {}});
    }
    write_manifest(records, dir.path / "m.csv");
    const auto back = read_manifest(dir.path / "m.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].identity == "synth-0001");
    CHECK(back[0].photo == dir.path / "img" / "synth-0001.ppm");
    CHECK_FALSE(back[0].left_eye.has_value());

    const auto loaded = load_dataset(dir.path / "m.csv");
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.pairs[1].photo == ds.pairs[1].photo);
    CHECK(loaded.pairs[1].sketch == ds.pairs[1].sketch);

    write_file(dir.path / "eyes.csv", "# header\n\n/abs/p.ppm,/abs/s.pgm,id-1,75,125,125,125.5\n");
    const auto eyes = read_manifest(dir.path / "eyes.csv");
    REQUIRE(eyes.size() == 1);
    CHECK(eyes[0].photo == fs::path("/abs/p.ppm"));
    REQUIRE(eyes[0].right_eye.has_value());
    CHECK(eyes[0].right_eye->y == 125.5);

    write_file(dir.path / "bad.csv", "a.ppm,b.pgm\n");
    try {
        (void)read_manifest(dir.path / "bad.csv");
        FAIL("expected CorruptDataError");
    } catch (const CorruptDataError& e) {
        CHECK(std::string(e.what()).find(":1") != std::string::npos);
    }
    write_file(dir.path / "bad_eye.csv", "a.ppm,b.pgm,x,1,2,3,four\n");
    CHECK_THROWS_AS(read_manifest(dir.path / "bad_eye.csv"), CorruptDataError);
    CHECK_THROWS_AS(read_manifest(dir.path / "missing.csv"), FileNotFoundError);
}

TEST_CASE("pipeline geometry for raw inputs")
{
    std::mt19937_64 rng(4);
    const auto raw = random_tensor<float>(Shape{3, 250, 200}, rng, 0.0, 255.0);
    CHECK(prepare_photo(raw).shape() == Shape{3, 200, 155});
    CHECK(prepare_photo(raw, kCanonicalLeftEye, kCanonicalRightEye).shape() == Shape{3, 200, 155});
    CHECK(prepare_sketch(raw).shape() == Shape{1, 188, 143});
    CHECK(prepare_sketch(TensorF(Shape{1, 188, 143})).shape() == Shape{1, 188, 143});
    CHECK(prepare_photo(TensorF(Shape{1, 250, 200})).shape() == Shape{3, 200, 155});
}

TEST_CASE("architecture files")
{
    TempDir dir;
    write_file(dir.path / "net.arch", "# kernel out act\n3 8 relu\n\n3 4 relu  # middle\n1 1 none\n");
    const auto spec = load_spec_file(dir.path / "net.arch", 5);
    CHECK(spec.in_channels == 5);
    REQUIRE(spec.layers.size() == 3);
    CHECK(spec.layers[1].out_channels == 4);
    CHECK(spec.total_shrink() == 4);
    CHECK(resolve_architecture("small", 3) == builtin_spec("small", 3));
    CHECK(resolve_architecture((dir.path / "net.arch").string(), 5) == spec);

    write_file(dir.path / "bad.arch", "3 8 relu\n3 4 relu\n");
    CHECK_THROWS_AS(load_spec_file(dir.path / "bad.arch", 5), ArgumentError);
    write_file(dir.path / "junk.arch", "three 8 relu\n");
    CHECK_THROWS_AS(load_spec_file(dir.path / "junk.arch", 5), CorruptDataError);
    CHECK_THROWS_AS(resolve_architecture("not-a-net", 5), ArgumentError);
}
