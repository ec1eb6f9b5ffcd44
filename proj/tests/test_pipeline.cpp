// Copyright 2026-present the anpr project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "anpr/dataset.hpp"
#include "anpr/netpbm.hpp"
#include "anpr/pipeline.hpp"

using namespace anpr;
namespace fs = std::filesystem;

namespace {

const GlyphAtlas& atlas() {
    static const GlyphAtlas a = load_atlas(ANPR_ATLAS_DIR);
    return a;
}

/// One small forest shared across test cases; training is the slow part.
const Model& forest_model() {
    static const Model m = [] {
        const DatasetSplit s = build_split(atlas(), 20, AugmentSpec{}, 404);
        std::vector<LabeledVector> train;
        for (const auto& g : s.train)
            train.push_back({featurize(g.sample),
                             static_cast<uint8_t>(label_index(g.symbol[0]))});
        Model model =
            Model(train_forest(train, 30, 20, 9, RejectionThresholds{}, 1));
        set_model_thresholds(model,
                             calibrate_thresholds(model, s.validation).thresholds);
        return model;
    }();
    return m;
}

const Model& knn_model() {
    static const Model m = [] {
        const DatasetSplit s = build_split(atlas(), 20, AugmentSpec{}, 404);
        std::vector<LabeledVector> train;
        for (const auto& g : s.train)
            train.push_back({featurize(g.sample),
                             static_cast<uint8_t>(label_index(g.symbol[0]))});
        Model model = Model(make_knn(train, 3, RejectionThresholds{}));
        set_model_thresholds(model,
                             calibrate_thresholds(model, s.validation).thresholds);
        return model;
    }();
    return m;
}

Scene make_scene(const std::string& text, uint64_t seed, double clutter = 0.4) {
    SceneSpec spec;
    spec.text = text;
    const BoundingBox extent = plate_extent(atlas(), text);
    Rng rng(seed);
    spec.plate_box = {
        static_cast<int>(rng.bounded(static_cast<uint64_t>(640 - extent.w))),
        static_cast<int>(rng.bounded(static_cast<uint64_t>(480 - extent.h))),
        extent.w, extent.h};
    spec.clutter = clutter;
    spec.seed = seed * 1315423911u + 1;
    return render_scene(atlas(), spec);
}

std::string accepted_text(const PlateReading& r) { return r.text; }

}  // namespace

TEST_CASE("recognize reads a clean plate verbatim") {
    const Scene scene = make_scene("XJ42PQ07", 1, 0.0);
    PipelineConfig cfg;
    const PlateReading r = recognize(scene.image, forest_model(), cfg);
    CHECK(accepted_text(r) == scene.truth.text);
    REQUIRE(r.per_char.size() == scene.truth.char_boxes.size());
    // located box must cover the glyphs it claims to read
    for (size_t i = 0; i < r.per_char.size(); ++i) {
        CHECK(r.per_char[i].first.w > 0);
        CHECK(std::holds_alternative<Accepted>(r.per_char[i].second));
    }
    CHECK(r.plate_box.area() > 0);
    CHECK(r.timings.total_ms > 0.0);
    CHECK(r.timings.total_ms >= r.timings.classify_ms);  // part vs whole
}

TEST_CASE("recognize reads through moderate clutter") {
    const Scene scene = make_scene("B61MWD", 7, 0.5);
    PipelineConfig cfg;
    const PlateReading r = recognize(scene.image, forest_model(), cfg);
    CHECK(accepted_text(r) == scene.truth.text);
}

TEST_CASE("knn pipeline agrees on an easy plate") {
    const Scene scene = make_scene("C3P0", 21, 0.2);
    PipelineConfig cfg;
    cfg.classifier = ClassifierKind::knn;
    const PlateReading r = recognize(scene.image, knn_model(), cfg);
    CHECK(accepted_text(r) == scene.truth.text);
}

TEST_CASE("rgb input matches its grayscale conversion") {
    const Scene scene = make_scene("W88Z", 33, 0.3);
    RgbImage rgb(scene.image.width(), scene.image.height());
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x) {
            const uint8_t v = scene.image.at(x, y);
            uint8_t* px = rgb.pixel(x, y);
            px[0] = v;
            px[1] = v;
            px[2] = v;
        }
    PipelineConfig cfg;
    const PlateReading a = recognize(scene.image, forest_model(), cfg);
    const PlateReading b = recognize(rgb, forest_model(), cfg);
    CHECK(a.text == b.text);
    CHECK(a.plate_box == b.plate_box);
}

TEST_CASE("featureless input raises NoEdgesError") {
    GrayImage flat(640, 480);
    std::fill(flat.data().begin(), flat.data().end(), uint8_t{200});
    PipelineConfig cfg;
    CHECK_THROWS_AS(recognize(flat, forest_model(), cfg), NoEdgesError);
}

TEST_CASE("an unknown emblem on the plate is rejected, not read") {
    // widen the plate and paint the hatched emblem into the spare room so
    // segmentation finds one extra column band
    SceneSpec spec;
    spec.text = "AU7H";
    const BoundingBox extent = plate_extent(atlas(), spec.text);
    spec.plate_box = {180, 200, extent.w + 18, extent.h};
    spec.clutter = 0.0;
    spec.noise_sigma = 0.0;
    spec.seed = 3;
    Scene scene = render_scene(atlas(), spec);
    const BinaryImage& emblem = atlas().get(kSpecialB);
    const int ex = spec.plate_box.x + extent.w + 1;
    const int ey = spec.plate_box.y + 5;
    for (int y = 0; y < emblem.height(); ++y)
        for (int x = 0; x < emblem.width(); ++x)
            if (emblem.at(x, y)) scene.image.at(ex + x, ey + y) = 12;

    PipelineConfig cfg;
    const PlateReading r = recognize(scene.image, forest_model(), cfg);
    CHECK(r.text == spec.text);
    REQUIRE(r.per_char.size() == spec.text.size() + 1);
    CHECK(!std::holds_alternative<Accepted>(r.per_char.back().second));
}

TEST_CASE("threshold overrides flow through the config") {
    const Scene scene = make_scene("Y2K", 44, 0.0);
    PipelineConfig cfg;
    cfg.t_c = 1000000;  // nothing has that much ink
    Model strict = forest_model();
    RejectionThresholds t = model_thresholds(strict);
    t.t_c = *cfg.t_c;
    set_model_thresholds(strict, t);
    const PlateReading r = recognize(scene.image, strict, PipelineConfig{});
    CHECK(r.text.empty());
    REQUIRE(!r.per_char.empty());
    for (const auto& [box, pred] : r.per_char)
        CHECK(std::holds_alternative<RejectedClassA>(pred));
}

TEST_CASE("score_reading counts aligned matches and penalizes extras") {
    PlateReading r;
    const BoundingBox bx{0, 0, 5, 5};
    auto acc = [&](char c, int x) {
        r.per_char.push_back({BoundingBox{x, 0, 5, 5},
                              Prediction(Accepted{c, 0.9})});
    };
    acc('A', 0);
    acc('B', 10);
    acc('C', 20);
    std::vector<BoundingBox> truth = {{0, 0, 5, 5}, {10, 0, 5, 5}, {20, 0, 5, 5}};

    AccuracyCount s = score_reading(r, "ABC", truth);
    CHECK(s.correct == 3);
    CHECK(s.spurious == 0);
    CHECK(s.total_truth == 3);

    s = score_reading(r, "AXC", truth);
    CHECK(s.correct == 2);

    // a rejected prediction is not correct but also not spurious
    r.per_char[1].second = Prediction(RejectedClassB{});
    s = score_reading(r, "ABC", truth);
    CHECK(s.correct == 2);
    CHECK(s.spurious == 0);

    // accepted boxes beyond the truth count are spurious
    r.per_char[1].second = Prediction(Accepted{'B', 0.9});
    acc('D', 30);
    s = score_reading(r, "ABC", truth);
    CHECK(s.correct == 3);
    CHECK(s.spurious == 1);

    // alignment is left-to-right regardless of emission order
    PlateReading swapped;
    swapped.per_char.push_back({BoundingBox{10, 0, 5, 5},
                                Prediction(Accepted{'B', 0.9})});
    swapped.per_char.push_back({BoundingBox{0, 0, 5, 5},
                                Prediction(Accepted{'A', 0.9})});
    s = score_reading(swapped, "AB", {{0, 0, 5, 5}, {10, 0, 5, 5}});
    CHECK(s.correct == 2);

    // fewer predictions than truth: missing tail is simply not correct
    PlateReading shy;
    shy.per_char.push_back({bx, Prediction(Accepted{'A', 0.9})});
    s = score_reading(shy, "AB", {{0, 0, 5, 5}, {10, 0, 5, 5}});
    CHECK(s.correct == 1);
    CHECK(s.total_truth == 2);

    CHECK_THROWS_AS(score_reading(shy, "AB", {{0, 0, 5, 5}}), SizeError);
}

TEST_CASE("debug directory captures every stage") {
    const Scene scene = make_scene("R2D2", 77, 0.3);
    const fs::path dir = fs::temp_directory_path() / "anpr_debug_stages";
    fs::remove_all(dir);
    fs::create_directories(dir);
    PipelineConfig cfg;
    DebugOptions dbg;
    dbg.dir = dir.string();
    dbg.stem = "case";
    const PlateReading r = recognize(scene.image, forest_model(), cfg, dbg);
    for (const char* name :
         {"case.gray.pgm", "case.filtered.pgm", "case.equalized.pgm",
          "case.binary.pbm", "case.dilated.pbm", "case.edges.pbm",
          "case.plate.pbm", "case.stripped.pbm", "case.chars.txt",
          "case.projections.txt"}) {
        INFO(name);
        CHECK(fs::exists(dir / name));
    }
    size_t crops = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string stem = e.path().filename().string();
        if (stem.find("case.char") == 0 && stem.find(".pbm") != std::string::npos)
            ++crops;
    }
    CHECK(crops == r.per_char.size());
    // stage dumps parse back as valid images
    const NetpbmImage edges = read_netpbm((dir / "case.edges.pbm").string());
    CHECK(std::holds_alternative<BinaryImage>(edges));
    fs::remove_all(dir);
}

TEST_CASE("config validation rejects nonsense values") {
    PipelineConfig cfg;
    cfg.preprocess.bilateral_kernel = 4;
    CHECK_THROWS_AS(cfg.validate(), SizeError);
    cfg = PipelineConfig{};
    cfg.locate.stride = 0;
    CHECK_THROWS_AS(cfg.validate(), SizeError);
    cfg = PipelineConfig{};
    cfg.segment.min_char_width = 0;
    CHECK_THROWS_AS(cfg.validate(), SizeError);
    cfg = PipelineConfig{};
    CHECK_NOTHROW(cfg.validate());
}
