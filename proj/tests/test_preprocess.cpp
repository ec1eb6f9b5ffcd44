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

#include "anpr/preprocess.hpp"
#include "anpr/rng.hpp"
#include "oracles.hpp"

using namespace anpr;

namespace {

GrayImage random_gray(int w, int h, uint64_t seed) {
    GrayImage img(w, h);
    Rng rng(seed);
    for (auto& v : img.data()) v = static_cast<uint8_t>(rng.bounded(256));
    return img;
}

RgbImage random_rgb(int w, int h, uint64_t seed) {
    RgbImage img(w, h);
    Rng rng(seed);
    for (auto& v : img.data()) v = static_cast<uint8_t>(rng.bounded(256));
    return img;
}

BinaryImage random_bits(int w, int h, uint64_t seed) {
    BinaryImage img(w, h, Polarity::Ink);
    Rng rng(seed);
    for (auto& v : img.bits()) v = static_cast<uint8_t>(rng.bounded(2));
    return img;
}

// Size ladder reused by the equivalence sweeps; mixes tiny and lopsided.
struct Dim {
    int w, h;
};
const Dim kDims[] = {{1, 1}, {2, 3}, {5, 5}, {8, 8}, {13, 7},
                     {16, 16}, {7, 31}, {33, 9}, {24, 24}, {40, 18}};

}  // namespace

TEST_CASE("grayscale uses the integer weights") {
    RgbImage img(3, 1);
    uint8_t* p0 = img.pixel(0, 0);
    p0[0] = 255;  // pure red -> (299*255 + 500) / 1000 = 76
    uint8_t* p1 = img.pixel(1, 0);
    p1[1] = 255;  // pure green -> 150
    uint8_t* p2 = img.pixel(2, 0);
    p2[2] = 255;  // pure blue -> 29
    const GrayImage g = to_grayscale(img);
    CHECK(g.at(0, 0) == 76);
    CHECK(g.at(1, 0) == 150);
    CHECK(g.at(2, 0) == 29);
}

TEST_CASE("grayscale equals the reference everywhere") {
    for (uint64_t seed = 0; seed < 25; ++seed)
        for (const Dim d : {Dim{1, 1}, Dim{7, 3}, Dim{16, 11}, Dim{30, 20}}) {
            const RgbImage img = random_rgb(d.w, d.h, seed * 91 + d.w);
            CHECK(to_grayscale(img) == oracle::grayscale(img));
        }
}

TEST_CASE("bilateral equals the reference on 100+ seeded images") {
    PreprocessConfig cfg;
    int runs = 0;
    for (uint64_t seed = 0; seed < 11; ++seed)
        for (const Dim d : kDims) {
            const GrayImage img = random_gray(d.w, d.h, seed * 173 + d.w * 7 + d.h);
            REQUIRE(bilateral_filter(img, cfg) ==
                    oracle::bilateral(img, cfg.bilateral_kernel,
                                      cfg.bilateral_sigma_space,
                                      cfg.bilateral_sigma_range));
            ++runs;
        }
    CHECK(runs >= 100);
}

TEST_CASE("bilateral with other parameters still matches") {
    PreprocessConfig cfg;
    cfg.bilateral_kernel = 7;
    cfg.bilateral_sigma_space = 1.3;
    cfg.bilateral_sigma_range = 12.0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const GrayImage img = random_gray(19, 14, seed + 1000);
        CHECK(bilateral_filter(img, cfg) ==
              oracle::bilateral(img, 7, 1.3, 12.0));
    }
}

TEST_CASE("bilateral preserves constant images") {
    PreprocessConfig cfg;
    for (int v : {0, 1, 128, 254, 255}) {
        const GrayImage img(17, 9, static_cast<uint8_t>(v));
        CHECK(bilateral_filter(img, cfg) == img);
    }
}

TEST_CASE("bilateral rejects bad parameters") {
    PreprocessConfig cfg;
    const GrayImage img = random_gray(8, 8, 1);
    cfg.bilateral_kernel = 4;
    CHECK_THROWS_AS(bilateral_filter(img, cfg), SizeError);
    cfg.bilateral_kernel = 1;
    CHECK_THROWS_AS(bilateral_filter(img, cfg), SizeError);
    cfg = PreprocessConfig{};
    cfg.bilateral_sigma_range = 0.0;
    CHECK_THROWS_AS(bilateral_filter(img, cfg), SizeError);
}

TEST_CASE("clahe equals the reference on 100+ seeded images") {
    PreprocessConfig cfg;
    int runs = 0;
    for (uint64_t seed = 0; seed < 11; ++seed)
        for (const Dim d : kDims) {
            const GrayImage img = random_gray(d.w, d.h, seed * 311 + d.w + d.h);
            REQUIRE(clahe(img, cfg) == oracle::clahe(img, cfg.clahe_tile,
                                                     cfg.clahe_clip));
            ++runs;
        }
    CHECK(runs >= 100);
    // and with a different tile/clip
    cfg.clahe_tile = 4;
    cfg.clahe_clip = 3.5;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const GrayImage img = random_gray(29, 13, seed + 77);
        CHECK(clahe(img, cfg) == oracle::clahe(img, 4, 3.5));
    }
}

TEST_CASE("clahe maps constant images to themselves") {
    PreprocessConfig cfg;
    for (int v : {0, 37, 255}) {
        const GrayImage img(20, 12, static_cast<uint8_t>(v));
        CHECK(clahe(img, cfg) == img);
    }
}

TEST_CASE("binarize boundary: only strictly-below becomes ink") {
    GrayImage img(3, 1);
    img.at(0, 0) = 127;
    img.at(1, 0) = 128;
    img.at(2, 0) = 129;
    const BinaryImage b = binarize(img, 128);
    CHECK(b.at(0, 0) == 1);
    CHECK(b.at(1, 0) == 0);
    CHECK(b.at(2, 0) == 0);
    CHECK(b.polarity() == Polarity::Ink);
    CHECK(binarize(img, 0).count_set() == 0);
    CHECK(binarize(img, 256 - 1).count_set() == 3);
}

TEST_CASE("dilate equals the stamp reference on 100+ seeded images") {
    int runs = 0;
    for (uint64_t seed = 0; seed < 6; ++seed)
        for (const Dim d : kDims)
            for (int radius : {1, 2}) {
                const BinaryImage img = random_bits(d.w, d.h, seed * 41 + d.w);
                REQUIRE(dilate(img, radius, 1) == oracle::dilate(img, radius, 1));
                ++runs;
            }
    CHECK(runs >= 100);
}

TEST_CASE("dilate iterations compose") {
    const BinaryImage img = random_bits(23, 17, 9);
    CHECK(dilate(img, 1, 2) == dilate(dilate(img, 1, 1), 1, 1));
    CHECK(dilate(img, 1, 0) == img);
    CHECK(dilate(img, 1, 2) == oracle::dilate(img, 1, 2));
}

TEST_CASE("dilate grows monotonically") {
    const BinaryImage img = random_bits(20, 20, 3);
    const BinaryImage out = dilate(img, 1, 1);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            if (img.at(x, y)) CHECK(out.at(x, y) == 1);
}

TEST_CASE("preprocess equals its spelled-out stages") {
    PreprocessConfig cfg;
    const GrayImage img = random_gray(40, 30, 12);
    const PreprocessResult r = preprocess(img, cfg);
    const GrayImage f = bilateral_filter(img, cfg);
    const GrayImage e = clahe(f, cfg);
    const BinaryImage b = binarize(e, cfg.binarize_threshold);
    CHECK(r.binary == b);
    CHECK(r.dilated == dilate(b, cfg.dilate_radius, cfg.dilate_iterations));
}

TEST_CASE("preprocess on rgb goes through the same grayscale") {
    PreprocessConfig cfg;
    const RgbImage img = random_rgb(24, 18, 5);
    const PreprocessResult a = preprocess(img, cfg);
    const PreprocessResult b = preprocess(to_grayscale(img), cfg);
    CHECK(a.binary == b.binary);
    CHECK(a.dilated == b.dilated);
}
