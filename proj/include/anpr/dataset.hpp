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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "anpr/classify.hpp"
#include "anpr/image.hpp"
#include "anpr/rng.hpp"

namespace anpr {

// Symbols beyond the classifier alphabet. SPECIAL_A is a sparse blot
// (caught by the ink-count gate), SPECIAL_B a dense emblem (caught by the
// confidence/distance gate). Neither ever appears in training labels.
inline const std::string kSpecialA = "SPECIAL_A";
inline const std::string kSpecialB = "SPECIAL_B";

struct GlyphAtlas {
    // "0".."9", "A".."Z", SPECIAL_A, SPECIAL_B -> native bitmap (INK).
    std::map<std::string, BinaryImage> glyphs;
    const BinaryImage& get(const std::string& symbol) const;
};

/// Read atlas/<SYMBOL>.pbm files. Throws when any of the 36 real classes
/// is missing.
GlyphAtlas load_atlas(const std::string& dir);

struct AugmentSpec {
    int shift = 2;         // max |dx|, |dy|
    double noise_p = 0.02; // per-pixel flip probability
    double bold_p = 0.2;   // probability of one extra dilation
    uint64_t seed = 0;
};

/// Atlas bitmap -> random shift on a padded canvas -> optional single
/// dilation -> per-pixel flips -> tight crop to the ink extent -> 20x20.
/// The tight crop keeps training glyphs aligned with segmentation output,
/// which also produces tight character boxes. Draws consume rng in that
/// fixed order; a stage whose parameter is zero draws nothing.
GlyphSample render_glyph(const GlyphAtlas& atlas, const std::string& symbol,
                         const AugmentSpec& aug, Rng& rng);

struct SceneSpec {
    std::string text;  // 5-8 symbols from the classifier alphabet
    int width = 640;
    int height = 480;
    BoundingBox plate_box;     // must contain the rendered text
    double clutter = 0.5;      // [0, 1]; scales bar and blob counts
    double gain = 1.0;         // applied as v*gain + bias before noise
    double bias = 0.0;
    double noise_sigma = 4.0;  // Gaussian, per pixel
    uint64_t seed = 0;
};

struct SceneTruth {
    std::string text;
    BoundingBox plate_box;
    std::vector<BoundingBox> char_boxes;  // tight ink extents, image coords
};

struct Scene {
    GrayImage image;
    SceneTruth truth;
};

/// Pixel size of the plate rectangle needed for `text`, including margins.
/// Placement is up to the caller.
BoundingBox plate_extent(const GlyphAtlas& atlas, const std::string& text);

/// Bright plate with dark glyphs over a mid-gray background, full-width
/// dark horizontal bars (which must excite no vertical-edge response) and
/// dark blobs kept clear of the plate, then gain/bias and Gaussian noise.
/// Throws LayoutError when the text does not fit the plate box.
Scene render_scene(const GlyphAtlas& atlas, const SceneSpec& spec, Rng& rng);
Scene render_scene(const GlyphAtlas& atlas, const SceneSpec& spec);

struct LabeledGlyph {
    GlyphSample sample;  // sample.label set only for the 36 real classes
    std::string symbol;  // "0".."Z", SPECIAL_A, or SPECIAL_B
};

struct DatasetSplit {
    std::vector<LabeledGlyph> train;
    std::vector<LabeledGlyph> validation;
    std::vector<LabeledGlyph> test;
};

/// Per real class: round(n*220/350) training and round(n*100/350) test
/// samples, remainder validation. Specials go entirely to validation,
/// where calibration needs them. Deterministic in `seed`.
DatasetSplit build_split(const GlyphAtlas& atlas, int per_class,
                         const AugmentSpec& aug, uint64_t seed);

struct CalibrationReport {
    RejectionThresholds thresholds;
    int real_count = 0;
    int special_count = 0;
    int min_real_ink = 0;
    double real_accept_rate = 0.0;
    double special_reject_rate = 0.0;
};

/// t_c = floor(0.5 * min ink over real validation glyphs). p_e (forest) or
/// t_s (kNN) is then the loosest value that still rejects at least 95% of
/// the specials, placed half a quantum past the deciding sample so
/// comparisons are unambiguous. Throws CalibrationError when validation
/// lacks special or real glyphs.
CalibrationReport calibrate_thresholds(const Model& model,
                                       const std::vector<LabeledGlyph>& validation);

// Dataset directory layout:
//   glyphs/<LABEL>/<id>.pbm     20x20 samples, LABEL a symbol name
//   scenes/<id>.pgm             the rendered frame
//   scenes/<id>.truth           line 1: plate text
//                               line 2: plate box "x y w h"
//                               then one per-char box per line
void save_glyphs(const std::string& root, const DatasetSplit& split);
std::vector<LabeledGlyph> load_glyphs(const std::string& root);
DatasetSplit split_loaded(std::vector<LabeledGlyph> glyphs);

void save_scene(const std::string& root, const std::string& id, const Scene& scene);
SceneTruth load_truth(const std::string& path);
std::vector<std::string> list_scene_ids(const std::string& root);

}  // namespace anpr
