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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anpr/classify.hpp"
#include "anpr/image.hpp"
#include "anpr/locate.hpp"
#include "anpr/preprocess.hpp"
#include "anpr/segment.hpp"

namespace anpr {

enum class ClassifierKind : uint8_t { forest, knn };

struct PipelineConfig {
    PreprocessConfig preprocess;
    LocateConfig locate;
    SegmentConfig segment;
    ClassifierKind classifier = ClassifierKind::forest;
    // When set, these override the thresholds stored in the model file.
    std::optional<int> t_c;
    std::optional<double> t_s;
    std::optional<double> p_e;
    uint64_t seed = 0;

    void validate() const;
};

struct StageTimings {
    double preprocess_ms = 0;
    double locate_ms = 0;
    double segment_ms = 0;
    double classify_ms = 0;
    double total_ms = 0;
};

struct PlateReading {
    std::string text;  // accepted labels, left to right
    std::vector<std::pair<BoundingBox, Prediction>> per_char;  // image coords
    BoundingBox plate_box;
    StageTimings timings;
};

/// When present, recognize drops intermediate artifacts into `dir` as
/// <stem>.<stage>.(pgm|pbm|txt): gray, filtered, equalized, binary,
/// dilated, edges, plate, stripped, chars, projections.
struct DebugOptions {
    std::string dir;
    std::string stem;
};

/// The full chain: preprocess, vertical edges of the dilated image, plate
/// localization and extraction, row stripping, character splitting, glyph
/// normalization, prediction. Rejected glyphs appear in per_char but not
/// in text. Unusable frames throw NoEdgesError or EmptyPlateError; the
/// CLI turns those into its "no plate found" result.
PlateReading recognize(const GrayImage& img, const Model& model,
                       const PipelineConfig& cfg,
                       const std::optional<DebugOptions>& debug = {});
PlateReading recognize(const RgbImage& img, const Model& model,
                       const PipelineConfig& cfg,
                       const std::optional<DebugOptions>& debug = {});

/// Positional alignment: both box lists are ordered left to right and the
/// k-th prediction pairs with the k-th ground-truth character. A pair
/// scores when its prediction is accepted with the true label;
/// substitutions and rejections of real characters simply fail to score.
/// Accepted boxes beyond the ground-truth count are spurious and subtract
/// one point each: accuracy = max(0, correct - spurious) / total_truth.
struct AccuracyCount {
    int correct = 0;
    int spurious = 0;
    int total_truth = 0;
};
AccuracyCount score_reading(const PlateReading& reading,
                            const std::string& truth_text,
                            const std::vector<BoundingBox>& truth_boxes);

}  // namespace anpr
