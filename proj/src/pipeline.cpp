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

#include "anpr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <string>

#include "anpr/netpbm.hpp"

namespace anpr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

struct DebugWriter {
    const std::optional<DebugOptions>& opt;

    std::string path(const char* stage, const char* ext) const {
        return (std::filesystem::path(opt->dir) / (opt->stem + "." + stage + ext))
            .string();
    }
    void gray(const char* stage, const GrayImage& img) const {
        if (opt) write_pgm(path(stage, ".pgm"), img);
    }
    void bits(const char* stage, const BinaryImage& img) const {
        if (opt) write_pbm(path(stage, ".pbm"), img);
    }
    void text(const char* stage, const std::string& body) const {
        if (!opt) return;
        const std::string p = path(stage, ".txt");
        std::FILE* f = std::fopen(p.c_str(), "wb");
        if (!f) throw IoError("cannot open '" + p + "' for writing");
        const size_t written = std::fwrite(body.data(), 1, body.size(), f);
        const bool ok = written == body.size() && std::fclose(f) == 0;
        if (!ok) throw IoError("short write to '" + p + "'");
    }
};

std::string join_counts(const std::vector<uint32_t>& counts) {
    std::string out;
    for (uint32_t c : counts) {
        if (!out.empty()) out += ' ';
        out += std::to_string(c);
    }
    return out;
}

}  // namespace

void PipelineConfig::validate() const {
    preprocess.validate();
    locate.validate();
    segment.validate();
    if (t_c && *t_c < 0) throw SizeError("t_c override must be >= 0");
    if (t_s && (*t_s < 0.0 || *t_s > kFeatureCount))
        throw SizeError("t_s override must be in [0, 400]");
    if (p_e && (*p_e < 0.0 || *p_e > 1.0))
        throw SizeError("p_e override must be in [0, 1]");
}

PlateReading recognize(const GrayImage& img, const Model& model,
                       const PipelineConfig& cfg,
                       const std::optional<DebugOptions>& debug) {
    cfg.validate();
    const DebugWriter dump{debug};
    if (debug) std::filesystem::create_directories(debug->dir);

    // Threshold overrides need a model copy; skipped entirely when unset.
    const Model* effective = &model;
    Model adjusted;
    if (cfg.t_c || cfg.t_s || cfg.p_e) {
        RejectionThresholds t = model_thresholds(model);
        if (cfg.t_c) t.t_c = *cfg.t_c;
        if (cfg.t_s) t.t_s = *cfg.t_s;
        if (cfg.p_e) t.p_e = *cfg.p_e;
        adjusted = model;
        set_model_thresholds(adjusted, t);
        effective = &adjusted;
    }

    PlateReading reading;
    const auto t0 = Clock::now();

    // Stage composition matches preprocess(); spelled out so the debug
    // dump can see the intermediates.
    GrayImage filtered = bilateral_filter(img, cfg.preprocess);
    GrayImage equalized = clahe(filtered, cfg.preprocess);
    BinaryImage binary = binarize(equalized, cfg.preprocess.binarize_threshold);
    BinaryImage dilated =
        dilate(binary, cfg.preprocess.dilate_radius, cfg.preprocess.dilate_iterations);
    const auto t1 = Clock::now();

    BinaryImage edges = sobel_vertical(dilated, cfg.locate.edge_threshold);
    reading.plate_box = locate_plate(edges, cfg.locate);
    BinaryImage plate = extract_plate(dilated, reading.plate_box);
    const auto t2 = Clock::now();

    StrippedPlate stripped = strip_noise_rows(plate);
    std::vector<BoundingBox> boxes = split_characters(stripped.image, cfg.segment);
    const auto t3 = Clock::now();

    for (const BoundingBox& b : boxes) {
        GlyphSample sample = normalize_glyph(crop(stripped.image, b));
        Prediction p = predict(*effective, sample);
        const BoundingBox image_box{reading.plate_box.x + b.x,
                                    reading.plate_box.y + stripped.row_start + b.y,
                                    b.w, b.h};
        if (const auto* hit = std::get_if<Accepted>(&p)) reading.text += hit->label;
        reading.per_char.emplace_back(image_box, std::move(p));
    }
    const auto t4 = Clock::now();

    reading.timings.preprocess_ms = ms_between(t0, t1);
    reading.timings.locate_ms = ms_between(t1, t2);
    reading.timings.segment_ms = ms_between(t2, t3);
    reading.timings.classify_ms = ms_between(t3, t4);
    reading.timings.total_ms = ms_between(t0, t4);

    if (debug) {
        dump.gray("gray", img);
        dump.gray("filtered", filtered);
        dump.gray("equalized", equalized);
        dump.bits("binary", binary);
        dump.bits("dilated", dilated);
        dump.bits("edges", edges);
        dump.bits("plate", plate);
        dump.bits("stripped", stripped.image);
        for (size_t i = 0; i < boxes.size(); ++i) {
            char stage[16];
            std::snprintf(stage, sizeof(stage), "char%02zu", i);
            dump.bits(stage, crop(stripped.image, boxes[i]));
        }

        std::string chars;
        chars += "plate " + std::to_string(reading.plate_box.x) + ' ' +
                 std::to_string(reading.plate_box.y) + ' ' +
                 std::to_string(reading.plate_box.w) + ' ' +
                 std::to_string(reading.plate_box.h) + '\n';
        for (const auto& [box, p] : reading.per_char) {
            chars += "char " + std::to_string(box.x) + ' ' + std::to_string(box.y) +
                     ' ' + std::to_string(box.w) + ' ' + std::to_string(box.h) + ' ';
            if (const auto* hit = std::get_if<Accepted>(&p)) {
                chars += hit->label;
                chars += ' ' + std::to_string(hit->confidence);
            } else if (std::holds_alternative<RejectedClassA>(p)) {
                chars += "REJECT_A";
            } else {
                chars += "REJECT_B";
            }
            chars += '\n';
        }
        dump.text("chars", chars);

        const Projection band_rows = project(sobel_vertical(plate, 128), Axis::Rows);
        const Projection ink_cols = project(stripped.image, Axis::Columns);
        dump.text("projections", "rows " + join_counts(band_rows.counts) + "\ncols " +
                                     join_counts(ink_cols.counts) + "\n");
    }
    return reading;
}

PlateReading recognize(const RgbImage& img, const Model& model,
                       const PipelineConfig& cfg,
                       const std::optional<DebugOptions>& debug) {
    return recognize(to_grayscale(img), model, cfg, debug);
}

AccuracyCount score_reading(const PlateReading& reading,
                            const std::string& truth_text,
                            const std::vector<BoundingBox>& truth_boxes) {
    if (truth_text.size() != truth_boxes.size())
        throw SizeError("truth text and boxes disagree in length");

    AccuracyCount count;
    count.total_truth = static_cast<int>(truth_boxes.size());

    // Order both sides left to right, then align by position: the k-th
    // predicted box answers for the k-th ground-truth character.
    std::vector<size_t> truth_order(truth_boxes.size());
    std::iota(truth_order.begin(), truth_order.end(), size_t{0});
    std::stable_sort(truth_order.begin(), truth_order.end(),
                     [&truth_boxes](size_t a, size_t b) {
                         return truth_boxes[a].x < truth_boxes[b].x;
                     });
    std::vector<size_t> pred_order(reading.per_char.size());
    std::iota(pred_order.begin(), pred_order.end(), size_t{0});
    std::stable_sort(pred_order.begin(), pred_order.end(),
                     [&reading](size_t a, size_t b) {
                         return reading.per_char[a].first.x < reading.per_char[b].first.x;
                     });

    for (size_t k = 0; k < pred_order.size(); ++k) {
        const Accepted* hit =
            std::get_if<Accepted>(&reading.per_char[pred_order[k]].second);
        if (k < truth_order.size()) {
            if (hit && hit->label == truth_text[truth_order[k]]) count.correct++;
        } else if (hit) {
            count.spurious++;  // accepted glyph with no ground-truth counterpart
        }
    }
    return count;
}

}  // namespace anpr
