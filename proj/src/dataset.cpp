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

#include "anpr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string_view>

#include "anpr/kernels.hpp"
#include "anpr/netpbm.hpp"
#include "anpr/preprocess.hpp"
#include "anpr/segment.hpp"

namespace fs = std::filesystem;

namespace anpr {

namespace {

// Scene palette. Background and plate must stay above the binarization
// threshold under the worst illumination the generator applies, bars and
// blobs below it.
constexpr uint8_t kBackground = 160;
constexpr uint8_t kPlateFill = 238;
constexpr uint8_t kInk = 12;
constexpr uint8_t kBarShade = 65;
constexpr uint8_t kBlobShade = 15;

constexpr int kPlateMarginX = 6;
constexpr int kPlateMarginY = 5;
constexpr int kGlyphSpacing = 4;

// Clutter must not sit so close to the plate that a sweep window could
// trade plate edges for clutter edges, and bars must not touch plate rows.
constexpr int kBlobClearance = 40;
constexpr int kBarClearance = 10;
constexpr int kPlacementAttempts = 20;

std::vector<std::string> all_symbols() {
    std::vector<std::string> symbols;
    symbols.reserve(kClassCount + 2);
    for (int i = 0; i < kClassCount; ++i) symbols.emplace_back(1, kAlphabet[i]);
    symbols.push_back(kSpecialA);
    symbols.push_back(kSpecialB);
    return symbols;
}

bool is_real_symbol(const std::string& symbol) {
    return symbol.size() == 1 && label_index(symbol[0]) >= 0;
}

struct SplitSizes {
    int train = 0;
    int validation = 0;
    int test = 0;
};

// 220 : 30 : 100 out of every 350 samples, rounded.
SplitSizes split_sizes(int n) {
    SplitSizes s;
    s.train = static_cast<int>(std::llround(n * 220.0 / 350.0));
    s.test = static_cast<int>(std::llround(n * 100.0 / 350.0));
    s.test = std::min(s.test, n - s.train);
    s.validation = n - s.train - s.test;
    return s;
}

}  // namespace

const BinaryImage& GlyphAtlas::get(const std::string& symbol) const {
    auto it = glyphs.find(symbol);
    if (it == glyphs.end()) throw IoError("atlas has no glyph for '" + symbol + "'");
    return it->second;
}

GlyphAtlas load_atlas(const std::string& dir) {
    GlyphAtlas atlas;
    for (const std::string& symbol : all_symbols()) {
        const std::string path = dir + "/" + symbol + ".pbm";
        if (!fs::exists(path)) {
            if (is_real_symbol(symbol))
                throw IoError("atlas is missing required glyph '" + symbol + "'");
            continue;  // the special marks are optional
        }
        NetpbmImage img = read_netpbm(path);
        BinaryImage* bits = std::get_if<BinaryImage>(&img);
        if (!bits) throw IoError("atlas file '" + path + "' is not a bitmap");
        atlas.glyphs.emplace(symbol, std::move(*bits));
    }
    return atlas;
}

GlyphSample render_glyph(const GlyphAtlas& atlas, const std::string& symbol,
                         const AugmentSpec& aug, Rng& rng) {
    if (aug.shift < 0) throw SizeError("shift must be >= 0");
    if (aug.noise_p < 0.0 || aug.noise_p > 1.0)
        throw SizeError("noise_p must be in [0, 1]");
    if (aug.bold_p < 0.0 || aug.bold_p > 1.0)
        throw SizeError("bold_p must be in [0, 1]");
    const BinaryImage& native = atlas.get(symbol);

    BinaryImage canvas(native.width() + 2 * aug.shift, native.height() + 2 * aug.shift,
                       Polarity::Ink);
    int dx = 0, dy = 0;
    if (aug.shift > 0) {
        const uint64_t span = 2 * static_cast<uint64_t>(aug.shift) + 1;
        dx = static_cast<int>(rng.bounded(span)) - aug.shift;
        dy = static_cast<int>(rng.bounded(span)) - aug.shift;
    }
    for (int y = 0; y < native.height(); ++y) {
        const uint8_t* src = native.row(y);
        uint8_t* dst = canvas.row(y + aug.shift + dy) + aug.shift + dx;
        for (int x = 0; x < native.width(); ++x) dst[x] = src[x];
    }

    if (aug.bold_p > 0.0 && rng.uniform() < aug.bold_p) canvas = dilate(canvas, 1, 1);

    if (aug.noise_p > 0.0) {
        uint8_t* bits = canvas.bits().data();
        const size_t n = canvas.bits().size();
        for (size_t i = 0; i < n; ++i)
            if (rng.uniform() < aug.noise_p) bits[i] ^= 1;
    }

    // Tight-crop like the segmenter does, so training glyphs see the same
    // framing as pipeline glyphs.
    BinaryImage cropped;
    try {
        cropped = crop(canvas, ink_bounds(canvas));
    } catch (const EmptyPlateError&) {
        cropped = std::move(canvas);  // all ink flipped away; keep the frame
    }
    GlyphSample sample = normalize_glyph(cropped);
    if (is_real_symbol(symbol)) sample.label = symbol[0];
    return sample;
}

BoundingBox plate_extent(const GlyphAtlas& atlas, const std::string& text) {
    if (text.empty()) throw LayoutError("plate text is empty");
    int w = 2 * kPlateMarginX + kGlyphSpacing * (static_cast<int>(text.size()) - 1);
    int tallest = 0;
    for (char c : text) {
        if (label_index(c) < 0)
            throw LayoutError(std::string("'") + c + "' is not a plate symbol");
        const BinaryImage& g = atlas.get(std::string(1, c));
        w += g.width();
        tallest = std::max(tallest, g.height());
    }
    return {0, 0, w, 2 * kPlateMarginY + tallest};
}

Scene render_scene(const GlyphAtlas& atlas, const SceneSpec& spec, Rng& rng) {
    if (spec.width < 1 || spec.height < 1) throw SizeError("scene must be non-empty");
    if (spec.clutter < 0.0 || spec.clutter > 1.0)
        throw SizeError("clutter must be in [0, 1]");
    if (spec.noise_sigma < 0.0) throw SizeError("noise_sigma must be >= 0");
    const BoundingBox& plate = spec.plate_box;
    if (plate.x < 0 || plate.y < 0 || plate.right() > spec.width ||
        plate.bottom() > spec.height)
        throw BoundsError("plate box outside the scene");
    const BoundingBox extent = plate_extent(atlas, spec.text);
    if (extent.w > plate.w || extent.h > plate.h)
        throw LayoutError("text does not fit the plate box");

    GrayImage img(spec.width, spec.height, kBackground);

    // Bars: full width so they produce horizontal edges only.
    const int n_bars = static_cast<int>(std::lround(spec.clutter * 4.0));
    for (int i = 0; i < n_bars; ++i) {
        for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
            const int thickness = 3 + static_cast<int>(rng.bounded(6));
            if (thickness > spec.height) break;
            const int y0 = static_cast<int>(
                rng.bounded(static_cast<uint64_t>(spec.height - thickness + 1)));
            if (y0 < plate.bottom() + kBarClearance &&
                plate.y - kBarClearance < y0 + thickness)
                continue;
            for (int y = y0; y < y0 + thickness; ++y)
                std::fill(img.row(y), img.row(y) + spec.width, kBarShade);
            break;
        }
    }

    // Blobs: dark rectangles with genuine vertical edges, kept away from
    // the plate.
    const int n_blobs = static_cast<int>(std::lround(spec.clutter * 6.0));
    const BoundingBox keepout{plate.x - kBlobClearance, plate.y - kBlobClearance,
                              plate.w + 2 * kBlobClearance,
                              plate.h + 2 * kBlobClearance};
    for (int i = 0; i < n_blobs; ++i) {
        for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
            const int bw = 20 + static_cast<int>(rng.bounded(41));
            const int bh = 20 + static_cast<int>(rng.bounded(41));
            if (bw > spec.width || bh > spec.height) continue;
            const int bx = static_cast<int>(
                rng.bounded(static_cast<uint64_t>(spec.width - bw + 1)));
            const int by = static_cast<int>(
                rng.bounded(static_cast<uint64_t>(spec.height - bh + 1)));
            if (bx < keepout.right() && keepout.x < bx + bw &&
                by < keepout.bottom() && keepout.y < by + bh)
                continue;
            for (int y = by; y < by + bh; ++y)
                std::fill(img.row(y) + bx, img.row(y) + bx + bw, kBlobShade);
            break;
        }
    }

    for (int y = plate.y; y < plate.bottom(); ++y)
        std::fill(img.row(y) + plate.x, img.row(y) + plate.right(), kPlateFill);

    SceneTruth truth;
    truth.text = spec.text;
    truth.plate_box = plate;
    int pen_x = plate.x + kPlateMarginX;
    const int pen_y = plate.y + kPlateMarginY;
    for (char c : spec.text) {
        const BinaryImage& g = atlas.get(std::string(1, c));
        for (int y = 0; y < g.height(); ++y) {
            const uint8_t* src = g.row(y);
            uint8_t* dst = img.row(pen_y + y) + pen_x;
            for (int x = 0; x < g.width(); ++x)
                if (src[x]) dst[x] = kInk;
        }
        const BoundingBox tight = ink_bounds(g);
        truth.char_boxes.push_back(
            {pen_x + tight.x, pen_y + tight.y, tight.w, tight.h});
        pen_x += g.width() + kGlyphSpacing;
    }

    // Illumination then sensor noise, applied per pixel in raster order.
    uint8_t* px = img.data().data();
    const size_t n = img.data().size();
    for (size_t i = 0; i < n; ++i) {
        double v = px[i] * spec.gain + spec.bias;
        if (spec.noise_sigma > 0.0) v += rng.gaussian() * spec.noise_sigma;
        px[i] = static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }

    return {std::move(img), std::move(truth)};
}

Scene render_scene(const GlyphAtlas& atlas, const SceneSpec& spec) {
    Rng rng(spec.seed);
    return render_scene(atlas, spec, rng);
}

DatasetSplit build_split(const GlyphAtlas& atlas, int per_class,
                         const AugmentSpec& aug, uint64_t seed) {
    if (per_class < 1) throw SizeError("per_class must be >= 1");
    DatasetSplit split;
    Rng master(seed);
    // Fixed symbol order plus one sub-seed draw per sample keeps the whole
    // dataset a pure function of the seed.
    for (const std::string& symbol : all_symbols()) {
        if (!atlas.glyphs.count(symbol)) {
            if (is_real_symbol(symbol))
                throw IoError("atlas is missing required glyph '" + symbol + "'");
            continue;
        }
        const bool real = is_real_symbol(symbol);
        const SplitSizes sizes = split_sizes(per_class);
        for (int i = 0; i < per_class; ++i) {
            Rng sub(master.next());
            LabeledGlyph g{render_glyph(atlas, symbol, aug, sub), symbol};
            if (!real)
                split.validation.push_back(std::move(g));
            else if (i < sizes.train)
                split.train.push_back(std::move(g));
            else if (i < sizes.train + sizes.validation)
                split.validation.push_back(std::move(g));
            else
                split.test.push_back(std::move(g));
        }
    }
    return split;
}

namespace {

// Winning vote share of the forest, ignoring every rejection gate.
double forest_vote_share(const ForestModel& m, const FeatureVector& f) {
    uint32_t votes[kClassCount] = {0};
    for (const DecisionTree& tree : m.trees) votes[label_index(tree.vote(f))]++;
    uint32_t best = votes[0];
    for (int c = 1; c < kClassCount; ++c) best = std::max(best, votes[c]);
    return static_cast<double>(best) / static_cast<double>(m.trees.size());
}

// Mean distance over the k nearest training vectors, ignoring the gates.
double knn_mean_distance(const KnnModel& m, const FeatureVector& f) {
    uint64_t query[KnnModel::kWords];
    pack_features(f, query);
    std::vector<uint32_t> dist(m.training.size());
    kernels::select().hamming_batch(query, m.packed.data(), m.training.size(),
                                    KnnModel::kWords, dist.data());
    std::partial_sort(dist.begin(), dist.begin() + m.k, dist.end());
    uint64_t total = 0;
    for (int i = 0; i < m.k; ++i) total += dist[i];
    return static_cast<double>(total) / static_cast<double>(m.k);
}

}  // namespace

CalibrationReport calibrate_thresholds(const Model& model,
                                       const std::vector<LabeledGlyph>& validation) {
    std::vector<const LabeledGlyph*> reals, specials;
    for (const LabeledGlyph& g : validation) {
        if (is_real_symbol(g.symbol))
            reals.push_back(&g);
        else
            specials.push_back(&g);
    }
    if (reals.empty()) throw CalibrationError("validation has no real glyphs");
    if (specials.empty()) throw CalibrationError("validation has no special glyphs");

    int min_ink = kFeatureCount;
    for (const LabeledGlyph* g : reals) min_ink = std::min(min_ink, ink_count(g->sample));

    CalibrationReport report;
    report.real_count = static_cast<int>(reals.size());
    report.special_count = static_cast<int>(specials.size());
    report.min_real_ink = min_ink;

    RejectionThresholds t = model_thresholds(model);
    t.t_c = min_ink / 2;

    // Scores of the specials that survive the ink gate. Forest rejections
    // come from a low winning vote share, kNN rejections from a high mean
    // neighbor distance.
    const auto* forest = std::get_if<ForestModel>(&model);
    int gate_rejected = 0;
    std::vector<double> scores;
    for (const LabeledGlyph* g : specials) {
        if (ink_count(g->sample) < t.t_c) {
            ++gate_rejected;
            continue;
        }
        const FeatureVector f = featurize(g->sample);
        scores.push_back(forest ? forest_vote_share(*forest, f)
                                : knn_mean_distance(std::get<KnnModel>(model), f));
    }

    const int need = static_cast<int>(
        std::ceil(0.95 * static_cast<double>(specials.size())));
    const int q = need - gate_rejected;
    if (q <= 0) {
        // The ink gate alone already rejects 95%; loosest settings for the
        // second gate.
        if (forest)
            t.p_e = 0.0;
        else
            t.t_s = kFeatureCount;
    } else if (forest) {
        // Reject everything voting no more confidently than the q-th
        // smallest share. Shares are multiples of 1/n_t; half a quantum
        // above the deciding share makes the comparison unambiguous.
        std::sort(scores.begin(), scores.end());
        const double quantum = 1.0 / (2.0 * static_cast<double>(forest->trees.size()));
        t.p_e = std::min(1.0, scores[q - 1] + quantum);
    } else {
        // Reject everything at least as distant as the q-th largest mean.
        std::sort(scores.begin(), scores.end(), std::greater<>());
        const int k = std::get<KnnModel>(model).k;
        const double quantum = 1.0 / (2.0 * static_cast<double>(k));
        t.t_s = std::max(0.0, scores[q - 1] - quantum);
    }

    Model adjusted = model;
    set_model_thresholds(adjusted, t);
    int accepted_reals = 0;
    for (const LabeledGlyph* g : reals)
        if (std::holds_alternative<Accepted>(predict(adjusted, g->sample)))
            ++accepted_reals;
    int rejected_specials = 0;
    for (const LabeledGlyph* g : specials)
        if (!std::holds_alternative<Accepted>(predict(adjusted, g->sample)))
            ++rejected_specials;

    report.thresholds = t;
    report.real_accept_rate =
        static_cast<double>(accepted_reals) / static_cast<double>(reals.size());
    report.special_reject_rate =
        static_cast<double>(rejected_specials) / static_cast<double>(specials.size());
    return report;
}

void save_glyphs(const std::string& root, const DatasetSplit& split) {
    // ids restart per symbol and keep generation order, train first, then
    // validation, then test; zero padding makes lexical order numeric.
    std::map<std::string, int> counters;
    auto emit = [&](const std::vector<LabeledGlyph>& part) {
        for (const LabeledGlyph& g : part) {
            const fs::path dir = fs::path(root) / "glyphs" / g.symbol;
            fs::create_directories(dir);
            char name[16];
            std::snprintf(name, sizeof(name), "%04d.pbm", counters[g.symbol]++);
            write_pbm((dir / name).string(), g.sample.pixels);
        }
    };
    emit(split.train);
    emit(split.validation);
    emit(split.test);
}

std::vector<LabeledGlyph> load_glyphs(const std::string& root) {
    const fs::path base = fs::path(root) / "glyphs";
    if (!fs::is_directory(base))
        throw IoError("no glyphs directory under '" + root + "'");
    std::vector<LabeledGlyph> out;
    for (const std::string& symbol : all_symbols()) {
        const fs::path dir = base / symbol;
        if (!fs::is_directory(dir)) continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.path().extension() == ".pbm") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const fs::path& file : files) {
            NetpbmImage img = read_netpbm(file.string());
            BinaryImage* bits = std::get_if<BinaryImage>(&img);
            if (!bits) throw IoError("glyph file '" + file.string() + "' is not a bitmap");
            GlyphSample sample;
            sample.pixels = std::move(*bits);
            if (is_real_symbol(symbol)) sample.label = symbol[0];
            out.push_back({std::move(sample), symbol});
        }
    }
    if (out.empty()) throw IoError("no glyph samples under '" + root + "'");
    return out;
}

DatasetSplit split_loaded(std::vector<LabeledGlyph> glyphs) {
    DatasetSplit split;
    size_t i = 0;
    while (i < glyphs.size()) {
        size_t j = i;
        while (j < glyphs.size() && glyphs[j].symbol == glyphs[i].symbol) ++j;
        const int n = static_cast<int>(j - i);
        if (!is_real_symbol(glyphs[i].symbol)) {
            for (size_t k = i; k < j; ++k)
                split.validation.push_back(std::move(glyphs[k]));
        } else {
            const SplitSizes sizes = split_sizes(n);
            for (size_t k = i; k < j; ++k) {
                const int pos = static_cast<int>(k - i);
                if (pos < sizes.train)
                    split.train.push_back(std::move(glyphs[k]));
                else if (pos < sizes.train + sizes.validation)
                    split.validation.push_back(std::move(glyphs[k]));
                else
                    split.test.push_back(std::move(glyphs[k]));
            }
        }
        i = j;
    }
    return split;
}

void save_scene(const std::string& root, const std::string& id, const Scene& scene) {
    const fs::path dir = fs::path(root) / "scenes";
    fs::create_directories(dir);
    write_pgm((dir / (id + ".pgm")).string(), scene.image);

    std::string text = scene.truth.text + "\n";
    auto box_line = [](const BoundingBox& b) {
        return std::to_string(b.x) + " " + std::to_string(b.y) + " " +
               std::to_string(b.w) + " " + std::to_string(b.h) + "\n";
    };
    text += box_line(scene.truth.plate_box);
    for (const BoundingBox& b : scene.truth.char_boxes) text += box_line(b);

    const fs::path path = dir / (id + ".truth");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    const size_t written = std::fwrite(text.data(), 1, text.size(), f);
    const bool ok = written == text.size() && std::fclose(f) == 0;
    if (!ok) throw IoError("short write to '" + path.string() + "'");
}

SceneTruth load_truth(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
    std::fclose(f);

    SceneTruth truth;
    size_t pos = 0;
    auto next_line = [&]() -> std::string_view {
        if (pos >= text.size()) throw ParseError("truth file truncated", pos);
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    auto parse_box = [&](std::string_view line, size_t at) {
        BoundingBox b;
        int got_fields = std::sscanf(std::string(line).c_str(), "%d %d %d %d", &b.x,
                                     &b.y, &b.w, &b.h);
        if (got_fields != 4) throw ParseError("expected 'x y w h'", at);
        return b;
    };

    const std::string_view first = next_line();
    if (first.empty()) throw ParseError("truth file has no plate text", 0);
    truth.text = std::string(first);
    size_t line_at = pos;
    truth.plate_box = parse_box(next_line(), line_at);
    while (pos < text.size()) {
        line_at = pos;
        const std::string_view line = next_line();
        if (line.empty()) continue;
        truth.char_boxes.push_back(parse_box(line, line_at));
    }
    return truth;
}

std::vector<std::string> list_scene_ids(const std::string& root) {
    const fs::path dir = fs::path(root) / "scenes";
    std::vector<std::string> ids;
    if (!fs::is_directory(dir)) return ids;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".pgm") ids.push_back(entry.path().stem().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace anpr
