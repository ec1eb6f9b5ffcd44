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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anpr/image.hpp"
#include "anpr/rng.hpp"

namespace anpr {

inline constexpr int kGlyphSize = 20;
inline constexpr int kFeatureCount = kGlyphSize * kGlyphSize;  // 400
inline constexpr int kClassCount = 36;

/// The classifier alphabet, in label order. "Smallest label" in every
/// tie-break below means smallest index in this string.
inline constexpr char kAlphabet[kClassCount + 1] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Index of `c` in kAlphabet, or -1.
int label_index(char c);

struct GlyphSample {
    BinaryImage pixels;         // 20x20, polarity INK
    std::optional<char> label;  // one of kAlphabet when present
};

/// Row-major 0/1 flattening of a 20x20 glyph; length exactly 400.
using FeatureVector = std::vector<uint8_t>;

FeatureVector featurize(const GlyphSample& g);
GlyphSample unflatten(const FeatureVector& v, std::optional<char> label = {});
int ink_count(const GlyphSample& g);

struct RejectionThresholds {
    int t_c = 40;       // minimum ink count; below it the glyph is class-A junk
    double t_s = 120.0; // kNN: maximum mean neighbor squared distance
    double p_e = 0.35;  // forest: minimum winning vote fraction
};

struct Accepted {
    char label;
    double confidence;  // vote fraction (forest) or k-vote share (kNN)
    bool operator==(const Accepted&) const = default;
};
struct RejectedClassA {
    bool operator==(const RejectedClassA&) const = default;
};
struct RejectedClassB {
    bool operator==(const RejectedClassB&) const = default;
};
using Prediction = std::variant<Accepted, RejectedClassA, RejectedClassB>;

/// 1 - sum((n_i / N)^2). Counts must sum to >= 1.
double gini(const std::array<uint32_t, kClassCount>& class_counts);

struct TreeNode {
    // feature >= 0: split node sending bit-0 samples to `left` and bit-1
    // samples to `right` (indices into the tree's node list). feature < 0:
    // leaf carrying per-class sample counts.
    int16_t feature = -1;
    int32_t left = -1;
    int32_t right = -1;
    std::array<uint32_t, kClassCount> counts{};
    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // pre-order; nodes[0] is the root
    /// Majority label of the leaf this glyph falls into, ties to the
    /// smallest label.
    char vote(const FeatureVector& f) const;
};

struct LabeledVector {
    FeatureVector features;
    uint8_t label;  // index into kAlphabet
};

struct SplitChoice {
    int feature;
    double impurity_decrease;
};

/// The candidate whose 0/1 partition minimizes weighted child Gini
/// impurity, compared with exact integer arithmetic. Returns nullopt when
/// no candidate yields two nonempty children with a positive impurity
/// decrease. Ties go to the lowest feature index.
std::optional<SplitChoice> best_split(const std::vector<LabeledVector>& samples,
                                      const std::vector<int>& sample_indices,
                                      const std::vector<int>& candidate_features);

/// Grow one tree: at each node draw f_s distinct candidate features from
/// rng (partial Fisher-Yates over [0, 400)), split by best_split, recurse
/// left then right. A node becomes a leaf when pure, smaller than 2
/// samples, or unsplittable. Throws on an empty sample set.
DecisionTree train_tree(const std::vector<LabeledVector>& samples,
                        const std::vector<int>& sample_indices, Rng& rng, int f_s);

struct ForestModel {
    std::vector<DecisionTree> trees;
    int n_t = 100;
    int f_s = 20;  // floor(sqrt(400))
    uint64_t seed = 0;
    std::string labels = kAlphabet;
    RejectionThresholds thresholds;
};

/// Bagged forest. Tree i seeds its own generator with
/// mix64(seed ^ 0x9E3779B97F4A7C15 * (i + 1)), draws |samples| bootstrap
/// indices from it, then grows its tree from the same generator, so
/// serial and parallel builds produce identical models. Samples are first
/// sorted into a canonical (label, bytes) order, making training
/// order-independent. `threads` <= 1 builds serially. Throws unless at
/// least two classes are present.
ForestModel train_forest(std::vector<LabeledVector> samples, int n_t, int f_s,
                         uint64_t seed, const RejectionThresholds& thresholds,
                         int threads = 1);

/// Class-A gate (ink < t_c), then one vote per tree; the winner needs a
/// vote fraction of at least p_e. All argmax ties go to the smallest label.
Prediction forest_predict(const ForestModel& model, const GlyphSample& g);

struct KnnModel {
    std::vector<LabeledVector> training;  // canonical (label, bytes) order
    int k = 3;
    RejectionThresholds thresholds;
    /// 64-bit packing of every training vector, kWords words per sample,
    /// rebuilt on construction/load; not serialized.
    static constexpr size_t kWords = 7;  // ceil(400 / 64)
    std::vector<uint64_t> packed;
    void repack();
};

KnnModel make_knn(std::vector<LabeledVector> training, int k,
                  const RejectionThresholds& thresholds);

/// Class-A gate, then squared Euclidean distance (= Hamming on bits) to
/// every training vector; k nearest with distance ties to the earlier
/// training index; majority label, ties to the smallest label; mean
/// neighbor distance above t_s rejects as class B. Confidence is the
/// winner's share of the k votes.
Prediction knn_predict(const KnnModel& model, const GlyphSample& g);

uint64_t pack_features(const FeatureVector& f, uint64_t out[KnnModel::kWords]);

using Model = std::variant<ForestModel, KnnModel>;

// Line-oriented versioned text formats (LF newlines, decimal numbers,
// shortest round-trip floats). Forest:
//   RFMODEL 1
//   classes 0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ
//   trees <n_t>
//   fs <f_s>
//   seed <u64>
//   tc <int> ts <float> pe <float>
//   tree <i> nodes <m>
//   S <feature> <left> <right>   |   L <count_0> ... <count_35>
//   checksum <crc32 of this tree's node lines, newlines included>
// kNN:
//   KNNMODEL 1
//   k <k>
//   tc <int> ts <float> pe <float>
//   <label> <400 bits>           (one line per training sample)
// Loading verifies structure and checksums; failures raise ModelError
// with a kind of version, checksum, truncated, malformed, or io.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);
std::string serialize_model(const Model& model);
Model parse_model(const std::string& text);

Prediction predict(const Model& model, const GlyphSample& g);
const RejectionThresholds& model_thresholds(const Model& model);
void set_model_thresholds(Model& model, const RejectionThresholds& t);

}  // namespace anpr
