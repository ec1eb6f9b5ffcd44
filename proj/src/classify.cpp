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

#include "anpr/classify.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include "anpr/kernels.hpp"

namespace anpr {

namespace {

constexpr uint64_t kSeedStride = 0x9E3779B97F4A7C15ULL;

void check_feature_vector(const FeatureVector& f) {
    if (f.size() != static_cast<size_t>(kFeatureCount))
        throw SizeError("feature vector must have 400 entries");
}

int argmax_label(const uint32_t* counts) {
    int best = 0;
    for (int c = 1; c < kClassCount; ++c)
        if (counts[c] > counts[best]) best = c;  // strict: ties keep the smaller
    return best;
}

}  // namespace

int label_index(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
    return -1;
}

FeatureVector featurize(const GlyphSample& g) {
    if (g.pixels.width() != kGlyphSize || g.pixels.height() != kGlyphSize)
        throw SizeError("glyph must be 20x20");
    return g.pixels.bits();
}

GlyphSample unflatten(const FeatureVector& v, std::optional<char> label) {
    check_feature_vector(v);
    FeatureVector bits(v.size());
    for (size_t i = 0; i < v.size(); ++i) bits[i] = v[i] ? 1 : 0;
    GlyphSample g;
    g.pixels = BinaryImage(kGlyphSize, kGlyphSize, Polarity::Ink, std::move(bits));
    g.label = label;
    return g;
}

int ink_count(const GlyphSample& g) {
    return static_cast<int>(g.pixels.count_set());
}

double gini(const std::array<uint32_t, kClassCount>& class_counts) {
    uint64_t n = 0;
    uint64_t sq = 0;
    for (uint32_t c : class_counts) {
        n += c;
        sq += static_cast<uint64_t>(c) * c;
    }
    if (n == 0) throw SizeError("gini of an empty count set");
    return 1.0 - static_cast<double>(sq) / (static_cast<double>(n) * static_cast<double>(n));
}

std::optional<SplitChoice> best_split(const std::vector<LabeledVector>& samples,
                                      const std::vector<int>& sample_indices,
                                      const std::vector<int>& candidate_features) {
    const uint64_t n = sample_indices.size();
    if (n < 2) return std::nullopt;

    uint64_t parent[kClassCount] = {0};
    for (int idx : sample_indices) parent[samples[idx].label]++;
    unsigned __int128 sp = 0;
    for (uint64_t c : parent) sp += static_cast<unsigned __int128>(c) * c;

    std::vector<int> feats = candidate_features;
    std::sort(feats.begin(), feats.end());
    feats.erase(std::unique(feats.begin(), feats.end()), feats.end());

    // Minimizing weighted child impurity is the same as maximizing
    // Q = SL/nL + SR/nR, tracked exactly as the pair (A, D) with
    // A = SL*nR + SR*nL and D = nL*nR.
    bool have = false;
    int best_feature = -1;
    unsigned __int128 best_a = 0;
    unsigned __int128 best_d = 1;
    uint64_t best_sl = 0, best_sr = 0, best_nl = 0;

    for (int f : feats) {
        if (f < 0 || f >= kFeatureCount) throw SizeError("candidate feature out of range");
        uint64_t left[kClassCount] = {0};
        uint64_t n_left = 0;
        for (int idx : sample_indices) {
            if (samples[idx].features[f] == 0) {
                left[samples[idx].label]++;
                ++n_left;
            }
        }
        const uint64_t n_right = n - n_left;
        if (n_left == 0 || n_right == 0) continue;
        uint64_t sl = 0, sr = 0;
        for (int c = 0; c < kClassCount; ++c) {
            const uint64_t lc = left[c];
            const uint64_t rc = parent[c] - lc;
            sl += lc * lc;
            sr += rc * rc;
        }
        const unsigned __int128 a = static_cast<unsigned __int128>(sl) * n_right +
                                    static_cast<unsigned __int128>(sr) * n_left;
        const unsigned __int128 d = static_cast<unsigned __int128>(n_left) * n_right;
        // Require a positive decrease: A/D > Sp/n.
        if (a * n <= sp * d) continue;
        // Strictly greater keeps the lowest feature index on ties.
        if (!have || a * best_d > best_a * d) {
            have = true;
            best_feature = f;
            best_a = a;
            best_d = d;
            best_sl = sl;
            best_sr = sr;
            best_nl = n_left;
        }
    }
    if (!have) return std::nullopt;

    const double nd = static_cast<double>(n);
    uint64_t sp64 = 0;
    for (uint64_t c : parent) sp64 += c * c;
    const double q = static_cast<double>(best_sl) / static_cast<double>(best_nl) +
                     static_cast<double>(best_sr) / static_cast<double>(n - best_nl);
    const double decrease = (q - static_cast<double>(sp64) / nd) / nd;
    return SplitChoice{best_feature, decrease};
}

namespace {

struct TreeBuilder {
    const std::vector<LabeledVector>& samples;
    Rng& rng;
    int f_s;
    std::vector<TreeNode> nodes;
    std::vector<int> pool;  // reused feature pool for the partial shuffle

    TreeBuilder(const std::vector<LabeledVector>& s, Rng& r, int fs)
        : samples(s), rng(r), f_s(fs), pool(kFeatureCount) {}

    // Returns the new node's index. Children are grown left first so the
    // generator state at any node depends only on the path taken, never on
    // sibling subtree shapes.
    int build(std::vector<int> indices) {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();

        std::array<uint32_t, kClassCount> counts{};
        for (int idx : indices) counts[samples[idx].label]++;
        int distinct = 0;
        for (uint32_t c : counts) distinct += c > 0;

        if (distinct <= 1 || indices.size() < 2) {
            nodes[id].counts = counts;
            return id;
        }

        std::iota(pool.begin(), pool.end(), 0);
        std::vector<int> candidates(f_s);
        for (int i = 0; i < f_s; ++i) {
            const int j = i + static_cast<int>(rng.bounded(
                                  static_cast<uint64_t>(kFeatureCount - i)));
            std::swap(pool[i], pool[j]);
            candidates[i] = pool[i];
        }

        const auto choice = best_split(samples, indices, candidates);
        if (!choice) {
            nodes[id].counts = counts;
            return id;
        }

        std::vector<int> lhs, rhs;
        for (int idx : indices) {
            if (samples[idx].features[choice->feature] == 0)
                lhs.push_back(idx);
            else
                rhs.push_back(idx);
        }
        indices = {};  // free before recursing; pending siblings stay O(n) total

        nodes[id].feature = static_cast<int16_t>(choice->feature);
        const int left = build(std::move(lhs));
        nodes[id].left = left;
        const int right = build(std::move(rhs));
        nodes[id].right = right;
        return id;
    }
};

}  // namespace

DecisionTree train_tree(const std::vector<LabeledVector>& samples,
                        const std::vector<int>& sample_indices, Rng& rng, int f_s) {
    if (sample_indices.empty()) throw SizeError("cannot grow a tree from no samples");
    if (f_s < 1 || f_s > kFeatureCount)
        throw SizeError("f_s must be in [1, 400]");
    TreeBuilder builder(samples, rng, f_s);
    builder.build(sample_indices);
    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    return tree;
}

char DecisionTree::vote(const FeatureVector& f) const {
    check_feature_vector(f);
    int i = 0;
    while (!nodes[i].is_leaf()) i = f[nodes[i].feature] ? nodes[i].right : nodes[i].left;
    return kAlphabet[argmax_label(nodes[i].counts.data())];
}

namespace {

void sort_canonical(std::vector<LabeledVector>& samples) {
    std::sort(samples.begin(), samples.end(),
              [](const LabeledVector& a, const LabeledVector& b) {
                  if (a.label != b.label) return a.label < b.label;
                  return a.features < b.features;
              });
}

void check_training_set(const std::vector<LabeledVector>& samples) {
    if (samples.empty()) throw SizeError("training set is empty");
    bool seen[kClassCount] = {false};
    int distinct = 0;
    for (const LabeledVector& s : samples) {
        check_feature_vector(s.features);
        if (s.label >= kClassCount) throw SizeError("label index out of range");
        if (!seen[s.label]) {
            seen[s.label] = true;
            ++distinct;
        }
    }
    if (distinct < 2) throw SizeError("training set needs at least two classes");
}

DecisionTree train_bagged_tree(const std::vector<LabeledVector>& samples,
                               uint64_t forest_seed, int tree_index, int f_s) {
    Rng rng(mix64(forest_seed ^ (kSeedStride * static_cast<uint64_t>(tree_index + 1))));
    const uint64_t n = samples.size();
    std::vector<int> boot(n);
    for (uint64_t i = 0; i < n; ++i) boot[i] = static_cast<int>(rng.bounded(n));
    DecisionTree tree;
    TreeBuilder builder(samples, rng, f_s);
    builder.build(std::move(boot));
    tree.nodes = std::move(builder.nodes);
    return tree;
}

}  // namespace

ForestModel train_forest(std::vector<LabeledVector> samples, int n_t, int f_s,
                         uint64_t seed, const RejectionThresholds& thresholds,
                         int threads) {
    if (n_t < 1) throw SizeError("n_t must be >= 1");
    if (f_s < 1 || f_s > kFeatureCount) throw SizeError("f_s must be in [1, 400]");
    check_training_set(samples);
    sort_canonical(samples);

    ForestModel model;
    model.n_t = n_t;
    model.f_s = f_s;
    model.seed = seed;
    model.thresholds = thresholds;
    model.trees.resize(n_t);

    if (threads <= 1) {
        for (int i = 0; i < n_t; ++i)
            model.trees[i] = train_bagged_tree(samples, seed, i, f_s);
        return model;
    }

    // Trees are placed by index, so the assembled forest cannot depend on
    // scheduling.
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_t) return;
            try {
                model.trees[i] = train_bagged_tree(samples, seed, i, f_s);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> team;
    const int n_workers = std::min(threads, n_t);
    team.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) team.emplace_back(worker);
    for (std::thread& t : team) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return model;
}

Prediction forest_predict(const ForestModel& model, const GlyphSample& g) {
    if (ink_count(g) < model.thresholds.t_c) return RejectedClassA{};
    const FeatureVector f = featurize(g);
    uint32_t votes[kClassCount] = {0};
    for (const DecisionTree& tree : model.trees) votes[label_index(tree.vote(f))]++;
    const int winner = argmax_label(votes);
    const double share =
        static_cast<double>(votes[winner]) / static_cast<double>(model.trees.size());
    if (share < model.thresholds.p_e) return RejectedClassB{};
    return Accepted{kAlphabet[winner], share};
}

void KnnModel::repack() {
    packed.assign(training.size() * kWords, 0);
    for (size_t i = 0; i < training.size(); ++i)
        pack_features(training[i].features, &packed[i * kWords]);
}

uint64_t pack_features(const FeatureVector& f, uint64_t out[KnnModel::kWords]) {
    check_feature_vector(f);
    uint64_t set = 0;
    for (size_t w = 0; w < KnnModel::kWords; ++w) out[w] = 0;
    for (int i = 0; i < kFeatureCount; ++i) {
        if (f[i]) {
            out[i >> 6] |= 1ULL << (i & 63);
            ++set;
        }
    }
    return set;
}

KnnModel make_knn(std::vector<LabeledVector> training, int k,
                  const RejectionThresholds& thresholds) {
    if (k < 1) throw SizeError("k must be >= 1");
    if (training.size() < static_cast<size_t>(k))
        throw SizeError("k exceeds the training set size");
    for (const LabeledVector& s : training) {
        check_feature_vector(s.features);
        if (s.label >= kClassCount) throw SizeError("label index out of range");
    }
    sort_canonical(training);
    KnnModel model;
    model.training = std::move(training);
    model.k = k;
    model.thresholds = thresholds;
    model.repack();
    return model;
}

Prediction knn_predict(const KnnModel& model, const GlyphSample& g) {
    if (ink_count(g) < model.thresholds.t_c) return RejectedClassA{};
    const FeatureVector f = featurize(g);
    uint64_t query[KnnModel::kWords];
    pack_features(f, query);

    const size_t n = model.training.size();
    std::vector<uint32_t> dist(n);
    kernels::select().hamming_batch(query, model.packed.data(), n, KnnModel::kWords,
                                    dist.data());

    // k nearest; equal distances resolve to the earlier training index.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + model.k, order.end(),
                      [&dist](int a, int b) {
                          if (dist[a] != dist[b]) return dist[a] < dist[b];
                          return a < b;
                      });

    uint32_t votes[kClassCount] = {0};
    uint64_t total = 0;
    for (int i = 0; i < model.k; ++i) {
        const int idx = order[i];
        votes[model.training[idx].label]++;
        total += dist[idx];
    }
    const int winner = argmax_label(votes);
    const double mean = static_cast<double>(total) / static_cast<double>(model.k);
    if (mean > model.thresholds.t_s) return RejectedClassB{};
    const double share = static_cast<double>(votes[winner]) / static_cast<double>(model.k);
    return Accepted{kAlphabet[winner], share};
}

Prediction predict(const Model& model, const GlyphSample& g) {
    if (const auto* forest = std::get_if<ForestModel>(&model))
        return forest_predict(*forest, g);
    return knn_predict(std::get<KnnModel>(model), g);
}

const RejectionThresholds& model_thresholds(const Model& model) {
    if (const auto* forest = std::get_if<ForestModel>(&model))
        return forest->thresholds;
    return std::get<KnnModel>(model).thresholds;
}

void set_model_thresholds(Model& model, const RejectionThresholds& t) {
    if (auto* forest = std::get_if<ForestModel>(&model))
        forest->thresholds = t;
    else
        std::get<KnnModel>(model).thresholds = t;
}

}  // namespace anpr
