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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace anpr::oracle {

GrayImage grayscale(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const uint8_t* p = img.pixel(x, y);
            // Exact rounding of 0.299r + 0.587g + 0.114b.
            int v = (299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000;
            out.at(x, y) = static_cast<uint8_t>(v);
        }
    }
    return out;
}

GrayImage bilateral(const GrayImage& img, int kernel, double sigma_space,
                    double sigma_range) {
    const int r = kernel / 2;
    const double denom_s = 2.0 * sigma_space * sigma_space;
    const double denom_r = 2.0 * sigma_range * sigma_range;
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const int center = img.at(x, y);
            double num = 0.0;
            double den = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    int qx = std::clamp(x + dx, 0, img.width() - 1);
                    int qy = std::clamp(y + dy, 0, img.height() - 1);
                    int v = img.at(qx, qy);
                    int dd = center - v;
                    double w = std::exp(-static_cast<double>(dx * dx + dy * dy) / denom_s) *
                               std::exp(-static_cast<double>(dd * dd) / denom_r);
                    num += w * v;
                    den += w;
                }
            }
            long rounded = std::lround(num / den);
            out.at(x, y) = static_cast<uint8_t>(std::clamp(rounded, 0L, 255L));
        }
    }
    return out;
}

GrayImage clahe(const GrayImage& img, int tile, double clip) {
    const int w = img.width();
    const int h = img.height();
    const int ntx = (w + tile - 1) / tile;
    const int nty = (h + tile - 1) / tile;
    const int tile_pixels = tile * tile;
    const double limit = clip * tile_pixels / 256.0;

    // Mapping table per tile; -1 in [256] marks the identity (constant tile).
    std::vector<std::vector<int>> maps(static_cast<size_t>(ntx) * nty,
                                       std::vector<int>(256, 0));
    for (int tj = 0; tj < nty; ++tj) {
        for (int ti = 0; ti < ntx; ++ti) {
            int hist[256] = {0};
            int lo = 255, hi = 0;
            for (int y = tj * tile; y < (tj + 1) * tile; ++y) {
                for (int x = ti * tile; x < (ti + 1) * tile; ++x) {
                    int v = img.at(std::min(x, w - 1), std::min(y, h - 1));
                    hist[v]++;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            std::vector<int>& m = maps[static_cast<size_t>(tj) * ntx + ti];
            if (lo == hi) {
                for (int v = 0; v < 256; ++v) m[v] = v;
                continue;
            }
            double clipped[256];
            double excess = 0.0;
            for (int v = 0; v < 256; ++v) {
                clipped[v] = std::min(static_cast<double>(hist[v]), limit);
                excess += hist[v] - clipped[v];
            }
            double add = excess / 256.0;
            double cdf[256];
            double run = 0.0;
            for (int v = 0; v < 256; ++v) {
                run += clipped[v] + add;
                cdf[v] = run;
            }
            double cdf_min = 0.0;
            for (int v = 0; v < 256; ++v) {
                if (cdf[v] > 0.0) {
                    cdf_min = cdf[v];
                    break;
                }
            }
            for (int v = 0; v < 256; ++v) {
                double scaled = (cdf[v] - cdf_min) / (tile_pixels - cdf_min) * 255.0;
                m[v] = static_cast<int>(std::clamp(std::lround(scaled), 0L, 255L));
            }
        }
    }

    const double half = (tile - 1) * 0.5;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        double fj = (y - half) / tile;
        int j0 = static_cast<int>(std::floor(fj));
        double b = fj - j0;
        int j1;
        if (j0 < 0) {
            j0 = j1 = 0;
        } else if (j0 >= nty - 1) {
            j0 = j1 = nty - 1;
        } else {
            j1 = j0 + 1;
        }
        for (int x = 0; x < w; ++x) {
            double fi = (x - half) / tile;
            int i0 = static_cast<int>(std::floor(fi));
            double a = fi - i0;
            int i1;
            if (i0 < 0) {
                i0 = i1 = 0;
            } else if (i0 >= ntx - 1) {
                i0 = i1 = ntx - 1;
            } else {
                i1 = i0 + 1;
            }
            int v = img.at(x, y);
            double m00 = maps[static_cast<size_t>(j0) * ntx + i0][v];
            double m01 = maps[static_cast<size_t>(j0) * ntx + i1][v];
            double m10 = maps[static_cast<size_t>(j1) * ntx + i0][v];
            double m11 = maps[static_cast<size_t>(j1) * ntx + i1][v];
            double top = (1.0 - a) * m00 + a * m01;
            double bot = (1.0 - a) * m10 + a * m11;
            long rounded = std::lround((1.0 - b) * top + b * bot);
            out.at(x, y) = static_cast<uint8_t>(std::clamp(rounded, 0L, 255L));
        }
    }
    return out;
}

BinaryImage dilate(const BinaryImage& img, int radius, int iterations) {
    BinaryImage cur = img;
    for (int it = 0; it < iterations; ++it) {
        // Stamp formulation: every set bit paints its neighborhood.
        BinaryImage next(cur.width(), cur.height(), cur.polarity());
        for (int y = 0; y < cur.height(); ++y) {
            for (int x = 0; x < cur.width(); ++x) {
                if (!cur.at(x, y)) continue;
                for (int dy = -radius; dy <= radius; ++dy) {
                    for (int dx = -radius; dx <= radius; ++dx) {
                        int nx = x + dx;
                        int ny = y + dy;
                        if (nx >= 0 && nx < cur.width() && ny >= 0 && ny < cur.height())
                            next.at(nx, ny) = 1;
                    }
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

BinaryImage sobel(const GrayImage& img, int edge_threshold) {
    static const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    BinaryImage out(img.width(), img.height(), Polarity::Edge);
    for (int y = 1; y + 1 < img.height(); ++y) {
        for (int x = 1; x + 1 < img.width(); ++x) {
            long g = 0;
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i)
                    g += kx[j][i] * img.at(x - 1 + i, y - 1 + j);
            long m = std::lround(std::labs(g) / 4.0);
            if (m >= edge_threshold) out.at(x, y) = 1;
        }
    }
    return out;
}

uint64_t window_count(const BinaryImage& img, const BoundingBox& box) {
    uint64_t n = 0;
    for (int y = box.y; y < box.y + box.h; ++y)
        for (int x = box.x; x < box.x + box.w; ++x) n += img.at(x, y);
    return n;
}

std::vector<uint32_t> project(const BinaryImage& img, Axis axis) {
    if (axis == Axis::Rows) {
        std::vector<uint32_t> counts(img.height(), 0);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) counts[y] += img.at(x, y);
        return counts;
    }
    std::vector<uint32_t> counts(img.width(), 0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) counts[x] += img.at(x, y);
    return counts;
}

std::vector<Band> find_bands(const std::vector<uint32_t>& counts) {
    std::vector<Band> bands;
    size_t i = 0;
    while (i < counts.size()) {
        if (counts[i] == 0) {
            ++i;
            continue;
        }
        Band b;
        b.start = static_cast<int>(i);
        b.area = 0;
        b.peak = 0;
        while (i < counts.size() && counts[i] > 0) {
            b.area += counts[i];
            b.peak = std::max(b.peak, counts[i]);
            ++i;
        }
        b.end = static_cast<int>(i) - 1;
        bands.push_back(b);
    }
    return bands;
}

std::optional<int> best_split(const std::vector<LabeledVector>& samples,
                              const std::vector<int>& sample_indices,
                              const std::vector<int>& candidate_features) {
    const uint64_t n = sample_indices.size();
    if (n < 2) return std::nullopt;

    uint64_t parent_counts[kClassCount] = {0};
    for (int idx : sample_indices) parent_counts[samples[idx].label]++;
    unsigned __int128 sp = 0;
    for (uint64_t c : parent_counts) sp += static_cast<unsigned __int128>(c) * c;

    std::vector<int> feats = candidate_features;
    std::sort(feats.begin(), feats.end());
    feats.erase(std::unique(feats.begin(), feats.end()), feats.end());

    bool have_best = false;
    int best_feature = -1;
    // Q(f) = SL/nL + SR/nR as the rational pair (A, nL*nR); larger Q means
    // lower weighted impurity.
    unsigned __int128 best_a = 0;
    unsigned __int128 best_d = 1;

    for (int f : feats) {
        uint64_t left_counts[kClassCount] = {0};
        uint64_t n_left = 0;
        for (int idx : sample_indices) {
            if (samples[idx].features[f] == 0) {
                left_counts[samples[idx].label]++;
                ++n_left;
            }
        }
        uint64_t n_right = n - n_left;
        if (n_left == 0 || n_right == 0) continue;
        unsigned __int128 sl = 0, sr = 0;
        for (int c = 0; c < kClassCount; ++c) {
            uint64_t lc = left_counts[c];
            uint64_t rc = parent_counts[c] - lc;
            sl += static_cast<unsigned __int128>(lc) * lc;
            sr += static_cast<unsigned __int128>(rc) * rc;
        }
        unsigned __int128 a = sl * n_right + sr * n_left;
        unsigned __int128 d = static_cast<unsigned __int128>(n_left) * n_right;
        // Positive impurity decrease: A/(nL*nR) > Sp/n, i.e. A*n > Sp*nL*nR.
        if (a * n <= sp * d) continue;
        if (!have_best || a * best_d > best_a * d) {
            have_best = true;
            best_feature = f;
            best_a = a;
            best_d = d;
        }
    }
    if (!have_best) return std::nullopt;
    return best_feature;
}

KnnOutcome knn(const std::vector<LabeledVector>& training, int k,
               const FeatureVector& query) {
    std::vector<std::pair<uint32_t, int>> dist;
    dist.reserve(training.size());
    for (size_t i = 0; i < training.size(); ++i) {
        uint32_t d = 0;
        for (int f = 0; f < kFeatureCount; ++f) {
            int diff = training[i].features[f] - query[f];
            d += static_cast<uint32_t>(diff * diff);
        }
        dist.emplace_back(d, static_cast<int>(i));
    }
    std::sort(dist.begin(), dist.end());

    KnnOutcome out;
    uint64_t total = 0;
    int votes[kClassCount] = {0};
    for (int i = 0; i < k; ++i) {
        out.neighbor_indices.push_back(dist[i].second);
        total += dist[i].first;
        votes[training[dist[i].second].label]++;
    }
    int winner = 0;
    for (int c = 1; c < kClassCount; ++c)
        if (votes[c] > votes[winner]) winner = c;
    out.winner = kAlphabet[winner];
    out.mean_distance = static_cast<double>(total) / k;
    out.vote_share = static_cast<double>(votes[winner]) / k;
    return out;
}

BoundingBox locate(const BinaryImage& edges, const std::vector<double>& fracs,
                   double aspect, int stride) {
    // Shared geometry derivation; positions are stride multiples plus the
    // final flush position.
    auto positions = [stride](int limit) {
        std::vector<int> xs;
        for (int x = 0; x <= limit; x += stride) xs.push_back(x);
        if (xs.empty() || xs.back() != limit) xs.push_back(limit);
        return xs;
    };
    bool have = false;
    BoundingBox best{};
    uint64_t best_count = 0;
    for (double frac : fracs) {
        int w = std::min<int>(edges.width(),
                              std::max<int>(3, static_cast<int>(std::llround(frac * edges.width()))));
        int h = std::min<int>(edges.height(),
                              std::max<int>(3, static_cast<int>(std::llround(w / aspect))));
        for (int y : positions(edges.height() - h)) {
            for (int x : positions(edges.width() - w)) {
                BoundingBox box{x, y, w, h};
                uint64_t count = window_count(edges, box);
                if (!have) {
                    have = true;
                    best = box;
                    best_count = count;
                    continue;
                }
                unsigned __int128 lhs =
                    static_cast<unsigned __int128>(count) * (static_cast<uint64_t>(best.w) * best.h);
                unsigned __int128 rhs =
                    static_cast<unsigned __int128>(best_count) * (static_cast<uint64_t>(box.w) * box.h);
                bool better;
                if (lhs != rhs) {
                    better = lhs > rhs;
                } else if (box.y != best.y) {
                    better = box.y < best.y;
                } else if (box.x != best.x) {
                    better = box.x < best.x;
                } else if (box.area() != best.area()) {
                    better = box.area() < best.area();
                } else {
                    better = box.w < best.w;
                }
                if (better) {
                    best = box;
                    best_count = count;
                }
            }
        }
    }
    return best;
}

BinaryImage resize_nearest(const BinaryImage& img, int out_w, int out_h) {
    BinaryImage out(out_w, out_h, img.polarity());
    for (int j = 0; j < out_h; ++j) {
        int sy = static_cast<int>(std::floor((j + 0.5) * img.height() / out_h));
        for (int i = 0; i < out_w; ++i) {
            int sx = static_cast<int>(std::floor((i + 0.5) * img.width() / out_w));
            out.at(i, j) = img.at(sx, sy);
        }
    }
    return out;
}

uint32_t hamming(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    uint32_t d = 0;
    for (size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

}  // namespace anpr::oracle
