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

#include "anpr/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "anpr/kernels.hpp"

namespace anpr {

void PreprocessConfig::validate() const {
    if (bilateral_kernel < 3 || bilateral_kernel % 2 == 0)
        throw SizeError("bilateral_kernel must be odd and >= 3");
    if (bilateral_sigma_space <= 0 || bilateral_sigma_range <= 0)
        throw SizeError("bilateral sigmas must be positive");
    if (clahe_tile < 2) throw SizeError("clahe_tile must be >= 2");
    if (clahe_clip < 1.0) throw SizeError("clahe_clip must be >= 1");
    if (binarize_threshold < 0 || binarize_threshold > 255)
        throw SizeError("binarize_threshold must be in [0, 255]");
    if (dilate_radius < 1) throw SizeError("dilate_radius must be >= 1");
    if (dilate_iterations < 0) throw SizeError("dilate_iterations must be >= 0");
}

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width(), img.height());
    const uint8_t* src = img.data().data();
    uint8_t* dst = out.data().data();
    const size_t n = static_cast<size_t>(img.width()) * img.height();
    for (size_t i = 0; i < n; ++i) {
        // Exact round(0.299r + 0.587g + 0.114b); doubles would misround
        // exact halves.
        const uint8_t* p = src + 3 * i;
        dst[i] = static_cast<uint8_t>((299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000);
    }
    return out;
}

GrayImage bilateral_filter(const GrayImage& img, const PreprocessConfig& cfg) {
    if (cfg.bilateral_kernel < 3 || cfg.bilateral_kernel % 2 == 0)
        throw SizeError("bilateral_kernel must be odd and >= 3");
    if (cfg.bilateral_sigma_space <= 0 || cfg.bilateral_sigma_range <= 0)
        throw SizeError("bilateral sigmas must be positive");
    const int r = cfg.bilateral_kernel / 2;
    const int k = cfg.bilateral_kernel;
    const double denom_s = 2.0 * cfg.bilateral_sigma_space * cfg.bilateral_sigma_space;
    const double denom_r = 2.0 * cfg.bilateral_sigma_range * cfg.bilateral_sigma_range;

    std::vector<double> spatial(static_cast<size_t>(k) * k);
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            spatial[static_cast<size_t>(dy + r) * k + (dx + r)] =
                std::exp(-static_cast<double>(dx * dx + dy * dy) / denom_s);
    double range[256];
    for (int d = 0; d < 256; ++d)
        range[d] = std::exp(-static_cast<double>(d * d) / denom_r);

    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const int center = img.at(x, y);
            double num = 0.0;
            double den = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int qy = std::clamp(y + dy, 0, img.height() - 1);
                const uint8_t* row = img.row(qy);
                const double* srow = &spatial[static_cast<size_t>(dy + r) * k];
                for (int dx = -r; dx <= r; ++dx) {
                    const int qx = std::clamp(x + dx, 0, img.width() - 1);
                    const int v = row[qx];
                    const double w = srow[dx + r] * range[std::abs(center - v)];
                    num += w * v;
                    den += w;
                }
            }
            out.at(x, y) = static_cast<uint8_t>(std::clamp(std::lround(num / den), 0L, 255L));
        }
    }
    return out;
}

GrayImage clahe(const GrayImage& img, const PreprocessConfig& cfg) {
    if (cfg.clahe_tile < 2) throw SizeError("clahe_tile must be >= 2");
    const int tile = cfg.clahe_tile;
    const int w = img.width();
    const int h = img.height();
    const int ntx = (w + tile - 1) / tile;
    const int nty = (h + tile - 1) / tile;
    const int tile_pixels = tile * tile;
    const double limit = cfg.clahe_clip * tile_pixels / 256.0;

    // Per-tile value mappings over the full 0..255 range: interpolation
    // applies a tile's mapping to values the tile never contained.
    std::vector<uint8_t> maps(static_cast<size_t>(ntx) * nty * 256);
    std::vector<int> hist(256);
    std::vector<double> cdf(256);
    for (int tj = 0; tj < nty; ++tj) {
        for (int ti = 0; ti < ntx; ++ti) {
            std::fill(hist.begin(), hist.end(), 0);
            int lo = 255, hi = 0;
            // Edge tiles replicate the last row/column outward.
            for (int y = tj * tile; y < (tj + 1) * tile; ++y) {
                const uint8_t* row = img.row(std::min(y, h - 1));
                for (int x = ti * tile; x < (ti + 1) * tile; ++x) {
                    int v = row[std::min(x, w - 1)];
                    hist[v]++;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            uint8_t* m = &maps[(static_cast<size_t>(tj) * ntx + ti) * 256];
            if (lo == hi) {
                for (int v = 0; v < 256; ++v) m[v] = static_cast<uint8_t>(v);
                continue;
            }
            double excess = 0.0;
            double run = 0.0;
            for (int v = 0; v < 256; ++v) {
                double clipped = std::min(static_cast<double>(hist[v]), limit);
                excess += hist[v] - clipped;
                cdf[v] = clipped;  // store clipped mass, accumulate below
            }
            const double add = excess / 256.0;
            for (int v = 0; v < 256; ++v) {
                run += cdf[v] + add;
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
                m[v] = static_cast<uint8_t>(std::clamp(std::lround(scaled), 0L, 255L));
            }
        }
    }

    // Blend the four nearest tile-center mappings. All fractions are exact
    // multiples of 1/(2*tile), so the blend is exact arithmetic.
    const double half = (tile - 1) * 0.5;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        const double fj = (y - half) / tile;
        int j0 = static_cast<int>(std::floor(fj));
        const double b = fj - j0;
        int j1;
        if (j0 < 0) {
            j0 = j1 = 0;
        } else if (j0 >= nty - 1) {
            j0 = j1 = nty - 1;
        } else {
            j1 = j0 + 1;
        }
        const uint8_t* row_in = img.row(y);
        uint8_t* row_out = out.row(y);
        for (int x = 0; x < w; ++x) {
            const double fi = (x - half) / tile;
            int i0 = static_cast<int>(std::floor(fi));
            const double a = fi - i0;
            int i1;
            if (i0 < 0) {
                i0 = i1 = 0;
            } else if (i0 >= ntx - 1) {
                i0 = i1 = ntx - 1;
            } else {
                i1 = i0 + 1;
            }
            const int v = row_in[x];
            const double m00 = maps[(static_cast<size_t>(j0) * ntx + i0) * 256 + v];
            const double m01 = maps[(static_cast<size_t>(j0) * ntx + i1) * 256 + v];
            const double m10 = maps[(static_cast<size_t>(j1) * ntx + i0) * 256 + v];
            const double m11 = maps[(static_cast<size_t>(j1) * ntx + i1) * 256 + v];
            const double top = (1.0 - a) * m00 + a * m01;
            const double bot = (1.0 - a) * m10 + a * m11;
            row_out[x] =
                static_cast<uint8_t>(std::clamp(std::lround((1.0 - b) * top + b * bot), 0L, 255L));
        }
    }
    return out;
}

BinaryImage binarize(const GrayImage& img, int threshold) {
    if (threshold < 0 || threshold > 255)
        throw SizeError("binarize threshold must be in [0, 255]");
    BinaryImage out(img.width(), img.height(), Polarity::Ink);
    kernels::select().threshold_lt(img.data().data(), out.bits().data(),
                                   img.data().size(), static_cast<uint8_t>(threshold));
    return out;
}

BinaryImage dilate(const BinaryImage& img, int radius, int iterations) {
    if (img.polarity() != Polarity::Ink) throw SizeError("dilate expects ink polarity");
    if (radius < 1) throw SizeError("dilate radius must be >= 1");
    if (iterations < 0) throw SizeError("dilate iterations must be >= 0");
    const auto& T = kernels::select();
    const int w = img.width();
    const int h = img.height();
    BinaryImage cur = img;
    // The square element separates into a horizontal window-OR and a
    // vertical OR of row neighborhoods.
    for (int it = 0; it < iterations; ++it) {
        BinaryImage horiz(w, h, Polarity::Ink);
        for (int y = 0; y < h; ++y) T.window_or(cur.row(y), horiz.row(y), w, radius);
        BinaryImage next(w, h, Polarity::Ink);
        for (int y = 0; y < h; ++y) {
            uint8_t* dst = next.row(y);
            std::copy(horiz.row(y), horiz.row(y) + w, dst);
            for (int d = 1; d <= radius; ++d) {
                if (y - d >= 0) T.or_rows(dst, horiz.row(y - d), w);
                if (y + d < h) T.or_rows(dst, horiz.row(y + d), w);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

PreprocessResult preprocess(const GrayImage& img, const PreprocessConfig& cfg) {
    cfg.validate();
    GrayImage filtered = bilateral_filter(img, cfg);
    GrayImage equalized = clahe(filtered, cfg);
    BinaryImage binary = binarize(equalized, cfg.binarize_threshold);
    BinaryImage dilated = dilate(binary, cfg.dilate_radius, cfg.dilate_iterations);
    return {std::move(binary), std::move(dilated)};
}

PreprocessResult preprocess(const RgbImage& img, const PreprocessConfig& cfg) {
    return preprocess(to_grayscale(img), cfg);
}

}  // namespace anpr
