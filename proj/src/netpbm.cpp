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

#include "anpr/netpbm.hpp"

#include <cstdio>
#include <string>

namespace anpr {

namespace {

bool is_space(uint8_t c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

// Header token scanner. Netpbm allows '#' comments (to end of line)
// wherever whitespace may appear before the raster.
class Cursor {
public:
    explicit Cursor(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

    size_t pos() const { return pos_; }
    bool eof() const { return pos_ >= bytes_.size(); }

    void skip_space_and_comments() {
        while (!eof()) {
            uint8_t c = bytes_[pos_];
            if (is_space(c)) {
                ++pos_;
            } else if (c == '#') {
                while (!eof() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    // Nonnegative decimal integer with an overflow cap; ParseError points
    // at the first offending byte.
    long next_int(const char* what, long max_value) {
        skip_space_and_comments();
        if (eof()) throw ParseError(std::string("missing ") + what, pos_);
        if (bytes_[pos_] < '0' || bytes_[pos_] > '9')
            throw ParseError(std::string("expected digit for ") + what, pos_);
        long value = 0;
        size_t start = pos_;
        while (!eof() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > max_value)
                throw ParseError(std::string(what) + " too large", start);
            ++pos_;
        }
        return value;
    }

    // After the last header token, exactly one whitespace byte separates
    // header from raster.
    void expect_raster_separator() {
        if (eof() || !is_space(bytes_[pos_]))
            throw ParseError("expected whitespace before raster", pos_);
        ++pos_;
    }

    uint8_t raw_byte(const char* what) {
        if (eof()) throw ParseError(std::string("truncated ") + what, pos_);
        return bytes_[pos_++];
    }

private:
    const std::vector<uint8_t>& bytes_;
    size_t pos_ = 0;
};

uint8_t rescale(long v, long maxval, size_t at) {
    if (v > maxval) throw ParseError("sample exceeds maxval", at);
    if (maxval == 255) return static_cast<uint8_t>(v);
    return static_cast<uint8_t>((v * 255 + maxval / 2) / maxval);
}

NetpbmImage parse_p1(Cursor& cur, int w, int h) {
    std::vector<uint8_t> bits;
    bits.reserve(static_cast<size_t>(w) * h);
    // P1 digits may be packed without separators.
    while (bits.size() < static_cast<size_t>(w) * h) {
        cur.skip_space_and_comments();
        size_t at = cur.pos();
        uint8_t c = cur.raw_byte("P1 raster");
        if (c != '0' && c != '1') throw ParseError("P1 pixel must be 0 or 1", at);
        bits.push_back(c - '0');
    }
    return BinaryImage(w, h, Polarity::Ink, std::move(bits));
}

NetpbmImage parse_p4(Cursor& cur, int w, int h) {
    cur.expect_raster_separator();
    std::vector<uint8_t> bits(static_cast<size_t>(w) * h);
    const int row_bytes = (w + 7) / 8;
    for (int y = 0; y < h; ++y) {
        for (int b = 0; b < row_bytes; ++b) {
            uint8_t byte = cur.raw_byte("P4 raster");
            for (int i = 0; i < 8; ++i) {
                int x = b * 8 + i;
                if (x >= w) break;
                bits[static_cast<size_t>(y) * w + x] = (byte >> (7 - i)) & 1;
            }
        }
    }
    return BinaryImage(w, h, Polarity::Ink, std::move(bits));
}

NetpbmImage parse_plain_gray(Cursor& cur, int w, int h, long maxval) {
    std::vector<uint8_t> data;
    data.reserve(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
        size_t at = cur.pos();
        data.push_back(rescale(cur.next_int("P2 sample", 65535), maxval, at));
    }
    return GrayImage(w, h, std::move(data));
}

NetpbmImage parse_plain_rgb(Cursor& cur, int w, int h, long maxval) {
    std::vector<uint8_t> data;
    data.reserve(3 * static_cast<size_t>(w) * h);
    for (size_t i = 0; i < 3 * static_cast<size_t>(w) * h; ++i) {
        size_t at = cur.pos();
        data.push_back(rescale(cur.next_int("P3 sample", 65535), maxval, at));
    }
    return RgbImage(w, h, std::move(data));
}

long raw_sample(Cursor& cur, long maxval, const char* what) {
    if (maxval < 256) return cur.raw_byte(what);
    long hi = cur.raw_byte(what);
    long lo = cur.raw_byte(what);
    return hi * 256 + lo;
}

NetpbmImage parse_raw_gray(Cursor& cur, int w, int h, long maxval) {
    cur.expect_raster_separator();
    std::vector<uint8_t> data;
    data.reserve(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
        size_t at = cur.pos();
        data.push_back(rescale(raw_sample(cur, maxval, "P5 raster"), maxval, at));
    }
    return GrayImage(w, h, std::move(data));
}

NetpbmImage parse_raw_rgb(Cursor& cur, int w, int h, long maxval) {
    cur.expect_raster_separator();
    std::vector<uint8_t> data;
    data.reserve(3 * static_cast<size_t>(w) * h);
    for (size_t i = 0; i < 3 * static_cast<size_t>(w) * h; ++i) {
        size_t at = cur.pos();
        data.push_back(rescale(raw_sample(cur, maxval, "P6 raster"), maxval, at));
    }
    return RgbImage(w, h, std::move(data));
}

}  // namespace

NetpbmImage parse_netpbm(const std::vector<uint8_t>& bytes) {
    Cursor cur(bytes);
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw ParseError("not a netpbm file (missing P magic)", 0);
    char kind = static_cast<char>(bytes[1]);
    if (kind < '1' || kind > '6') throw ParseError("unknown netpbm format", 1);
    cur.raw_byte("magic");
    cur.raw_byte("magic");

    int w = static_cast<int>(cur.next_int("width", 1 << 20));
    int h = static_cast<int>(cur.next_int("height", 1 << 20));
    if (w < 1) throw ParseError("width must be positive", cur.pos());
    if (h < 1) throw ParseError("height must be positive", cur.pos());

    long maxval = 1;
    if (kind != '1' && kind != '4') {
        size_t at = cur.pos();
        cur.skip_space_and_comments();
        at = cur.pos();
        maxval = cur.next_int("maxval", 65535);
        if (maxval < 1) throw ParseError("maxval must be positive", at);
    }

    switch (kind) {
        case '1': return parse_p1(cur, w, h);
        case '2': return parse_plain_gray(cur, w, h, maxval);
        case '3': return parse_plain_rgb(cur, w, h, maxval);
        case '4': return parse_p4(cur, w, h);
        case '5': return parse_raw_gray(cur, w, h, maxval);
        default:  return parse_raw_rgb(cur, w, h, maxval);
    }
}

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open " + path);
    std::vector<uint8_t> bytes;
    uint8_t buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) bytes.insert(bytes.end(), buf, buf + n);
    bool bad = std::ferror(f);
    std::fclose(f);
    if (bad) throw IoError("read failed for " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write " + path);
    size_t n = std::fwrite(bytes.data(), 1, bytes.size(), f);
    bool bad = n != bytes.size() || std::fclose(f) != 0;
    if (bad) throw IoError("write failed for " + path);
}

void append_header(std::vector<uint8_t>& out, const char* magic, int w, int h, bool maxval) {
    std::string header = std::string(magic) + "\n" + std::to_string(w) + " " +
                         std::to_string(h) + "\n" + (maxval ? "255\n" : "");
    out.insert(out.end(), header.begin(), header.end());
}

}  // namespace

NetpbmImage read_netpbm(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    return parse_netpbm(bytes);
}

std::vector<uint8_t> encode_pbm(const BinaryImage& img) {
    std::vector<uint8_t> out;
    append_header(out, "P4", img.width(), img.height(), false);
    const int row_bytes = (img.width() + 7) / 8;
    for (int y = 0; y < img.height(); ++y) {
        const uint8_t* row = img.row(y);
        for (int b = 0; b < row_bytes; ++b) {
            uint8_t byte = 0;
            for (int i = 0; i < 8; ++i) {
                int x = b * 8 + i;
                if (x < img.width() && row[x]) byte |= 0x80 >> i;
            }
            out.push_back(byte);
        }
    }
    return out;
}

std::vector<uint8_t> encode_pgm(const GrayImage& img) {
    std::vector<uint8_t> out;
    append_header(out, "P5", img.width(), img.height(), true);
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

std::vector<uint8_t> encode_ppm(const RgbImage& img) {
    std::vector<uint8_t> out;
    append_header(out, "P6", img.width(), img.height(), true);
    out.insert(out.end(), img.data().begin(), img.data().end());
    return out;
}

void write_pbm(const std::string& path, const BinaryImage& img) {
    write_file(path, encode_pbm(img));
}

void write_pgm(const std::string& path, const GrayImage& img) {
    write_file(path, encode_pgm(img));
}

void write_ppm(const std::string& path, const RgbImage& img) {
    write_file(path, encode_ppm(img));
}

}  // namespace anpr
