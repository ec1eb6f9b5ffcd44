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

#include <zlib.h>

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "anpr/classify.hpp"

namespace anpr {

namespace {

using Kind = ModelError::Kind;

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

uint32_t crc_of(const std::string& data) {
    return static_cast<uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(data.data()),
              static_cast<uInt>(data.size())));
}

void append_node_line(std::string& out, const TreeNode& node) {
    if (node.is_leaf()) {
        out += 'L';
        for (uint32_t c : node.counts) {
            out += ' ';
            out += std::to_string(c);
        }
    } else {
        out += "S ";
        out += std::to_string(node.feature);
        out += ' ';
        out += std::to_string(node.left);
        out += ' ';
        out += std::to_string(node.right);
    }
    out += '\n';
}

std::string serialize_forest(const ForestModel& m) {
    std::string out;
    out += "RFMODEL 1\n";
    out += "classes ";
    out += m.labels;
    out += '\n';
    out += "trees " + std::to_string(m.n_t) + '\n';
    out += "fs " + std::to_string(m.f_s) + '\n';
    out += "seed " + std::to_string(m.seed) + '\n';
    out += "tc " + std::to_string(m.thresholds.t_c) + " ts " +
           format_double(m.thresholds.t_s) + " pe " + format_double(m.thresholds.p_e) +
           '\n';
    for (size_t i = 0; i < m.trees.size(); ++i) {
        const DecisionTree& tree = m.trees[i];
        out += "tree " + std::to_string(i) + " nodes " +
               std::to_string(tree.nodes.size()) + '\n';
        std::string body;
        for (const TreeNode& node : tree.nodes) append_node_line(body, node);
        out += body;
        out += "checksum " + std::to_string(crc_of(body)) + '\n';
    }
    return out;
}

std::string serialize_knn(const KnnModel& m) {
    std::string out;
    out += "KNNMODEL 1\n";
    out += "k " + std::to_string(m.k) + '\n';
    out += "tc " + std::to_string(m.thresholds.t_c) + " ts " +
           format_double(m.thresholds.t_s) + " pe " + format_double(m.thresholds.p_e) +
           '\n';
    for (const LabeledVector& s : m.training) {
        out += kAlphabet[s.label];
        out += ' ';
        for (int i = 0; i < kFeatureCount; ++i) out += s.features[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

/// Splits `text` into LF-terminated lines; a final unterminated line counts.
class LineScanner {
public:
    explicit LineScanner(const std::string& text) : text_(text) {}

    /// Next line without its newline, or nullopt at end of input.
    std::optional<std::string_view> next() {
        if (pos_ >= text_.size()) return std::nullopt;
        const size_t nl = text_.find('\n', pos_);
        const size_t start = pos_;
        size_t len;
        if (nl == std::string::npos) {
            len = text_.size() - start;
            pos_ = text_.size();
        } else {
            len = nl - start;
            pos_ = nl + 1;
        }
        return std::string_view(text_).substr(start, len);
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
};

class TokenScanner {
public:
    explicit TokenScanner(std::string_view line) : line_(line) {}

    std::optional<std::string_view> next() {
        while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
        if (pos_ >= line_.size()) return std::nullopt;
        const size_t start = pos_;
        while (pos_ < line_.size() && line_[pos_] != ' ') ++pos_;
        return line_.substr(start, pos_ - start);
    }

    bool at_end() {
        while (pos_ < line_.size() && line_[pos_] == ' ') ++pos_;
        return pos_ >= line_.size();
    }

private:
    std::string_view line_;
    size_t pos_ = 0;
};

[[noreturn]] void fail(Kind kind, const std::string& what) {
    throw ModelError(kind, what);
}

std::string_view expect_token(TokenScanner& ts, const char* what) {
    auto t = ts.next();
    if (!t) fail(Kind::malformed, std::string("missing ") + what);
    return *t;
}

void expect_keyword(TokenScanner& ts, const char* kw) {
    auto t = ts.next();
    if (!t || *t != kw) fail(Kind::malformed, std::string("expected '") + kw + "'");
}

template <typename T>
T parse_number(std::string_view tok, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        fail(Kind::malformed, std::string("bad ") + what + " '" + std::string(tok) + "'");
    return value;
}

template <typename T>
T expect_number(TokenScanner& ts, const char* what) {
    return parse_number<T>(expect_token(ts, what), what);
}

std::string_view expect_line(LineScanner& ls, const char* what) {
    auto line = ls.next();
    if (!line) fail(Kind::truncated, std::string("file ends before ") + what);
    return *line;
}

RejectionThresholds parse_thresholds_line(std::string_view line) {
    TokenScanner ts(line);
    RejectionThresholds t;
    expect_keyword(ts, "tc");
    t.t_c = expect_number<int>(ts, "tc");
    expect_keyword(ts, "ts");
    t.t_s = expect_number<double>(ts, "ts");
    expect_keyword(ts, "pe");
    t.p_e = expect_number<double>(ts, "pe");
    if (!ts.at_end()) fail(Kind::malformed, "trailing tokens on thresholds line");
    return t;
}

int64_t parse_header_int(LineScanner& ls, const char* kw, int64_t lo, int64_t hi) {
    TokenScanner ts(expect_line(ls, kw));
    expect_keyword(ts, kw);
    const int64_t v = expect_number<int64_t>(ts, kw);
    if (!ts.at_end()) fail(Kind::malformed, std::string("trailing tokens after ") + kw);
    if (v < lo || v > hi)
        fail(Kind::malformed, std::string(kw) + " out of range");
    return v;
}

ForestModel parse_forest(LineScanner& ls) {
    ForestModel m;

    TokenScanner classes(expect_line(ls, "classes"));
    expect_keyword(classes, "classes");
    const std::string_view labels = expect_token(classes, "class symbols");
    if (!classes.at_end()) fail(Kind::malformed, "trailing tokens after classes");
    if (labels != kAlphabet) fail(Kind::malformed, "unsupported class set");
    m.labels = std::string(labels);

    m.n_t = static_cast<int>(parse_header_int(ls, "trees", 1, 1 << 20));
    m.f_s = static_cast<int>(parse_header_int(ls, "fs", 1, kFeatureCount));
    {
        TokenScanner ts(expect_line(ls, "seed"));
        expect_keyword(ts, "seed");
        m.seed = expect_number<uint64_t>(ts, "seed");
        if (!ts.at_end()) fail(Kind::malformed, "trailing tokens after seed");
    }
    m.thresholds = parse_thresholds_line(expect_line(ls, "thresholds"));

    m.trees.resize(m.n_t);
    for (int t = 0; t < m.n_t; ++t) {
        TokenScanner hd(expect_line(ls, "tree header"));
        expect_keyword(hd, "tree");
        if (expect_number<int>(hd, "tree index") != t)
            fail(Kind::malformed, "tree index out of order");
        expect_keyword(hd, "nodes");
        const int n_nodes = expect_number<int>(hd, "node count");
        if (!hd.at_end()) fail(Kind::malformed, "trailing tokens on tree header");
        if (n_nodes < 1) fail(Kind::malformed, "tree must have at least one node");

        DecisionTree& tree = m.trees[t];
        tree.nodes.resize(n_nodes);
        std::string body;
        for (int i = 0; i < n_nodes; ++i) {
            const std::string_view line = expect_line(ls, "node line");
            body.append(line);
            body += '\n';
            TokenScanner ts(line);
            const std::string_view tag = expect_token(ts, "node tag");
            TreeNode& node = tree.nodes[i];
            if (tag == "S") {
                node.feature = expect_number<int16_t>(ts, "feature");
                node.left = expect_number<int32_t>(ts, "left child");
                node.right = expect_number<int32_t>(ts, "right child");
                if (node.feature < 0 || node.feature >= kFeatureCount)
                    fail(Kind::malformed, "feature index out of range");
                if (node.left <= i || node.left >= n_nodes || node.right <= i ||
                    node.right >= n_nodes)
                    fail(Kind::malformed, "child index out of range");
            } else if (tag == "L") {
                node.feature = -1;
                for (int c = 0; c < kClassCount; ++c)
                    node.counts[c] = expect_number<uint32_t>(ts, "leaf count");
            } else {
                fail(Kind::malformed, "unknown node tag");
            }
            if (!ts.at_end()) fail(Kind::malformed, "trailing tokens on node line");
        }

        TokenScanner cs(expect_line(ls, "checksum"));
        expect_keyword(cs, "checksum");
        const uint32_t stored = expect_number<uint32_t>(cs, "checksum");
        if (!cs.at_end()) fail(Kind::malformed, "trailing tokens after checksum");
        if (stored != crc_of(body))
            fail(Kind::checksum, "tree " + std::to_string(t) + " checksum mismatch");
    }
    if (ls.next()) fail(Kind::malformed, "trailing content after last tree");
    return m;
}

KnnModel parse_knn(LineScanner& ls) {
    KnnModel m;
    m.k = static_cast<int>(parse_header_int(ls, "k", 1, 1 << 20));
    m.thresholds = parse_thresholds_line(expect_line(ls, "thresholds"));

    m.training.clear();
    while (auto line = ls.next()) {
        TokenScanner ts(*line);
        const std::string_view sym = expect_token(ts, "sample label");
        if (sym.size() != 1 || label_index(sym[0]) < 0)
            fail(Kind::malformed, "bad sample label");
        const std::string_view bits = expect_token(ts, "sample bits");
        if (!ts.at_end()) fail(Kind::malformed, "trailing tokens on sample line");
        if (bits.size() != static_cast<size_t>(kFeatureCount))
            fail(Kind::malformed, "sample must have 400 bits");
        LabeledVector s;
        s.label = static_cast<uint8_t>(label_index(sym[0]));
        s.features.resize(kFeatureCount);
        for (int i = 0; i < kFeatureCount; ++i) {
            if (bits[i] != '0' && bits[i] != '1')
                fail(Kind::malformed, "sample bits must be 0 or 1");
            s.features[i] = bits[i] == '1';
        }
        m.training.push_back(std::move(s));
    }
    if (m.training.empty()) fail(Kind::truncated, "file ends before any training sample");
    if (m.training.size() < static_cast<size_t>(m.k))
        fail(Kind::malformed, "k exceeds the stored sample count");
    m.repack();
    return m;
}

}  // namespace

std::string serialize_model(const Model& model) {
    if (const auto* forest = std::get_if<ForestModel>(&model))
        return serialize_forest(*forest);
    return serialize_knn(std::get<KnnModel>(model));
}

Model parse_model(const std::string& text) {
    LineScanner ls(text);
    auto magic = ls.next();
    if (!magic) fail(Kind::truncated, "empty model file");
    if (*magic == "RFMODEL 1") return parse_forest(ls);
    if (*magic == "KNNMODEL 1") return parse_knn(ls);
    fail(Kind::version, "unrecognized model format line '" + std::string(*magic) + "'");
}

void save_model(const Model& model, const std::string& path) {
    const std::string text = serialize_model(model);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail(Kind::io, "cannot open '" + path + "' for writing");
    const size_t written = std::fwrite(text.data(), 1, text.size(), f);
    const bool ok = written == text.size() && std::fclose(f) == 0;
    if (!ok) fail(Kind::io, "short write to '" + path + "'");
}

Model load_model(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) fail(Kind::io, "cannot open '" + path + "' for reading");
    std::string text;
    char buf[1 << 16];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
    const bool read_error = std::ferror(f) != 0;
    std::fclose(f);
    if (read_error) fail(Kind::io, "read failure on '" + path + "'");
    return parse_model(text);
}

}  // namespace anpr
