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

#include "anpr/cli.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "anpr/dataset.hpp"
#include "anpr/netpbm.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace anpr {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

int exit_for(const Error& e) {
    if (const auto* m = dynamic_cast<const ModelError*>(&e))
        return m->kind() == ModelError::Kind::io ? kExitMissingFile : kExitInternal;
    if (dynamic_cast<const IoError*>(&e)) return kExitMissingFile;
    return kExitInternal;
}

/// Runs CLI11 over `args`; engaged result means the command is already
/// finished (help printed or usage failure).
std::optional<int> parse_args(CLI::App& app, const std::vector<std::string>& args,
                              std::ostream& out, std::ostream& err) {
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        return std::nullopt;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
}

std::string trimmed(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <typename T>
T config_number(const std::string& value, const std::string& key) {
    T v{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error("config value '" + value + "' for '" + key + "' is not a number");
    return v;
}

GrayImage load_gray(const std::string& path) {
    NetpbmImage img = read_netpbm(path);
    if (const auto* bits = std::get_if<BinaryImage>(&img)) return bits->to_gray();
    if (auto* gray = std::get_if<GrayImage>(&img)) return std::move(*gray);
    return to_grayscale(std::get<RgbImage>(img));
}

json box_json(const BoundingBox& b) {
    return json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

json reading_json(const PlateReading& reading) {
    // Timings are deliberately absent: identical inputs must serialize to
    // identical bytes.
    json chars = json::array();
    for (const auto& [box, p] : reading.per_char) {
        json entry{{"box", box_json(box)}};
        if (const auto* hit = std::get_if<Accepted>(&p)) {
            entry["result"] = "accepted";
            entry["label"] = std::string(1, hit->label);
            entry["confidence"] = hit->confidence;
        } else if (std::holds_alternative<RejectedClassA>(p)) {
            entry["result"] = "rejected_class_a";
        } else {
            entry["result"] = "rejected_class_b";
        }
        chars.push_back(std::move(entry));
    }
    return json{{"status", "ok"},
                {"text", reading.text},
                {"plate_box", box_json(reading.plate_box)},
                {"chars", std::move(chars)}};
}

const char* classifier_name(const Model& model) {
    return std::holds_alternative<ForestModel>(model) ? "forest" : "knn";
}

/// Applies config-file threshold overrides to the model once, so the
/// per-image path never copies the model.
void bake_threshold_overrides(Model& model, PipelineConfig& cfg) {
    if (!cfg.t_c && !cfg.t_s && !cfg.p_e) return;
    RejectionThresholds t = model_thresholds(model);
    if (cfg.t_c) t.t_c = *cfg.t_c;
    if (cfg.t_s) t.t_s = *cfg.t_s;
    if (cfg.p_e) t.p_e = *cfg.p_e;
    set_model_thresholds(model, t);
    cfg.t_c.reset();
    cfg.t_s.reset();
    cfg.p_e.reset();
}

struct SceneScore {
    int correct = 0;
    int spurious = 0;
    int truth = 0;
    double seconds = 0;
};

double accuracy_of(long correct, long spurious, long total) {
    if (total <= 0) return 1.0;
    const long points = std::max(0L, correct - spurious);
    return static_cast<double>(points) / static_cast<double>(total);
}

constexpr uint64_t kSceneStride = 0xC2B2AE3D27D4EB4FULL;

}  // namespace

void apply_config_line(PipelineConfig& cfg, const std::string& key,
                       const std::string& value) {
    if (key == "bilateral_kernel")
        cfg.preprocess.bilateral_kernel = config_number<int>(value, key);
    else if (key == "bilateral_sigma_space")
        cfg.preprocess.bilateral_sigma_space = config_number<double>(value, key);
    else if (key == "bilateral_sigma_range")
        cfg.preprocess.bilateral_sigma_range = config_number<double>(value, key);
    else if (key == "clahe_tile")
        cfg.preprocess.clahe_tile = config_number<int>(value, key);
    else if (key == "clahe_clip")
        cfg.preprocess.clahe_clip = config_number<double>(value, key);
    else if (key == "binarize_threshold")
        cfg.preprocess.binarize_threshold = config_number<int>(value, key);
    else if (key == "dilate_radius")
        cfg.preprocess.dilate_radius = config_number<int>(value, key);
    else if (key == "dilate_iterations")
        cfg.preprocess.dilate_iterations = config_number<int>(value, key);
    else if (key == "edge_threshold")
        cfg.locate.edge_threshold = config_number<int>(value, key);
    else if (key == "window_width_fracs") {
        std::vector<double> fracs;
        size_t pos = 0;
        while (pos <= value.size()) {
            size_t comma = value.find(',', pos);
            if (comma == std::string::npos) comma = value.size();
            fracs.push_back(
                config_number<double>(trimmed(value.substr(pos, comma - pos)), key));
            pos = comma + 1;
        }
        cfg.locate.window_width_fracs = std::move(fracs);
    } else if (key == "plate_aspect")
        cfg.locate.plate_aspect = config_number<double>(value, key);
    else if (key == "stride")
        cfg.locate.stride = config_number<int>(value, key);
    else if (key == "min_char_width")
        cfg.segment.min_char_width = config_number<int>(value, key);
    else if (key == "min_char_ink")
        cfg.segment.min_char_ink = config_number<int>(value, key);
    else if (key == "classifier") {
        if (value == "forest")
            cfg.classifier = ClassifierKind::forest;
        else if (value == "knn")
            cfg.classifier = ClassifierKind::knn;
        else
            throw Error("config classifier must be 'forest' or 'knn'");
    } else if (key == "tc")
        cfg.t_c = config_number<int>(value, key);
    else if (key == "ts")
        cfg.t_s = config_number<double>(value, key);
    else if (key == "pe")
        cfg.p_e = config_number<double>(value, key);
    else if (key == "seed")
        cfg.seed = config_number<uint64_t>(value, key);
    else
        throw Error("unknown config key '" + key + "'");
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open config '" + path + "'");
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) text.append(buf, got);
    std::fclose(f);

    PipelineConfig cfg;
    size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trimmed(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + " has no '='");
        apply_config_line(cfg, trimmed(line.substr(0, eq)), trimmed(line.substr(eq + 1)));
    }
    return cfg;
}

int cmd_synth(const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
    CLI::App app{"Generate a synthetic glyph and scene dataset"};
    app.name("synth");
    std::string out_dir;
    std::string atlas_dir = "assets/atlas";
    int per_class = 0;
    int scenes = 0;
    uint64_t seed = 0;
    double clutter = 0.5;
    app.add_option("--out", out_dir, "output dataset directory")->required();
    app.add_option("--per-class", per_class, "glyph samples per symbol")
        ->required()
        ->check(CLI::PositiveNumber);
    app.add_option("--scenes", scenes, "number of full frames")
        ->required()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "master seed")->required();
    app.add_option("--clutter", clutter, "bar/blob density in [0, 1]")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--atlas", atlas_dir, "glyph atlas directory")
        ->capture_default_str();
    if (auto done = parse_args(app, args, out, err)) return *done;

    try {
        const GlyphAtlas atlas = load_atlas(atlas_dir);
        const DatasetSplit split = build_split(atlas, per_class, AugmentSpec{}, seed);
        save_glyphs(out_dir, split);
        const size_t total_glyphs =
            split.train.size() + split.validation.size() + split.test.size();

        for (int i = 0; i < scenes; ++i) {
            Rng rng(mix64(seed ^ (kSceneStride * static_cast<uint64_t>(i + 1))));
            SceneSpec spec;
            spec.clutter = clutter;
            const int len = 5 + static_cast<int>(rng.bounded(4));
            for (int c = 0; c < len; ++c)
                spec.text += kAlphabet[rng.bounded(kClassCount)];
            spec.gain = 0.94 + rng.uniform() * 0.12;
            spec.bias = -6.0 + rng.uniform() * 12.0;
            const BoundingBox extent = plate_extent(atlas, spec.text);
            spec.plate_box = {
                static_cast<int>(rng.bounded(
                    static_cast<uint64_t>(spec.width - extent.w + 1))),
                static_cast<int>(rng.bounded(
                    static_cast<uint64_t>(spec.height - extent.h + 1))),
                extent.w, extent.h};
            const Scene scene = render_scene(atlas, spec, rng);

            char id[16];
            std::snprintf(id, sizeof(id), "%04d", i);
            save_scene(out_dir, id, scene);
        }
        out << "wrote " << total_glyphs << " glyphs and " << scenes
            << " scenes under " << out_dir << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int cmd_train(const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err) {
    CLI::App app{"Train a classifier and calibrate its rejection thresholds"};
    app.name("train");
    std::string data_dir, classifier, out_file;
    int trees = 100;
    uint64_t seed = 0;
    int threads = 1;
    bool as_json = false;
    app.add_option("--data", data_dir, "dataset directory from synth")->required();
    app.add_option("--classifier", classifier, "forest or knn")
        ->required()
        ->check(CLI::IsMember({"forest", "knn"}));
    app.add_option("--out", out_file, "model file to write")->required();
    app.add_option("--trees", trees, "ensemble size (forest only)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "training seed (forest only)")
        ->capture_default_str();
    app.add_option("--threads", threads, "worker threads (forest only)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_flag("--json", as_json, "emit the report as JSON");
    if (auto done = parse_args(app, args, out, err)) return *done;

    try {
        const DatasetSplit split = split_loaded(load_glyphs(data_dir));
        std::vector<LabeledVector> vectors;
        vectors.reserve(split.train.size());
        for (const LabeledGlyph& g : split.train)
            vectors.push_back({featurize(g.sample),
                               static_cast<uint8_t>(label_index(g.symbol[0]))});

        Model model = classifier == "forest"
                          ? Model(train_forest(std::move(vectors), trees, 20, seed,
                                               RejectionThresholds{}, threads))
                          : Model(make_knn(std::move(vectors), 3,
                                           RejectionThresholds{}));
        const CalibrationReport report = calibrate_thresholds(model, split.validation);
        set_model_thresholds(model, report.thresholds);
        save_model(model, out_file);

        const RejectionThresholds& t = report.thresholds;
        if (as_json) {
            const json j{
                {"classifier", classifier},
                {"train_samples", split.train.size()},
                {"model", out_file},
                {"thresholds", {{"tc", t.t_c}, {"ts", t.t_s}, {"pe", t.p_e}}},
                {"validation",
                 {{"real", report.real_count},
                  {"special", report.special_count},
                  {"min_real_ink", report.min_real_ink},
                  {"real_accept_rate", report.real_accept_rate},
                  {"special_reject_rate", report.special_reject_rate}}}};
            out << j.dump(2) << "\n";
        } else {
            out << "classifier: " << classifier << "\n"
                << "train samples: " << split.train.size() << "\n"
                << "validation: " << report.real_count << " real, "
                << report.special_count << " special\n"
                << "thresholds: tc=" << t.t_c << " ts=" << t.t_s << " pe=" << t.p_e
                << "\n"
                << std::fixed << std::setprecision(4)
                << "real accept rate: " << report.real_accept_rate << "\n"
                << "special reject rate: " << report.special_reject_rate << "\n"
                << "model: " << out_file << "\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int cmd_recognize(const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err) {
    CLI::App app{"Read the plate in one image"};
    app.name("recognize");
    std::string model_file, image_file, config_file, debug_dir;
    bool as_json = false;
    app.add_option("--model", model_file, "trained model file")->required();
    app.add_option("--image", image_file, "input image (PBM/PGM/PPM)")->required();
    app.add_option("--config", config_file, "pipeline config file");
    app.add_option("--debug", debug_dir, "directory for stage artifacts");
    app.add_flag("--json", as_json, "emit the reading as JSON");
    if (auto done = parse_args(app, args, out, err)) return *done;

    PipelineConfig cfg;
    if (!config_file.empty()) {
        try {
            cfg = load_pipeline_config(config_file);
        } catch (const IoError& e) {
            err << "error: " << e.what() << "\n";
            return kExitMissingFile;
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    try {
        Model model = load_model(model_file);
        bake_threshold_overrides(model, cfg);
        const GrayImage image = load_gray(image_file);

        std::optional<DebugOptions> debug;
        if (!debug_dir.empty())
            debug = DebugOptions{debug_dir, fs::path(image_file).stem().string()};

        PlateReading reading;
        try {
            reading = recognize(image, model, cfg, debug);
        } catch (const NoEdgesError&) {
            out << (as_json ? json{{"status", "no_plate"}}.dump(2)
                            : std::string("no plate found"))
                << "\n";
            return kExitNoPlate;
        } catch (const EmptyPlateError&) {
            out << (as_json ? json{{"status", "no_plate"}}.dump(2)
                            : std::string("no plate found"))
                << "\n";
            return kExitNoPlate;
        }

        if (as_json)
            out << reading_json(reading).dump(2) << "\n";
        else
            out << reading.text << "\n";
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int cmd_evaluate(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
    CLI::App app{"Score models over a scene directory"};
    app.name("evaluate");
    std::string models_list, data_dir, config_file;
    int threads = 1;
    bool as_json = false;
    app.add_option("--models", models_list, "comma-separated model files")
        ->required();
    app.add_option("--data", data_dir, "dataset directory with scenes/")->required();
    app.add_option("--config", config_file, "pipeline config file");
    app.add_option("--threads", threads, "worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_flag("--json", as_json, "emit the table as JSON");
    if (auto done = parse_args(app, args, out, err)) return *done;

    PipelineConfig base_cfg;
    if (!config_file.empty()) {
        try {
            base_cfg = load_pipeline_config(config_file);
        } catch (const IoError& e) {
            err << "error: " << e.what() << "\n";
            return kExitMissingFile;
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    std::vector<std::string> model_files;
    {
        size_t pos = 0;
        while (pos <= models_list.size()) {
            size_t comma = models_list.find(',', pos);
            if (comma == std::string::npos) comma = models_list.size();
            const std::string item = trimmed(models_list.substr(pos, comma - pos));
            if (!item.empty()) model_files.push_back(item);
            pos = comma + 1;
        }
    }
    if (model_files.empty()) {
        err << "error: --models names no files\n";
        return kExitUsage;
    }

    try {
        const std::vector<std::string> ids = list_scene_ids(data_dir);
        if (ids.empty()) {
            err << "error: no scenes under '" << data_dir << "'\n";
            return kExitMissingFile;
        }
        const fs::path scene_dir = fs::path(data_dir) / "scenes";
        std::vector<GrayImage> images(ids.size());
        std::vector<SceneTruth> truths(ids.size());
        for (size_t i = 0; i < ids.size(); ++i) {
            images[i] = load_gray((scene_dir / (ids[i] + ".pgm")).string());
            truths[i] = load_truth((scene_dir / (ids[i] + ".truth")).string());
        }

        struct Row {
            std::string path;
            const char* classifier;
            double accuracy;
            double seconds;
            long correct, spurious, total;
        };
        std::vector<Row> rows;

        for (const std::string& model_file : model_files) {
            Model model = load_model(model_file);
            PipelineConfig cfg = base_cfg;
            bake_threshold_overrides(model, cfg);

            std::vector<SceneScore> scores(ids.size());
            std::atomic<size_t> next{0};
            std::mutex err_mutex;
            std::exception_ptr first_error;
            auto worker = [&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= ids.size()) return;
                    try {
                        SceneScore& s = scores[i];
                        s.truth = static_cast<int>(truths[i].char_boxes.size());
                        const auto t0 = Clock::now();
                        try {
                            const PlateReading reading = recognize(images[i], model, cfg);
                            const AccuracyCount c = score_reading(
                                reading, truths[i].text, truths[i].char_boxes);
                            s.correct = c.correct;
                            s.spurious = c.spurious;
                        } catch (const NoEdgesError&) {
                        } catch (const EmptyPlateError&) {
                        }
                        s.seconds =
                            std::chrono::duration<double>(Clock::now() - t0).count();
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            };
            if (threads <= 1) {
                worker();
            } else {
                std::vector<std::thread> team;
                for (int t = 0; t < threads; ++t) team.emplace_back(worker);
                for (std::thread& t : team) t.join();
            }
            if (first_error) std::rethrow_exception(first_error);

            // Input-order aggregation: totals are independent of scheduling.
            long correct = 0, spurious = 0, total = 0;
            double seconds = 0;
            for (const SceneScore& s : scores) {
                correct += s.correct;
                spurious += s.spurious;
                total += s.truth;
                seconds += s.seconds;
            }
            rows.push_back({model_file, classifier_name(model),
                            accuracy_of(correct, spurious, total),
                            seconds / static_cast<double>(ids.size()), correct,
                            spurious, total});
        }

        if (as_json) {
            json models = json::array();
            for (const Row& r : rows)
                models.push_back({{"model", r.path},
                                  {"classifier", r.classifier},
                                  {"accuracy", r.accuracy},
                                  {"seconds_per_image", r.seconds},
                                  {"correct", r.correct},
                                  {"spurious", r.spurious},
                                  {"total_truth", r.total}});
            out << json{{"scenes", ids.size()}, {"models", std::move(models)}}.dump(2)
                << "\n";
        } else {
            out << "Classifier | Accuracy | s/image\n";
            out << std::fixed << std::setprecision(4);
            for (const Row& r : rows)
                out << r.classifier << " | " << r.accuracy << " | " << r.seconds
                    << "\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

namespace {

const char kUsage[] =
    "usage: anpr <command> [flags]\n"
    "\n"
    "commands:\n"
    "  synth      generate a synthetic glyph and scene dataset\n"
    "  train      train a classifier and calibrate rejection thresholds\n"
    "  recognize  read the plate in one image\n"
    "  evaluate   score models over a scene directory\n"
    "\n"
    "run 'anpr <command> --help' for the command's flags\n";

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    if (args.empty()) {
        err << kUsage;
        return kExitUsage;
    }
    const std::string cmd = args.front();
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (cmd == "synth") return cmd_synth(rest, out, err);
    if (cmd == "train") return cmd_train(rest, out, err);
    if (cmd == "recognize") return cmd_recognize(rest, out, err);
    if (cmd == "evaluate") return cmd_evaluate(rest, out, err);
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
        out << kUsage;
        return kExitOk;
    }
    err << "unknown command '" << cmd << "'\n\n" << kUsage;
    return kExitUsage;
}

}  // namespace anpr
