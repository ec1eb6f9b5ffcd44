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

#include <iosfwd>
#include <string>
#include <vector>

#include "anpr/pipeline.hpp"

namespace anpr {

// Exit codes. Results go to `out`, diagnostics to `err`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoPlate = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitMissingFile = 66;
inline constexpr int kExitInternal = 70;

/// Flat key=value file mirroring the pipeline config field names
/// (bilateral_kernel, clahe_tile, edge_threshold, window_width_fracs as a
/// comma list, min_char_width, classifier, tc/ts/pe, ...). '#' starts a
/// comment. Unknown keys are errors. Flags override file values.
PipelineConfig load_pipeline_config(const std::string& path);
void apply_config_line(PipelineConfig& cfg, const std::string& key,
                       const std::string& value);

// synth --out DIR --per-class N --scenes M --seed S [--clutter C]
//   Writes glyphs/ (augmented samples for every symbol, specials included)
//   and scenes/ (frames plus .truth files) under DIR.
int cmd_synth(const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err);

// train --data DIR --classifier forest|knn --out FILE
//       [--trees N] [--seed S] [--threads T] [--json]
//   Trains on DIR's glyph split, calibrates rejection thresholds on the
//   validation part, writes the model file, prints the calibration report.
int cmd_train(const std::vector<std::string>& args, std::ostream& out,
              std::ostream& err);

// recognize --model FILE --image FILE [--config FILE] [--debug DIR] [--json]
//   Prints the recognized plate text (or a JSON reading with --json).
//   A frame with no usable plate prints "no plate found" and exits 2.
int cmd_recognize(const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err);

// evaluate --models LIST --data DIR [--config FILE] [--json]
//   Runs every model over DIR/scenes and prints
//   Classifier | Accuracy | s/image, one row per model.
int cmd_evaluate(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace anpr
