/*
 * Copyright 2026 The GCE Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gce/cli/config.h"
#include "gce/evaluation/evaluation.h"

namespace gce {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitData = 2, kExitNumeric = 3 };

// Maps the exception currently being handled to an exit code.
int exit_code_for_current_exception();

std::string version_string();

// Returns true on a cache hit (nothing rewritten).
bool cmd_ingest(const RunConfig& cfg);

struct TrainSeedResult {
  std::uint64_t seed = 0;
  TrainReport report;
  std::filesystem::path checkpoint;
  std::filesystem::path log;
  double seconds = 0.0;
};
std::vector<TrainSeedResult> cmd_train(const RunConfig& cfg);

struct EvalRequest {
  std::string checkpoint_glob;  // empty: <output_dir>/<model>-<provider>-seed*.ckpt
  std::optional<LongTailFilter> long_tail;
  bool first_step_probe = false;
};
EvalReport cmd_eval(const RunConfig& cfg, const EvalRequest& req);

struct GridCell {
  std::size_t index = 0;
  double lr = 0.0;
  std::size_t batch_size = 0;
  double dropout = 0.0;
  bool failed = false;
  std::string error;
  double val_ndcg10 = 0.0;
  double val_hr10 = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs = 0;
  double seconds = 0.0;
};

std::vector<GridCell> enumerate_grid(const RunConfig& cfg);
struct GridResult {
  std::vector<GridCell> cells;  // in enumeration order
  std::optional<std::size_t> best;
};
// Throws the first cell's error when every cell failed.
GridResult cmd_gridsearch(const RunConfig& cfg);
// The resolved config with the cell's lr, batch size and dropout substituted.
std::string best_config_text(const RunConfig& cfg, const GridCell& cell);

// Prints one line per head x provider pair. Returns false on any failure.
bool cmd_check_grad(Activation activation, std::ostream& out);

// Entry point shared by the executable; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace gce
