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

#include "gce/cli/commands.h"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "gce/cli/pipeline.h"
#include "gce/error.h"
#include "gce/training/grad_suite.h"

#ifndef GCE_VERSION
#define GCE_VERSION "unknown"
#endif

namespace gce {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

nlohmann::ordered_json stats_object(const Prepared& p) {
  return nlohmann::ordered_json::parse(stats_json(p));
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const nlohmann::ordered_json& stats, const nlohmann::ordered_json& timings) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version_string();
  j["config"] = cfg.resolved;
  j["stats"] = stats;
  j["timings_s"] = timings;
  write_text(cfg.output_dir / ("manifest-" + command + ".json"), j.dump(2) + "\n");
}

std::string model_stem(const RunConfig& cfg) {
  return to_string(cfg.model.head) + "-" + to_string(cfg.model.provider);
}

std::vector<fs::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<fs::path> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RankTask> test_tasks(const RunConfig& cfg, const Experiment& ex,
                                 const std::optional<LongTailFilter>& long_tail) {
  auto tasks = make_tasks(ex.data.split.test, ex.graph.indexer);
  if (cfg.exclude_train_positives) {
    exclude_train_positives(tasks, ex.data.split.train, ex.graph.indexer.cardinality(FieldSchema::kItem));
  }
  if (long_tail) tasks = apply_long_tail(tasks, ex.data.split.train, *long_tail);
  return tasks;
}

}  // namespace

std::string version_string() { return GCE_VERSION; }

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const CLI::Error& e) {
    spdlog::error("usage error: {}", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const IndexError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const SamplingError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const EvalError& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("data error: {}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    spdlog::error("numeric failure: {}", e.what());
    return kExitNumeric;
  }
}

bool cmd_ingest(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const fs::path path = cache_path(cfg);
  if (fs::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    try {
      const Prepared cached = read_cache(in);
      if (cached.fingerprint == data_fingerprint(cfg)) {
        spdlog::info("cache hit: {} is up to date", path.string());
        return true;
      }
    } catch (const DataError& e) {
      spdlog::warn("rebuilding unreadable cache {}: {}", path.string(), e.what());
    }
  }
  const Prepared p = prepare(cfg);
  std::ostringstream bytes;
  write_cache(bytes, p);
  write_text(path, bytes.str());
  write_text(cfg.cache_dir / "stats.json", stats_json(p) + "\n");
  spdlog::info("wrote {} ({} train / {} validation / {} test records)", path.string(),
               p.split.train.size(), p.split.validation.size(), p.split.test.size());
  write_manifest(cfg, "ingest", stats_object(p), {{"total", seconds_since(t0)}});
  return false;
}

std::vector<TrainSeedResult> cmd_train(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Experiment ex = make_experiment(cfg, load_cache(cfg));
  fs::create_directories(cfg.output_dir);
  std::vector<TrainSeedResult> results;
  nlohmann::ordered_json timings;
  for (std::uint64_t seed : cfg.seeds) {
    const auto ts = Clock::now();
    TrainSeedResult r;
    r.seed = seed;
    r.checkpoint = checkpoint_path(cfg, seed);
    r.log = r.checkpoint;
    r.log.replace_extension(".log.jsonl");
    auto model = make_model(cfg, ex, seed);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    std::ostringstream log;
    r.report = train(*model, ex.data.split.train, ex.data.split.validation, tc, &log);
    write_text(r.log, log.str());
    std::ostringstream ckpt;
    model->save(ckpt);
    write_text(r.checkpoint, ckpt.str());
    r.seconds = seconds_since(ts);
    timings["seed" + std::to_string(seed)] = r.seconds;
    spdlog::info("seed {}: {} ({:.1f}s)", seed, r.checkpoint.string(), r.seconds);
    results.push_back(std::move(r));
  }
  timings["total"] = seconds_since(t0);
  write_manifest(cfg, "train", stats_object(ex.data), timings);
  return results;
}

EvalReport cmd_eval(const RunConfig& cfg, const EvalRequest& req) {
  const auto t0 = Clock::now();
  const Experiment ex = make_experiment(cfg, load_cache(cfg));
  const auto tasks = test_tasks(cfg, ex, req.long_tail);
  std::vector<SeedMetrics> per_seed;
  std::string suffix;

  if (req.first_step_probe) {
    if (req.long_tail || cfg.exclude_train_positives) {
      throw ConfigError("--first-step-probe cannot be combined with task filters");
    }
    suffix = "-probe";
    for (std::uint64_t seed : cfg.seeds) {
      auto model = make_model(cfg, ex, seed);
      TrainConfig tc = cfg.train;
      tc.seed = seed;
      per_seed.push_back(first_step_probe(*model, ex.data.split.train, ex.data.split.test, tc,
                                          cfg.probe_full_epoch));
      spdlog::info("probe seed {}: NDCG@10 {:.4f}", seed, per_seed.back().ndcg_at(10));
    }
  } else {
    const std::string pattern = req.checkpoint_glob.empty()
                                  ? (cfg.output_dir / (model_stem(cfg) + "-seed*.ckpt")).string()
                                  : req.checkpoint_glob;
    const auto paths = expand_glob(pattern);
    if (paths.empty()) throw DataError("no checkpoints match " + pattern);
    auto model = make_model(cfg, ex, 0);
    for (const auto& path : paths) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
      try {
        model->load(in);
      } catch (const CheckpointError& e) {
        throw CheckpointError(path.string() + ": " + e.what());
      }
      per_seed.push_back(evaluate_snapshot(model->snapshot(), tasks, cfg.eval_ks));
      spdlog::info("{}: HR@10 {:.4f}", path.string(), per_seed.back().hr.front());
    }
  }
  if (req.long_tail) {
    suffix = std::string("-longtail-") + (req.long_tail->mode == LongTailMode::items ? "items" : "users") +
             "-k" + std::to_string(req.long_tail->k);
  }
  const EvalReport report = aggregate(per_seed);
  const fs::path base = cfg.output_dir / (model_stem(cfg) + "-eval" + suffix);
  write_text(base.string() + ".json", report.to_json() + "\n");
  write_text(base.string() + ".csv", report.to_csv(model_stem(cfg)));
  std::cout << report.to_json() << std::endl;
  write_manifest(cfg, "eval", stats_object(ex.data), {{"total", seconds_since(t0)}});
  return report;
}

std::vector<GridCell> enumerate_grid(const RunConfig& cfg) {
  std::vector<GridCell> cells;
  for (double lr : cfg.grid_lr) {
    for (std::size_t bs : cfg.grid_batch) {
      for (double dr : cfg.grid_dropout) {
        GridCell c;
        c.index = cells.size();
        c.lr = lr;
        c.batch_size = bs;
        c.dropout = dr;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

std::string best_config_text(const RunConfig& cfg, const GridCell& cell) {
  auto values = cfg.resolved;
  std::ostringstream lr, dr;
  lr << cell.lr;
  dr << cell.dropout;
  values["train.lr"] = lr.str();
  values["train.batch_size"] = std::to_string(cell.batch_size);
  values["embedding.dropout"] = dr.str();
  std::ostringstream out;
  out << "# best cell " << cell.index << ": validation NDCG@10 " << cell.val_ndcg10 << "\n";
  for (const auto& [k, v] : values) out << k << " = " << v << "\n";
  return out.str();
}

GridResult cmd_gridsearch(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  GridResult res;
  res.cells = enumerate_grid(cfg);
  if (res.cells.empty()) throw ConfigError("grid search has no cells");
  const Experiment ex = make_experiment(cfg, load_cache(cfg));
  std::exception_ptr first_error;
  for (auto& cell : res.cells) {
    const auto ts = Clock::now();
    RunConfig cc = cfg;
    cc.train.lr = cell.lr;
    cc.train.batch_size = cell.batch_size;
    cc.model.embedding.dropout = cell.dropout;
    cc.train.seed = cfg.grid_seed;
    try {
      auto model = make_model(cc, ex, cfg.grid_seed);
      const TrainReport rep =
        train(*model, ex.data.split.train, ex.data.split.validation, cc.train, nullptr);
      cell.best_epoch = rep.best_epoch;
      cell.epochs = rep.epochs.size();
      cell.val_ndcg10 = rep.best_val_ndcg10;
      cell.val_hr10 = rep.epochs.at(rep.best_epoch - 1).val_hr10;
    } catch (const Error& e) {
      cell.failed = true;
      cell.error = e.what();
      if (!first_error) first_error = std::current_exception();
      spdlog::warn("grid cell {} failed: {}", cell.index, e.what());
    }
    cell.seconds = seconds_since(ts);
    spdlog::info("grid cell {}/{}: lr {} batch {} dropout {} -> val NDCG@10 {:.4f} ({:.0f}s)",
                 cell.index + 1, res.cells.size(), cell.lr, cell.batch_size, cell.dropout,
                 cell.val_ndcg10, cell.seconds);
    if (!cell.failed && (!res.best || cell.val_ndcg10 > res.cells[*res.best].val_ndcg10)) {
      res.best = cell.index;
    }
  }
  if (!res.best) std::rethrow_exception(first_error);

  std::vector<const GridCell*> ranked;
  for (const auto& c : res.cells) ranked.push_back(&c);
  std::stable_sort(ranked.begin(), ranked.end(), [](const GridCell* a, const GridCell* b) {
    if (a->failed != b->failed) return !a->failed;
    return a->val_ndcg10 > b->val_ndcg10;
  });
  std::ostringstream csv;
  csv << "rank,cell,lr,batch_size,dropout,status,val_ndcg10,val_hr10,best_epoch,epochs\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const GridCell& c = *ranked[i];
    csv << i + 1 << ',' << c.index << ',' << c.lr << ',' << c.batch_size << ',' << c.dropout << ','
        << (c.failed ? "failed" : "ok") << ',' << c.val_ndcg10 << ',' << c.val_hr10 << ','
        << c.best_epoch << ',' << c.epochs << '\n';
  }
  const std::string stem = model_stem(cfg);
  write_text(cfg.output_dir / ("grid-" + stem + ".csv"), csv.str());
  write_text(cfg.output_dir / ("best-" + stem + ".conf"), best_config_text(cfg, res.cells[*res.best]));
  nlohmann::ordered_json timings;
  for (const auto& c : res.cells) timings["cell" + std::to_string(c.index)] = c.seconds;
  timings["total"] = seconds_since(t0);
  write_manifest(cfg, "gridsearch", stats_object(ex.data), timings);
  return res;
}

bool cmd_check_grad(Activation activation, std::ostream& out) {
  bool ok = true;
  for (const auto& e : run_gradient_suite(activation)) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-7s max rel error %.3e over %zu coordinates (%s) %s",
                  to_string(e.head).c_str(), to_string(e.provider).c_str(), e.result.max_rel_error,
                  e.result.coordinates, e.result.worst_parameter.c_str(),
                  e.passed() ? "ok" : "FAIL");
    out << line << '\n';
    ok = ok && e.passed();
  }
  return ok;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Graph convolutional embeddings for context-aware recommendation"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  std::string config_path;
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  auto* ingest = app.add_subcommand("ingest", "Load, derive contexts, filter, split and cache");
  auto* train_cmd = app.add_subcommand("train", "Train one model per seed");
  auto* eval = app.add_subcommand("eval", "Evaluate checkpoints on the test split");
  auto* grid = app.add_subcommand("gridsearch", "Grid over learning rate, batch size, dropout");
  auto* grad = app.add_subcommand("check-grad", "Gradient check of every head and provider");
  for (auto* sub : {ingest, train_cmd, eval, grid}) {
    sub->add_option("--config", config_path, "Config file")->required();
  }
  grad->add_option("--config", config_path, "Config file (activation only)");

  EvalRequest req;
  std::string long_tail_mode;
  std::size_t long_tail_k = 0;
  eval->add_option("--checkpoints", req.checkpoint_glob, "Checkpoint glob");
  auto* lt = eval->add_option("--long-tail", long_tail_mode, "items|users");
  eval->add_option("--k", long_tail_k, "Number of popular entities to drop")->needs(lt);
  eval->add_flag("--first-step-probe", req.first_step_probe, "One optimizer step, then test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (grad->parsed()) {
      Activation act = Activation::relu;
      if (!config_path.empty()) act = load_run_config(config_path).model.embedding.activation;
      return cmd_check_grad(act, std::cout) ? kExitOk : kExitNumeric;
    }
    const RunConfig cfg = load_run_config(config_path);
    if (ingest->parsed()) {
      cmd_ingest(cfg);
    } else if (train_cmd->parsed()) {
      cmd_train(cfg);
    } else if (eval->parsed()) {
      if (!long_tail_mode.empty()) req.long_tail = LongTailFilter{parse_long_tail_mode(long_tail_mode), long_tail_k};
      cmd_eval(cfg, req);
    } else if (grid->parsed()) {
      cmd_gridsearch(cfg);
    }
    return kExitOk;
  } catch (...) {
    return exit_code_for_current_exception();
  }
}

}  // namespace gce
