// Copyright 2026 The gentac Authors
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

#include "cli.hpp"

#include "gentac/data/clip_io.hpp"
#include "gentac/data/fixtures.hpp"
#include "gentac/data/refine.hpp"
#include "gentac/data/resample.hpp"
#include "gentac/metrics/events.hpp"
#include "gentac/metrics/report.hpp"
#include "gentac/model/checkpoint.hpp"
#include "gentac/train/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

namespace gentac::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using numeric::Index;

// ---- files and manifests ---------------------------------------------------

bool is_clip_file(const fs::path& p) {
  const std::string name = p.filename().string();
  auto ends_with = [&](std::string_view s) { return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0; };
  return ends_with(".json") && !ends_with(".meta.json") && !ends_with("manifest.json");
}

std::vector<fs::path> clip_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_clip_file(entry.path())) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<data::TrajectoryClip> load_dir(const fs::path& dir) {
  std::vector<data::TrajectoryClip> clips;
  for (const auto& p : clip_files(dir)) clips.push_back(data::load_clip(p));
  if (clips.empty()) throw std::runtime_error("no clip files in " + dir.string());
  return clips;
}

std::string file_hash(const fs::path& p) { return git_blob_hash(data::read_text(p)); }

/// Provenance record written next to every output.
struct Manifest {
  std::string command;
  std::string config;  // resolved options, TOML
  std::uint64_t seed = 0;
  std::string checkpoint_hash;
  std::map<std::string, std::string> inputs, outputs;

  void input(const fs::path& p) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::recursive_directory_iterator(p))
        if (entry.is_regular_file()) inputs[entry.path().generic_string()] = file_hash(entry.path());
    } else {
      inputs[p.generic_string()] = file_hash(p);
    }
  }
  void output(const fs::path& p) { outputs[p.generic_string()] = file_hash(p); }

  void write(const fs::path& where) const {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["config_hash"] = git_blob_hash(config);
    j["seed"] = seed;
    j["checkpoint_hash"] = checkpoint_hash;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    data::write_text(where, j.dump(2) + "\n");
  }
};

/// `out/clip.json` -> `out/clip.manifest.json`; directories get `manifest.json`.
fs::path manifest_for_file(const fs::path& output) {
  fs::path p = output;
  p.replace_extension(".manifest.json");
  return p;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0;
    if (!CLI::detail::lexical_cast(item, v)) throw CLI::ValidationError("--horizons", "not a number: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--horizons", "empty list");
  return out;
}

data::Roster joint_roster(const data::TrajectoryClip& a, const data::TrajectoryClip* b) {
  if (!b) return data::Roster::of(a);
  data::TrajectoryClip merged = a;
  merged.frames.insert(merged.frames.end(), b->frames.begin(), b->frames.end());
  return data::Roster::of(merged);
}

/// Whole clip in meters; no pitch check, since model output is not clipped.
data::Segment meters(const data::TrajectoryClip& clip, const data::Roster& roster) {
  const auto seg = data::to_segment(clip, roster, 0, static_cast<Index>(clip.size()), std::numeric_limits<double>::infinity());
  return metrics::to_meters(seg, clip.pitch());
}

// ---- shared option groups --------------------------------------------------

struct ModelOptions {
  bool desk = false;
  int d = 0, layers = 0, heads = 0, l_max = 250;
  bool mlp = false;

  void add(CLI::App* app) {
    app->add_flag("--desk", desk, "Desk-scale backbone (d=32, 2 layers, 4 heads)");
    app->add_option("--d", d, "Embedding width (0 keeps the preset)");
    app->add_option("--layers", layers, "Spatial+temporal block pairs (0 keeps the preset)");
    app->add_option("--heads", heads, "Attention heads (0 keeps the preset)");
    app->add_option("--l-max", l_max, "Temporal table length / event clip length")->capture_default_str();
    app->add_flag("--mlp", mlp, "Add a feed-forward sublayer to every block");
  }
  model::BackboneConfig make(int per_team, model::HeadKind head) const {
    model::BackboneConfig c = desk ? model::BackboneConfig::desk(per_team) : model::BackboneConfig{};
    c.per_team = per_team;
    if (d > 0) c.d = d;
    if (layers > 0) c.layers = layers;
    if (heads > 0) c.heads = heads;
    c.l_max = l_max;
    c.mlp = mlp;
    c.head = head;
    c.validate();
    return c;
  }
};

struct TrainOptions {
  fs::path data, out, log;
  double valid_fraction = 0.1;
  train::TrainConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--data", data, "Directory of training clips")->required()->check(CLI::ExistingDirectory);
    app->add_option("--out", out, "Checkpoint to write")->required();
    app->add_option("--log", log, "Per-epoch CSV log");
    app->add_option("--valid-fraction", valid_fraction, "Share of clips held out")->capture_default_str()->check(CLI::Range(0.0, 0.9));
    app->add_option("--epochs", cfg.epochs)->capture_default_str();
    app->add_option("--batch-size", cfg.batch_size)->capture_default_str();
    app->add_option("--lr", cfg.lr_peak)->capture_default_str();
    app->add_option("--weight-decay", cfg.weight_decay)->capture_default_str();
    app->add_option("--warmup", cfg.warmup_ratio)->capture_default_str();
    app->add_option("--grad-clip", cfg.grad_clip)->capture_default_str();
    app->add_option("--patience", cfg.patience)->capture_default_str();
    app->add_option("--seed", cfg.seed)->capture_default_str();
    app->add_option("--max-seconds", cfg.max_seconds, "Wall-clock cap (breaks reproducibility)")->capture_default_str();
  }

  /// Deterministic shuffled split by seed; at least one clip on each side.
  template <typename T>
  std::pair<std::vector<T>, std::vector<T>> split(std::vector<T> items) const {
    if (items.size() < 2) throw std::runtime_error("need at least two clips to split train/valid");
    numeric::Rng rng = numeric::Rng(cfg.seed).split("split");
    for (std::size_t i = items.size(); i > 1; --i)
      std::swap(items[i - 1], items[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)))]);
    auto n_valid = static_cast<std::size_t>(std::ceil(valid_fraction * static_cast<double>(items.size())));
    n_valid = std::clamp<std::size_t>(n_valid, 1, items.size() - 1);
    std::vector<T> valid(items.end() - static_cast<std::ptrdiff_t>(n_valid), items.end());
    items.resize(items.size() - n_valid);
    return {std::move(items), std::move(valid)};
  }
};

struct ForecastOptions {
  double history = 4.0, window = 0.2;
  int stride = 0;  // frames; 0 means one window
  int steps = 100;
  double beta_start = 1e-4, beta_end = 0.02;
  std::string setting = "unconditioned";
  int target_side = 0;

  void add(CLI::App* app) {
    app->add_option("--history", history, "History length in seconds")->capture_default_str();
    app->add_option("--window", window, "Causal window in seconds")->capture_default_str();
    app->add_option("--stride", stride, "Frames between training windows (0 = one window)")->capture_default_str();
    app->add_option("--steps", steps, "Diffusion steps S")->capture_default_str();
    app->add_option("--beta-start", beta_start)->capture_default_str();
    app->add_option("--beta-end", beta_end)->capture_default_str();
    app->add_option("--setting", setting, "unconditioned|opponent|team|league|objective")->capture_default_str();
    app->add_option("--target-side", target_side, "Predicted side in single-team settings")->capture_default_str()->check(CLI::Range(0, 1));
  }

  json meta(double fps) const {
    return {{"task", "forecast"}, {"fps", fps},           {"history_s", history},       {"window_s", window},
            {"steps", steps},     {"beta_start", beta_start}, {"beta_end", beta_end}, {"setting", setting},
            {"target_side", target_side}};
  }
};

double common_fps(const std::vector<data::TrajectoryClip>& clips) {
  const double fps = clips.front().fps;
  for (const auto& c : clips)
    if (c.fps != fps) throw std::runtime_error("clips mix frame rates; resample first");
  return fps;
}

int common_per_team(const std::vector<data::TrajectoryClip>& clips) {
  const int n = clips.front().players_per_team;
  for (const auto& c : clips)
    if (c.players_per_team != n) throw std::runtime_error("clips mix team sizes");
  return n;
}

std::vector<train::ForecastExample> examples_for(const std::vector<data::TrajectoryClip>& clips,
                                                 const ForecastOptions& f, double fps) {
  diffusion::RolloutConfig rc;
  rc.history = f.history;
  rc.window = f.window;
  rc.horizon = f.window;
  const auto fc = diffusion::frame_counts(rc, fps);
  const bool single = diffusion::is_single_team(diffusion::setting_from_string(f.setting));
  std::vector<train::ForecastExample> out;
  for (const auto& c : clips) {
    auto ex = train::forecast_examples(c, fc.history, fc.window, f.stride > 0 ? f.stride : fc.window,
                                       single ? model::Task::forecast_single : model::Task::forecast_joint,
                                       f.target_side);
    std::move(ex.begin(), ex.end(), std::back_inserter(out));
  }
  if (out.empty()) throw std::runtime_error("clips are too short for one history + window");
  return out;
}

void write_log(const fs::path& path, const train::TrainResult& r, Manifest& m) {
  if (path.empty()) return;
  data::write_text(path, train::log_csv(r.log));
  m.output(path);
}

std::string summary_line(const train::TrainResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epochs %zu, best epoch %d, best metric %.6f%s", r.log.size(), r.best_epoch,
                r.best_metric, r.stopped_early ? ", stopped early" : "");
  return buf;
}

// ---- subcommands -----------------------------------------------------------

struct Context {
  std::ostream& out;
  CLI::App* sub = nullptr;
  Manifest manifest(const std::string& name) const {
    Manifest m;
    m.command = name;
    m.config = sub->config_to_str(true, false);
    return m;
  }
};

using Action = std::function<void(const Context&)>;

Action add_ingest(CLI::App& app) {
  struct O {
    fs::path input, output;
    double fps = 0;
    std::string sport;
    bool lenient = false;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("ingest", "Validate a raw clip and write it in canonical form");
  s->add_option("--input", o->input)->required()->check(CLI::ExistingFile);
  s->add_option("--output", o->output)->required();
  s->add_option("--fps", o->fps, "Override the frame rate");
  s->add_option("--sport", o->sport, "soccer|basketball|american_football|ice_hockey");
  s->add_flag("--lenient", o->lenient, "Accept repeated player ids and resolve them");
  return [o](const Context& ctx) {
    auto clip = data::load_clip(o->input, {.keep_duplicates = o->lenient});
    if (o->fps > 0) clip.fps = o->fps;
    if (!o->sport.empty()) {
      clip.sport = data::sport_from_string(o->sport);
      clip.players_per_team = data::players_per_team(clip.sport);
    }
    data::RefineReport report;
    if (o->lenient) {
      // Duplicate resolution only: no gap fill, no anomaly repair, no smoothing.
      clip = data::refine(clip, {.max_gap = 0, .v_max = std::numeric_limits<double>::infinity(), .gamma = 1.0}, &report);
    }
    clip.validate();
    data::save_clip(clip, o->output);
    Manifest m = ctx.manifest("ingest");
    m.input(o->input);
    m.output(o->output);
    m.write(manifest_for_file(o->output));
    ctx.out << "ingested " << clip.size() << " frames, " << report.duplicates_resolved << " duplicates resolved\n";
  };
}

Action add_resample(CLI::App& app) {
  struct O {
    fs::path input, output;
    double fps = 25;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("resample", "Resample a clip to a new frame rate");
  s->add_option("--input", o->input)->required()->check(CLI::ExistingFile);
  s->add_option("--output", o->output)->required();
  s->add_option("--fps", o->fps, "Target frame rate")->capture_default_str()->check(CLI::PositiveNumber);
  return [o](const Context& ctx) {
    const auto out = data::resample(data::load_clip(o->input), o->fps);
    data::save_clip(out, o->output);
    Manifest m = ctx.manifest("resample");
    m.input(o->input);
    m.output(o->output);
    m.write(manifest_for_file(o->output));
    ctx.out << "resampled to " << out.size() << " frames at " << o->fps << " fps\n";
  };
}

Action add_refine(CLI::App& app) {
  struct O {
    fs::path input, output;
    data::RefineParams params;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("refine", "Resolve duplicates, fill gaps, repair anomalies and smooth");
  s->add_option("--input", o->input)->required()->check(CLI::ExistingFile);
  s->add_option("--output", o->output)->required();
  s->add_option("--max-gap", o->params.max_gap)->capture_default_str();
  s->add_option("--v-max", o->params.v_max)->capture_default_str();
  s->add_option("--anomaly-count", o->params.anomaly_count)->capture_default_str();
  s->add_option("--gamma", o->params.gamma)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  return [o](const Context& ctx) {
    data::RefineReport r;
    const auto out = data::refine(data::load_clip(o->input, {.keep_duplicates = true}), o->params, &r);
    data::save_clip(out, o->output);
    Manifest m = ctx.manifest("refine");
    m.input(o->input);
    m.output(o->output);
    m.write(manifest_for_file(o->output));
    ctx.out << "duplicates " << r.duplicates_resolved << ", gaps filled " << r.gaps_filled << ", anomalous pairs "
            << r.anomalous_pairs << ", frames reconstructed " << r.frames_reconstructed << "\n";
  };
}

Action add_train_traj(CLI::App& app) {
  struct O {
    TrainOptions t;
    ForecastOptions f;
    ModelOptions m;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("train-traj", "Train the trajectory diffusion model");
  o->t.add(s);
  o->f.add(s);
  o->m.add(s);
  return [o](const Context& ctx) {
    const auto clips = load_dir(o->t.data);
    const double fps = common_fps(clips);
    const auto [train_clips, valid_clips] = o->t.split(clips);
    const auto cfg = o->m.make(common_per_team(clips), model::HeadKind::noise);
    const auto schedule = diffusion::Schedule::make(o->f.steps, o->f.beta_start, o->f.beta_end);
    auto tc = o->t.cfg;
    tc.task = train::TaskKind::forecast;
    const auto r = train::train_forecast(model::Model::create(cfg, tc.seed), examples_for(train_clips, o->f, fps),
                                         examples_for(valid_clips, o->f, fps), tc, schedule);
    model::save_checkpoint(o->t.out, r.best, o->f.meta(fps));
    Manifest m = ctx.manifest("train-traj");
    m.seed = tc.seed;
    m.input(o->t.data);
    m.output(o->t.out);
    m.checkpoint_hash = m.outputs.begin()->second;
    write_log(o->t.log, r, m);
    m.write(manifest_for_file(o->t.out));
    ctx.out << summary_line(r) << "\n";
  };
}

Action add_finetune(CLI::App& app) {
  struct O {
    TrainOptions t;
    fs::path base;
    std::string condition;
    std::string setting = "league";
    int stride = 0;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("finetune", "Continue training a base checkpoint on a conditioned subset");
  o->t.add(s);
  s->add_option("--base", o->base, "Base checkpoint")->required()->check(CLI::ExistingFile);
  s->add_option("--setting", o->setting, "team|league|objective")->capture_default_str();
  s->add_option("--condition", o->condition, "Team id, league id, or offense|defense")->required();
  s->add_option("--stride", o->stride, "Frames between training windows (0 = one window)")->capture_default_str();
  return [o](const Context& ctx) {
    const auto base = model::load_checkpoint(o->base);
    const auto all = load_dir(o->t.data);
    std::vector<data::TrajectoryClip> clips;
    for (const auto* c : diffusion::condition_tagging(all, diffusion::setting_from_string(o->setting), o->condition))
      clips.push_back(*c);
    const double fps = base.meta.value("fps", common_fps(clips));
    if (common_fps(clips) != fps) throw std::runtime_error("clip frame rate differs from the base checkpoint");
    ForecastOptions f;
    f.history = base.meta.value("history_s", f.history);
    f.window = base.meta.value("window_s", f.window);
    f.steps = base.meta.value("steps", f.steps);
    f.beta_start = base.meta.value("beta_start", f.beta_start);
    f.beta_end = base.meta.value("beta_end", f.beta_end);
    f.setting = base.meta.value("setting", f.setting);
    f.target_side = base.meta.value("target_side", f.target_side);
    f.stride = o->stride;
    const auto [train_clips, valid_clips] = o->t.split(clips);
    const auto schedule = diffusion::Schedule::make(f.steps, f.beta_start, f.beta_end);
    auto tc = o->t.cfg;
    tc.task = train::TaskKind::forecast;
    const auto r = train::finetune_forecast(base.model, base.model.config(), examples_for(train_clips, f, fps),
                                            examples_for(valid_clips, f, fps), tc, schedule);
    json meta = base.meta;
    meta["condition_setting"] = o->setting;
    meta["condition"] = o->condition;
    model::save_checkpoint(o->t.out, r.best, meta);
    Manifest m = ctx.manifest("finetune");
    m.seed = tc.seed;
    m.input(o->base);
    m.input(o->t.data);
    m.output(o->t.out);
    m.checkpoint_hash = m.outputs.begin()->second;
    write_log(o->t.log, r, m);
    m.write(manifest_for_file(o->t.out));
    ctx.out << clips.size() << " clips match; " << summary_line(r) << "\n";
  };
}

Action add_train_event(CLI::App& app) {
  struct O {
    TrainOptions t;
    ModelOptions m;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("train-event", "Train the hierarchical event classifier");
  o->t.add(s);
  o->m.add(s);
  s->add_option("--lambda", o->t.cfg.lambda, "Subtype loss weight")->capture_default_str();
  s->add_option("--flip", o->t.cfg.flip_probability, "Per-axis flip probability")->capture_default_str();
  return [o](const Context& ctx) {
    const auto clips = load_dir(o->t.data);
    std::vector<train::EventExample> examples;
    for (const auto& c : clips) examples.push_back(train::event_example(c));
    const auto [tr, va] = o->t.split(examples);
    const auto cfg = o->m.make(common_per_team(clips), model::HeadKind::event);
    auto tc = o->t.cfg;
    tc.task = train::TaskKind::event;
    const auto r = train::train_event(model::Model::create(cfg, tc.seed), tr, va, tc);
    model::save_checkpoint(o->t.out, r.best, {{"task", "event"}, {"fps", common_fps(clips)}});
    Manifest m = ctx.manifest("train-event");
    m.seed = tc.seed;
    m.input(o->t.data);
    m.output(o->t.out);
    m.checkpoint_hash = m.outputs.begin()->second;
    write_log(o->t.log, r, m);
    m.write(manifest_for_file(o->t.out));
    ctx.out << summary_line(r) << "\n";
  };
}

struct RolloutOptions {
  fs::path history, truth, checkpoint;
  double window = 0, horizon = 5.0, history_s = 0;
  int k = 20;
  std::uint64_t seed = 0;
  std::string sampler = "ancestral";
  std::string setting;
  int target_side = -1;
  bool ball_is_target = false;

  void add(CLI::App* s) {
    s->add_option("--history", history, "Clip whose last frames are the history")->required()->check(CLI::ExistingFile);
    s->add_option("--truth", truth, "Future clip supplying conditioning (required for single-team settings)")
        ->check(CLI::ExistingFile);
    s->add_option("--checkpoint", checkpoint, "Trajectory checkpoint")->required()->check(CLI::ExistingFile);
    s->add_option("--window", window, "Causal window seconds (default: checkpoint)");
    s->add_option("--history-seconds", history_s, "History seconds (default: checkpoint)");
    s->add_option("--horizon", horizon, "Forecast seconds")->capture_default_str();
    s->add_option("--k", k, "Sampled futures")->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--seed", seed)->capture_default_str();
    s->add_option("--sampler", sampler, "ancestral|ddim")->capture_default_str();
    s->add_option("--setting", setting, "Override the checkpoint setting");
    s->add_option("--target-side", target_side, "Override the checkpoint target side");
    s->add_flag("--ball-is-target", ball_is_target, "Predict the ball in single-team settings");
  }

  struct Loaded {
    model::Checkpoint ckpt;
    data::TrajectoryClip history_clip;
    std::optional<data::TrajectoryClip> truth_clip;
    data::Roster roster;
    data::Segment history, truth;
    diffusion::RolloutConfig config;
    diffusion::Schedule schedule;
  };

  Loaded load() const {
    Loaded l{model::load_checkpoint(checkpoint), data::load_clip(history), {}, {}, {}, {}, {}, {}};
    if (l.ckpt.meta.value("task", "") != "forecast") throw std::runtime_error("checkpoint is not a trajectory model");
    if (!truth.empty()) l.truth_clip = data::load_clip(truth);
    l.roster = joint_roster(l.history_clip, l.truth_clip ? &*l.truth_clip : nullptr);
    l.roster.per_team = l.ckpt.model.config().per_team;
    l.history = data::to_segment(l.history_clip, l.roster, 0, static_cast<Index>(l.history_clip.size()));
    if (l.truth_clip) l.truth = data::to_segment(*l.truth_clip, l.roster, 0, static_cast<Index>(l.truth_clip->size()));
    auto& c = l.config;
    c.window = window > 0 ? window : l.ckpt.meta.value("window_s", 0.2);
    c.history = history_s > 0 ? history_s : l.ckpt.meta.value("history_s", 4.0);
    c.horizon = horizon;
    c.samples = k;
    c.seed = seed;
    c.setting = diffusion::setting_from_string(setting.empty() ? l.ckpt.meta.value("setting", "unconditioned") : setting);
    c.target_side = target_side >= 0 ? target_side : l.ckpt.meta.value("target_side", 0);
    c.ball_is_target = ball_is_target;
    if (sampler == "ancestral") c.sampler = diffusion::Sampler::ancestral;
    else if (sampler == "ddim") c.sampler = diffusion::Sampler::ddim;
    else throw CLI::ValidationError("--sampler", "must be ancestral or ddim");
    l.schedule = diffusion::Schedule::make(l.ckpt.meta.value("steps", 100), l.ckpt.meta.value("beta_start", 1e-4),
                                           l.ckpt.meta.value("beta_end", 0.02));
    return l;
  }
};

Action add_sample(CLI::App& app) {
  struct O {
    RolloutOptions r;
    fs::path out;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("sample", "Roll out K futures from a history clip");
  o->r.add(s);
  s->add_option("--out", o->out, "Output directory")->required();
  return [o](const Context& ctx) {
    auto l = o->r.load();
    diffusion::ModelPredictor predictor(l.ckpt.model);
    const auto set = diffusion::rollout(l.history, l.truth_clip ? &l.truth : nullptr, l.config, l.history_clip.fps,
                                        predictor, l.schedule);
    Manifest m = ctx.manifest("sample");
    m.seed = o->r.seed;
    m.input(o->r.history);
    if (l.truth_clip) m.input(o->r.truth);
    m.input(o->r.checkpoint);
    m.checkpoint_hash = file_hash(o->r.checkpoint);
    fs::create_directories(o->out);
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
      data::TrajectoryClip clip;
      clip.fps = l.history_clip.fps;
      clip.sport = l.history_clip.sport;
      clip.players_per_team = l.history_clip.players_per_team;
      clip.meta = l.history_clip.meta;
      clip.frames = data::to_frames(set.samples[i], l.roster, clip.pitch(), l.history_clip.frames.back().index + 1);
      char name[32];
      std::snprintf(name, sizeof name, "sample_%03zu.json", i);
      data::save_clip(clip, o->out / name);
      m.output(o->out / name);
    }
    m.write(o->out / "manifest.json");
    ctx.out << "wrote " << set.samples.size() << " futures of " << set.samples.front().frames << " frames to "
            << o->out.string() << "\n";
  };
}

Action add_evaluate_traj(CLI::App& app) {
  struct O {
    fs::path pred, truth, history, out;
    int k = 20;
    std::string horizons = "1,2,3,4,5";
    std::string target = "all";
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("evaluate-traj", "Geometric and structure metrics of sampled futures");
  s->add_option("--pred", o->pred, "Directory of <clip>/sample_*.json")->required()->check(CLI::ExistingDirectory);
  s->add_option("--truth", o->truth, "Directory of <clip>.json ground-truth futures")->required()->check(CLI::ExistingDirectory);
  s->add_option("--history", o->history, "Directory of <clip>.json histories (first-frame velocity)")
      ->check(CLI::ExistingDirectory);
  s->add_option("--k", o->k)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--horizons", o->horizons, "Comma-separated seconds")->capture_default_str();
  s->add_option("--target", o->target, "Scored entities: all|team0|team1")->capture_default_str()
      ->check(CLI::IsMember({"all", "team0", "team1"}));
  s->add_option("--out", o->out, "Report CSV")->required();
  return [o](const Context& ctx) {
    const auto horizons = parse_list(o->horizons);
    Manifest m = ctx.manifest("evaluate-traj");
    std::vector<metrics::ClipForecast> clips;
    double fps = 0;
    int per_team = 0;
    for (const auto& truth_path : clip_files(o->truth)) {
      const auto truth = data::load_clip(truth_path);
      if (fps == 0) fps = truth.fps, per_team = truth.players_per_team;
      if (truth.fps != fps || truth.players_per_team != per_team)
        throw std::runtime_error("truth clips mix frame rates or team sizes");
      const fs::path dir = o->pred / truth_path.stem();
      if (!fs::is_directory(dir)) throw std::runtime_error("no predictions for " + truth_path.stem().string());
      const auto files = clip_files(dir);
      if (files.size() < static_cast<std::size_t>(o->k))
        throw std::runtime_error(truth_path.stem().string() + " has " + std::to_string(files.size()) + " samples, need " +
                                 std::to_string(o->k));
      const data::Roster roster = data::Roster::of(truth);
      metrics::ClipForecast cf;
      cf.truth = meters(truth, roster);
      for (int i = 0; i < o->k; ++i) {
        cf.samples.push_back(meters(data::load_clip(files[static_cast<std::size_t>(i)]), roster));
        if (cf.samples.back().frames != cf.truth.frames)
          throw std::runtime_error(files[static_cast<std::size_t>(i)].string() + " differs in length from its truth");
        m.input(files[static_cast<std::size_t>(i)]);
      }
      for (Index e = 0; e < roster.entities(); ++e) {
        const int g = data::Roster::group_of(e, roster.per_team);
        if (o->target == "all" || (o->target == "team0" && g == 0) || (o->target == "team1" && g == 1))
          cf.entities.push_back(e);
      }
      if (!o->history.empty()) {
        const fs::path hp = o->history / truth_path.filename();
        if (fs::exists(hp)) {
          const auto h = data::load_clip(hp);
          cf.last_history = meters(h, roster).slice(static_cast<Index>(h.size()) - 1, 1);
          m.input(hp);
        }
      }
      m.input(truth_path);
      clips.push_back(std::move(cf));
    }
    if (clips.empty()) throw std::runtime_error("no truth clips in " + o->truth.string());
    const auto geometry = metrics::aggregate_over_k(clips, horizons, fps);
    const auto structure = metrics::structure_deviation(clips, horizons, fps, per_team);
    data::write_text(o->out, metrics::trajectory_report_csv(geometry, structure));
    m.output(o->out);
    m.write(manifest_for_file(o->out));
    ctx.out << "evaluated " << clips.size() << " clips at K=" << o->k << "\n";
  };
}

Action add_evaluate_event(CLI::App& app) {
  struct O {
    fs::path checkpoint, data, out;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("evaluate-event", "Accuracy and recall of the event classifier");
  s->add_option("--checkpoint", o->checkpoint)->required()->check(CLI::ExistingFile);
  s->add_option("--data", o->data, "Directory of labeled clips")->required()->check(CLI::ExistingDirectory);
  s->add_option("--out", o->out, "Report CSV")->required();
  return [o](const Context& ctx) {
    auto ckpt = model::load_checkpoint(o->checkpoint);
    const auto clips = load_dir(o->data);
    std::vector<data::Segment> segs;
    std::vector<event::EventLabel> labels;
    for (const auto& c : clips) {
      auto ex = train::event_example(c);
      segs.push_back(std::move(ex.clip));
      labels.push_back(ex.label);
    }
    const auto report = metrics::event_metrics(event::ground_events(ckpt.model, segs), labels);
    data::write_text(o->out, metrics::event_report_csv(report));
    Manifest m = ctx.manifest("evaluate-event");
    m.input(o->checkpoint);
    m.input(o->data);
    m.checkpoint_hash = file_hash(o->checkpoint);
    m.output(o->out);
    m.write(manifest_for_file(o->out));
    ctx.out << "type top-1 " << report.type_top1 << ", subtype top-1 " << report.subtype_top1 << "\n";
  };
}

Action add_forecast_event(CLI::App& app) {
  struct O {
    RolloutOptions r;
    fs::path event_checkpoint, out;
    int event_frames = 0;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("forecast-event", "Classify the events of K sampled futures");
  o->r.add(s);
  s->add_option("--event-checkpoint", o->event_checkpoint)->required()->check(CLI::ExistingFile);
  s->add_option("--event-frames", o->event_frames, "Frames classified (default: the event model's l_max)");
  s->add_option("--out", o->out, "Summary CSV")->required();
  return [o](const Context& ctx) {
    auto l = o->r.load();
    auto ev = model::load_checkpoint(o->event_checkpoint);
    if (ev.model.config().head != model::HeadKind::event) throw std::runtime_error("event checkpoint has no event head");
    diffusion::ModelPredictor predictor(l.ckpt.model);
    const event::Classifier classify = [&](const data::Segment& seg) { return event::ground_event(ev.model, seg); };
    const Index frames = o->event_frames > 0 ? o->event_frames : ev.model.config().l_max;
    const auto summary = event::forecast_event(l.history, l.truth_clip ? &l.truth : nullptr, l.config,
                                               l.history_clip.fps, predictor, l.schedule, classify, frames);
    std::string csv = "level,class,median,p10,p90,min,max\n";
    auto row = [&](const char* level, std::string_view name, const event::Quantiles& q) {
      csv += std::string(level) + "," + std::string(name);
      for (double v : {q.median, q.p10, q.p90, q.min, q.max}) csv += "," + metrics::report_number(v);
      csv += "\n";
    };
    for (int t = 0; t < model::kTypeCount; ++t)
      row("type", model::kTypeNames[static_cast<std::size_t>(t)], summary.type[static_cast<std::size_t>(t)]);
    for (int t = 0; t < model::kSubtypeCount; ++t)
      row("subtype", model::kSubtypeNames[static_cast<std::size_t>(t)], summary.subtype[static_cast<std::size_t>(t)]);
    data::write_text(o->out, csv);
    Manifest m = ctx.manifest("forecast-event");
    m.seed = o->r.seed;
    m.input(o->r.history);
    if (l.truth_clip) m.input(o->r.truth);
    m.input(o->r.checkpoint);
    m.input(o->event_checkpoint);
    m.checkpoint_hash = file_hash(o->r.checkpoint);
    m.output(o->out);
    m.write(manifest_for_file(o->out));
    ctx.out << "classified " << summary.samples.size() << " futures\n";
  };
}

Action add_make_fixtures(CLI::App& app) {
  struct O {
    std::string kind = "cv";
    int count = 100;
    fs::path out;
    std::uint64_t seed = 0;
    data::MotionParams params;
  };
  auto o = std::make_shared<O>();
  auto* s = app.add_subcommand("make-fixtures", "Generate synthetic clips");
  s->add_option("--kind", o->kind, "cv|circular|styles|events")->capture_default_str()
      ->check(CLI::IsMember({"cv", "circular", "styles", "events"}));
  s->add_option("--count", o->count)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--out", o->out, "Output directory")->required();
  s->add_option("--seed", o->seed)->capture_default_str();
  s->add_option("--frames", o->params.frames)->capture_default_str()->check(CLI::Range(2, 100000));
  s->add_option("--fps", o->params.fps)->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--per-team", o->params.per_team)->capture_default_str()->check(CLI::Range(1, 11));
  s->add_option("--sigma", o->params.sigma, "Velocity random walk (m/s per frame)")->capture_default_str();
  return [o](const Context& ctx) {
    const numeric::Rng root(o->seed);
    Manifest m = ctx.manifest("make-fixtures");
    m.seed = o->seed;
    fs::create_directories(o->out);
    for (int i = 0; i < o->count; ++i) {
      numeric::Rng rng = root.split(static_cast<std::uint64_t>(i));
      data::TrajectoryClip clip;
      if (o->kind == "cv") clip = data::constant_velocity_clip(rng, o->params);
      else if (o->kind == "circular") clip = data::circular_motion_clip(rng, o->params);
      else if (o->kind == "styles") clip = data::style_clip(rng, i % 2 == 0 ? "tight" : "spread", o->params);
      else clip = data::event_class_clip(rng, i % 3, o->params);
      char name[48];
      std::snprintf(name, sizeof name, "%s_%05d.json", o->kind.c_str(), i);
      data::save_clip(clip, o->out / name);
      m.output(o->out / name);
    }
    m.write(o->out / "manifest.json");
    ctx.out << "wrote " << o->count << " " << o->kind << " clips to " << o->out.string() << "\n";
  };
}

}  // namespace

std::string git_blob_hash(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    throw std::runtime_error("SHA-1 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gentac: generative forecasting of multi-agent sports trajectories", "gentac"};
  app.set_config("--config", "", "TOML file; options go under [<subcommand>] sections, flags win");
  app.require_subcommand(1, 1);
  std::map<CLI::App*, Action> actions;
  for (auto add : {add_ingest, add_resample, add_refine, add_train_traj, add_finetune, add_train_event, add_sample,
                   add_evaluate_traj, add_evaluate_event, add_forecast_event, add_make_fixtures}) {
    Action a = add(app);
    actions[app.get_subcommands({}).back()] = std::move(a);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "gentac: " << e.what() << "\n";
    err << app.help();
    return 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  try {
    actions.at(sub)(Context{out, sub});
  } catch (const CLI::ParseError& e) {
    err << "gentac " << sub->get_name() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "gentac " << sub->get_name() << ": error: " << msg << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gentac::cli
