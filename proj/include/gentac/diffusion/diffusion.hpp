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

#pragma once

#include "gentac/data/clip.hpp"
#include "gentac/data/segment.hpp"
#include "gentac/model/backbone.hpp"
#include "gentac/numeric/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gentac::diffusion {

using data::Segment;
using model::Index;
using model::Matrix;
using model::TokenBatch;
using model::TokenGrid;
using numeric::Rng;

/// Linear variance schedule; steps are 1-based.
struct Schedule {
  int steps = 0;
  std::vector<double> beta;       // beta[s - 1]
  std::vector<double> alpha_bar;  // alpha_bar[s - 1]

  static Schedule make(int steps, double beta_start = 1e-4, double beta_end = 0.02);
  double beta_at(int s) const { return beta[static_cast<std::size_t>(s - 1)]; }
  /// alpha_bar_0 = 1.
  double alpha_bar_at(int s) const { return s == 0 ? 1.0 : alpha_bar[static_cast<std::size_t>(s - 1)]; }
};

struct Noised {
  Matrix x_s;
  Matrix epsilon;
};

/// x_s = sqrt(abar_s) x_f + sqrt(1 - abar_s) eps with eps drawn from `rng`.
Noised forward_noise(const Matrix& x_f, int s, const Schedule& schedule, Rng& rng);
Matrix forward_noise(const Matrix& x_f, int s, const Schedule& schedule, const Matrix& epsilon);

enum class Sampler { ancestral, ddim };

/// One reverse update. Ancestral: (x_s - beta_s / sqrt(1 - abar_s) eps_hat) / sqrt(1 - beta_s) + sigma_s z
/// with sigma_s^2 = beta_s and z = 0 at s = 1. DDIM: deterministic eta = 0 update.
Matrix denoise_step(const Matrix& x_s, const Matrix& eps_hat, int s, const Schedule& schedule, Rng& rng,
                    Sampler sampler = Sampler::ancestral);
/// Ancestral update with the caller's z.
Matrix denoise_step(const Matrix& x_s, const Matrix& eps_hat, int s, const Schedule& schedule, const Matrix& z);

/// eps_theta. predict() returns a rows x 2 matrix for the whole batch; the
/// sampler reads only noise-target rows.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  Matrix operator()(const TokenBatch& batch) {
    calls_ += batch.samples;
    return predict(batch);
  }
  /// Per-sample network evaluations so far.
  std::int64_t calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

 protected:
  virtual Matrix predict(const TokenBatch& batch) = 0;

 private:
  std::int64_t calls_ = 0;
};

class ModelPredictor : public NoisePredictor {
 public:
  explicit ModelPredictor(model::Model& model) : model_(model) {}

 protected:
  Matrix predict(const TokenBatch& batch) override;

 private:
  model::Model& model_;
};

/// Training batch: each grid gets a uniform step in [1, S], its noise-target
/// coordinates replaced by x_s. `epsilon` is zero outside noise-target rows.
struct NoisyBatch {
  TokenBatch batch;
  Matrix epsilon;
};
NoisyBatch make_noisy_batch(const std::vector<const TokenGrid*>& grids, const Schedule& schedule, Rng& rng);

/// Masked mean of (eps - eps_hat)^2 over noise-target coordinates.
numeric::Var diffusion_loss(numeric::Tape& tape, model::Model& model, const NoisyBatch& noisy);
double diffusion_loss_value(NoisePredictor& predictor, const NoisyBatch& noisy);

enum class Setting { unconditioned, opponent, team, league, objective };
std::string to_string(Setting s);
Setting setting_from_string(const std::string& s);
/// opponent and team forecast one side given the other's true future.
bool is_single_team(Setting s);

struct RolloutConfig {
  double window = 0.2;   // seconds
  double history = 4.0;  // seconds
  double horizon = 5.0;  // seconds
  int samples = 20;
  Setting setting = Setting::unconditioned;
  int target_side = 0;
  bool ball_is_target = false;
  Sampler sampler = Sampler::ancestral;
  std::uint64_t seed = 0;
};

/// Seconds to frames at `fps`; throws when the value is more than 0.4 frames
/// from an integer.
Index to_frames(double seconds, double fps);

struct FrameCounts {
  Index window = 0;
  Index history = 0;
  Index windows = 0;  // q
};
FrameCounts frame_counts(const RolloutConfig& config, double fps);

/// K rollouts sharing one history.
struct FutureSampleSet {
  std::vector<Segment> samples;  // q * w frames each, normalized
  std::vector<std::uint64_t> seeds;
};

struct SampleRequest {
  /// One history per sample, all the same shape.
  std::vector<Segment> histories;
  /// Future slots: conditioning values for non-target slots and the
  /// visibility template; one per sample, w frames.
  std::vector<Segment> futures;
  model::Task task = model::Task::forecast_joint;
  int target_side = 0;
  bool ball_is_target = false;
  Sampler sampler = Sampler::ancestral;
};

/// Runs S reverse steps on every sample's noise-target slots in one batch;
/// rngs[k] drives sample k. Returns the completed w-frame futures.
std::vector<Segment> sample_window(const SampleRequest& request, NoisePredictor& predictor, const Schedule& schedule,
                                   std::vector<Rng>& rngs);

/// Future visibility template: the last history frame's visibility repeated.
Segment carry_visibility(const Segment& history, Index frames);

/// Autoregressive rollout: q windows, each conditioned on the last H frames of
/// history plus everything generated so far. `truth_future` (q * w frames)
/// supplies opponent (and ball) values in single-team settings and the
/// visibility template when present.
FutureSampleSet rollout(const Segment& history, const Segment* truth_future, const RolloutConfig& config, double fps,
                        NoisePredictor& predictor, const Schedule& schedule);

/// Clips whose metadata matches: team or league id, or objective
/// "offense"/"defense". Throws when nothing matches.
std::vector<const data::TrajectoryClip*> condition_tagging(const std::vector<data::TrajectoryClip>& clips,
                                                           Setting setting, const std::string& value);

}  // namespace gentac::diffusion
