#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <torch/torch.h>

#include "c2gan/dataset.hpp"
#include "c2gan/heatmap.hpp"
#include "c2gan/history_buffer.hpp"
#include "c2gan/networks.hpp"
#include "c2gan/objectives.hpp"

namespace c2gan {

/// Enabled cycles. The image cycle (I2I2I) is always on; the two keypoint
/// cycles extend it.
struct CycleSet {
  bool k2g2k = true;
  bool k2r2k = true;

  bool any_keypoint() const { return k2g2k || k2r2k; }
  /// Comma-separated subset of {i2i2i, k2g2k, k2r2k}; must contain i2i2i.
  static CycleSet parse(std::string_view list);
  std::string to_string() const;
  friend bool operator==(const CycleSet&, const CycleSet&) = default;
};

/// How keypoints are rasterized for the networks and masks.
struct KeypointRendering {
  HeatmapMode mode = HeatmapMode::person;
  int radius = kDefaultPersonRadius;
  std::vector<std::pair<int, int>> adjacency;
  /// Foreground-mask dilation for the optional mask loss, in pixels.
  double mask_dilation = 2.5;

  static KeypointRendering from(const DatasetDescriptor& d, double mask_dilation);
};

struct TrainConfig {
  int epochs = 200;
  /// Stop after this many steps when > 0, whatever `epochs` says.
  int64_t max_steps = 0;
  int batch_size = 16;
  double learning_rate = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  LossWeights weights;
  CycleSet cycles;
  int buffer_size = 50;
  int64_t warmup_iters = 500;
  uint64_t seed = 0;
  bool mask_loss = false;
  /// Let the keypoint adversarial term drive the image generator through y*
  /// and x*. Off: y*/x* are detached wherever D_K or G_K's adversarial term
  /// sees them, and G_I gets keypoint feedback only from the cycle L1 terms.
  bool keypoint_adversarial_into_image_generator = false;
  double real_label = 1.0;
  double fake_label = 0.0;

  void validate() const;
};

/// Network inputs of one batch; heatmaps already in [-1,1].
struct CycleInputs {
  torch::Tensor x, y;    // [B,3,H,W]
  torch::Tensor lx, ly;  // [B,C,H,W]
};

CycleInputs make_cycle_inputs(const std::vector<TrainingPair>& batch, const KeypointRendering& rendering);

/// Rendered heatmaps of a batch of keypoint sets, in [-1,1].
torch::Tensor render_batch(const std::vector<KeypointSet>& keypoints, const KeypointRendering& rendering);

using GeneratorFn = std::function<torch::Tensor(const torch::Tensor&)>;

/// The four generator applications of the cycles. With shared parameters the
/// two image (and two keypoint) entries call the same network.
struct CycleGenerators {
  GeneratorFn image_gen;     // [x, Ly]  -> y*
  GeneratorFn image_rec;     // [y*, Lx] -> x*
  GeneratorFn keypoint_gen;  // y* -> Ly*
  GeneratorFn keypoint_rec;  // x* -> Lx*
};

CycleGenerators generators_of(const ModelSet& models);

struct CycleBundle {
  torch::Tensor y_star;
  torch::Tensor x_star;
  std::optional<torch::Tensor> ly_star;  // present iff K2G2K enabled
  std::optional<torch::Tensor> lx_star;  // present iff K2R2K enabled
};

/// y* = G_I(x ⊕ Ly); x* = G_I(y* ⊕ Lx); Ly* = G_K(y*); Lx* = G_K(x*), in that
/// order. Nothing is detached, so keypoint-cycle losses reach G_I.
CycleBundle forward_cycles(const CycleInputs& in, const CycleGenerators& gens, const CycleSet& cycles);
/// As above, checking the heatmap channel count against the models.
/// Throws ConfigError on mismatch.
CycleBundle forward_cycles(const CycleInputs& in, const ModelSet& models, const CycleSet& cycles);

/// Source of keypoints for images the generators produced. The synthetic
/// renderer knows the pose it was asked to depict; an external extractor
/// (OpenPose-like) would ignore `depicted` and look at `image`.
class KeypointOracle {
 public:
  virtual ~KeypointOracle() = default;
  virtual KeypointSet extract(const torch::Tensor& image, const KeypointSet& depicted) const = 0;
};

/// Ground truth of the synthetic renderer: returns `depicted`.
class GroundTruthOracle final : public KeypointOracle {
 public:
  KeypointSet extract(const torch::Tensor&, const KeypointSet& depicted) const override { return depicted; }
};

enum class TargetSource { oracle, ground_truth };

/// Keypoint-cycle L1 targets, in [-1,1].
struct KeypointTargets {
  torch::Tensor ly;
  torch::Tensor lx;
  TargetSource source = TargetSource::ground_truth;
  /// False during warm-up: G_K is trained against the oracle but its outputs
  /// are not trusted to steer G_I.
  bool drives_image_generator = true;
};

/// Before `warmup_iters`, targets are rendered from the oracle's reading of
/// y* and x*; afterwards they are the ground-truth Ly, Lx. Throws
/// ConfigError when warm-up is active and `oracle` is null.
KeypointTargets warmup_keypoints(int64_t iteration, int64_t warmup_iters, const CycleBundle& bundle,
                                 const std::vector<TrainingPair>& batch, const CycleInputs& inputs,
                                 const KeypointOracle* oracle, const KeypointRendering& rendering);

/// Extra values recorded by the last step, for inspection.
struct StepDetail {
  double image_gan_d_unhalved = 0.0;
  double keypoint_gan_d_unhalved = 0.0;
  TargetSource target_source = TargetSource::ground_truth;
};

/// Owns the models, optimizers and history buffers of one training run.
class Trainer {
 public:
  Trainer(ModelSet models, TrainConfig config, KeypointRendering rendering,
          std::shared_ptr<const KeypointOracle> oracle = nullptr);

  /// One alternating update: G_I, D_I, G_K, D_K in that order. Terms whose
  /// weight is zero (or whose cycle is disabled) are not evaluated and report
  /// 0. Discriminator objectives are halved. Throws NonFiniteLossError.
  LossReport train_step(const std::vector<TrainingPair>& batch);

  int64_t iteration() const { return iteration_; }
  ModelSet& models() { return models_; }
  const ModelSet& models() const { return models_; }
  const TrainConfig& config() const { return config_; }
  const KeypointRendering& rendering() const { return rendering_; }
  const StepDetail& last_detail() const { return detail_; }
  HistoryBuffer& generation_buffer() { return buffer_gen_; }

  /// Parameters, buffers, optimizer moments, history buffers and iteration
  /// into one archive; `extra` is stored in the JSON metadata.
  void save(const std::filesystem::path& path, const nlohmann::json& extra = {}) const;
  /// Restores a checkpoint written by `save`. Throws ConfigError when the
  /// model configuration differs. Returns the stored `extra`.
  nlohmann::json load(const std::filesystem::path& path);

 private:
  struct Optimizers;

  ModelSet models_;
  TrainConfig config_;
  KeypointRendering rendering_;
  std::shared_ptr<const KeypointOracle> oracle_;
  std::shared_ptr<Optimizers> optim_;
  HistoryBuffer buffer_gen_;
  HistoryBuffer buffer_rec_;
  int64_t iteration_ = 0;
  StepDetail detail_;
};

/// Inference: G_I(x ⊕ render(Ly)) in eval mode. `x` is [3,H,W] or
/// [B,3,H,W]; throws ArgumentError when the frame of `ly` differs from x.
torch::Tensor translate(const ModelSet& models, const torch::Tensor& x, const KeypointSet& ly,
                        const KeypointRendering& rendering);

struct Extraction {
  torch::Tensor heatmap;                 // [C,H,W] in [0,1]
  std::optional<KeypointSet> keypoints;  // person mode only
};

/// G_K(x), decoded to coordinates in person mode.
Extraction extract(const ModelSet& models, const torch::Tensor& x, const KeypointRendering& rendering);

}  // namespace c2gan
