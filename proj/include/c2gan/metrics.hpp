#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "c2gan/keypoints.hpp"

namespace c2gan {

// Image arguments are [3,H,W] (or [C,H,W]) tensors in [-1,1]; metrics map
// them to the 8-bit scale v -> (v + 1) * 127.5 without quantizing.

/// 10 log10(255^2 / MSE) in dB; +inf when the images are identical.
double psnr(const torch::Tensor& a, const torch::Tensor& b);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Gaussian-windowed SSIM over every valid (unpadded) window position,
/// averaged over windows and channels. Throws ArgumentError when the image
/// is smaller than the window.
double ssim(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& opt = {});

/// Per-image SSIM of two [B,C,H,W] batches.
std::vector<double> ssim_batch(const torch::Tensor& a, const torch::Tensor& b, const SsimOptions& opt = {});

/// Binary foreground [1,H,W]: discs of radius `dilation` around visible
/// keypoints plus every pixel within `dilation` of a segment joining two
/// visible adjacent keypoints.
torch::Tensor pose_mask(const KeypointSet& keypoints, int height, int width, double dilation,
                        const std::vector<std::pair<int, int>>& adjacency = {});

/// SSIM after both images are multiplied by `mask` on the 8-bit scale, so
/// masked-out pixels become 0 in both.
double mask_ssim(const torch::Tensor& a, const torch::Tensor& b, const torch::Tensor& mask, const SsimOptions& opt = {});

/// Pluggable Inception-Score style scorer: any classifier that maps an image
/// to a label distribution. None ships with the library.
class LabelDistributionScorer {
 public:
  virtual ~LabelDistributionScorer() = default;
  /// [B,3,H,W] images to [B,K] class probabilities.
  virtual torch::Tensor predict(const torch::Tensor& images) const = 0;
};

/// exp(E_x KL(p(y|x) || p(y))) over the given images.
double inception_score(const LabelDistributionScorer& scorer, const torch::Tensor& images);

struct PairScores {
  std::string x_path;
  std::string y_path;
  double ssim = 0.0;
  double psnr = 0.0;
  double mask_ssim = 0.0;
};

struct EvalReport {
  std::vector<PairScores> pairs;
  double mean_ssim = 0.0;
  double mean_psnr = 0.0;
  double mean_mask_ssim = 0.0;
  nlohmann::json config;

  std::size_t count() const { return pairs.size(); }
  /// Sets the means from `pairs`.
  void aggregate();
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& json_path, const std::filesystem::path& csv_path) const;
};

struct EvalOptions {
  /// Mask dilation at the dataset resolution; <= 0 means 10 px scaled from
  /// 256x256.
  double mask_dilation = 0.0;
  /// Score the ground-truth target against itself instead of the model.
  bool ground_truth = false;
};

/// Translate every pair of `dataset_dir` with the checkpoint's image
/// generator and score it against the target. Throws ArgumentError for an
/// empty set and ConfigError for incompatible frame sizes.
EvalReport evaluate(const std::filesystem::path& dataset_dir, const std::filesystem::path& checkpoint,
                    const EvalOptions& options = {});

/// Default mask dilation for an image side: 10 px at 256, scaled.
inline double default_mask_dilation(int image_size) { return 10.0 * image_size / 256.0; }

}  // namespace c2gan
