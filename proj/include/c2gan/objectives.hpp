#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <torch/torch.h>

namespace c2gan {

/// Coefficients of the joint objective.
struct LossWeights {
  double image_gan = 1.0;
  double image_cycle = 10.0;
  double image_pixel = 10.0;
  double keypoint_gan = 1.0;
  double keypoint_cycle = 10.0;

  /// Throws ArgumentError for negative or non-finite weights.
  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

// Every function below reduces by mean and returns a 0-dim tensor that
// carries gradients to its inputs. Shape mismatches throw ArgumentError.

/// Discriminator side: mean of -[log d_real + log(1 - d_fake)]. `real_label`
/// and `fake_label` generalize the hard 1/0 targets to binary cross entropy.
torch::Tensor adversarial_loss_d(const torch::Tensor& d_real, const torch::Tensor& d_fake, double real_label = 1.0,
                                 double fake_label = 0.0);

/// Generator side, non-saturating form: mean of -log d_fake.
torch::Tensor adversarial_loss_g(const torch::Tensor& d_fake);

/// Mean absolute difference.
torch::Tensor l1_distance(const torch::Tensor& a, const torch::Tensor& b);

inline torch::Tensor image_cycle_loss(const torch::Tensor& x_rec, const torch::Tensor& x) { return l1_distance(x_rec, x); }
inline torch::Tensor pixel_loss(const torch::Tensor& y_pred, const torch::Tensor& y) { return l1_distance(y_pred, y); }

/// Unweighted sum of the two keypoint reconstruction terms.
torch::Tensor keypoint_cycle_loss(const torch::Tensor& ly_pred, const torch::Tensor& ly, const torch::Tensor& lx_pred,
                                  const torch::Tensor& lx);

/// Mean over all elements of |y_pred - y| * (1 + mask). `mask` is {0,1}
/// valued, shaped [1,H,W] or [B,1,H,W], and broadcast over channels.
torch::Tensor mask_loss(const torch::Tensor& y_pred, const torch::Tensor& y, const torch::Tensor& mask);

/// Named loss terms of one training step.
///   generator side: L_I_gan_G, L_I_cyc, L_I_pixel, L_K_gan_G, L_K_cyc
///   discriminator side (already halved): L_I_gan_D, L_K_gan_D
struct LossReport {
  double image_gan_g = 0.0;
  double image_gan_d = 0.0;
  double image_cycle = 0.0;
  double image_pixel = 0.0;
  double keypoint_gan_g = 0.0;
  double keypoint_gan_d = 0.0;
  double keypoint_cycle = 0.0;
  double total_g = 0.0;

  /// Column names of the loss log, in order.
  static constexpr std::array<std::string_view, 9> kColumns = {
      "iteration", "L_I_gan_G", "L_I_gan_D", "L_I_cyc", "L_I_pixel", "L_K_gan_G", "L_K_gan_D", "L_K_cyc", "total_G"};
  /// One CSV row, iteration first.
  std::string csv_row(int64_t iteration) const;
  static std::string csv_header();

  friend bool operator==(const LossReport&, const LossReport&) = default;
};

/// The five generator-side terms of the joint objective by name:
/// "image_gan", "image_cycle", "image_pixel", "keypoint_gan", "keypoint_cycle".
using ObjectiveTerms = std::map<std::string, double, std::less<>>;

/// Weighted sum of all five terms. A missing term throws ArgumentError.
double total_objective(const ObjectiveTerms& terms, const LossWeights& w);

/// Same weighting on tensors (used for the generator update).
torch::Tensor weighted_total(const torch::Tensor& image_gan, const torch::Tensor& image_cycle,
                             const torch::Tensor& image_pixel, const torch::Tensor& keypoint_gan,
                             const torch::Tensor& keypoint_cycle, const LossWeights& w);

}  // namespace c2gan
