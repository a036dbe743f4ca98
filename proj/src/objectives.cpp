#include "c2gan/objectives.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "c2gan/errors.hpp"

namespace c2gan {

void LossWeights::validate() const {
  for (double w : {image_gan, image_cycle, image_pixel, keypoint_gan, keypoint_cycle}) {
    if (!std::isfinite(w) || w < 0.0) throw ArgumentError("loss weights must be finite and non-negative");
  }
}

namespace {

void same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (!a.sizes().equals(b.sizes())) {
    throw ArgumentError(std::string(what) + ": shape mismatch " + c10::str(a.sizes()) + " vs " + c10::str(b.sizes()));
  }
}

// log clamped away from -inf so saturated discriminators give large but
// finite losses.
torch::Tensor safe_log(const torch::Tensor& t) { return torch::log(t.clamp_min(1e-12)); }

}  // namespace

torch::Tensor adversarial_loss_d(const torch::Tensor& d_real, const torch::Tensor& d_fake, double real_label,
                                 double fake_label) {
  same_shape(d_real, d_fake, "adversarial_loss_d");
  auto bce = [](const torch::Tensor& p, double label) {
    auto loss = -label * safe_log(p);
    if (label != 1.0) loss = loss - (1.0 - label) * safe_log(1.0 - p);
    return loss;
  };
  return (bce(d_real, real_label) + bce(d_fake, fake_label)).mean();
}

torch::Tensor adversarial_loss_g(const torch::Tensor& d_fake) {
  if (d_fake.numel() == 0) throw ArgumentError("adversarial_loss_g: empty patch grid");
  return -safe_log(d_fake).mean();
}

torch::Tensor l1_distance(const torch::Tensor& a, const torch::Tensor& b) {
  same_shape(a, b, "l1_distance");
  if (a.numel() == 0) throw ArgumentError("l1_distance: empty tensors");
  return (a - b).abs().mean();
}

torch::Tensor keypoint_cycle_loss(const torch::Tensor& ly_pred, const torch::Tensor& ly, const torch::Tensor& lx_pred,
                                  const torch::Tensor& lx) {
  return l1_distance(ly_pred, ly) + l1_distance(lx_pred, lx);
}

torch::Tensor mask_loss(const torch::Tensor& y_pred, const torch::Tensor& y, const torch::Tensor& mask) {
  same_shape(y_pred, y, "mask_loss");
  const auto spatial = y.sizes().slice(y.dim() - 2);
  const bool ok = (mask.dim() == 3 || mask.dim() == 4) && mask.size(-3) == 1 &&
                  mask.sizes().slice(mask.dim() - 2).equals(spatial) &&
                  (mask.dim() == 3 || y.dim() != 4 || mask.size(0) == y.size(0));
  if (!ok) throw ArgumentError("mask_loss: mask " + c10::str(mask.sizes()) + " does not fit image " + c10::str(y.sizes()));
  return ((y_pred - y).abs() * (1.0 + mask)).mean();
}

std::string LossReport::csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) h += ',';
    h += kColumns[i];
  }
  return h;
}

std::string LossReport::csv_row(int64_t iteration) const {
  std::ostringstream out;
  out.precision(9);
  out << iteration;
  for (double v : {image_gan_g, image_gan_d, image_cycle, image_pixel, keypoint_gan_g, keypoint_gan_d, keypoint_cycle,
                   total_g}) {
    out << ',' << v;
  }
  return out.str();
}

double total_objective(const ObjectiveTerms& terms, const LossWeights& w) {
  auto get = [&](std::string_view name) {
    auto it = terms.find(name);
    if (it == terms.end()) throw ArgumentError("total_objective: missing term '" + std::string(name) + "'");
    return it->second;
  };
  return w.image_gan * get("image_gan") + w.image_cycle * get("image_cycle") + w.image_pixel * get("image_pixel") +
         w.keypoint_gan * get("keypoint_gan") + w.keypoint_cycle * get("keypoint_cycle");
}

torch::Tensor weighted_total(const torch::Tensor& image_gan, const torch::Tensor& image_cycle,
                             const torch::Tensor& image_pixel, const torch::Tensor& keypoint_gan,
                             const torch::Tensor& keypoint_cycle, const LossWeights& w) {
  return w.image_gan * image_gan + w.image_cycle * image_cycle + w.image_pixel * image_pixel +
         w.keypoint_gan * keypoint_gan + w.keypoint_cycle * keypoint_cycle;
}

}  // namespace c2gan
