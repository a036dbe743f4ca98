#pragma once

#include <cmath>
#include <span>
#include <string_view>

#include <torch/torch.h>

#include "c2gan/keypoints.hpp"

namespace c2gan {

/// face: 3-channel black-on-white landmark image.
/// person: one binary disc channel per keypoint.
enum class HeatmapMode { face, person };

HeatmapMode parse_heatmap_mode(std::string_view name);
std::string_view to_string(HeatmapMode mode);

inline constexpr int kDefaultPersonRadius = 4;
inline constexpr int kFaceDotRadius = 1;

/// Image-form keypoints. `data` is float [C, H, W] with values in [0, 1].
struct Heatmap {
  torch::Tensor data;
  HeatmapMode mode = HeatmapMode::person;
  int radius = kDefaultPersonRadius;
};

/// Calls fn(row, col) for every in-frame pixel whose center lies within
/// Euclidean distance `radius` of `center`.
template <class Fn>
void for_each_disc_pixel(Point2 center, double radius, Frame frame, Fn&& fn) {
  const int r0 = std::max(0, static_cast<int>(std::ceil(center.y - radius)));
  const int r1 = std::min(frame.height - 1, static_cast<int>(std::floor(center.y + radius)));
  const int c0 = std::max(0, static_cast<int>(std::ceil(center.x - radius)));
  const int c1 = std::min(frame.width - 1, static_cast<int>(std::floor(center.x + radius)));
  const double r2 = radius * radius;
  for (int row = r0; row <= r1; ++row) {
    const double dy = row - center.y;
    for (int col = c0; col <= c1; ++col) {
      const double dx = col - center.x;
      if (dx * dx + dy * dy <= r2) fn(row, col);
    }
  }
}

/// Number of channels `render` produces for a keypoint count.
inline int heatmap_channels(HeatmapMode mode, std::size_t num_keypoints) {
  return mode == HeatmapMode::face ? 3 : static_cast<int>(num_keypoints);
}

/// Rasterize keypoints. In person mode `radius` must be >= 1; in face mode
/// every landmark is a black dot of radius kFaceDotRadius and `radius` is
/// ignored.
Heatmap render(const KeypointSet& keypoints, HeatmapMode mode, int radius = kDefaultPersonRadius);

/// Inverse of person-mode `render`. A channel whose maximum is below
/// `threshold` is reported invisible; otherwise the support is the set of
/// pixels >= threshold (for rendered maps: the max-value pixels) and the
/// coordinate is its centroid. Along an axis where the support touches
/// exactly one frame border the coordinate is anchored on the opposite edge
/// (edge -/+ (radius - 1/2)), which keeps border-clipped discs within one
/// pixel.
/// Face-mode input throws UnsupportedModeError.
KeypointSet decode(const Heatmap& heatmap, double threshold = 0.5);

/// Horizontal mirror of a [C, H, W] (or [B, C, H, W]) array with channels
/// permuted by `swap` (see SwapTable). The codec counterpart of hflip.
torch::Tensor mirror_heatmap(const torch::Tensor& data, std::span<const int> swap = {});

/// [0,1] codec range to the [-1,1] network range and back.
inline torch::Tensor to_network_range(const torch::Tensor& t) { return t * 2.0 - 1.0; }
inline torch::Tensor from_network_range(const torch::Tensor& t) { return (t + 1.0) * 0.5; }

}  // namespace c2gan
