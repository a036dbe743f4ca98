#include "c2gan/heatmap.hpp"

#include <limits>
#include <string>

#include "c2gan/errors.hpp"

namespace c2gan {

HeatmapMode parse_heatmap_mode(std::string_view name) {
  if (name == "face") return HeatmapMode::face;
  if (name == "person") return HeatmapMode::person;
  throw ArgumentError("unknown keypoint mode '" + std::string(name) + "' (expected face or person)");
}

std::string_view to_string(HeatmapMode mode) {
  return mode == HeatmapMode::face ? "face" : "person";
}

Heatmap render(const KeypointSet& keypoints, HeatmapMode mode, int radius) {
  keypoints.validate();
  const Frame frame = keypoints.frame;
  if (mode == HeatmapMode::face) {
    auto data = torch::ones({3, frame.height, frame.width}, torch::kFloat32);
    auto acc = data.accessor<float, 3>();
    for (std::size_t i = 0; i < keypoints.size(); ++i) {
      if (!keypoints.visible[i]) continue;
      for_each_disc_pixel(keypoints.points[i], kFaceDotRadius, frame, [&](int row, int col) {
        for (int c = 0; c < 3; ++c) acc[c][row][col] = 0.0f;
      });
    }
    return {data, mode, kFaceDotRadius};
  }

  if (radius < 1) throw ArgumentError("person-mode heatmap radius must be >= 1, got " + std::to_string(radius));
  const auto channels = static_cast<int64_t>(keypoints.size());
  auto data = torch::zeros({channels, frame.height, frame.width}, torch::kFloat32);
  auto acc = data.accessor<float, 3>();
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    if (!keypoints.visible[i]) continue;
    for_each_disc_pixel(keypoints.points[i], radius, frame,
                        [&](int row, int col) { acc[static_cast<int64_t>(i)][row][col] = 1.0f; });
  }
  return {data, mode, radius};
}

namespace {

// Coordinate along one axis from the support's extent and centroid. The
// widest row of a disc spans between sqrt(r^2 - 1/4) and r on each side of
// the center, so the half-pixel offset centers the anchoring error.
double axis_estimate(int lo, int hi, double centroid, int extent, double radius) {
  const bool at_low = lo == 0;
  const bool at_high = hi == extent - 1;
  if (at_low && !at_high) return hi - radius + 0.5;
  if (at_high && !at_low) return lo + radius - 0.5;
  return centroid;
}

}  // namespace

KeypointSet decode(const Heatmap& heatmap, double threshold) {
  if (heatmap.mode == HeatmapMode::face) {
    throw UnsupportedModeError("face-mode heatmaps do not identify individual landmarks");
  }
  if (heatmap.data.dim() != 3) throw ArgumentError("decode expects a [C, H, W] heatmap");
  const auto data = heatmap.data.to(torch::kFloat32).contiguous();
  const auto acc = data.accessor<float, 3>();
  const int channels = static_cast<int>(data.size(0));
  const int height = static_cast<int>(data.size(1));
  const int width = static_cast<int>(data.size(2));

  KeypointSet out;
  out.frame = {height, width};
  for (int c = 0; c < channels; ++c) {
    double sx = 0, sy = 0;
    std::size_t count = 0;
    int rmin = height, rmax = -1, cmin = width, cmax = -1;
    for (int row = 0; row < height; ++row) {
      for (int col = 0; col < width; ++col) {
        if (acc[c][row][col] < threshold) continue;
        sx += col;
        sy += row;
        ++count;
        rmin = std::min(rmin, row);
        rmax = std::max(rmax, row);
        cmin = std::min(cmin, col);
        cmax = std::max(cmax, col);
      }
    }
    if (count == 0) {
      out.points.push_back({0.0, 0.0});
      out.visible.push_back(false);
      continue;
    }
    const double cx = sx / static_cast<double>(count);
    const double cy = sy / static_cast<double>(count);
    Point2 p{axis_estimate(cmin, cmax, cx, width, heatmap.radius),
             axis_estimate(rmin, rmax, cy, height, heatmap.radius)};
    // Anchoring can overshoot the frame for tiny clipped supports.
    p.x = std::clamp(p.x, 0.0, width - 1.0);
    p.y = std::clamp(p.y, 0.0, height - 1.0);
    out.points.push_back(p);
    out.visible.push_back(true);
  }
  return out;
}

torch::Tensor mirror_heatmap(const torch::Tensor& data, std::span<const int> swap) {
  const int64_t channel_dim = data.dim() - 3;
  if (channel_dim < 0) throw ArgumentError("mirror_heatmap expects [C, H, W] or [B, C, H, W]");
  auto mirrored = data.flip({-1});
  if (swap.empty()) return mirrored;
  validate_swap_table(swap, static_cast<std::size_t>(data.size(channel_dim)));
  // Output channel swap[i] takes input channel i.
  std::vector<int64_t> source(swap.size());
  for (std::size_t i = 0; i < swap.size(); ++i) source[static_cast<std::size_t>(swap[i])] = static_cast<int64_t>(i);
  return mirrored.index_select(channel_dim, torch::tensor(source, torch::kLong));
}

}  // namespace c2gan
