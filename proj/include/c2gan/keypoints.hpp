#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace c2gan {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Frame {
  int height = 0;
  int width = 0;
  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Ordered landmark coordinates in pixel units. Pixel (col, row) has its
/// center at (x, y) = (col, row).
struct KeypointSet {
  std::vector<Point2> points;
  std::vector<bool> visible;
  Frame frame;

  std::size_t size() const { return points.size(); }
  std::size_t visible_count() const;

  /// Throws ArgumentError when lengths disagree or a visible point falls
  /// outside the frame.
  void validate() const;

  friend bool operator==(const KeypointSet&, const KeypointSet&) = default;
};

/// Left/right index permutation applied on horizontal flips: point i of the
/// input lands at index swap[i] of the output. Empty means identity.
using SwapTable = std::vector<int>;

/// Mirror horizontally: x' = width - 1 - x, then permute indices by `swap`.
KeypointSet hflip(const KeypointSet& keypoints, std::span<const int> swap = {});

/// Throws ArgumentError unless `swap` is empty or a permutation of [0, n)
/// that is its own inverse.
void validate_swap_table(std::span<const int> swap, std::size_t n);

nlohmann::json to_json(const KeypointSet& keypoints);
KeypointSet keypoints_from_json(const nlohmann::json& j);

/// One JSON object per line.
std::vector<KeypointSet> read_keypoints_jsonl(const std::filesystem::path& path);
void write_keypoints_jsonl(const std::filesystem::path& path, std::span<const KeypointSet> sets);

}  // namespace c2gan
