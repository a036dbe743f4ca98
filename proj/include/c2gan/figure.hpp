#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <utility>

#include <torch/torch.h>

#include "c2gan/keypoints.hpp"

namespace c2gan {

/// Stick-figure skeleton. Keypoint order, with the neck as the root:
///   0 neck, 1 head, 2 left elbow, 3 left hand, 4 right elbow, 5 right hand,
///   6 left foot, 7 right foot.
/// The hip sits below the neck along the torso and is drawn but not reported.
namespace skeleton {
inline constexpr int kNumJoints = 8;
inline constexpr int kNumAngles = 8;
enum Joint { neck = 0, head, left_elbow, left_hand, right_elbow, right_hand, left_foot, right_foot };
enum Angle { torso = 0, head_tilt, left_upper_arm, left_forearm, right_upper_arm, right_forearm, left_leg, right_leg };

/// Left/right exchange used by horizontal flips.
inline const std::vector<int> kSwapTable = {0, 1, 4, 5, 2, 3, 7, 6};
/// Joint pairs joined by limbs (the hip is bridged by neck-to-foot segments).
inline const std::vector<std::pair<int, int>> kAdjacency = {{0, 1}, {0, 2}, {2, 3}, {0, 4}, {4, 5}, {0, 6}, {0, 7}};
}  // namespace skeleton

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Appearance {
  Rgb body;
  Rgb background;
  Rgb head;
  /// Capsule half-width of every limb, in pixels.
  int thickness = 2;
  bool noise_texture = false;
};

/// Segment directions are absolute: angle 0 points down the image (+y) and
/// positive angles turn towards +x. The head tilt is measured from straight
/// up. All-zero angles hang every limb straight down from the neck.
struct Pose {
  std::array<double, skeleton::kNumAngles> angles{};
  Point2 root;
};

struct FigureSpec {
  int64_t identity_seed = 0;
  Appearance appearance;
  Pose pose;
  Frame canvas{64, 64};
};

/// Limb lengths in pixels; a deterministic function of identity and canvas.
struct BodyProportions {
  double neck_to_head, torso, upper_arm, forearm, leg, head_radius;
};
BodyProportions proportions_for(int64_t identity_seed, Frame canvas);

/// Joint positions for a spec (no canvas check).
KeypointSet figure_keypoints(const FigureSpec& spec);

/// Rasterize a figure. The returned image is [3,H,W] in [-1,1], built from
/// 8-bit levels so it survives a PNG round trip unchanged. The keypoints are
/// the exact joint positions used for drawing. Throws ArgumentError for an
/// invalid spec or joints outside the canvas.
std::pair<torch::Tensor, KeypointSet> render_figure(const FigureSpec& spec);

/// Per-identity appearance drawn from `rng`.
Appearance sample_appearance(std::mt19937_64& rng, Frame canvas, bool noise_texture);

/// A random pose whose joints all stay at least `margin` pixels inside the
/// canvas.
Pose sample_pose(std::mt19937_64& rng, const BodyProportions& body, Frame canvas, double margin);

}  // namespace c2gan
