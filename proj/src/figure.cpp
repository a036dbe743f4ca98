#include "c2gan/figure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "c2gan/errors.hpp"
#include "c2gan/image_io.hpp"

namespace c2gan {

namespace {

Point2 step(Point2 from, double angle, double length) {
  return {from.x + length * std::sin(angle), from.y + length * std::cos(angle)};
}

double segment_distance2(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = wx - t * vx, dy = wy - t * vy;
  return dx * dx + dy * dy;
}

// splitmix64 finaliser; the texture must not depend on RNG call order.
uint64_t mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr int kTextureAmplitude = 12;

int color_distance(Rgb a, Rgb b) {
  return std::abs(a.r - b.r) + std::abs(a.g - b.g) + std::abs(a.b - b.b);
}

struct Limbs {
  Point2 hip;
  KeypointSet joints;
};

Limbs layout(const FigureSpec& spec) {
  using namespace skeleton;
  const auto body = proportions_for(spec.identity_seed, spec.canvas);
  const auto& a = spec.pose.angles;
  std::vector<Point2> p(kNumJoints);
  p[neck] = spec.pose.root;
  const Point2 hip = step(p[neck], a[torso], body.torso);
  p[head] = step(p[neck], a[torso] + std::numbers::pi + a[head_tilt], body.neck_to_head);
  p[left_elbow] = step(p[neck], a[left_upper_arm], body.upper_arm);
  p[left_hand] = step(p[left_elbow], a[left_forearm], body.forearm);
  p[right_elbow] = step(p[neck], a[right_upper_arm], body.upper_arm);
  p[right_hand] = step(p[right_elbow], a[right_forearm], body.forearm);
  p[left_foot] = step(hip, a[left_leg], body.leg);
  p[right_foot] = step(hip, a[right_leg], body.leg);
  KeypointSet k;
  k.points = std::move(p);
  k.visible.assign(kNumJoints, true);
  k.frame = spec.canvas;
  return {hip, std::move(k)};
}

void validate_spec(const FigureSpec& spec) {
  if (spec.canvas.height <= 0 || spec.canvas.width <= 0) throw ArgumentError("figure canvas is empty");
  if (spec.appearance.thickness < 1) throw ArgumentError("limb thickness must be >= 1");
  for (double angle : spec.pose.angles) {
    if (!std::isfinite(angle)) throw ArgumentError("figure joint angle is not finite");
  }
  const auto& r = spec.pose.root;
  if (!(r.x >= 0 && r.y >= 0 && r.x < spec.canvas.width && r.y < spec.canvas.height)) {
    throw ArgumentError("figure root lies outside the canvas");
  }
}

}  // namespace

BodyProportions proportions_for(int64_t identity_seed, Frame canvas) {
  const double unit = std::min(canvas.height, canvas.width) / 64.0;
  // Identity-specific build in [0.85, 1.10).
  const double build = 0.85 + 0.25 * static_cast<double>(mix(static_cast<uint64_t>(identity_seed)) >> 11) * 0x1.0p-53;
  return {6.0 * unit * build, 13.0 * unit * build, 8.0 * unit * build,
          7.0 * unit * build, 14.0 * unit * build, 4.0 * unit * build};
}

KeypointSet figure_keypoints(const FigureSpec& spec) { return layout(spec).joints; }

std::pair<torch::Tensor, KeypointSet> render_figure(const FigureSpec& spec) {
  validate_spec(spec);
  auto [hip, joints] = layout(spec);
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const auto& p = joints.points[i];
    if (!(p.x >= 0 && p.y >= 0 && p.x < spec.canvas.width && p.y < spec.canvas.height)) {
      std::ostringstream msg;
      msg << "figure joint " << i << " at (" << p.x << ", " << p.y << ") falls outside the canvas";
      throw ArgumentError(msg.str());
    }
  }

  using namespace skeleton;
  const auto& look = spec.appearance;
  const auto& p = joints.points;
  const auto body = proportions_for(spec.identity_seed, spec.canvas);
  const std::vector<std::pair<Point2, Point2>> limbs = {
      {p[neck], hip},          {p[neck], p[head]},       {p[neck], p[left_elbow]}, {p[left_elbow], p[left_hand]},
      {p[neck], p[right_elbow]}, {p[right_elbow], p[right_hand]}, {hip, p[left_foot]}, {hip, p[right_foot]}};
  const double limb_r2 = static_cast<double>(look.thickness) * look.thickness;
  const double head_r2 = body.head_radius * body.head_radius;

  const int H = spec.canvas.height, W = spec.canvas.width;
  auto levels = torch::empty({3, H, W}, torch::kUInt8);
  auto acc = levels.accessor<uint8_t, 3>();
  for (int row = 0; row < H; ++row) {
    for (int col = 0; col < W; ++col) {
      const Point2 px{static_cast<double>(col), static_cast<double>(row)};
      Rgb c = look.background;
      const double dhx = px.x - p[head].x, dhy = px.y - p[head].y;
      if (dhx * dhx + dhy * dhy <= head_r2) {
        c = look.head;
      } else if (std::any_of(limbs.begin(), limbs.end(),
                             [&](const auto& l) { return segment_distance2(px, l.first, l.second) <= limb_r2; })) {
        c = look.body;
      } else if (look.noise_texture) {
        const uint64_t h = mix(static_cast<uint64_t>(spec.identity_seed) * 0x100000001b3ULL ^
                               (static_cast<uint64_t>(row) << 32 | static_cast<uint32_t>(col)));
        const int delta = static_cast<int>(h % (2 * kTextureAmplitude + 1)) - kTextureAmplitude;
        auto shift = [delta](uint8_t v) { return static_cast<uint8_t>(std::clamp(v + delta, 0, 255)); };
        c = {shift(c.r), shift(c.g), shift(c.b)};
      }
      acc[0][row][col] = c.r;
      acc[1][row][col] = c.g;
      acc[2][row][col] = c.b;
    }
  }
  return {from_levels(levels), std::move(joints)};
}

Appearance sample_appearance(std::mt19937_64& rng, Frame canvas, bool noise_texture) {
  std::uniform_int_distribution<int> level(0, 255);
  auto color = [&] { return Rgb{static_cast<uint8_t>(level(rng)), static_cast<uint8_t>(level(rng)),
                                static_cast<uint8_t>(level(rng))}; };
  Appearance look;
  look.background = color();
  // Keep the figure clearly separable from the (possibly textured) background.
  do look.body = color(); while (color_distance(look.body, look.background) < 180);
  do look.head = color(); while (color_distance(look.head, look.background) < 180 ||
                                 color_distance(look.head, look.body) < 60);
  const int unit = std::max(1, std::min(canvas.height, canvas.width) / 64);
  look.thickness = std::uniform_int_distribution<int>(1, 2)(rng) * unit;
  look.noise_texture = noise_texture;
  return look;
}

Pose sample_pose(std::mt19937_64& rng, const BodyProportions& body, Frame canvas, double margin) {
  using namespace skeleton;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double pi = std::numbers::pi;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Pose pose;
    auto& a = pose.angles;
    a[torso] = 0.25 * u(rng);
    a[head_tilt] = 0.4 * u(rng);
    // Left limbs swing towards +x, right limbs towards -x.
    a[left_upper_arm] = 0.35 * pi + 0.35 * pi * u(rng);
    a[left_forearm] = a[left_upper_arm] + 0.45 * pi * u(rng);
    a[right_upper_arm] = -0.35 * pi + 0.35 * pi * u(rng);
    a[right_forearm] = a[right_upper_arm] + 0.45 * pi * u(rng);
    a[left_leg] = 0.18 * pi + 0.14 * pi * u(rng);
    a[right_leg] = -0.18 * pi + 0.14 * pi * u(rng);
    const double span = body.torso + body.leg;
    pose.root = {canvas.width / 2.0 + 0.12 * canvas.width * u(rng),
                 (canvas.height - span) / 2.0 + 0.08 * canvas.height * u(rng)};

    // The head point is pushed out by the head radius so the whole head fits.
    const auto& r = pose.root;
    const Point2 hip = step(r, a[torso], body.torso);
    const Point2 le = step(r, a[left_upper_arm], body.upper_arm);
    const Point2 re = step(r, a[right_upper_arm], body.upper_arm);
    const std::array<Point2, 9> pts = {
        r, hip, step(r, a[torso] + pi + a[head_tilt], body.neck_to_head + body.head_radius),
        le, step(le, a[left_forearm], body.forearm), re, step(re, a[right_forearm], body.forearm),
        step(hip, a[left_leg], body.leg), step(hip, a[right_leg], body.leg)};
    const bool inside = std::all_of(pts.begin(), pts.end(), [&](Point2 q) {
      return q.x >= margin && q.y >= margin && q.x <= canvas.width - 1 - margin && q.y <= canvas.height - 1 - margin;
    });
    if (inside) return pose;
  }
  throw ArgumentError("could not place a figure inside the canvas; canvas too small");
}

}  // namespace c2gan
