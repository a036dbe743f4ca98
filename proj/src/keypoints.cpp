#include "c2gan/keypoints.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "c2gan/errors.hpp"

namespace c2gan {

std::size_t KeypointSet::visible_count() const {
  std::size_t n = 0;
  for (bool v : visible) n += v ? 1 : 0;
  return n;
}

void KeypointSet::validate() const {
  if (points.size() != visible.size()) {
    throw ArgumentError("keypoint set: " + std::to_string(points.size()) + " points but " +
                        std::to_string(visible.size()) + " visibility flags");
  }
  if (frame.height <= 0 || frame.width <= 0) {
    throw ArgumentError("keypoint set: empty frame");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!visible[i]) continue;
    const auto& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0 ||
        p.x >= frame.width || p.y >= frame.height) {
      std::ostringstream msg;
      msg << "keypoint " << i << " at (" << p.x << ", " << p.y << ") lies outside the "
          << frame.height << "x" << frame.width << " frame";
      throw ArgumentError(msg.str());
    }
  }
}

void validate_swap_table(std::span<const int> swap, std::size_t n) {
  if (swap.empty()) return;
  if (swap.size() != n) {
    throw ArgumentError("swap table has " + std::to_string(swap.size()) + " entries for " +
                        std::to_string(n) + " keypoints");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int j = swap[i];
    if (j < 0 || static_cast<std::size_t>(j) >= n || swap[j] != static_cast<int>(i)) {
      throw ArgumentError("swap table is not an involutive permutation");
    }
  }
}

KeypointSet hflip(const KeypointSet& keypoints, std::span<const int> swap) {
  validate_swap_table(swap, keypoints.size());
  KeypointSet out = keypoints;
  const double mirror = keypoints.frame.width - 1;
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    const std::size_t j = swap.empty() ? i : static_cast<std::size_t>(swap[i]);
    out.points[j] = {mirror - keypoints.points[i].x, keypoints.points[i].y};
    out.visible[j] = keypoints.visible[i];
  }
  return out;
}

nlohmann::json to_json(const KeypointSet& keypoints) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : keypoints.points) points.push_back({p.x, p.y});
  nlohmann::json visible = nlohmann::json::array();
  for (bool v : keypoints.visible) visible.push_back(v);
  return {{"frame", {keypoints.frame.height, keypoints.frame.width}},
          {"points", std::move(points)},
          {"visible", std::move(visible)}};
}

KeypointSet keypoints_from_json(const nlohmann::json& j) {
  KeypointSet k;
  try {
    const auto& frame = j.at("frame");
    k.frame = {frame.at(0).get<int>(), frame.at(1).get<int>()};
    for (const auto& p : j.at("points")) k.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    for (const auto& v : j.at("visible")) k.visible.push_back(v.get<bool>());
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed keypoint object: ") + e.what());
  }
  k.validate();
  return k;
}

std::vector<KeypointSet> read_keypoints_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open keypoint file " + path.string());
  std::vector<KeypointSet> sets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      sets.push_back(keypoints_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return sets;
}

void write_keypoints_jsonl(const std::filesystem::path& path, std::span<const KeypointSet> sets) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write keypoint file " + path.string());
  for (const auto& k : sets) out << to_json(k).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace c2gan
