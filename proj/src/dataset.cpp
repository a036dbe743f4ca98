#include "c2gan/dataset.hpp"

#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "c2gan/errors.hpp"
#include "c2gan/figure.hpp"
#include "c2gan/image_io.hpp"

namespace fs = std::filesystem;

namespace c2gan {

nlohmann::json DatasetDescriptor::to_json() const {
  nlohmann::json adj = nlohmann::json::array();
  for (auto [a, b] : adjacency) adj.push_back({a, b});
  return {{"format", 1},
          {"mode", std::string(to_string(mode))},
          {"radius", radius},
          {"num_keypoints", num_keypoints},
          {"frame", {frame.height, frame.width}},
          {"swap", swap},
          {"adjacency", adj},
          {"ground_truth_oracle", ground_truth_oracle}};
}

DatasetDescriptor DatasetDescriptor::from_json(const nlohmann::json& j) {
  DatasetDescriptor d;
  d.mode = parse_heatmap_mode(j.value("mode", std::string("person")));
  d.radius = j.value("radius", kDefaultPersonRadius);
  d.num_keypoints = j.value("num_keypoints", 0);
  if (j.contains("frame")) d.frame = {j["frame"].at(0).get<int>(), j["frame"].at(1).get<int>()};
  d.swap = j.value("swap", SwapTable{});
  if (j.contains("adjacency")) {
    for (const auto& e : j["adjacency"]) d.adjacency.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  d.ground_truth_oracle = j.value("ground_truth_oracle", false);
  validate_swap_table(d.swap, d.swap.empty() ? 0 : static_cast<std::size_t>(d.num_keypoints));
  return d;
}

DatasetDescriptor read_descriptor(const fs::path& dir) {
  const auto path = dir / "dataset.json";
  if (!fs::exists(path)) return {};
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return DatasetDescriptor::from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::size_t generate_dataset(const fs::path& dir, const GenerateOptions& opt) {
  if (opt.n_identities < 1) throw ArgumentError("n_identities must be >= 1");
  if (opt.poses_per_identity < 2) throw ArgumentError("poses_per_identity must be >= 2");
  std::error_code ec;
  fs::create_directories(dir / "images", ec);
  if (!ec) fs::create_directories(dir / "keypoints", ec);
  if (ec) throw IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());

  std::ofstream index(dir / "pairs.csv");
  if (!index) throw IoError("cannot write " + (dir / "pairs.csv").string());
  index << "x_path,y_path,lx_path,ly_path,identity_id\n";

  std::size_t pairs = 0;
  for (int n = 0; n < opt.n_identities; ++n) {
    const int64_t id = opt.first_identity + n;
    std::seed_seq seq{static_cast<uint32_t>(opt.seed), static_cast<uint32_t>(opt.seed >> 32),
                      static_cast<uint32_t>(id), static_cast<uint32_t>(static_cast<uint64_t>(id) >> 32)};
    std::mt19937_64 rng(seq);
    FigureSpec spec;
    spec.identity_seed = id;
    spec.canvas = opt.canvas;
    spec.appearance = sample_appearance(rng, opt.canvas, opt.noise_texture);
    const auto body = proportions_for(id, opt.canvas);

    std::vector<std::string> names;
    for (int p = 0; p < opt.poses_per_identity; ++p) {
      spec.pose = sample_pose(rng, body, opt.canvas, spec.appearance.thickness + 1.0);
      auto [image, keypoints] = render_figure(spec);
      const std::string name = std::to_string(id) + "_" + std::to_string(p);
      write_png(dir / "images" / (name + ".png"), image);
      write_keypoints_jsonl(dir / "keypoints" / (name + ".jsonl"), std::span(&keypoints, 1));
      names.push_back(name);
    }
    for (const auto& a : names) {
      for (const auto& b : names) {
        if (a == b) continue;
        index << "images/" << a << ".png,images/" << b << ".png,keypoints/" << a << ".jsonl,keypoints/" << b
              << ".jsonl," << id << '\n';
        ++pairs;
      }
    }
  }
  if (!index) throw IoError("write failed for " + (dir / "pairs.csv").string());

  DatasetDescriptor d;
  d.mode = opt.mode;
  d.radius = opt.radius;
  d.num_keypoints = skeleton::kNumJoints;
  d.frame = opt.canvas;
  d.swap = skeleton::kSwapTable;
  d.adjacency = skeleton::kAdjacency;
  d.ground_truth_oracle = true;
  std::ofstream desc(dir / "dataset.json");
  desc << d.to_json().dump(2) << '\n';
  if (!desc) throw IoError("cannot write " + (dir / "dataset.json").string());
  return pairs;
}

std::vector<PairRecord> read_pair_index(const fs::path& dir) {
  const auto path = dir / "pairs.csv";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pair index " + path.string());
  std::vector<PairRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (line_no == 1 && !cols.empty() && cols[0] == "x_path") continue;
    if (cols.size() != 5) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns, got " +
                    std::to_string(cols.size()));
    }
    PairRecord r{dir / cols[0], dir / cols[1], dir / cols[2], dir / cols[3], 0};
    try {
      r.identity_id = std::stoll(cols[4]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad identity_id '" + cols[4] + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::shared_ptr<const PairDataset> PairDataset::load(const fs::path& dir) {
  auto data = std::make_shared<PairDataset>();
  data->dir_ = dir;
  data->descriptor_ = read_descriptor(dir);
  data->records_ = read_pair_index(dir);

  std::map<fs::path, std::size_t> image_slot, keypoint_slot;
  auto image = [&](const fs::path& p) {
    auto [it, fresh] = image_slot.try_emplace(p, data->images_.size());
    if (fresh) data->images_.push_back(read_png(p));
    return it->second;
  };
  auto keypoints = [&](const fs::path& p) {
    auto [it, fresh] = keypoint_slot.try_emplace(p, data->keypoints_.size());
    if (fresh) {
      auto sets = read_keypoints_jsonl(p);
      if (sets.empty()) throw IoError("keypoint file " + p.string() + " is empty");
      data->keypoints_.push_back(std::move(sets.front()));
    }
    return it->second;
  };
  for (const auto& r : data->records_) {
    const std::array<std::size_t, 4> slot{image(r.x_path), image(r.y_path), keypoints(r.lx_path),
                                          keypoints(r.ly_path)};
    const auto& x = data->images_[slot[0]];
    const auto& y = data->images_[slot[1]];
    const Frame fx{static_cast<int>(x.size(1)), static_cast<int>(x.size(2))};
    const Frame fy{static_cast<int>(y.size(1)), static_cast<int>(y.size(2))};
    if (fx != fy || data->keypoints_[slot[2]].frame != fx || data->keypoints_[slot[3]].frame != fx) {
      throw IoError("pair " + r.x_path.string() + " / " + r.y_path.string() + " has inconsistent frame sizes");
    }
    data->slots_.push_back(slot);
  }
  auto& d = data->descriptor_;
  if (!data->keypoints_.empty()) {
    const auto n = static_cast<int>(data->keypoints_.front().size());
    if (d.num_keypoints == 0) d.num_keypoints = n;
    if (d.frame.height == 0) d.frame = data->keypoints_.front().frame;
    for (const auto& k : data->keypoints_) {
      if (static_cast<int>(k.size()) != d.num_keypoints) {
        throw IoError("dataset " + dir.string() + " mixes keypoint counts");
      }
    }
  }
  return data;
}

TrainingPair PairDataset::get(std::size_t i, bool flip) const {
  const auto& s = slots_.at(i);
  TrainingPair p{images_[s[0]], images_[s[1]], keypoints_[s[2]], keypoints_[s[3]], records_[i].identity_id};
  if (flip) {
    p.x = p.x.flip({-1});
    p.y = p.y.flip({-1});
    p.lx = hflip(p.lx, descriptor_.swap);
    p.ly = hflip(p.ly, descriptor_.swap);
  }
  return p;
}

PairStream::PairStream(std::shared_ptr<const PairDataset> data, bool augment, bool shuffle, uint64_t seed)
    : data_(std::move(data)), augment_(augment), shuffle_(shuffle), rng_(seed) {
  if (!data_ || data_->size() == 0) throw ArgumentError("cannot stream an empty dataset");
  order_.resize(data_->size());
  reshuffle();
}

void PairStream::reshuffle() {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (shuffle_) std::shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

TrainingPair PairStream::next() {
  if (cursor_ == order_.size()) {
    ++epoch_;
    reshuffle();
  }
  const std::size_t i = order_[cursor_++];
  bool flip = false;
  if (augment_) flip = std::bernoulli_distribution(0.5)(rng_);
  if (forced_flip_) flip = *forced_flip_;
  return data_->get(i, flip);
}

std::vector<TrainingPair> PairStream::next_batch(std::size_t n) {
  std::vector<TrainingPair> batch;
  batch.reserve(n);
  for (std::size_t i = 0; i < n; ++i) batch.push_back(next());
  return batch;
}

std::string PairStream::save_state() const {
  std::ostringstream out;
  out << rng_ << '\n' << cursor_ << ' ' << epoch_ << ' ' << order_.size();
  for (auto i : order_) out << ' ' << i;
  return out.str();
}

void PairStream::load_state(const std::string& state) {
  std::istringstream in(state);
  std::size_t n = 0;
  in >> rng_ >> cursor_ >> epoch_ >> n;
  if (!in || n != data_->size()) throw ConfigError("data stream state does not match the dataset");
  order_.resize(n);
  for (auto& i : order_) in >> i;
  if (!in || cursor_ > n) throw ConfigError("corrupt data stream state");
}

PairStream load_pairs(const fs::path& dir, bool augment, uint64_t seed, bool shuffle) {
  return PairStream(PairDataset::load(dir), augment, shuffle, seed);
}

torch::Tensor stack_x(const std::vector<TrainingPair>& batch) {
  std::vector<torch::Tensor> v;
  for (const auto& p : batch) v.push_back(p.x);
  return torch::stack(v);
}

torch::Tensor stack_y(const std::vector<TrainingPair>& batch) {
  std::vector<torch::Tensor> v;
  for (const auto& p : batch) v.push_back(p.y);
  return torch::stack(v);
}

}  // namespace c2gan
