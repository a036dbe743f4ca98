#include "c2gan/history_buffer.hpp"

#include <sstream>

#include "c2gan/errors.hpp"

namespace c2gan {

torch::Tensor HistoryBuffer::query(const torch::Tensor& fresh) {
  if (capacity_ == 0) return fresh;
  if (stored_.size() < capacity_) {
    stored_.push_back(fresh.detach().clone());
    return fresh;
  }
  if (std::bernoulli_distribution(0.5)(rng_)) {
    const auto slot = std::uniform_int_distribution<std::size_t>(0, capacity_ - 1)(rng_);
    auto old = stored_[slot];
    stored_[slot] = fresh.detach().clone();
    ++stored_returns_;
    return old;
  }
  return fresh;
}

torch::Tensor HistoryBuffer::query_batch(const torch::Tensor& fresh) {
  if (capacity_ == 0) return fresh;
  std::vector<torch::Tensor> out;
  out.reserve(static_cast<std::size_t>(fresh.size(0)));
  for (int64_t i = 0; i < fresh.size(0); ++i) out.push_back(query(fresh[i]));
  return torch::stack(out);
}

std::string HistoryBuffer::rng_state() const {
  std::ostringstream out;
  out << rng_ << ' ' << stored_returns_;
  return out.str();
}

void HistoryBuffer::restore(const std::string& rng_state, std::vector<torch::Tensor> stored) {
  if (stored.size() > capacity_) throw ConfigError("history buffer checkpoint exceeds capacity");
  std::istringstream in(rng_state);
  in >> rng_ >> stored_returns_;
  if (!in) throw ConfigError("corrupt history buffer state");
  stored_ = std::move(stored);
}

}  // namespace c2gan
