#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <torch/torch.h>

namespace c2gan {

/// Pool of past generated discriminator inputs. Until full, every query is
/// stored and returned. Once full, a query returns a uniformly chosen stored
/// sample (replacing it with the fresh one) with probability 0.5, and the
/// fresh sample otherwise.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(std::size_t capacity, uint64_t seed = 0) : capacity_(capacity), rng_(seed) {}

  /// Single sample (no batch dimension). Stored samples are detached copies.
  torch::Tensor query(const torch::Tensor& fresh);
  /// Applies `query` to every sample of a [B,...] batch.
  torch::Tensor query_batch(const torch::Tensor& fresh);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return stored_.size(); }
  const std::vector<torch::Tensor>& stored() const { return stored_; }
  /// How many queries returned a stored sample.
  std::size_t stored_returns() const { return stored_returns_; }

  /// RNG state, counters, and the stored samples for checkpointing.
  std::string rng_state() const;
  void restore(const std::string& rng_state, std::vector<torch::Tensor> stored);

 private:
  std::size_t capacity_;
  std::mt19937_64 rng_;
  std::vector<torch::Tensor> stored_;
  std::size_t stored_returns_ = 0;
};

}  // namespace c2gan
