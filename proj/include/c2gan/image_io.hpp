#pragma once

#include <cstdint>
#include <filesystem>

#include <torch/torch.h>

namespace c2gan {

/// [-1,1] float image to 8-bit levels: round((v + 1) * 127.5), clamped.
torch::Tensor to_levels(const torch::Tensor& image);
/// 8-bit levels (any integer or float dtype) to [-1,1] float.
torch::Tensor from_levels(const torch::Tensor& levels);

/// Write a [3,H,W] (or [1,H,W]) image in [-1,1] as an 8-bit RGB PNG.
/// Written to a temporary sibling and renamed into place.
void write_png(const std::filesystem::path& path, const torch::Tensor& image);

/// Read any 8-bit PNG as a [3,H,W] float image in [-1,1]. Grey images are
/// replicated, alpha is dropped. Throws IoError naming the file.
torch::Tensor read_png(const std::filesystem::path& path);

}  // namespace c2gan
