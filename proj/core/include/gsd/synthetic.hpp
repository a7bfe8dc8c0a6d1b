#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gsd/dataset.hpp"

namespace gsd {

/// Unit-norm hyperplane weights used by gen_hyperplane for `seed`.
std::vector<double> hyperplane_weights(std::uint64_t seed, std::size_t n_features);

/// Static hyperplane concept: x ~ U[0,1]^d, label 1 iff w.x >= w.(0.5, ..., 0.5)
/// with non-negative weights as in the MOA generator.
Dataset gen_hyperplane(std::uint64_t seed, std::size_t n_rows = 10000,
                       std::size_t n_features = 10);

/// Breiman's waveform concept with 21 signal and 19 pure-noise attributes.
/// `classes` holds the three-way target; `labels` binarizes it as
/// class 0 -> 0, classes 1 and 2 -> 1.
Dataset gen_waveform(std::uint64_t seed, std::size_t n_rows = 10000);

}  // namespace gsd
