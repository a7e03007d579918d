#pragma once

#include <Eigen/Dense>

namespace scope {

template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using ArrayX = Eigen::Array<T, Eigen::Dynamic, 1>;

using Vector = VectorX<double>;
using Velocity = Vector;
using BoolArray = ArrayX<bool>;
using IntArray = Eigen::ArrayXi;

inline constexpr int default_latent_dim = 64;

// Latent of one frame together with its position on the noise schedule.
// sigma must equal the schedule entry at step_index.
struct LatentState {
  Vector x;
  int step_index = 0;
  double sigma = 1.0;
};

// Concatenated latents gathered over a frame interval; the discrepancy
// score is computed on consecutive features of equal dimension.
struct HostFeature {
  Vector phi;
  int frame_begin = 0;
  int frame_end = 0;
};

}  // namespace scope
