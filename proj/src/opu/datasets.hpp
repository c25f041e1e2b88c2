#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace opu {

struct Dataset {
  std::string name;
  Eigen::MatrixXd features;  // samples x dims
  std::vector<int> labels;   // 0 .. classes-1
  int classes = 2;
};

// All generators draw from CounterStream(seed, tag) with one stream per role,
// consuming values in sample order.
//
// blobs:   label ~ below(2); x = c·1 + N(0, I_d), c = ±separation/sqrt(d)
//          (+ for label 1).
// circles: label ~ below(2); θ ~ U[0, 2π); r = factor if label 1 else 1;
//          p = r(cos θ, sin θ) + noise·N(0, I_2); features = W p with a fixed
//          d x 2 standard Gaussian lift W (its own stream).
// moons:   label ~ below(2); t ~ U[0, π); label 0: (cos t, sin t),
//          label 1: (1 - cos t, 0.5 - sin t); plus noise·N(0, I_2).
Dataset make_blobs(std::size_t samples, std::size_t dims, std::uint64_t seed, double separation = 4.0);
Dataset make_circles(std::size_t samples, std::size_t lift_dims, std::uint64_t seed, double noise = 0.05,
                     double factor = 0.5);
Dataset make_moons(std::size_t samples, std::uint64_t seed, double noise = 0.1);

// Dispatch by name ("blobs", "circles", "moons"). dims is ignored for moons.
Dataset make_dataset(const std::string& name, std::size_t samples, std::size_t dims, std::uint64_t seed);

}  // namespace opu
