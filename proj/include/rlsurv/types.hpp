#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace rlsurv {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Derives an independent rng stream from a base seed (splitmix64 double round).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// FNV-1a hash of a string, for deriving per-name seed streams.
std::uint64_t hash_name(const std::string& name);

/// Shortest decimal form that parses back to the exact same double.
std::string format_double(double value);

/// Inverse of format_double. Throws ParseError on malformed input.
double parse_double(const std::string& text);

/// Index of the largest coefficient; ties resolve to the lowest index.
template <typename Derived>
int argmax_index(const Eigen::DenseBase<Derived>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

}  // namespace rlsurv
