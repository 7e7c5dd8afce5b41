#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rlsurv/types.hpp"

namespace rlsurv {

inline constexpr int kFeatureCount = 4;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "volt", "rotate", "pressure", "vibration"};

/// Labeled sensor readings: one row of (volt, rotate, pressure, vibration)
/// per observation, label 0 = NORMAL, 1 = FAILURE.
struct Dataset {
  Matrix features;  // n x kFeatureCount
  std::vector<int> labels;
  std::string name;

  std::size_t size() const { return labels.size(); }
  long count_label(int label) const;
};

/// Parameters of the synthetic telemetry generator. Normal readings come from
/// a per-feature Gaussian regime; failure readings from a mean-shifted regime,
/// except that a fraction `overlap` of them is drawn from the normal regime,
/// which controls how hard the failures are to separate. Shifted failure rows
/// additionally scale the whole shift vector by a per-row severity drawn from
/// U(1 - severity_spread, 1 + severity_spread), so failures range from mild
/// (near the normal cluster) to severe instead of forming one tight blob.
struct DeviceSpec {
  std::string name;
  long n_normal = 0;
  long n_failure = 0;
  Eigen::Vector4d normal_mean = Eigen::Vector4d::Zero();
  Eigen::Vector4d normal_std = Eigen::Vector4d::Ones();
  Eigen::Vector4d failure_shift = Eigen::Vector4d::Zero();
  double overlap = 0.3;
  double severity_spread = 0.5;
  std::uint64_t seed = 1;
};

/// Built-in device presets: "device1", "device2", "device3".
DeviceSpec device_preset(const std::string& name);
std::vector<std::string> device_preset_names();

/// Seeded Gaussian-mixture generation with exact class counts.
Dataset generate(const DeviceSpec& spec);

/// CSV with header volt,rotate,pressure,vibration,label; label in {0,1}.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& ds, const std::string& path);

struct SplitResult {
  Dataset train, val, test;
};

/// Stratified three-way partition. Per class: round(test_fraction * n) rows go
/// to test, then round(val_fraction_of_train * remainder) to validation, the
/// rest to train. Seeded shuffles; no row is lost or duplicated.
SplitResult split(const Dataset& ds, double test_fraction,
                  double val_fraction_of_train, std::uint64_t seed);

enum class ScalerMode { minmax, zscore };

/// Per-feature affine transform fitted on a training split only. minmax maps
/// the training range onto [0,1]; rows outside that range map outside [0,1].
/// A constant feature maps to 0 in either mode.
struct Scaler {
  ScalerMode mode = ScalerMode::minmax;
  Eigen::Vector4d lo = Eigen::Vector4d::Zero();  // min (minmax) or mean (zscore)
  Eigen::Vector4d hi = Eigen::Vector4d::Ones();  // max (minmax) or stddev (zscore)
};

Scaler fit_scaler(const Dataset& train, ScalerMode mode);
Dataset apply_scaler(const Scaler& scaler, const Dataset& ds);
Dataset invert_scaler(const Scaler& scaler, const Dataset& ds);

Dataset concat(const Dataset& a, const Dataset& b);

}  // namespace rlsurv
