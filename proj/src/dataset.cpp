#include "rlsurv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rlsurv/errors.hpp"

namespace rlsurv {

long Dataset::count_label(int label) const {
  return std::count(labels.begin(), labels.end(), label);
}

DeviceSpec device_preset(const std::string& name) {
  DeviceSpec spec;
  spec.name = name;
  // Regime constants chosen so generated per-feature ranges land close to the
  // real telemetry these devices are modeled after.
  spec.normal_mean << 170.0, 420.0, 105.0, 45.0;
  spec.normal_std << 15.0, 52.0, 11.0, 5.5;
  spec.failure_shift << 40.0, -140.0, 30.0, 15.0;
  spec.overlap = 0.3;
  if (name == "device1") {
    spec.n_normal = 8717;
    spec.n_failure = 44;
    spec.seed = 1;
  } else if (name == "device2") {
    spec.n_normal = 8720;
    spec.n_failure = 41;
    spec.seed = 2;
    spec.normal_mean << 172.0, 410.0, 106.0, 44.5;
    spec.normal_std << 17.0, 56.0, 11.5, 6.0;
  } else if (name == "device3") {
    spec.n_normal = 8721;
    spec.n_failure = 40;
    spec.seed = 3;
    spec.normal_mean << 171.0, 435.0, 103.0, 44.0;
    spec.normal_std << 14.5, 50.0, 11.0, 5.2;
  } else {
    throw std::invalid_argument("unknown device preset '" + name +
                                "' (available: device1, device2, device3)");
  }
  return spec;
}

std::vector<std::string> device_preset_names() {
  return {"device1", "device2", "device3"};
}

Dataset generate(const DeviceSpec& spec) {
  if (spec.n_normal <= 0 || spec.n_failure <= 0) {
    throw std::invalid_argument("class counts must be positive");
  }
  if (spec.overlap < 0.0 || spec.overlap > 1.0) {
    throw std::invalid_argument("overlap must be in [0,1]");
  }
  if (spec.severity_spread < 0.0 || spec.severity_spread > 1.0) {
    throw std::invalid_argument("severity_spread must be in [0,1]");
  }
  const long total = spec.n_normal + spec.n_failure;
  Dataset ds;
  ds.name = spec.name;
  ds.features.resize(total, kFeatureCount);
  ds.labels.resize(total);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (long i = 0; i < total; ++i) {
    const bool failure = i >= spec.n_normal;
    const bool shifted = failure && unit(rng) >= spec.overlap;
    // One severity per row, not per feature: a failing device drifts along the
    // whole degradation direction at once.
    const double severity =
        shifted ? 1.0 + spec.severity_spread * (2.0 * unit(rng) - 1.0) : 1.0;
    for (int f = 0; f < kFeatureCount; ++f) {
      double v = spec.normal_mean(f) + spec.normal_std(f) * gauss(rng);
      if (shifted) v += severity * spec.failure_shift(f);
      ds.features(i, f) = v;
    }
    ds.labels[i] = failure ? 1 : 0;
  }

  // Mix the two label blocks so stored row order looks like observed telemetry.
  std::vector<long> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Dataset mixed;
  mixed.name = ds.name;
  mixed.features.resize(total, kFeatureCount);
  mixed.labels.resize(total);
  for (long i = 0; i < total; ++i) {
    mixed.features.row(i) = ds.features.row(order[i]);
    mixed.labels[i] = ds.labels[order[i]];
  }
  return mixed;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string header;
  if (!std::getline(in, header)) throw SchemaError("'" + path + "' is empty");
  const auto cols = split_line(strip_cr(header));
  const std::vector<std::string> expected = {"volt", "rotate", "pressure",
                                             "vibration", "label"};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= cols.size() || cols[i] != expected[i]) {
      throw SchemaError("'" + path + "': missing or misnamed column '" +
                        expected[i] + "'");
    }
  }
  if (cols.size() != expected.size()) {
    throw SchemaError("'" + path + "': expected exactly 5 columns");
  }

  std::vector<std::array<double, kFeatureCount>> rows;
  std::vector<int> labels;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != expected.size()) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": expected 5 cells, got " + std::to_string(cells.size()));
    }
    std::array<double, kFeatureCount> row{};
    for (int f = 0; f < kFeatureCount; ++f) {
      try {
        row[f] = parse_double(cells[f]);
      } catch (const ParseError&) {
        throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                         ": non-numeric cell '" + cells[f] + "' in column " +
                         kFeatureNames[f]);
      }
    }
    const std::string& lab = cells[4];
    if (lab != "0" && lab != "1") {
      throw SchemaError("'" + path + "' row " + std::to_string(line_no) +
                        ": label must be 0 or 1, got '" + lab + "'");
    }
    rows.push_back(row);
    labels.push_back(lab == "1" ? 1 : 0);
  }

  Dataset ds;
  ds.name = path;
  ds.features.resize(static_cast<long>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int f = 0; f < kFeatureCount; ++f) ds.features(static_cast<long>(i), f) = rows[i][f];
  }
  ds.labels = std::move(labels);
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "volt,rotate,pressure,vibration,label\n";
  for (long i = 0; i < static_cast<long>(ds.size()); ++i) {
    for (int f = 0; f < kFeatureCount; ++f) {
      out << format_double(ds.features(i, f)) << ',';
    }
    out << ds.labels[i] << '\n';
  }
  if (!out.good()) throw IoError("write failed for '" + path + "'");
}

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<long>& idx,
                  const std::string& suffix) {
  Dataset out;
  out.name = ds.name.empty() ? suffix : ds.name + "/" + suffix;
  out.features.resize(static_cast<long>(idx.size()), kFeatureCount);
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.features.row(static_cast<long>(i)) = ds.features.row(idx[i]);
    out.labels[i] = ds.labels[idx[i]];
  }
  return out;
}

}  // namespace

SplitResult split(const Dataset& ds, double test_fraction,
                  double val_fraction_of_train, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test_fraction must be in (0,1)");
  }
  if (val_fraction_of_train < 0.0 || val_fraction_of_train >= 1.0) {
    throw std::invalid_argument("val_fraction_of_train must be in [0,1)");
  }
  if (ds.size() == 0) throw std::invalid_argument("cannot split an empty dataset");

  std::vector<long> test_idx, val_idx, train_idx;
  for (int label = 0; label <= 1; ++label) {
    std::vector<long> stratum;
    for (long i = 0; i < static_cast<long>(ds.size()); ++i) {
      if (ds.labels[i] == label) stratum.push_back(i);
    }
    std::mt19937_64 rng(mix_seed(seed, 101 + static_cast<std::uint64_t>(label)));
    std::shuffle(stratum.begin(), stratum.end(), rng);

    const long n = static_cast<long>(stratum.size());
    const long n_test = std::llround(test_fraction * static_cast<double>(n));
    const long n_val =
        std::llround(val_fraction_of_train * static_cast<double>(n - n_test));
    test_idx.insert(test_idx.end(), stratum.begin(), stratum.begin() + n_test);
    val_idx.insert(val_idx.end(), stratum.begin() + n_test,
                   stratum.begin() + n_test + n_val);
    train_idx.insert(train_idx.end(), stratum.begin() + n_test + n_val,
                     stratum.end());
  }

  long train_minority = 0;
  for (long i : train_idx) train_minority += ds.labels[i];
  if (train_minority < 2) {
    throw std::invalid_argument(
        "train split would hold fewer than 2 minority rows; "
        "use a smaller test fraction or more data");
  }

  // One more seeded shuffle per split so rows are not grouped by label.
  auto mix = [&](std::vector<long>& idx, std::uint64_t stream) {
    std::mt19937_64 rng(mix_seed(seed, stream));
    std::shuffle(idx.begin(), idx.end(), rng);
  };
  mix(test_idx, 201);
  mix(val_idx, 202);
  mix(train_idx, 203);

  SplitResult out;
  out.train = take_rows(ds, train_idx, "train");
  out.val = take_rows(ds, val_idx, "val");
  out.test = take_rows(ds, test_idx, "test");
  return out;
}

Scaler fit_scaler(const Dataset& train, ScalerMode mode) {
  if (train.size() == 0) throw std::invalid_argument("cannot fit scaler on empty data");
  Scaler s;
  s.mode = mode;
  if (mode == ScalerMode::minmax) {
    s.lo = train.features.colwise().minCoeff().transpose();
    s.hi = train.features.colwise().maxCoeff().transpose();
  } else {
    s.lo = train.features.colwise().mean().transpose();
    for (int f = 0; f < kFeatureCount; ++f) {
      const double var =
          (train.features.col(f).array() - s.lo(f)).square().sum() /
          static_cast<double>(train.size());
      s.hi(f) = std::sqrt(var);
    }
  }
  return s;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& ds) {
  Dataset out = ds;
  for (int f = 0; f < kFeatureCount; ++f) {
    const double denom = scaler.mode == ScalerMode::minmax
                             ? scaler.hi(f) - scaler.lo(f)
                             : scaler.hi(f);
    if (denom == 0.0) {
      out.features.col(f).setZero();  // constant feature
    } else {
      out.features.col(f) = (ds.features.col(f).array() - scaler.lo(f)) / denom;
    }
  }
  return out;
}

Dataset invert_scaler(const Scaler& scaler, const Dataset& ds) {
  Dataset out = ds;
  for (int f = 0; f < kFeatureCount; ++f) {
    const double denom = scaler.mode == ScalerMode::minmax
                             ? scaler.hi(f) - scaler.lo(f)
                             : scaler.hi(f);
    if (denom == 0.0) {
      out.features.col(f).setConstant(scaler.lo(f));
    } else {
      out.features.col(f) = ds.features.col(f).array() * denom + scaler.lo(f);
    }
  }
  return out;
}

Dataset concat(const Dataset& a, const Dataset& b) {
  Dataset out;
  out.name = a.name;
  out.features.resize(a.features.rows() + b.features.rows(), kFeatureCount);
  out.features.topRows(a.features.rows()) = a.features;
  out.features.bottomRows(b.features.rows()) = b.features;
  out.labels = a.labels;
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

}  // namespace rlsurv
