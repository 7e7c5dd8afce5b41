#pragma once

#include <string>
#include <vector>

#include "rlsurv/metrics.hpp"

namespace rlsurv {

/// Writes the full artifact set for a batch of evaluated runs into out_dir
/// (created if absent):
///   comparison.csv        one row per run
///   summary.md            per-device grids of mean +/- sd F1 across seeds
///   f1_bars.svg           mean F1 per (device, fraction, algorithm)
///   time_vs_f1.svg        per-run training time against test F1
///   confusion/<run>.csv   2x2 count matrix per run
/// Output depends only on the report list: identical inputs give identical
/// bytes. Rows are ordered (device, algorithm, fraction, seed) regardless of
/// input order. Throws on empty input; IoError when the directory cannot be
/// created or written.
void emit_report(const std::vector<EvalReport>& reports,
                 const std::string& out_dir);

/// Reads a comparison.csv produced by emit_report back into reports.
/// The metric columns round-trip exactly (shortest-decimal encoding).
std::vector<EvalReport> parse_comparison_csv(const std::string& path);

/// Reads an externally produced predictions file with header `row_index,pred`
/// and returns preds ordered by row index. Every index in [0, expected_rows)
/// must appear exactly once; preds must be 0/1.
std::vector<int> load_predictions_csv(const std::string& path,
                                      std::size_t expected_rows);

}  // namespace rlsurv
