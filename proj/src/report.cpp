#include "rlsurv/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rlsurv/errors.hpp"

namespace rlsurv {

namespace {

constexpr const char* kCsvHeader =
    "algorithm,device,test_fraction,seed,tp,fp,fn,tn,precision,recall,f1,"
    "train_seconds";

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Presentation order: the two agents first, then the supervised baseline,
// then anything externally ingested, alphabetically.
int algorithm_rank(const std::string& name) {
  if (name == "ddqn") return 0;
  if (name == "dqn") return 1;
  if (name == "ann") return 2;
  return 3;
}

bool report_before(const EvalReport& a, const EvalReport& b) {
  if (a.device != b.device) return a.device < b.device;
  const int ra = algorithm_rank(a.algorithm), rb = algorithm_rank(b.algorithm);
  if (ra != rb) return ra < rb;
  if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
  if (a.test_fraction != b.test_fraction) return a.test_fraction < b.test_fraction;
  return a.seed < b.seed;
}

std::string color_for(const std::string& algorithm) {
  if (algorithm == "ddqn") return "#2563eb";
  if (algorithm == "dqn") return "#f59e0b";
  if (algorithm == "ann") return "#10b981";
  return "#6b7280";
}

std::string fixed(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

std::string safe_name(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ' ' || c == ':') c = '-';
  }
  return out;
}

struct Cell {
  std::vector<double> f1s;
  std::vector<double> seconds;
};

// Aggregation keyed (device, fraction, algorithm); values across seeds.
using Grid = std::map<std::string, std::map<double, std::map<std::string, Cell>>>;

double mean_of(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_comparison_csv(const std::vector<EvalReport>& rows,
                          const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << kCsvHeader << "\n";
  for (const EvalReport& r : rows) {
    out << r.algorithm << ',' << r.device << ','
        << format_double(r.test_fraction) << ',' << r.seed << ',' << r.cm.tp
        << ',' << r.cm.fp << ',' << r.cm.fn << ',' << r.cm.tn << ','
        << format_double(r.precision) << ',' << format_double(r.recall) << ','
        << format_double(r.f1) << ',' << format_double(r.train_seconds)
        << "\n";
  }
  finish(out, path);
}

void write_confusions(const std::vector<EvalReport>& rows,
                      const std::filesystem::path& dir) {
  for (const EvalReport& r : rows) {
    const std::string name = safe_name(r.device) + "_" + safe_name(r.algorithm) +
                             "_f" + format_double(r.test_fraction) + "_s" +
                             std::to_string(r.seed) + ".csv";
    const std::filesystem::path path = dir / name;
    std::ofstream out = open_out(path);
    out << ",pred_normal,pred_failure\n";
    out << "actual_normal," << r.cm.tn << ',' << r.cm.fp << "\n";
    out << "actual_failure," << r.cm.fn << ',' << r.cm.tp << "\n";
    finish(out, path);
  }
}

void write_summary_md(const Grid& grid, std::size_t run_count,
                      const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "# Run comparison\n\n";
  out << run_count << " runs. Cells show test F1 as mean ± sample sd "
      << "across seeds (single-seed cells show the value alone).\n";
  for (const auto& [device, by_fraction] : grid) {
    // Column set and algorithm set for this device's grid.
    std::vector<double> fractions;
    std::vector<std::string> algorithms;
    for (const auto& [fraction, by_algo] : by_fraction) {
      fractions.push_back(fraction);
      for (const auto& [algo, cell] : by_algo) {
        (void)cell;
        if (std::find(algorithms.begin(), algorithms.end(), algo) ==
            algorithms.end()) {
          algorithms.push_back(algo);
        }
      }
    }
    std::sort(algorithms.begin(), algorithms.end(),
              [](const std::string& a, const std::string& b) {
                const int ra = algorithm_rank(a), rb = algorithm_rank(b);
                return ra != rb ? ra < rb : a < b;
              });

    out << "\n## " << device << "\n\n";
    out << "| algorithm |";
    for (double f : fractions) out << " test " << format_double(f) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < fractions.size(); ++i) out << "---|";
    out << "\n";
    for (const std::string& algo : algorithms) {
      out << "| " << algo << " |";
      for (double f : fractions) {
        const auto& by_algo = by_fraction.at(f);
        auto it = by_algo.find(algo);
        if (it == by_algo.end() || it->second.f1s.empty()) {
          out << " - |";
          continue;
        }
        const Cell& cell = it->second;
        out << ' ' << fixed(mean_of(cell.f1s), 4);
        if (cell.f1s.size() > 1) out << " ± " << fixed(sd_of(cell.f1s), 4);
        out << " |";
      }
      out << "\n";
    }
  }
  finish(out, path);
}

void write_legend(std::ofstream& out, const std::vector<std::string>& algorithms,
                  int x, int y) {
  for (const std::string& algo : algorithms) {
    out << "<rect x='" << x << "' y='" << y - 9 << "' width='12' height='12' fill='"
        << color_for(algo) << "'/>";
    out << "<text x='" << x + 16 << "' y='" << y + 1
        << "' font-size='12' font-family='sans-serif'>" << algo << "</text>\n";
    x += 16 + 10 + static_cast<int>(algo.size()) * 8;
  }
}

void write_f1_bars_svg(const Grid& grid, const std::filesystem::path& path) {
  // One bar group per (device, fraction); one bar per algorithm.
  std::vector<std::string> algorithms;
  std::vector<std::pair<std::string, double>> groups;
  for (const auto& [device, by_fraction] : grid) {
    for (const auto& [fraction, by_algo] : by_fraction) {
      groups.emplace_back(device, fraction);
      for (const auto& [algo, cell] : by_algo) {
        (void)cell;
        if (std::find(algorithms.begin(), algorithms.end(), algo) ==
            algorithms.end()) {
          algorithms.push_back(algo);
        }
      }
    }
  }
  std::sort(algorithms.begin(), algorithms.end(),
            [](const std::string& a, const std::string& b) {
              const int ra = algorithm_rank(a), rb = algorithm_rank(b);
              return ra != rb ? ra < rb : a < b;
            });

  const int bar_w = 16, bar_gap = 2, group_gap = 20;
  const int left = 52, top = 44, bottom = 50, plot_h = 220;
  const int group_w =
      static_cast<int>(algorithms.size()) * (bar_w + bar_gap) - bar_gap;
  const int width =
      left + static_cast<int>(groups.size()) * (group_w + group_gap) + 12;
  const int height = top + plot_h + bottom;

  std::ofstream out = open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << ' ' << height
      << "'>\n";
  out << "<rect width='" << width << "' height='" << height
      << "' fill='white'/>\n";
  out << "<text x='" << left << "' y='18' font-size='14' "
      << "font-family='sans-serif' font-weight='bold'>Test F1 by device, "
      << "test fraction, and algorithm (mean over seeds)</text>\n";
  write_legend(out, algorithms, left, 34);

  for (int i = 0; i <= 4; ++i) {
    const double v = i * 0.25;
    const int y = top + plot_h - static_cast<int>(v * plot_h);
    out << "<line x1='" << left << "' y1='" << y << "' x2='" << width - 8
        << "' y2='" << y << "' stroke='#d1d5db' stroke-width='1'/>";
    out << "<text x='" << left - 6 << "' y='" << y + 4
        << "' font-size='11' font-family='sans-serif' text-anchor='end'>"
        << fixed(v, 2) << "</text>\n";
  }

  int x = left;
  std::string last_device;
  for (const auto& [device, fraction] : groups) {
    const auto& by_algo = grid.at(device).at(fraction);
    int bx = x;
    for (const std::string& algo : algorithms) {
      auto it = by_algo.find(algo);
      if (it != by_algo.end() && !it->second.f1s.empty()) {
        const double m = mean_of(it->second.f1s);
        const int h = static_cast<int>(std::lround(m * plot_h));
        out << "<rect x='" << bx << "' y='" << top + plot_h - h << "' width='"
            << bar_w << "' height='" << h << "' fill='" << color_for(algo)
            << "'/>";
      }
      bx += bar_w + bar_gap;
    }
    out << "<text x='" << x + group_w / 2 << "' y='" << top + plot_h + 16
        << "' font-size='11' font-family='sans-serif' text-anchor='middle'>"
        << format_double(fraction) << "</text>";
    if (device != last_device) {
      out << "<text x='" << x << "' y='" << top + plot_h + 34
          << "' font-size='12' font-family='sans-serif' font-weight='bold'>"
          << device << "</text>";
      last_device = device;
    }
    out << "\n";
    x += group_w + group_gap;
  }
  out << "<line x1='" << left << "' y1='" << top + plot_h << "' x2='"
      << width - 8 << "' y2='" << top + plot_h
      << "' stroke='#111827' stroke-width='1'/>\n";
  out << "</svg>\n";
  finish(out, path);
}

void write_time_vs_f1_svg(const std::vector<EvalReport>& rows,
                          const std::filesystem::path& path) {
  std::vector<std::string> algorithms;
  double max_sec = 0;
  for (const EvalReport& r : rows) {
    max_sec = std::max(max_sec, r.train_seconds);
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) ==
        algorithms.end()) {
      algorithms.push_back(r.algorithm);
    }
  }
  std::sort(algorithms.begin(), algorithms.end(),
            [](const std::string& a, const std::string& b) {
              const int ra = algorithm_rank(a), rb = algorithm_rank(b);
              return ra != rb ? ra < rb : a < b;
            });
  const double x_max = max_sec > 0 ? max_sec * 1.05 : 1.0;

  const int left = 56, top = 44, right = 16, bottom = 48;
  const int plot_w = 440, plot_h = 220;
  const int width = left + plot_w + right, height = top + plot_h + bottom;

  std::ofstream out = open_out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << ' ' << height
      << "'>\n";
  out << "<rect width='" << width << "' height='" << height
      << "' fill='white'/>\n";
  out << "<text x='" << left << "' y='18' font-size='14' "
      << "font-family='sans-serif' font-weight='bold'>Training time vs test "
      << "F1 (one point per run)</text>\n";
  write_legend(out, algorithms, left, 34);

  for (int i = 0; i <= 4; ++i) {
    const double v = i * 0.25;
    const int y = top + plot_h - static_cast<int>(v * plot_h);
    out << "<line x1='" << left << "' y1='" << y << "' x2='" << left + plot_w
        << "' y2='" << y << "' stroke='#d1d5db' stroke-width='1'/>";
    out << "<text x='" << left - 6 << "' y='" << y + 4
        << "' font-size='11' font-family='sans-serif' text-anchor='end'>"
        << fixed(v, 2) << "</text>\n";
    const double xv = x_max * v;  // reuse the quarter points for the x axis
    const int xt = left + static_cast<int>(v * plot_w);
    out << "<text x='" << xt << "' y='" << top + plot_h + 18
        << "' font-size='11' font-family='sans-serif' text-anchor='middle'>"
        << fixed(xv, 2) << "</text>\n";
  }
  out << "<text x='" << left + plot_w / 2 << "' y='" << height - 10
      << "' font-size='12' font-family='sans-serif' text-anchor='middle'>"
      << "training seconds</text>\n";

  for (const EvalReport& r : rows) {
    const int cx =
        left + static_cast<int>(std::lround(r.train_seconds / x_max * plot_w));
    const int cy = top + plot_h - static_cast<int>(std::lround(r.f1 * plot_h));
    out << "<circle cx='" << cx << "' cy='" << cy << "' r='4' fill='"
        << color_for(r.algorithm) << "' fill-opacity='0.8'/>\n";
  }
  out << "<line x1='" << left << "' y1='" << top + plot_h << "' x2='"
      << left + plot_w << "' y2='" << top + plot_h
      << "' stroke='#111827' stroke-width='1'/>\n";
  out << "</svg>\n";
  finish(out, path);
}

}  // namespace

void emit_report(const std::vector<EvalReport>& reports,
                 const std::string& out_dir) {
  if (reports.empty()) throw std::invalid_argument("no reports to emit");
  for (const EvalReport& r : reports) {
    if (r.algorithm.find(',') != std::string::npos ||
        r.device.find(',') != std::string::npos) {
      throw std::invalid_argument("algorithm/device names must not contain commas");
    }
  }

  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + out_dir);
  std::filesystem::create_directories(dir / "confusion", ec);
  if (ec) throw IoError("cannot create directory: " + (dir / "confusion").string());

  std::vector<EvalReport> rows = reports;
  std::sort(rows.begin(), rows.end(), report_before);

  Grid grid;
  for (const EvalReport& r : rows) {
    Cell& cell = grid[r.device][r.test_fraction][r.algorithm];
    cell.f1s.push_back(r.f1);
    cell.seconds.push_back(r.train_seconds);
  }

  write_comparison_csv(rows, dir / "comparison.csv");
  write_confusions(rows, dir / "confusion");
  write_summary_md(grid, rows.size(), dir / "summary.md");
  write_f1_bars_svg(grid, dir / "f1_bars.svg");
  write_time_vs_f1_svg(rows, dir / "time_vs_f1.svg");
}

std::vector<EvalReport> parse_comparison_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw SchemaError("'" + path + "' is empty");
  if (strip_cr(header) != kCsvHeader) {
    throw SchemaError("'" + path + "': unexpected header '" + header + "'");
  }

  auto parse_count = [&](const std::string& cell, long line_no) -> long {
    long value = 0;
    const auto [ptr, err] =
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (err != std::errc() || ptr != cell.data() + cell.size() || value < 0) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": bad count '" + cell + "'");
    }
    return value;
  };

  std::vector<EvalReport> reports;
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 12) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": expected 12 cells, got " + std::to_string(cells.size()));
    }
    EvalReport r;
    r.algorithm = cells[0];
    r.device = cells[1];
    try {
      r.test_fraction = parse_double(cells[2]);
      r.precision = parse_double(cells[8]);
      r.recall = parse_double(cells[9]);
      r.f1 = parse_double(cells[10]);
      r.train_seconds = parse_double(cells[11]);
    } catch (const ParseError&) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": non-numeric metric cell");
    }
    std::uint64_t seed = 0;
    const auto [ptr, err] = std::from_chars(
        cells[3].data(), cells[3].data() + cells[3].size(), seed);
    if (err != std::errc() || ptr != cells[3].data() + cells[3].size()) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": bad seed '" + cells[3] + "'");
    }
    r.seed = seed;
    r.cm.tp = parse_count(cells[4], line_no);
    r.cm.fp = parse_count(cells[5], line_no);
    r.cm.fn = parse_count(cells[6], line_no);
    r.cm.tn = parse_count(cells[7], line_no);
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<int> load_predictions_csv(const std::string& path,
                                      std::size_t expected_rows) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw SchemaError("'" + path + "' is empty");
  if (strip_cr(header) != "row_index,pred") {
    throw SchemaError("'" + path + "': expected header 'row_index,pred'");
  }

  std::vector<int> preds(expected_rows, -1);
  std::string line;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 2) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": expected 2 cells");
    }
    std::size_t index = 0;
    const auto [ptr, err] = std::from_chars(
        cells[0].data(), cells[0].data() + cells[0].size(), index);
    if (err != std::errc() || ptr != cells[0].data() + cells[0].size()) {
      throw ParseError("'" + path + "' row " + std::to_string(line_no) +
                       ": bad row index '" + cells[0] + "'");
    }
    if (index >= expected_rows) {
      throw SchemaError("'" + path + "' row " + std::to_string(line_no) +
                        ": row index " + std::to_string(index) +
                        " outside 0.." + std::to_string(expected_rows - 1));
    }
    if (preds[index] != -1) {
      throw SchemaError("'" + path + "' row " + std::to_string(line_no) +
                        ": duplicate row index " + std::to_string(index));
    }
    if (cells[1] != "0" && cells[1] != "1") {
      throw SchemaError("'" + path + "' row " + std::to_string(line_no) +
                        ": pred must be 0 or 1, got '" + cells[1] + "'");
    }
    preds[index] = cells[1] == "1" ? 1 : 0;
  }
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == -1) {
      throw SchemaError("'" + path + "': missing prediction for row " +
                        std::to_string(i));
    }
  }
  return preds;
}

}  // namespace rlsurv
