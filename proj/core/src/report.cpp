#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "demotrend/io.hpp"

namespace demotrend::io {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw Error(ErrorCode::Io, "cannot create directory " + path.parent_path().string() + ": " +
                                   ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_table(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + csv_escape(t.columns[i]);
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_escape(row[i]);
    out += "\n";
  }
  return out;
}

// Columns trimmed to their common month range.
std::vector<MonthlySeries> common_columns(const SeriesFile& file) {
  if (file.columns.empty() || file.columns.size() > 2) {
    throw Error(ErrorCode::InvalidArgument,
                "series file '" + file.name + "' must hold one or two columns");
  }
  if (file.columns.size() == 1) return {file.columns[0].second};
  auto [a, b] = align(file.columns[0].second, file.columns[1].second);
  return {a, b};
}

std::string render_series(const SeriesFile& file) {
  const auto cols = common_columns(file);
  std::string out = "month";
  for (const auto& [label, _] : file.columns) out += "," + csv_escape(label);
  out += "\n";
  for (std::size_t i = 0; i < cols[0].size(); ++i) {
    out += cols[0].month_at(i).to_string();
    for (const auto& c : cols) out += "," + format_report(c[i]);
    out += "\n";
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string render_svg(const SeriesFile& file) {
  const auto cols = common_columns(file);
  constexpr double kWidth = 720, kHeight = 360, kLeft = 60, kRight = 20, kTop = 30, kBottom = 40;
  double lo = cols[0][0];
  double hi = lo;
  for (const auto& c : cols) {
    for (double v : c.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const std::size_t n = cols[0].size();
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](std::size_t i) {
    return kLeft + (n > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(n - 1) : plot_w / 2);
  };
  auto y_of = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

  static constexpr const char* kColors[] = {"#1f77b4", "#d62728"};
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"360\" "
                    "viewBox=\"0 0 720 360\">\n";
  svg += "<rect width=\"720\" height=\"360\" fill=\"white\"/>\n";
  svg += "<text x=\"360\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + file.name + "</text>\n";
  svg += "<line x1=\"60\" y1=\"320\" x2=\"700\" y2=\"320\" stroke=\"black\"/>\n";
  svg += "<line x1=\"60\" y1=\"30\" x2=\"60\" y2=\"320\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    svg += "<text x=\"55\" y=\"" + fixed(y_of(v) + 4, 1) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + fixed(v, 3) +
           "</text>\n";
  }
  svg += "<text x=\"60\" y=\"338\" font-family=\"sans-serif\" font-size=\"10\">" +
         cols[0].start().to_string() + "</text>\n";
  svg += "<text x=\"700\" y=\"338\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"10\">" + cols[0].last().to_string() + "</text>\n";
  if (lo < 0.0 && hi > 0.0) {
    svg += "<line x1=\"60\" y1=\"" + fixed(y_of(0.0), 2) + "\" x2=\"700\" y2=\"" +
           fixed(y_of(0.0), 2) + "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t c = 0; c < cols.size(); ++c) {
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(kColors[c]) +
           "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < n; ++i) {
      svg += (i ? " " : "") + fixed(x_of(i), 2) + "," + fixed(y_of(cols[c][i]), 2);
    }
    svg += "\"/>\n";
    svg += "<text x=\"" + fixed(kLeft + 10 + 160.0 * static_cast<double>(c), 0) +
           "\" y=\"352\" fill=\"" + kColors[c] + "\" font-family=\"sans-serif\" font-size=\"11\">" +
           file.columns[c].first + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<fs::path> emit_report(const ReportBundle& bundle, const fs::path& out_dir) {
  std::vector<fs::path> written;
  for (const auto& t : bundle.tables) {
    const fs::path p = out_dir / "tables" / (t.name + ".csv");
    write_text(p, render_table(t));
    written.push_back(p);
  }
  for (const auto& s : bundle.series) {
    const fs::path p = out_dir / "series" / (s.name + ".csv");
    write_text(p, render_series(s));
    written.push_back(p);
    if (bundle.plots && s.plot) {
      const fs::path svg = out_dir / "plots" / (s.name + ".svg");
      write_text(svg, render_svg(s));
      written.push_back(svg);
    }
  }

  std::vector<std::string> lines;
  for (const auto& p : written) {
    lines.push_back(fs::relative(p, out_dir).generic_string() + " " +
                    std::to_string(fs::file_size(p)) + " " + sha256_file(p));
  }
  std::sort(lines.begin(), lines.end());
  std::string manifest = "# demotrend report manifest\n";
  for (const auto& note : bundle.notes) manifest += "# " + note + "\n";
  for (const auto& l : lines) manifest += l + "\n";
  const fs::path mp = out_dir / "manifest.txt";
  write_text(mp, manifest);
  written.push_back(mp);
  return written;
}

}  // namespace demotrend::io
