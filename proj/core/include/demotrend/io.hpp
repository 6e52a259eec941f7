#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "demotrend/population.hpp"
#include "demotrend/series.hpp"

namespace demotrend::io {

// Input formats (comma-delimited, '#' metadata lines before the header):
//
//   population:  [# vintage: postcensal|intercensal|synthetic]
//                month,age,count          e.g. 1995-06,9,3912345
//   index:       # convention: close|average
//                month,level              e.g. 1995-06,544.75
//   gdp:         # unit: annualized-growth|level
//                quarter,value            e.g. 1995-Q2,0.021

enum class PriceConvention { Close, Average };

std::string_view to_string(PriceConvention c) noexcept;

struct IndexData {
  MonthlySeries levels;
  PriceConvention convention = PriceConvention::Close;
};

AgePyramid load_population(const std::filesystem::path& path);
IndexData load_index(const std::filesystem::path& path);
QuarterlySeries load_gdp(const std::filesystem::path& path);

// Writers emit the exact input format. Values use the shortest decimal
// form that reads back to the same double, so load(write(x)) == x.
void write_population(const std::filesystem::path& path, const AgePyramid& pyramid);
void write_index(const std::filesystem::path& path, const MonthlySeries& levels,
                 PriceConvention convention);
void write_gdp(const std::filesystem::path& path, const QuarterlySeries& gdp);

/// Shortest round-trip decimal.
std::string format_exact(double v);
/// 12 significant digits; used for every report value.
std::string format_report(double v);

/// Hex SHA-256 of the file bytes.
std::string sha256_file(const std::filesystem::path& path);

struct DatasetEntry {
  std::string kind;  // population | index | gdp
  std::filesystem::path path;
  std::size_t rows = 0;
  std::string coverage;  // first..last month or quarter
  std::string tag;       // vintage, price convention or gdp unit
  std::string checksum;
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;

  void add_population(const std::filesystem::path& path, const AgePyramid& p);
  void add_index(const std::filesystem::path& path, const IndexData& d);
  void add_gdp(const std::filesystem::path& path, const QuarterlySeries& q);
  std::string render() const;
};

// ---------------------------------------------------------------------------
// Report artifacts. Layout under out_dir:
//   tables/<name>.csv   series/<name>.csv   plots/<name>.svg   manifest.txt

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// One or two monthly series written side by side over their common range.
struct SeriesFile {
  std::string name;
  std::vector<std::pair<std::string, MonthlySeries>> columns;
  bool plot = true;
};

struct ReportBundle {
  std::vector<Table> tables;
  std::vector<SeriesFile> series;
  std::vector<std::string> notes;  // free-form lines copied into manifest.txt
  bool plots = true;
};

/// Write every artifact plus manifest.txt (path, bytes and SHA-256 of each
/// file, sorted). No timestamps are written, so equal inputs give equal bytes.
std::vector<std::filesystem::path> emit_report(const ReportBundle& bundle,
                                               const std::filesystem::path& out_dir);

/// Minimal SVG line chart of the columns of `file`.
std::string render_svg(const SeriesFile& file);

}  // namespace demotrend::io
