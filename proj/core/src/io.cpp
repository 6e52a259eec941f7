#include "demotrend/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <openssl/evp.h>

namespace demotrend::io {

namespace fs = std::filesystem;

std::string_view to_string(PriceConvention c) noexcept {
  return c == PriceConvention::Close ? "close" : "average";
}

std::string format_exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_report(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

// A parsed delimited file: metadata from '#' lines, then data rows keyed by line number.
struct Delimited {
  std::string source;
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + what);
}

Delimited read_delimited(const fs::path& path, const std::vector<std::string>& header,
                         const std::vector<std::string>& allowed_meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Delimited d;
  d.source = path.string();
  std::string raw;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (seen_header) fail(d.source, line_no, "metadata line after the header row");
      const auto body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string_view::npos) fail(d.source, line_no, "metadata must be '# key: value'");
      const std::string key(trim(body.substr(0, colon)));
      const std::string value(trim(body.substr(colon + 1)));
      if (std::find(allowed_meta.begin(), allowed_meta.end(), key) == allowed_meta.end()) {
        fail(d.source, line_no, "unknown metadata key '" + key + "'");
      }
      if (d.meta.count(key)) fail(d.source, line_no, "metadata key '" + key + "' repeated");
      d.meta[key] = value;
      continue;
    }
    auto fields = split(line);
    if (!seen_header) {
      std::vector<std::string> got(fields.begin(), fields.end());
      if (got != header) {
        std::string want;
        for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
        fail(d.source, line_no, "expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      fail(d.source, line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    d.rows.emplace_back(line_no, std::vector<std::string>(fields.begin(), fields.end()));
  }
  if (!seen_header) fail(d.source, line_no, "missing header row");
  if (d.rows.empty()) fail(d.source, line_no, "no data rows");
  return d;
}

double parse_number(const Delimited& d, std::size_t line, const std::string& text,
                    std::string_view what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    fail(d.source, line, std::string(what) + " '" + text + "' is not a finite decimal number");
  }
  return v;
}

template <typename Key, typename ParseFn>
Key parse_key(const Delimited& d, std::size_t line, const std::string& text, ParseFn parse) {
  try {
    return parse(text);
  } catch (const Error& e) {
    fail(d.source, line, e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

AgePyramid load_population(const fs::path& path) {
  const Delimited d = read_delimited(path, {"month", "age", "count"}, {"vintage"});
  Vintage vintage = Vintage::Postcensal;
  if (auto it = d.meta.find("vintage"); it != d.meta.end()) {
    try {
      vintage = parse_vintage(it->second);
    } catch (const Error& e) {
      throw Error(ErrorCode::Parse, d.source + ": " + e.what());
    }
  }

  std::map<std::pair<MonthKey, int>, std::pair<double, std::size_t>> cells;
  for (const auto& [line, f] : d.rows) {
    const MonthKey m = parse_key<MonthKey>(d, line, f[0], MonthKey::parse);
    int age = -1;
    auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), age);
    if (f[1].empty() || ec != std::errc{} || ptr != f[1].data() + f[1].size() || age < 0) {
      fail(d.source, line, "age '" + f[1] + "' is not a non-negative integer");
    }
    const double count = parse_number(d, line, f[2], "count");
    if (!(count > 0.0)) fail(d.source, line, "count must be positive, got " + f[2]);
    auto [it, inserted] = cells.emplace(std::make_pair(m, age), std::make_pair(count, line));
    if (!inserted) {
      fail(d.source, line, "duplicate row for (" + m.to_string() + ", age " + std::to_string(age) +
                               "), first seen on line " + std::to_string(it->second.second));
    }
  }

  MonthKey first = cells.begin()->first.first;
  MonthKey last = first;
  int min_age = cells.begin()->first.second;
  int max_age = min_age;
  for (const auto& [key, _] : cells) {
    first = std::min(first, key.first);
    last = std::max(last, key.first);
    min_age = std::min(min_age, key.second);
    max_age = std::max(max_age, key.second);
  }
  const auto n_months = static_cast<std::size_t>(last.months_since(first) + 1);
  const auto n_ages = static_cast<std::size_t>(max_age - min_age + 1);
  std::vector<double> counts(n_months * n_ages);
  for (std::size_t m = 0; m < n_months; ++m) {
    const MonthKey month = first.plus(static_cast<long>(m));
    for (int age = min_age; age <= max_age; ++age) {
      auto it = cells.find({month, age});
      if (it == cells.end()) {
        throw Error(ErrorCode::Parse, d.source + ": missing row for (" + month.to_string() +
                                          ", age " + std::to_string(age) + ")");
      }
      counts[m * n_ages + static_cast<std::size_t>(age - min_age)] = it->second.first;
    }
  }
  return AgePyramid(first, n_months, min_age, max_age, std::move(counts), vintage);
}

IndexData load_index(const fs::path& path) {
  const Delimited d = read_delimited(path, {"month", "level"}, {"convention"});
  auto it = d.meta.find("convention");
  if (it == d.meta.end()) {
    throw Error(ErrorCode::Parse, d.source + ": missing '# convention: close|average' line");
  }
  PriceConvention convention;
  if (it->second == "close") {
    convention = PriceConvention::Close;
  } else if (it->second == "average") {
    convention = PriceConvention::Average;
  } else {
    throw Error(ErrorCode::Parse, d.source + ": convention must be close or average, got '" +
                                      it->second + "'");
  }

  std::vector<double> levels;
  MonthKey start;
  MonthKey prev;
  for (const auto& [line, f] : d.rows) {
    const MonthKey m = parse_key<MonthKey>(d, line, f[0], MonthKey::parse);
    if (levels.empty()) {
      start = m;
    } else if (m <= prev) {
      fail(d.source, line, "month " + m.to_string() + " is out of order (previous " + prev.to_string() + ")");
    } else if (m != prev.next()) {
      fail(d.source, line, "gap: month " + prev.next().to_string() + " is missing");
    }
    const double level = parse_number(d, line, f[1], "level");
    if (!(level > 0.0)) fail(d.source, line, "level must be positive, got " + f[1]);
    levels.push_back(level);
    prev = m;
  }
  return {MonthlySeries(start, std::move(levels), Unit::IndexPoints), convention};
}

QuarterlySeries load_gdp(const fs::path& path) {
  const Delimited d = read_delimited(path, {"quarter", "value"}, {"unit"});
  auto it = d.meta.find("unit");
  if (it == d.meta.end()) {
    throw Error(ErrorCode::Parse, d.source + ": missing '# unit: annualized-growth|level' line");
  }
  QuarterlyUnit unit;
  if (it->second == "annualized-growth") {
    unit = QuarterlyUnit::GrowthRate;
  } else if (it->second == "level") {
    unit = QuarterlyUnit::Level;
  } else {
    throw Error(ErrorCode::Parse, d.source + ": unit must be annualized-growth or level, got '" +
                                      it->second + "'");
  }

  std::vector<double> values;
  QuarterKey start;
  QuarterKey prev;
  for (const auto& [line, f] : d.rows) {
    const QuarterKey q = parse_key<QuarterKey>(d, line, f[0], QuarterKey::parse);
    if (values.empty()) {
      start = q;
    } else if (q <= prev) {
      fail(d.source, line, "quarter " + q.to_string() + " is out of order (previous " + prev.to_string() + ")");
    } else if (q != prev.plus(1)) {
      fail(d.source, line, "gap: quarter " + prev.plus(1).to_string() + " is missing");
    }
    const double v = parse_number(d, line, f[1], "value");
    if (unit == QuarterlyUnit::Level && !(v > 0.0)) {
      fail(d.source, line, "level must be positive, got " + f[1]);
    }
    values.push_back(v);
    prev = q;
  }
  return QuarterlySeries(start, std::move(values), unit);
}

void write_population(const fs::path& path, const AgePyramid& p) {
  std::string out = "# vintage: " + std::string(to_string(p.vintage())) + "\nmonth,age,count\n";
  for (std::size_t m = 0; m < p.n_months(); ++m) {
    const std::string month = p.first_month().plus(static_cast<long>(m)).to_string();
    for (int age = p.min_age(); age <= p.max_age(); ++age) {
      out += month + "," + std::to_string(age) + "," + format_exact(p.count(m, age)) + "\n";
    }
  }
  write_file(path, out);
}

void write_index(const fs::path& path, const MonthlySeries& levels, PriceConvention convention) {
  std::string out = "# convention: " + std::string(to_string(convention)) + "\nmonth,level\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    out += levels.month_at(i).to_string() + "," + format_exact(levels[i]) + "\n";
  }
  write_file(path, out);
}

void write_gdp(const fs::path& path, const QuarterlySeries& gdp) {
  std::string out = "# unit: " + std::string(to_string(gdp.unit())) + "\nquarter,value\n";
  for (std::size_t i = 0; i < gdp.size(); ++i) {
    out += gdp.start().plus(static_cast<long>(i)).to_string() + "," + format_exact(gdp[i]) + "\n";
  }
  write_file(path, out);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256: digest initialisation failed");
  }
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

void DatasetManifest::add_population(const fs::path& path, const AgePyramid& p) {
  entries.push_back({"population", path, p.n_months() * p.n_ages(),
                     p.first_month().to_string() + ".." + p.last_month().to_string(),
                     std::string(to_string(p.vintage())), sha256_file(path)});
}

void DatasetManifest::add_index(const fs::path& path, const IndexData& d) {
  entries.push_back({"index", path, d.levels.size(),
                     d.levels.start().to_string() + ".." + d.levels.last().to_string(),
                     std::string(to_string(d.convention)), sha256_file(path)});
}

void DatasetManifest::add_gdp(const fs::path& path, const QuarterlySeries& q) {
  entries.push_back({"gdp", path, q.size(), q.start().to_string() + ".." + q.last().to_string(),
                     std::string(to_string(q.unit())), sha256_file(path)});
}

std::string DatasetManifest::render() const {
  std::string out;
  for (const auto& e : entries) {
    out += "input " + e.kind + " " + e.path.filename().string() + " rows=" + std::to_string(e.rows) +
           " coverage=" + e.coverage + " tag=" + e.tag + " sha256=" + e.checksum + "\n";
  }
  return out;
}

}  // namespace demotrend::io
