#include "digmm/dataio.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace digmm::dataio {

namespace {

bool parse_timestamp(const std::string& s, std::time_t* out) {
  std::tm tm{};
  for (const char* fmt : {"%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"}) {
    std::istringstream in(s);
    in >> std::get_time(&tm, fmt);
    if (!in.fail()) {
      *out = timegm(&tm);
      return true;
    }
  }
  return false;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_value(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

std::string format_timestamp(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  return buf;
}

}  // namespace

Matrix Dataset::joint() const {
  Matrix u(rows(), 2 * sites());
  u.leftCols(sites()) = power;
  u.rightCols(sites()) = forecast;
  return u;
}

Vector Dataset::error_column(int site) const {
  return power.col(site) - forecast.col(site);
}

Dataset load_csv(const std::string& path,
                 const std::vector<double>& capacities, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open data file: " + path);
  const int m = static_cast<int>(capacities.size());
  for (double c : capacities)
    if (!(c > 0.0)) throw DataFormatError("site capacity must be positive");

  std::string line;
  if (!std::getline(in, line)) throw DataFormatError("empty data file");
  {
    auto header = split_line(line);
    if (static_cast<int>(header.size()) != 1 + 2 * m || header[0] != "timestamp")
      throw DataFormatError("header does not match the expected schema");
    for (int s = 0; s < m; ++s) {
      const std::string site = "site" + std::to_string(s + 1);
      if (header[1 + 2 * s] != site + "_power" ||
          header[2 + 2 * s] != site + "_forecast")
        throw DataFormatError("header does not match the expected schema");
    }
  }

  std::vector<std::string> stamps;
  std::vector<double> values;  // row-major power/forecast pairs per site
  int dropped = 0;
  std::time_t prev_time = 0;
  bool have_prev = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (static_cast<int>(fields.size()) != 1 + 2 * m)
      throw DataFormatError("row has wrong number of fields");
    std::time_t t;
    if (!parse_timestamp(fields[0], &t))
      throw DataFormatError("unparseable timestamp: " + fields[0]);
    if (have_prev && t <= prev_time)
      throw DataFormatError("timestamps are not strictly increasing");
    prev_time = t;
    have_prev = true;

    std::vector<double> row(2 * m);
    bool ok = true;
    for (int k = 0; k < 2 * m && ok; ++k) {
      double v;
      if (!parse_value(fields[1 + k], &v)) {
        ok = false;
        break;
      }
      const double pu = v / capacities[k / 2];
      if (pu < -0.1 || pu > 1.1) ok = false;
      row[k] = pu;
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    stamps.push_back(fields[0]);
    values.insert(values.end(), row.begin(), row.end());
  }
  if (report) report->rows_dropped = dropped;

  const int n = static_cast<int>(stamps.size());
  Dataset out;
  out.timestamps = std::move(stamps);
  out.power.resize(n, m);
  out.forecast.resize(n, m);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < m; ++s) {
      out.power(i, s) = values[i * 2 * m + 2 * s];
      out.forecast(i, s) = values[i * 2 * m + 2 * s + 1];
    }
  return out;
}

void write_csv(const std::string& path, const Dataset& data,
               const std::vector<double>& capacities) {
  if (static_cast<int>(capacities.size()) != data.sites())
    throw std::invalid_argument("one capacity per site required");
  std::ofstream out(path);
  if (!out) throw DataFormatError("cannot write data file: " + path);
  out << "timestamp";
  for (int s = 0; s < data.sites(); ++s)
    out << ",site" << s + 1 << "_power,site" << s + 1 << "_forecast";
  out << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < data.rows(); ++i) {
    out << data.timestamps[i];
    for (int s = 0; s < data.sites(); ++s)
      out << ',' << data.power(i, s) * capacities[s] << ','
          << data.forecast(i, s) * capacities[s];
    out << "\n";
  }
}

std::pair<Dataset, Dataset> split(const Dataset& data, int boundary) {
  if (boundary <= 0 || boundary >= data.rows())
    throw std::invalid_argument("split boundary out of range");
  Dataset head, tail;
  head.power = data.power.topRows(boundary);
  head.forecast = data.forecast.topRows(boundary);
  head.timestamps.assign(data.timestamps.begin(),
                         data.timestamps.begin() + boundary);
  tail.power = data.power.bottomRows(data.rows() - boundary);
  tail.forecast = data.forecast.bottomRows(data.rows() - boundary);
  tail.timestamps.assign(data.timestamps.begin() + boundary,
                         data.timestamps.end());
  return {std::move(head), std::move(tail)};
}

Dataset synth_from_gmm(const Gmm& truth, int n, std::uint64_t seed) {
  truth.validate();
  const int m = truth.num_participants();
  if (truth.dimension != 2 * m)
    throw InvalidModel("truth model dimension must be even");
  Dataset out;
  out.power.resize(n, m);
  out.forecast.resize(n, m);
  if (n > 0) {
    const Matrix draws = sample(truth, n, seed);
    out.power = draws.leftCols(m);
    out.forecast = draws.rightCols(m);
  }
  std::tm tm{};
  tm.tm_year = 118;  // 2018-01-01T00:00:00
  tm.tm_mday = 1;
  std::time_t t0 = timegm(&tm);
  out.timestamps.reserve(n);
  for (int i = 0; i < n; ++i)
    out.timestamps.push_back(format_timestamp(t0 + 3600 * i));
  return out;
}

}  // namespace digmm::dataio
