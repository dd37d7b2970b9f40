#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "digmm/gmm.hpp"

namespace digmm::dataio {

// Time-indexed per-unit wind power and forecast streams for M sites.
struct Dataset {
  std::vector<std::string> timestamps;  // ISO-8601, strictly increasing
  Matrix power;                         // N x M
  Matrix forecast;                      // N x M
  int split_index = 0;                  // boundary between historical and new

  int rows() const { return static_cast<int>(power.rows()); }
  int sites() const { return static_cast<int>(power.cols()); }

  // Joint observation matrix in the [powers | forecasts] layout.
  Matrix joint() const;
  // Forecast error z_m = power - forecast for one site.
  Vector error_column(int site) const;
};

struct LoadReport {
  int rows_dropped = 0;
};

// CSV schema: header `timestamp,site1_power,site1_forecast,...`; raw MW
// values are normalized by the per-site capacities. Rows with missing or
// unparseable cells are dropped and counted. Per-unit values outside
// [-0.1, 1.1] (slack for forecast overshoot) are treated the same way.
Dataset load_csv(const std::string& path,
                 const std::vector<double>& capacities,
                 LoadReport* report = nullptr);

// Inverse of load_csv's normalization; full precision round-trip.
void write_csv(const std::string& path, const Dataset& data,
               const std::vector<double>& capacities);

std::pair<Dataset, Dataset> split(const Dataset& data, int boundary);

// i.i.d. draws from a 2M-dimensional truth mixture, hourly timestamps.
Dataset synth_from_gmm(const Gmm& truth, int n, std::uint64_t seed);

}  // namespace digmm::dataio
