#include "digmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "digmm/kernels.hpp"

namespace digmm::metrics {

namespace {

// Combined +-6 sigma support of two 1-D mixtures.
std::pair<double, double> support_1d(const Gmm& p, const Gmm& q) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Gmm* g : {&p, &q})
    for (const auto& c : g->components) {
      const double sd = std::sqrt(c.covariance(0, 0));
      lo = std::min(lo, c.mean(0) - 6.0 * sd);
      hi = std::max(hi, c.mean(0) + 6.0 * sd);
    }
  return {lo, hi};
}

double kl_grid_bits(const Vector& a, const Vector& b, double dx) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) <= 0.0) continue;
    const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;  // trapezoid
    acc += w * a(i) * std::log2(a(i) / b(i));
  }
  return acc * dx;
}

std::vector<double> ranks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double js_divergence(const Gmm& p, const Gmm& q, JsMethod method,
                     int resolution, std::uint64_t seed, bool parallel) {
  if (p.dimension != q.dimension)
    throw std::invalid_argument("mixtures must share dimension");
  if (resolution < 2) throw std::invalid_argument("resolution too small");

  if (method == JsMethod::MonteCarlo)
    return kernels::js_mc(p, q, resolution, seed, parallel);

  if (p.dimension != 1)
    throw std::invalid_argument("grid method requires 1-D mixtures");
  auto [lo, hi] = support_1d(p, q);
  Vector grid = Vector::LinSpaced(resolution, lo, hi);
  const double dx = (hi - lo) / (resolution - 1);
  Vector fp = pdf_1d(p, grid);
  Vector fq = pdf_1d(q, grid);
  Vector fm = 0.5 * (fp + fq);
  return 0.5 * kl_grid_bits(fp, fm, dx) + 0.5 * kl_grid_bits(fq, fm, dx);
}

double rse(const Vector& curve, const Vector& benchmark) {
  if (curve.size() != benchmark.size())
    throw std::invalid_argument("curves must share the grid");
  const double denom = benchmark.squaredNorm();
  if (!(denom > 0.0)) throw std::invalid_argument("zero-norm benchmark");
  return std::sqrt((curve - benchmark).squaredNorm() / denom) * 100.0;
}

double WeightedEcdf::eval(double x) const {
  // cum_weight at the last sample <= x
  auto it = std::upper_bound(z.data(), z.data() + z.size(), x);
  const auto idx = it - z.data();
  return idx == 0 ? 0.0 : cum_weight(idx - 1);
}

Vector WeightedEcdf::eval(const Vector& grid) const {
  Vector out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = eval(grid(i));
  return out;
}

WeightedEcdf empirical_conditional(const dataio::Dataset& data,
                                   const Vector& y0, int site,
                                   double bandwidth) {
  if (data.rows() == 0) throw InsufficientData("empty dataset");
  if (y0.size() != data.sites())
    throw std::invalid_argument("conditioning vector must have length M");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");

  const int n = data.rows();
  std::vector<std::pair<double, double>> zw(n);  // (error, weight)
  double wsum = 0.0, w2sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double q = 0.0;
    for (int s = 0; s < data.sites(); ++s) {
      const double d = (data.forecast(i, s) - y0(s)) / bandwidth;
      q += d * d;
    }
    const double w = std::exp(-0.5 * q);
    zw[i] = {data.power(i, site) - data.forecast(i, site), w};
    wsum += w;
    w2sum += w * w;
  }
  const double ess = (w2sum > 0.0) ? wsum * wsum / w2sum : 0.0;
  if (ess < 10.0)
    throw InsufficientData("fewer than 10 effective samples near y0");

  std::sort(zw.begin(), zw.end());
  WeightedEcdf out;
  out.effective_sample_size = ess;
  out.z.resize(n);
  out.cum_weight.resize(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += zw[i].second;
    out.z(i) = zw[i].first;
    out.cum_weight(i) = acc / wsum;
  }
  return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("need two equal-length series");
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const int n = static_cast<int>(a.size());
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;  // constant series
  return num / std::sqrt(va * vb);
}

TimingSummary timing_report(const std::vector<double>& seconds) {
  if (seconds.empty()) throw std::invalid_argument("empty duration series");
  TimingSummary s;
  s.min_s = *std::min_element(seconds.begin(), seconds.end());
  s.max_s = *std::max_element(seconds.begin(), seconds.end());
  s.mean_s = std::accumulate(seconds.begin(), seconds.end(), 0.0) /
             static_cast<double>(seconds.size());
  std::vector<double> index(seconds.size());
  std::iota(index.begin(), index.end(), 0.0);
  s.trend = seconds.size() >= 2 ? spearman(seconds, index) : 0.0;
  return s;
}

}  // namespace digmm::metrics
