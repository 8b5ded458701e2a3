#include "bpm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bpm {

namespace {

// empirical quantile, type 1: smallest sample x with F(x) >= p.  The slack
// absorbs rounding in p*L (0.025 * 1000 lands a hair above 25 in binary).
long long quantile_type1(const std::vector<long long>& sorted, double p) {
  const std::size_t L = sorted.size();
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(L) - 1e-9));
  if (idx > 0) --idx;
  if (idx >= L) idx = L - 1;
  return sorted[idx];
}

}  // namespace

EstimateReport summarize(const Chain& chain, long long tail_units, double level) {
  if (chain.size() == 0) throw std::invalid_argument("cannot summarize an empty chain");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("credible level must lie in (0,1)");
  std::vector<long long> s = chain.N;
  std::sort(s.begin(), s.end());
  const std::size_t L = s.size();

  EstimateReport r;
  r.level = level;
  r.tail_adjustment = tail_units;
  r.point = s[(L - 1) / 2] + tail_units;  // lower median
  const double p_lo = (1.0 - level) / 2.0;
  r.interval_lower = quantile_type1(s, p_lo) + tail_units;
  r.interval_upper = quantile_type1(s, 1.0 - p_lo) + tail_units;

  // histogram mode; ties resolved toward the smallest value
  long long best = s.front(), best_count = 0;
  for (std::size_t i = 0; i < L;) {
    std::size_t j = i;
    while (j < L && s[j] == s[i]) ++j;
    if (static_cast<long long>(j - i) > best_count) {
      best_count = static_cast<long long>(j - i);
      best = s[i];
    }
    i = j;
  }
  r.posterior_mode = best + tail_units;
  return r;
}

double chao_lower_bound(const FrequencyTable& data) {
  const double n = static_cast<double>(data.n());
  const double f1 =
      data.freqs.empty() ? 0.0 : static_cast<double>(data.freqs[0]);
  if (f1 == 0.0) return n;
  const double f2 =
      data.freqs.size() >= 2 ? static_cast<double>(data.freqs[1]) : 0.0;
  if (f2 == 0.0)
    throw std::invalid_argument(
        "Chao bound undefined: f_2 = 0 (no units observed exactly twice)");
  return n + f1 * f1 / (2.0 * f2);
}

CoverageSummary coverage_and_error(const std::vector<EstimateReport>& estimates,
                                   long long true_N) {
  if (estimates.empty())
    throw std::invalid_argument("coverage_and_error needs at least one estimate");
  CoverageSummary out;
  out.count = estimates.size();
  std::vector<long long> points;
  points.reserve(estimates.size());
  double sq = 0.0, width = 0.0;
  std::size_t hits = 0;
  for (const EstimateReport& r : estimates) {
    points.push_back(r.point);
    const double err = static_cast<double>(r.point - true_N);
    sq += err * err;
    width += static_cast<double>(r.interval_upper - r.interval_lower);
    if (r.interval_lower <= true_N && true_N <= r.interval_upper) ++hits;
  }
  std::sort(points.begin(), points.end());
  out.median_point = static_cast<double>(points[(points.size() - 1) / 2]);
  out.rmse = std::sqrt(sq / static_cast<double>(estimates.size()));
  out.coverage = static_cast<double>(hits) / static_cast<double>(estimates.size());
  out.mean_width = width / static_cast<double>(estimates.size());
  return out;
}

std::string report_to_json(const EstimateReport& r) {
  char buf[320];
  std::snprintf(buf, sizeof(buf),
                "{\"point\": %lld, \"interval_lower\": %lld, \"interval_upper\": %lld, "
                "\"posterior_mode\": %lld, \"tail_adjustment\": %lld, \"level\": %g}",
                r.point, r.interval_lower, r.interval_upper, r.posterior_mode,
                r.tail_adjustment, r.level);
  return buf;
}

std::string report_table(
    const std::vector<std::pair<std::string, EstimateReport>>& rows) {
  std::size_t name_w = 7;  // "Methods"
  for (const auto& row : rows) name_w = std::max(name_w, row.first.size());
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-*s %9s %9s %9s\n",
                static_cast<int>(name_w), "Methods", "N^", "N^-", "N^+");
  std::string out = buf;
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof(buf), "%-*s %9lld %9lld %9lld\n",
                  static_cast<int>(name_w), name.c_str(), r.point,
                  r.interval_lower, r.interval_upper);
    out += buf;
  }
  return out;
}

}  // namespace bpm
