#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bpm/freq_data.hpp"
#include "bpm/mcmc.hpp"

namespace bpm {

struct EstimateReport {
  long long point{};           // posterior median (lower median) + tail adjustment
  long long interval_lower{};  // equal-tailed credible bound N^-
  long long interval_upper{};  // N^+
  long long posterior_mode{};  // histogram mode
  long long tail_adjustment{};
  double level = 0.95;
};

EstimateReport summarize(const Chain& chain, long long tail_units, double level = 0.95);

// Chao bound n + f_1^2 / (2 f_2); rejects tables with f_2 = 0.
double chao_lower_bound(const FrequencyTable& data);

struct CoverageSummary {
  double median_point{};
  double rmse{};
  double coverage{};
  double mean_width{};
  std::size_t count{};
};

CoverageSummary coverage_and_error(const std::vector<EstimateReport>& estimates,
                                   long long true_N);

std::string report_to_json(const EstimateReport& report);
// Aligned text table with columns Methods, N^, N^-, N^+.
std::string report_table(const std::vector<std::pair<std::string, EstimateReport>>& rows);

}  // namespace bpm
