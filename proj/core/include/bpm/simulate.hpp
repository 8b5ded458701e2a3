#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bpm/estimators.hpp"
#include "bpm/mcmc.hpp"

namespace bpm {

// The second Ga(a, b) parameter is ambiguous in common notation; the default
// reads b as a rate.  `mean` reads b as E[lambda] = b (scale b/a).
enum class GammaConvention { rate, scale, mean };

struct GammaQ {
  double shape;
  double second;
  GammaConvention convention = GammaConvention::rate;
  double scale() const;
};
struct LognormalQ {
  double mu;
  double sigma;  // sd of log lambda
};
struct TwoPointQ {
  double w;  // P(lambda = loc1)
  double loc1;
  double loc2;
};
struct GammaMixQ {
  double w;
  GammaQ comp1, comp2;
};
struct LognormalMixQ {
  double w;
  LognormalQ comp1, comp2;
};

using MixingDistribution =
    std::variant<GammaQ, GammaMixQ, LognormalQ, LognormalMixQ, TwoPointQ>;

struct SimSetting {
  int id{};
  std::string label;
  MixingDistribution q;
};

// The twelve simulation settings with gamma cells under the given convention.
std::vector<SimSetting> table1_settings(GammaConvention conv = GammaConvention::rate);

double draw_lambda(const MixingDistribution& q, RngEngine& rng);

// P(count = 0) = E_Q[e^-lambda]; closed form except lognormal (quadrature).
double zero_probability(const MixingDistribution& q);

class no_observed_units : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DrawResult {
  FrequencyTable table;
  long long zero_draws{};
};

// lambda_i ~ Q, count_i ~ Poisson(lambda_i); zeros discarded and tallied.
DrawResult draw_dataset_full(const MixingDistribution& q, long long true_N, RngEngine& rng);
FrequencyTable draw_dataset(const MixingDistribution& q, long long true_N, RngEngine& rng);

struct StudyConfig {
  long long true_N = 1000;
  int reps = 20;     // desk scale; the reference protocol uses 100
  int m_star = 10;
  std::uint64_t master_seed = 0;
  PriorConfig prior;
  SamplerConfig sampler;  // defaulted to the reduced 20000/2000 study protocol
  FitMode mode = FitMode::full_bayes;

  StudyConfig() {
    sampler.iterations = 20000;
    sampler.burn_in = 2000;
  }
};

struct RepRecord {
  int rep{};
  bool ok = false;
  std::string error;
  EstimateReport report;
  long long n_observed{};
  long long tail_units{};
};

struct StudyResult {
  int setting_id{};
  std::string label;
  int reps{};
  int failures{};
  double median_point{};
  double rmse{};
  double coverage{};
  double mean_width{};
  std::vector<RepRecord> records;
};

StudyResult run_study_setting(const SimSetting& setting, const StudyConfig& cfg);
std::vector<StudyResult> run_study(const std::vector<SimSetting>& settings,
                                   const StudyConfig& cfg);

std::string study_to_csv(const std::vector<StudyResult>& results);
std::string study_to_json(const std::vector<StudyResult>& results);

}  // namespace bpm
