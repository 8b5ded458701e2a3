#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bpm/model.hpp"

namespace bpm {

using RngEngine = std::mt19937_64;

struct SamplerConfig {
  long long iterations = 110000;
  long long burn_in = 10000;
  long long thin = 1;
  std::uint64_t seed = 0;
  double step_c = 0.1;      // random-walk scale for canonical components
  double step_log_u = 0.3;  // random-walk scale on log u
  int n_chains = 1;
  // Extra Metropolis moves along the two weakly identified directions of the
  // posterior (see mcmc.cpp); they leave the target invariant and cut the
  // autocorrelation time of N by orders of magnitude.
  bool ridge_moves = true;
  double step_gamma = 0.1;  // h0-slide: m -> e^d m at fixed u
  double step_slide = 0.2;  // u-slide: u -> u e^d, m_k -> m_k e^{-kd}
  long long step_n = 0;     // half-width of the discrete N walk; 0 = auto
  bool store_c = false;
};

struct Chain {
  std::vector<long long> N;
  std::vector<double> u;
  std::vector<double> m1;              // first moment of G̃_u, i.e. u * m_1
  std::vector<std::vector<double>> c;  // canonical states, if store_c
  double accept_c{}, accept_u{}, accept_gamma{}, accept_slide{}, accept_n{};
  long long overflow_rejects{};  // exact N draws discarded against n_upper
  SamplerConfig config;

  std::size_t size() const { return N.size(); }
};

// Internal sampler state: parameters plus cached probabilities and moment prior.
struct SamplerState {
  ModelParams params;
  CountProbabilities cp;
  double lp_moments{};
};

SamplerState make_state(ModelParams params, FitMode mode = FitMode::full_bayes);

// One exact draw of f_0 from the conditional under the uniform (successes
// n+1) or reciprocal (successes n) prior: negative binomial with success
// probability 1 - h0, drawn as a gamma-Poisson mixture.  Returns f_0, or -1
// when the gamma draw exceeds 1e12 and the Poisson draw would be meaningless
// (callers keep the previous N and count the event).
long long draw_f0(long long n, double h0, NPrior prior, RngEngine& rng);

// Conditional update of N.  Closed-form Gibbs draw for uncapped uniform and
// reciprocal priors; discrete-random-walk Metropolis step for the Rissanen
// prior or when n_upper caps the support.
long long gibbs_update_N(SamplerState& state, const FrequencyTable& data,
                         const PriorConfig& prior, const SamplerConfig& cfg,
                         RngEngine& rng, long long* overflow_rejects = nullptr);

// Componentwise Gaussian random walk on c with reflection at {eps, 1-eps};
// returns the number of accepted components.
int mh_update_c(SamplerState& state, const FrequencyTable& data,
                const PriorConfig& prior, const SamplerConfig& cfg,
                FitMode mode, RngEngine& rng);

// Gaussian random walk on log u with proposal-asymmetry correction.
bool mh_update_u(SamplerState& state, const FrequencyTable& data,
                 const PriorConfig& prior, const SamplerConfig& cfg,
                 FitMode mode, RngEngine& rng);

Chain run_sampler(const FrequencyTable& data, const PriorConfig& prior,
                  const SamplerConfig& cfg, FitMode mode = FitMode::full_bayes);

// Sample autocorrelation, lag 0 = 1; rejects constant series.
std::vector<double> acf(const std::vector<double>& series, int max_lag);

// Effective sample size via Geyer's initial-positive-sequence truncation,
// clamped to [1, len].
double ess(const std::vector<double>& series);

std::string chain_to_csv(const Chain& chain);
std::string chain_summary_json(const Chain& chain);

}  // namespace bpm
