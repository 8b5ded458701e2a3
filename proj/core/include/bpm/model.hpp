#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bpm/freq_data.hpp"
#include "bpm/moments.hpp"

namespace bpm {

enum class NPrior { uniform, reciprocal, rissanen };
enum class FitMode { full_bayes, penalized };

struct PriorConfig {
  NPrior n_prior = NPrior::uniform;
  double u_lower = 0.5;
  double u_upper = 1e3;  // guards integrability at M* = 1; effectively uncapped otherwise
  std::optional<long long> n_upper;
};

// Full parameter state (N, u, c); the ordinary moments are derived from c.
struct ModelParams {
  long long N{};
  double u = 1.0;
  CanonicalMoments c;
  std::size_t m_star() const { return c.size(); }
};

// Cell probabilities h_k = (u^k m_k / k!) / D, D = sum_j u^j m_j / j!, m_0 = 1.
struct CountProbabilities {
  std::vector<double> h;      // h_0..h_{M*}
  std::vector<double> log_h;  // log h_0..log h_{M*}
  double log_den{};           // log D
};

CountProbabilities count_probabilities(const CanonicalMoments& c, double u);

// log[C(N,n) prod_{k=0}^{M*} h_k^{f_k}] with f_0 = N - n; data must carry
// exactly M* cells.
double log_likelihood(const ModelParams& params, const FrequencyTable& data);

// Same with every exponent f_k - 1/2 (including f_0 - 1/2).
double log_penalized_likelihood(const ModelParams& params, const FrequencyTable& data);

// log|J_g| of the normalization map y -> y/D on the free coordinates: the
// matrix has diagonal (D - y_i)/D^2 and off-diagonal -y_j/D^2, and its
// determinant collapses to D^{-(M*+1)}.
double log_norm_jacobian(double log_den, std::size_t m_star);

// log|J_h| of the scaling map m_k -> u^k m_k / k!: sum_{k=1}^{M*} (k log u - log k!).
double log_scale_jacobian(double u, std::size_t m_star);

// Jeffreys prior on the cell probabilities pushed to the canonical chart:
// -1/2 sum_k log h_k + log|J_g| + log|J_h| + log|dm/dc|.
double log_prior_moments(const CanonicalMoments& c, double u);

// Reference prior pi_R(u) ∝ u^{-M*(M*+1)/2} on [u_lower, u_upper].
double log_prior_u(double u, std::size_t m_star, const PriorConfig& cfg);

// Iterated base-2 logarithm log2*(x) = log2 x + log2 log2 x + ... (positive terms).
double log2_star(double x);

double log_prior_N(long long N, const PriorConfig& cfg);

double log_posterior(const ModelParams& params, const FrequencyTable& data,
                     const PriorConfig& cfg, FitMode mode);

}  // namespace bpm
