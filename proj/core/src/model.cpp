#include "bpm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bpm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log m_k evaluated on the extended-precision storage; -inf for a zero moment
double log_moment(const OrdinaryMoments& m, std::size_t k) {
  const long double v = static_cast<long double>(m.raw()[k]);
  return v > 0.0L ? static_cast<double>(std::log(v)) : kNegInf;
}

void check_data_shape(const ModelParams& params, const FrequencyTable& data) {
  if (data.freqs.size() != params.m_star())
    throw std::invalid_argument("data has " + std::to_string(data.freqs.size()) +
                                " cells but the model has M* = " +
                                std::to_string(params.m_star()));
  if (params.N < data.n())
    throw std::invalid_argument("N = " + std::to_string(params.N) +
                                " is below the observed count n = " +
                                std::to_string(data.n()));
}

double log_binom(long long N, long long n) {
  return std::lgamma(static_cast<double>(N) + 1.0) -
         std::lgamma(static_cast<double>(N - n) + 1.0) -
         std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

CountProbabilities count_probabilities(const CanonicalMoments& c, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("u must be positive");
  const OrdinaryMoments m = canonical_to_ordinary(c);
  const std::size_t M = c.size();
  CountProbabilities out;
  out.log_h.resize(M + 1);
  out.h.resize(M + 1);
  std::vector<double> log_y(M + 1);
  log_y[0] = 0.0;  // y_0 = u^0 m_0 / 0! = 1
  const double log_u = std::log(u);
  for (std::size_t k = 1; k <= M; ++k)
    log_y[k] = static_cast<double>(k) * log_u + log_moment(m, k - 1) -
               std::lgamma(static_cast<double>(k) + 1.0);
  const double top = *std::max_element(log_y.begin(), log_y.end());
  double sum = 0.0;
  for (std::size_t k = 0; k <= M; ++k) sum += std::exp(log_y[k] - top);
  out.log_den = top + std::log(sum);
  for (std::size_t k = 0; k <= M; ++k) {
    out.log_h[k] = log_y[k] - out.log_den;
    out.h[k] = std::exp(out.log_h[k]);
  }
  return out;
}

double log_likelihood(const ModelParams& params, const FrequencyTable& data) {
  check_data_shape(params, data);
  const CountProbabilities cp = count_probabilities(params.c, params.u);
  const long long n = data.n();
  double ll = log_binom(params.N, n);
  if (params.N > n) ll += static_cast<double>(params.N - n) * cp.log_h[0];
  for (std::size_t k = 1; k < cp.log_h.size(); ++k) {
    const long long fk = data.freqs[k - 1];
    if (fk != 0) ll += static_cast<double>(fk) * cp.log_h[k];
  }
  return ll;
}

double log_penalized_likelihood(const ModelParams& params, const FrequencyTable& data) {
  check_data_shape(params, data);
  const CountProbabilities cp = count_probabilities(params.c, params.u);
  const long long n = data.n();
  double ll = log_binom(params.N, n);
  ll += (static_cast<double>(params.N - n) - 0.5) * cp.log_h[0];
  for (std::size_t k = 1; k < cp.log_h.size(); ++k)
    ll += (static_cast<double>(data.freqs[k - 1]) - 0.5) * cp.log_h[k];
  return ll;
}

double log_norm_jacobian(double log_den, std::size_t m_star) {
  return -static_cast<double>(m_star + 1) * log_den;
}

double log_scale_jacobian(double u, std::size_t m_star) {
  const double M = static_cast<double>(m_star);
  double sum = 0.5 * M * (M + 1.0) * std::log(u);
  for (std::size_t k = 1; k <= m_star; ++k)
    sum -= std::lgamma(static_cast<double>(k) + 1.0);
  return sum;
}

double log_prior_moments(const CanonicalMoments& c, double u) {
  const CountProbabilities cp = count_probabilities(c, u);
  double lp = 0.0;
  for (double lh : cp.log_h) lp += lh;
  lp *= -0.5;
  lp += log_norm_jacobian(cp.log_den, c.size());
  lp += log_scale_jacobian(u, c.size());
  lp += log_jacobian_canonical_to_ordinary(c);
  return lp;
}

double log_prior_u(double u, std::size_t m_star, const PriorConfig& cfg) {
  if (u < cfg.u_lower || u > cfg.u_upper) return kNegInf;
  const double M = static_cast<double>(m_star);
  return -0.5 * M * (M + 1.0) * std::log(u);
}

double log2_star(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("log2*(x) requires x > 0");
  double term = std::log2(x);
  double sum = 0.0;
  while (term > 0.0) {
    sum += term;
    if (term <= 1.0) break;
    term = std::log2(term);
  }
  return sum;
}

double log_prior_N(long long N, const PriorConfig& cfg) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (cfg.n_upper && N > *cfg.n_upper) return kNegInf;
  switch (cfg.n_prior) {
    case NPrior::uniform:
      return 0.0;
    case NPrior::reciprocal:
      return -std::log(static_cast<double>(N));
    case NPrior::rissanen:
      return -log2_star(static_cast<double>(N)) * std::log(2.0);
  }
  throw std::logic_error("unreachable");
}

double log_posterior(const ModelParams& params, const FrequencyTable& data,
                     const PriorConfig& cfg, FitMode mode) {
  const double lp_u = log_prior_u(params.u, params.m_star(), cfg);
  const double lp_N = log_prior_N(params.N, cfg);
  if (lp_u == kNegInf || lp_N == kNegInf) return kNegInf;
  if (mode == FitMode::penalized)
    return log_penalized_likelihood(params, data) +
           log_jacobian_canonical_to_ordinary(params.c) + lp_u + lp_N;
  return log_likelihood(params, data) + log_prior_moments(params.c, params.u) +
         lp_u + lp_N;
}

}  // namespace bpm
