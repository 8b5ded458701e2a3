#include "bpm/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bpm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kReflectEps = 1e-12;  // sampler keeps c in [eps, 1-eps]
constexpr double kLambdaGuard = 1e12;  // gamma draws above this poison the Poisson

// fold x into [eps, 1-eps] by reflection
double reflect01(double x, double eps) {
  const double lo = eps;
  const double width = 1.0 - 2.0 * eps;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  if (y > width) y = 2.0 * width - y;
  return lo + y;
}

// cell part of the log target given N: exponents f_k (full) or f_k - 1/2
// (penalized); the binomial coefficient is constant in (u, c) and omitted
double log_cells(const CountProbabilities& cp, long long N, const FrequencyTable& data,
                 FitMode mode) {
  const long long n = data.n();
  const double shift = mode == FitMode::penalized ? 0.5 : 0.0;
  double s = (static_cast<double>(N - n) - shift) * cp.log_h[0];
  if (N == n && shift == 0.0) s = 0.0;  // avoid 0 * (-inf)
  for (std::size_t k = 1; k < cp.log_h.size(); ++k) {
    const double e = static_cast<double>(data.freqs[k - 1]) - shift;
    if (e != 0.0) s += e * cp.log_h[k];
  }
  return s;
}

// prior density of the moment block on the canonical chart, per fit mode
double log_moment_block(const CountProbabilities& cp, const CanonicalMoments& c,
                        double u, FitMode mode) {
  const double chart = log_jacobian_canonical_to_ordinary(c);
  if (mode == FitMode::penalized) return chart;
  double s = 0.0;
  for (double lh : cp.log_h) s += lh;
  return -0.5 * s + log_norm_jacobian(cp.log_den, c.size()) +
         log_scale_jacobian(u, c.size()) + chart;
}

bool accept(double log_ratio, RngEngine& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  const double x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return std::log(x) < log_ratio;
}

// inverse transform restricted to strictly interior images
bool try_inverse(const std::vector<double>& m, CanonicalMoments* out) {
  try {
    CanonicalMoments c = ordinary_to_canonical(OrdinaryMoments(m));
    if (c.terminated_at) return false;
    *out = std::move(c);
    return true;
  } catch (const moment_space_error&) {
    return false;
  }
}

double auto_step_n(const FrequencyTable& data) {
  const double f1 = static_cast<double>(data.freqs.empty() ? 0 : data.freqs[0]);
  const double f2 = data.freqs.size() >= 2 ? static_cast<double>(data.freqs[1]) : 0.0;
  const double f0_hat = f2 > 0.0 ? f1 * f1 / (2.0 * f2) : static_cast<double>(data.n());
  return std::max(10.0, 0.25 * f0_hat);
}

struct Tallies {
  long long acc_c = 0, tot_c = 0;
  long long acc_u = 0, tot_u = 0;
  long long acc_gamma = 0, tot_gamma = 0;
  long long acc_slide = 0, tot_slide = 0;
  long long acc_n = 0, tot_n = 0;
  long long overflow = 0;
};

// scale move m' = e^delta m at fixed u: slides h0 along the weakly identified
// ridge; Jacobian on the canonical chart = M* delta + chart(c) - chart(c')
void gamma_slide(SamplerState& state, const FrequencyTable& data, const SamplerConfig& cfg,
                 FitMode mode, RngEngine& rng, Tallies& tally) {
  ++tally.tot_gamma;
  const std::size_t M = state.params.m_star();
  const double delta = std::normal_distribution<double>(0.0, cfg.step_gamma)(rng);
  const double g = std::exp(delta);
  std::vector<double> mp = canonical_to_ordinary(state.params.c).values();
  for (double& v : mp) v *= g;
  if (mp[0] >= 1.0) return;
  CanonicalMoments cprop;
  if (!try_inverse(mp, &cprop)) return;
  const CountProbabilities cp_prop = count_probabilities(cprop, state.params.u);
  const double lp_prop = log_moment_block(cp_prop, cprop, state.params.u, mode);
  const double ljac = static_cast<double>(M) * delta +
                      log_jacobian_canonical_to_ordinary(state.params.c) -
                      log_jacobian_canonical_to_ordinary(cprop);
  const double lr = log_cells(cp_prop, state.params.N, data, mode) + lp_prop -
                    log_cells(state.cp, state.params.N, data, mode) -
                    state.lp_moments + ljac;
  if (accept(lr, rng)) {
    state.params.c = std::move(cprop);
    state.cp = cp_prop;
    state.lp_moments = lp_prop;
    ++tally.acc_gamma;
  }
}

// joint move u' = u e^delta, m_k' = m_k e^{-k delta}: leaves every u^k m_k
// (hence the likelihood) invariant; Jacobian = delta - delta M*(M*+1)/2
// + chart(c) - chart(c')
void u_slide(SamplerState& state, const FrequencyTable& data, const PriorConfig& prior,
             const SamplerConfig& cfg, FitMode mode, RngEngine& rng, Tallies& tally) {
  ++tally.tot_slide;
  const std::size_t M = state.params.m_star();
  const double delta = std::normal_distribution<double>(0.0, cfg.step_slide)(rng);
  const double up = std::exp(std::log(state.params.u) + delta);
  if (up < prior.u_lower || up > prior.u_upper) return;
  std::vector<double> mp = canonical_to_ordinary(state.params.c).values();
  const double g = std::exp(-delta);
  double gk = 1.0;
  for (double& v : mp) {
    gk *= g;
    v *= gk;
  }
  CanonicalMoments cprop;
  if (!try_inverse(mp, &cprop)) return;
  const CountProbabilities cp_prop = count_probabilities(cprop, up);
  const double lp_prop = log_moment_block(cp_prop, cprop, up, mode);
  const double Md = static_cast<double>(M);
  const double ljac = delta - 0.5 * Md * (Md + 1.0) * delta +
                      log_jacobian_canonical_to_ordinary(state.params.c) -
                      log_jacobian_canonical_to_ordinary(cprop);
  const double lr = log_cells(cp_prop, state.params.N, data, mode) + lp_prop +
                    log_prior_u(up, M, prior) -
                    log_cells(state.cp, state.params.N, data, mode) - state.lp_moments -
                    log_prior_u(state.params.u, M, prior) + ljac;
  if (accept(lr, rng)) {
    state.params.u = up;
    state.params.c = std::move(cprop);
    state.cp = cp_prop;
    state.lp_moments = lp_prop;
    ++tally.acc_slide;
  }
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

double quantile_sorted(const std::vector<double>& s, double p) {
  const std::size_t L = s.size();
  // slack absorbs rounding in p*L; see estimators.cpp
  std::size_t idx =
      static_cast<std::size_t>(std::ceil(p * static_cast<double>(L) - 1e-9));
  if (idx > 0) --idx;
  if (idx >= L) idx = L - 1;
  return s[idx];
}

}  // namespace

SamplerState make_state(ModelParams params, FitMode mode) {
  SamplerState state;
  state.cp = count_probabilities(params.c, params.u);
  state.lp_moments = log_moment_block(state.cp, params.c, params.u, mode);
  state.params = std::move(params);
  return state;
}

long long draw_f0(long long n, double h0, NPrior prior, RngEngine& rng) {
  if (h0 >= 1.0) throw std::runtime_error("h0 >= 1: N conditional is not normalizable");
  if (h0 <= 0.0) return 0;
  const double successes =
      static_cast<double>(prior == NPrior::uniform ? n + 1 : n);
  const double lambda = std::gamma_distribution<double>(
      successes, h0 / (1.0 - h0))(rng);
  if (lambda > kLambdaGuard) return -1;
  return std::poisson_distribution<long long>(lambda)(rng);
}

long long gibbs_update_N(SamplerState& state, const FrequencyTable& data,
                         const PriorConfig& prior, const SamplerConfig& cfg,
                         RngEngine& rng, long long* overflow_rejects) {
  const long long n = data.n();
  const bool exact = prior.n_prior != NPrior::rissanen && !prior.n_upper;
  if (exact) {
    const long long f0 = draw_f0(n, state.cp.h[0], prior.n_prior, rng);
    if (f0 < 0) {
      if (overflow_rejects) ++*overflow_rejects;
      return state.params.N;
    }
    state.params.N = n + f0;
    return state.params.N;
  }
  const double step = cfg.step_n > 0 ? static_cast<double>(cfg.step_n) : auto_step_n(data);
  const long long d =
      std::llround(std::normal_distribution<double>(0.0, step)(rng));
  const long long N = state.params.N;
  const long long Np = N + d;
  if (d == 0 || Np < n || (prior.n_upper && Np > *prior.n_upper)) return N;
  const double lr =
      std::lgamma(static_cast<double>(Np) + 1.0) -
      std::lgamma(static_cast<double>(Np - n) + 1.0) -
      std::lgamma(static_cast<double>(N) + 1.0) +
      std::lgamma(static_cast<double>(N - n) + 1.0) +
      static_cast<double>(Np - N) * state.cp.log_h[0] + log_prior_N(Np, prior) -
      log_prior_N(N, prior);
  if (accept(lr, rng)) state.params.N = Np;
  return state.params.N;
}

int mh_update_c(SamplerState& state, const FrequencyTable& data,
                const PriorConfig& prior, const SamplerConfig& cfg, FitMode mode,
                RngEngine& rng) {
  (void)prior;
  const std::size_t M = state.params.m_star();
  int accepted = 0;
  for (std::size_t i = 0; i < M; ++i) {
    CanonicalMoments cprop = state.params.c;
    cprop.c[i] = reflect01(
        cprop.c[i] + std::normal_distribution<double>(0.0, cfg.step_c)(rng),
        kReflectEps);
    const CountProbabilities cp_prop = count_probabilities(cprop, state.params.u);
    const double lp_prop = log_moment_block(cp_prop, cprop, state.params.u, mode);
    const double lr = log_cells(cp_prop, state.params.N, data, mode) + lp_prop -
                      log_cells(state.cp, state.params.N, data, mode) -
                      state.lp_moments;
    if (accept(lr, rng)) {
      state.params.c = std::move(cprop);
      state.cp = cp_prop;
      state.lp_moments = lp_prop;
      ++accepted;
    }
  }
  return accepted;
}

bool mh_update_u(SamplerState& state, const FrequencyTable& data,
                 const PriorConfig& prior, const SamplerConfig& cfg, FitMode mode,
                 RngEngine& rng) {
  const std::size_t M = state.params.m_star();
  const double lu = std::log(state.params.u);
  const double lup = lu + std::normal_distribution<double>(0.0, cfg.step_log_u)(rng);
  const double up = std::exp(lup);
  if (up < prior.u_lower || up > prior.u_upper) return false;
  const CountProbabilities cp_prop = count_probabilities(state.params.c, up);
  const double lp_prop = log_moment_block(cp_prop, state.params.c, up, mode);
  const double lr = log_cells(cp_prop, state.params.N, data, mode) + lp_prop +
                    log_prior_u(up, M, prior) -
                    log_cells(state.cp, state.params.N, data, mode) - state.lp_moments -
                    log_prior_u(state.params.u, M, prior) + (lup - lu);
  if (!accept(lr, rng)) return false;
  state.params.u = up;
  state.cp = cp_prop;
  state.lp_moments = lp_prop;
  return true;
}

Chain run_sampler(const FrequencyTable& data, const PriorConfig& prior,
                  const SamplerConfig& cfg, FitMode mode) {
  if (data.freqs.empty()) throw std::invalid_argument("empty frequency table");
  if (cfg.burn_in < 0 || cfg.iterations <= cfg.burn_in)
    throw std::invalid_argument("need iterations > burn_in >= 0");
  if (cfg.thin < 1) throw std::invalid_argument("thin must be >= 1");
  if ((cfg.iterations - cfg.burn_in) % cfg.thin != 0)
    throw std::invalid_argument("thin must divide iterations - burn_in");
  if (!(cfg.step_c > 0.0) || !(cfg.step_log_u > 0.0) || !(cfg.step_gamma > 0.0) ||
      !(cfg.step_slide > 0.0) || cfg.step_n < 0)
    throw std::invalid_argument("proposal scales must be positive");
  if (cfg.n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
  if (!(prior.u_lower > 0.0) || !(prior.u_upper > prior.u_lower))
    throw std::invalid_argument("need 0 < u_lower < u_upper");
  const long long n = data.n();
  if (prior.n_upper && *prior.n_upper < n)
    throw std::invalid_argument("n_upper is below the observed count n");

  const std::size_t M = data.freqs.size();
  ModelParams init;
  init.N = prior.n_upper ? std::min(2 * n, *prior.n_upper) : 2 * n;
  init.u = std::clamp(std::max(1.0, 0.5 * static_cast<double>(M)), prior.u_lower,
                      prior.u_upper);
  init.c.c.assign(M, 0.5);
  const double lp0 = log_posterior(init, data, prior, mode);
  if (!std::isfinite(lp0)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "initial state (N=%lld, u=%g, c=0.5...) has non-finite log posterior "
                  "(%g); check prior bounds",
                  init.N, init.u, lp0);
    throw std::runtime_error(buf);
  }

  SamplerState state = make_state(std::move(init), mode);
  RngEngine rng(cfg.seed);
  Tallies tally;
  const bool exact_N = prior.n_prior != NPrior::rissanen && !prior.n_upper;

  Chain chain;
  chain.config = cfg;
  const long long kept = (cfg.iterations - cfg.burn_in) / cfg.thin;
  chain.N.reserve(kept);
  chain.u.reserve(kept);
  chain.m1.reserve(kept);
  if (cfg.store_c) chain.c.reserve(kept);

  for (long long it = 0; it < cfg.iterations; ++it) {
    if (exact_N) {
      gibbs_update_N(state, data, prior, cfg, rng, &tally.overflow);
    } else {
      const long long before = state.params.N;
      gibbs_update_N(state, data, prior, cfg, rng, &tally.overflow);
      ++tally.tot_n;
      if (state.params.N != before) ++tally.acc_n;
    }
    tally.acc_u += mh_update_u(state, data, prior, cfg, mode, rng) ? 1 : 0;
    ++tally.tot_u;
    if (cfg.ridge_moves) {
      gamma_slide(state, data, cfg, mode, rng, tally);
      u_slide(state, data, prior, cfg, mode, rng, tally);
    }
    tally.acc_c += mh_update_c(state, data, prior, cfg, mode, rng);
    tally.tot_c += static_cast<long long>(M);
    if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      chain.N.push_back(state.params.N);
      chain.u.push_back(state.params.u);
      chain.m1.push_back(state.params.u * canonical_to_ordinary(state.params.c)[0]);
      if (cfg.store_c) chain.c.push_back(state.params.c.c);
    }
  }

  chain.accept_c = tally.tot_c ? static_cast<double>(tally.acc_c) / tally.tot_c : 0.0;
  chain.accept_u = tally.tot_u ? static_cast<double>(tally.acc_u) / tally.tot_u : 0.0;
  chain.accept_gamma =
      tally.tot_gamma ? static_cast<double>(tally.acc_gamma) / tally.tot_gamma : 0.0;
  chain.accept_slide =
      tally.tot_slide ? static_cast<double>(tally.acc_slide) / tally.tot_slide : 0.0;
  chain.accept_n =
      tally.tot_n ? static_cast<double>(tally.acc_n) / tally.tot_n : -1.0;
  chain.overflow_rejects = tally.overflow;
  return chain;
}

std::vector<double> acf(const std::vector<double>& series, int max_lag) {
  const std::size_t L = series.size();
  if (L == 0) throw std::invalid_argument("acf of an empty series");
  if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(L);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  c0 /= static_cast<double>(L);
  if (c0 <= 0.0)
    throw std::invalid_argument("acf of a constant series is undefined");
  const std::size_t K = std::min<std::size_t>(max_lag, L - 1);
  std::vector<double> rho(static_cast<std::size_t>(max_lag) + 1, 0.0);
  rho[0] = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < L; ++t)
      ck += (series[t] - mean) * (series[t + k] - mean);
    // lag-adjusted normalization so e.g. a pure alternating series gives
    // acf(1) = -1 exactly
    rho[k] = ck / (static_cast<double>(L - k) * c0);
  }
  return rho;
}

double ess(const std::vector<double>& series) {
  const std::size_t L = series.size();
  if (L == 0) throw std::invalid_argument("ess of an empty series");
  if (L == 1) return 1.0;
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(L);
  double c0 = 0.0;
  for (double x : series) c0 += (x - mean) * (x - mean);
  c0 /= static_cast<double>(L);
  if (c0 <= 0.0) return static_cast<double>(L);  // constant series
  const auto rho_at = [&](std::size_t k) -> double {
    if (k >= L) return 0.0;
    double ck = 0.0;
    for (std::size_t t = 0; t + k < L; ++t)
      ck += (series[t] - mean) * (series[t + k] - mean);
    return ck / (static_cast<double>(L) * c0);
  };
  // Geyer initial positive sequence: tau = -1 + 2 sum Gamma_m over the leading
  // positive pair sums Gamma_m = rho(2m) + rho(2m+1)
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m < L; ++m) {
    const double gamma_m = rho_at(2 * m) + rho_at(2 * m + 1);
    if (gamma_m <= 0.0) break;
    tau += 2.0 * gamma_m;
  }
  if (tau <= 0.0) return static_cast<double>(L);  // antithetic chain: clamp
  const double e = static_cast<double>(L) / tau;
  return std::clamp(e, 1.0, static_cast<double>(L));
}

std::string chain_to_csv(const Chain& chain) {
  std::string out;
  out.reserve(chain.size() * 64 + 64);
  out += "iter,N,u,m1";
  const std::size_t M = chain.c.empty() ? 0 : chain.c.front().size();
  for (std::size_t j = 1; j <= M; ++j) out += ",c" + std::to_string(j);
  out += '\n';
  char buf[48];
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const long long iter = chain.config.burn_in +
                           static_cast<long long>(i) * chain.config.thin;
    std::snprintf(buf, sizeof(buf), "%lld,%lld,", iter, chain.N[i]);
    out += buf;
    append_double(out, chain.u[i]);
    out += ',';
    append_double(out, chain.m1[i]);
    if (M) {
      for (double cj : chain.c[i]) {
        out += ',';
        append_double(out, cj);
      }
    }
    out += '\n';
  }
  return out;
}

std::string chain_summary_json(const Chain& chain) {
  std::vector<double> n_d(chain.N.begin(), chain.N.end());
  std::vector<double> n_sorted = n_d;
  std::sort(n_sorted.begin(), n_sorted.end());
  std::string out = "{\n";
  out += "  \"samples\": " + std::to_string(chain.size()) + ",\n";
  out += "  \"config\": {\"iterations\": " + std::to_string(chain.config.iterations) +
         ", \"burn_in\": " + std::to_string(chain.config.burn_in) +
         ", \"thin\": " + std::to_string(chain.config.thin) +
         ", \"seed\": " + std::to_string(chain.config.seed) +
         ", \"ridge_moves\": " + (chain.config.ridge_moves ? "true" : "false") + "},\n";
  out += "  \"acceptance\": {\"c\": ";
  append_double(out, chain.accept_c);
  out += ", \"u\": ";
  append_double(out, chain.accept_u);
  out += ", \"gamma_slide\": ";
  append_double(out, chain.accept_gamma);
  out += ", \"u_slide\": ";
  append_double(out, chain.accept_slide);
  out += ", \"n\": ";
  if (chain.accept_n < 0.0) {
    out += "null";
  } else {
    append_double(out, chain.accept_n);
  }
  out += "},\n";
  out += "  \"overflow_rejects\": " + std::to_string(chain.overflow_rejects) + ",\n";
  out += "  \"ess\": {\"N\": ";
  append_double(out, chain.size() ? ess(n_d) : 0.0);
  out += ", \"u\": ";
  append_double(out, chain.size() ? ess(chain.u) : 0.0);
  out += ", \"m1\": ";
  append_double(out, chain.size() ? ess(chain.m1) : 0.0);
  out += "},\n";
  out += "  \"N\": {\"median\": ";
  append_double(out, chain.size() ? quantile_sorted(n_sorted, 0.5) : 0.0);
  out += ", \"q025\": ";
  append_double(out, chain.size() ? quantile_sorted(n_sorted, 0.025) : 0.0);
  out += ", \"q975\": ";
  append_double(out, chain.size() ? quantile_sorted(n_sorted, 0.975) : 0.0);
  out += "}\n}\n";
  return out;
}

}  // namespace bpm
