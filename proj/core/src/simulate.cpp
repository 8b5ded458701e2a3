#include "bpm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bpm {

namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void check_weight(double w) {
  if (!(w > 0.0 && w < 1.0))
    throw std::invalid_argument("mixture weight must lie in (0,1)");
}

void validate(const GammaQ& q) {
  check_positive(q.shape, "gamma shape");
  check_positive(q.second, "gamma second parameter");
}

void validate(const LognormalQ& q) { check_positive(q.sigma, "lognormal sigma"); }

void validate(const TwoPointQ& q) {
  check_weight(q.w);
  if (q.loc1 < 0.0 || q.loc2 < 0.0)
    throw std::invalid_argument("two-point locations must be nonnegative");
}

double zero_prob_gamma(const GammaQ& q) {
  validate(q);
  // E[e^-lambda] for Ga(shape, scale s): (1 + s)^-shape
  return std::pow(1.0 + q.scale(), -q.shape);
}

// E[e^-lambda] under LN(mu, sigma) by Simpson quadrature on the log scale;
// the integrand vanishes beyond 12 sd to far below double precision
double zero_prob_lognormal(const LognormalQ& q) {
  validate(q);
  const double a = -12.0, b = 12.0;
  const int panels = 20000;  // error ~ h^4, comfortably below 1e-12
  const double h = (b - a) / panels;
  const auto integrand = [&](double x) {
    return std::exp(-std::exp(q.mu + q.sigma * x)) *
           std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  };
  double sum = integrand(a) + integrand(b);
  for (int i = 1; i < panels; ++i)
    sum += integrand(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// independent stream id for (setting, rep)-indexed draws under one master seed
std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix(master + 0x9E3779B97F4A7C15ULL * (a + 1));
  return splitmix(h + 0x9E3779B97F4A7C15ULL * (b + 1));
}

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace

double GammaQ::scale() const {
  check_positive(shape, "gamma shape");
  check_positive(second, "gamma second parameter");
  switch (convention) {
    case GammaConvention::rate:
      return 1.0 / second;
    case GammaConvention::scale:
      return second;
    case GammaConvention::mean:
      return second / shape;
  }
  throw std::logic_error("unreachable");
}

std::vector<SimSetting> table1_settings(GammaConvention conv) {
  const auto ga = [conv](double shape, double second) {
    return GammaQ{shape, second, conv};
  };
  std::vector<SimSetting> s;
  s.push_back({1, "Ga(4, 3.125)", ga(4.0, 3.125)});
  s.push_back({2, "Ga(4, 1)", ga(4.0, 1.0)});
  s.push_back({3, "Ga(1, 0.25)", ga(1.0, 0.25)});
  s.push_back({4, "0.5 Ga(2, 1) + 0.5 Ga(2, 2)", GammaMixQ{0.5, ga(2.0, 1.0), ga(2.0, 2.0)}});
  s.push_back({5, "0.5 Ga(2, 1) + 0.5 Ga(4, 1)", GammaMixQ{0.5, ga(2.0, 1.0), ga(4.0, 1.0)}});
  s.push_back({6, "LN(0.75, 0.75)", LognormalQ{0.75, 0.75}});
  s.push_back({7, "LN(-0.5, 2)", LognormalQ{-0.5, 2.0}});
  s.push_back({8, "LN(-1, 1)", LognormalQ{-1.0, 1.0}});
  s.push_back({9, "0.5 LN(-0.5, 1) + 0.5 LN(0.5, 1)",
               LognormalMixQ{0.5, LognormalQ{-0.5, 1.0}, LognormalQ{0.5, 1.0}}});
  s.push_back({10, "0.8 d(1.2) + 0.2 d(6.7)", TwoPointQ{0.8, 1.2, 6.7}});
  s.push_back({11, "0.89 d(0.5) + 0.11 d(6.7)", TwoPointQ{0.89, 0.5, 6.7}});
  s.push_back({12, "0.8 d(0.2) + 0.2 d(1.3)", TwoPointQ{0.8, 0.2, 1.3}});
  return s;
}

double draw_lambda(const MixingDistribution& q, RngEngine& rng) {
  struct Visitor {
    RngEngine& rng;
    double operator()(const GammaQ& g) {
      return std::gamma_distribution<double>(g.shape, g.scale())(rng);
    }
    double operator()(const LognormalQ& l) {
      validate(l);
      return std::lognormal_distribution<double>(l.mu, l.sigma)(rng);
    }
    double operator()(const TwoPointQ& t) {
      validate(t);
      return std::bernoulli_distribution(t.w)(rng) ? t.loc1 : t.loc2;
    }
    double operator()(const GammaMixQ& m) {
      check_weight(m.w);
      const GammaQ& pick = std::bernoulli_distribution(m.w)(rng) ? m.comp1 : m.comp2;
      return (*this)(pick);
    }
    double operator()(const LognormalMixQ& m) {
      check_weight(m.w);
      const LognormalQ& pick =
          std::bernoulli_distribution(m.w)(rng) ? m.comp1 : m.comp2;
      return (*this)(pick);
    }
  };
  return std::visit(Visitor{rng}, q);
}

double zero_probability(const MixingDistribution& q) {
  struct Visitor {
    double operator()(const GammaQ& g) const { return zero_prob_gamma(g); }
    double operator()(const LognormalQ& l) const { return zero_prob_lognormal(l); }
    double operator()(const TwoPointQ& t) const {
      validate(t);
      return t.w * std::exp(-t.loc1) + (1.0 - t.w) * std::exp(-t.loc2);
    }
    double operator()(const GammaMixQ& m) const {
      check_weight(m.w);
      return m.w * zero_prob_gamma(m.comp1) + (1.0 - m.w) * zero_prob_gamma(m.comp2);
    }
    double operator()(const LognormalMixQ& m) const {
      check_weight(m.w);
      return m.w * zero_prob_lognormal(m.comp1) +
             (1.0 - m.w) * zero_prob_lognormal(m.comp2);
    }
  };
  return std::visit(Visitor{}, q);
}

DrawResult draw_dataset_full(const MixingDistribution& q, long long true_N,
                             RngEngine& rng) {
  if (true_N < 1) throw std::invalid_argument("true_N must be >= 1");
  DrawResult out;
  std::vector<long long> tally;
  for (long long i = 0; i < true_N; ++i) {
    const double lambda = draw_lambda(q, rng);
    const long long count =
        lambda > 0.0 ? std::poisson_distribution<long long>(lambda)(rng) : 0;
    if (count == 0) {
      ++out.zero_draws;
      continue;
    }
    if (static_cast<std::size_t>(count) > tally.size())
      tally.resize(static_cast<std::size_t>(count), 0);
    ++tally[static_cast<std::size_t>(count) - 1];
  }
  if (tally.empty())
    throw no_observed_units("no observed units: every count in the draw was zero");
  out.table.freqs = std::move(tally);
  out.table.label = "simulated";
  return out;
}

FrequencyTable draw_dataset(const MixingDistribution& q, long long true_N,
                            RngEngine& rng) {
  return draw_dataset_full(q, true_N, rng).table;
}

StudyResult run_study_setting(const SimSetting& setting, const StudyConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (cfg.m_star < 1) throw std::invalid_argument("m_star must be >= 1");
  StudyResult res;
  res.setting_id = setting.id;
  res.label = setting.label;
  res.reps = cfg.reps;
  std::vector<EstimateReport> ok_reports;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    RepRecord rec;
    rec.rep = rep;
    try {
      RngEngine data_rng(derive_stream(cfg.master_seed,
                                       static_cast<std::uint64_t>(setting.id),
                                       2 * static_cast<std::uint64_t>(rep)));
      const FrequencyTable drawn = draw_dataset(setting.q, cfg.true_N, data_rng);
      TruncationResult tr = right_truncate(drawn, cfg.m_star);
      const FrequencyTable fit_table =
          pad_cells(tr.table, static_cast<std::size_t>(cfg.m_star));
      SamplerConfig sc = cfg.sampler;
      sc.seed = derive_stream(cfg.master_seed, static_cast<std::uint64_t>(setting.id),
                              2 * static_cast<std::uint64_t>(rep) + 1);
      const Chain chain = run_sampler(fit_table, cfg.prior, sc, cfg.mode);
      rec.report = summarize(chain, tr.tail_units);
      rec.n_observed = drawn.n();
      rec.tail_units = tr.tail_units;
      rec.ok = true;
      ok_reports.push_back(rec.report);
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
      ++res.failures;
    }
    res.records.push_back(std::move(rec));
  }
  if (!ok_reports.empty()) {
    const CoverageSummary cov = coverage_and_error(ok_reports, cfg.true_N);
    res.median_point = cov.median_point;
    res.rmse = cov.rmse;
    res.coverage = cov.coverage;
    res.mean_width = cov.mean_width;
  }
  return res;
}

std::vector<StudyResult> run_study(const std::vector<SimSetting>& settings,
                                   const StudyConfig& cfg) {
  std::vector<StudyResult> out;
  out.reserve(settings.size());
  for (const SimSetting& s : settings) out.push_back(run_study_setting(s, cfg));
  return out;
}

std::string study_to_csv(const std::vector<StudyResult>& results) {
  std::string out =
      "setting,label,rep,ok,n_observed,tail_units,point,interval_lower,"
      "interval_upper,posterior_mode,error\n";
  char buf[160];
  for (const StudyResult& res : results) {
    for (const RepRecord& r : res.records) {
      out += std::to_string(res.setting_id) + ',' + csv_quote(res.label) + ',';
      if (r.ok) {
        std::snprintf(buf, sizeof(buf), "%d,1,%lld,%lld,%lld,%lld,%lld,%lld,",
                      r.rep, r.n_observed, r.tail_units, r.report.point,
                      r.report.interval_lower, r.report.interval_upper,
                      r.report.posterior_mode);
        out += buf;
      } else {
        std::snprintf(buf, sizeof(buf), "%d,0,,,,,,,", r.rep);
        out += buf;
      }
      out += csv_quote(r.error) + '\n';
    }
  }
  return out;
}

std::string study_to_json(const std::vector<StudyResult>& results) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const StudyResult& res = results[i];
    out += "  {\"setting\": " + std::to_string(res.setting_id) + ", \"label\": \"" +
           json_escape(res.label) + "\", \"reps\": " + std::to_string(res.reps) +
           ", \"failures\": " + std::to_string(res.failures) + ",\n";
    out += "   \"median_point\": ";
    append_double(out, res.median_point);
    out += ", \"rmse\": ";
    append_double(out, res.rmse);
    out += ", \"coverage\": ";
    append_double(out, res.coverage);
    out += ", \"mean_width\": ";
    append_double(out, res.mean_width);
    out += ",\n   \"records\": [";
    for (std::size_t j = 0; j < res.records.size(); ++j) {
      const RepRecord& r = res.records[j];
      if (j) out += ", ";
      out += "{\"rep\": " + std::to_string(r.rep) +
             ", \"ok\": " + (r.ok ? "true" : "false");
      if (r.ok) {
        out += ", \"n_observed\": " + std::to_string(r.n_observed) +
               ", \"tail_units\": " + std::to_string(r.tail_units) +
               ", \"point\": " + std::to_string(r.report.point) +
               ", \"interval\": [" + std::to_string(r.report.interval_lower) + ", " +
               std::to_string(r.report.interval_upper) + "]";
      } else {
        out += ", \"error\": \"" + json_escape(r.error) + "\"";
      }
      out += '}';
    }
    out += "]}";
    out += (i + 1 < results.size()) ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

}  // namespace bpm
