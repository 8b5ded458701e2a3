// bpm: population-size estimation from zero-truncated count data.
//
// Subcommands: fit, simulate, chao, diagnose, rerun.  Every run with a fixed
// seed writes byte-identical data files; manifest.json records enough to
// reproduce a run bit-for-bit (timestamps aside) via `bpm rerun`.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bpm/estimators.hpp"
#include "bpm/freq_data.hpp"
#include "bpm/mcmc.hpp"
#include "bpm/simulate.hpp"
#include "bpm/version.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::invalid_argument("failed writing " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_builtin(const std::string& name) {
  for (const auto& t : bpm::builtin_datasets())
    if (t.label == name) return true;
  return false;
}

bpm::FrequencyTable load_table(const std::string& ref) {
  if (is_builtin(ref)) return bpm::builtin_dataset(ref);
  if (!fs::exists(ref)) {
    try {
      bpm::builtin_dataset(ref);  // not a file: surface the dataset-name error
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + ", or pass a file path");
    }
  }
  std::ifstream in(ref);
  if (!in) throw std::invalid_argument("cannot read " + ref);
  return bpm::parse_frequency_table(in, fs::path(ref).stem().string());
}

fs::path resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BPM_OUT_DIR"); env && *env) return env;
  return ".";
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4595bULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bpm::NPrior parse_prior(const std::string& s) {
  if (s == "uniform") return bpm::NPrior::uniform;
  if (s == "reciprocal") return bpm::NPrior::reciprocal;
  if (s == "rissanen") return bpm::NPrior::rissanen;
  throw std::invalid_argument("unknown prior '" + s + "'");
}

std::string prior_name(bpm::NPrior p) {
  switch (p) {
    case bpm::NPrior::uniform: return "uniform";
    case bpm::NPrior::reciprocal: return "reciprocal";
    case bpm::NPrior::rissanen: return "rissanen";
  }
  return "?";
}

std::string method_name(bpm::NPrior p) {
  switch (p) {
    case bpm::NPrior::uniform: return "BPM";
    case bpm::NPrior::reciprocal: return "BPM 1/N";
    case bpm::NPrior::rissanen: return "BPM Rissanen";
  }
  return "?";
}

bpm::GammaConvention parse_convention(const std::string& s) {
  if (s == "rate") return bpm::GammaConvention::rate;
  if (s == "scale") return bpm::GammaConvention::scale;
  if (s == "mean") return bpm::GammaConvention::mean;
  throw std::invalid_argument("unknown gamma convention '" + s + "'");
}

// Everything cmd_fit needs after flags and dataset are resolved; also what a
// manifest must carry to reproduce the run.
struct ResolvedFit {
  bpm::FrequencyTable table;  // as loaded, before truncation
  std::string dataset_ref;
  int m_star{};
  long long tail_units{};  // from truncation below, recomputed in run_fit
  bpm::PriorConfig prior;
  bpm::SamplerConfig sampler;
  bpm::FitMode mode = bpm::FitMode::full_bayes;
  double level = 0.95;
};

std::string acf_csv(const bpm::Chain& chain, int max_lag) {
  std::vector<double> n_d(chain.N.begin(), chain.N.end());
  const auto a_n = bpm::acf(n_d, max_lag);
  const auto a_u = bpm::acf(chain.u, max_lag);
  const auto a_m = bpm::acf(chain.m1, max_lag);
  std::string out = "lag,N,u,m1\n";
  char buf[96];
  for (int k = 0; k <= max_lag; ++k) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", k, a_n[k], a_u[k],
                  a_m[k]);
    out += buf;
  }
  return out;
}

std::string hist_csv(const std::vector<long long>& values) {
  long long lo = values.front(), hi = values.front();
  for (long long v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const long long span = hi - lo + 1;
  const long long width = std::max(1LL, (span + 119) / 120);
  const std::size_t bins = static_cast<std::size_t>((span + width - 1) / width);
  std::vector<long long> count(bins, 0);
  for (long long v : values) ++count[static_cast<std::size_t>((v - lo) / width)];
  std::string out = "value,count\n";
  char buf[64];
  for (std::size_t b = 0; b < bins; ++b) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld\n", lo + static_cast<long long>(b) * width,
                  count[b]);
    out += buf;
  }
  return out;
}

json estimate_json(const bpm::EstimateReport& r) {
  return json{{"point", r.point},
              {"interval_lower", r.interval_lower},
              {"interval_upper", r.interval_upper},
              {"posterior_mode", r.posterior_mode},
              {"tail_adjustment", r.tail_adjustment},
              {"level", r.level}};
}

int run_fit(const ResolvedFit& rf, const fs::path& out_dir) {
  const std::string started = iso_now();
  fs::create_directories(out_dir);

  bpm::TruncationResult tr = bpm::right_truncate(
      rf.table, std::min(rf.m_star, rf.table.max_count()));
  const bpm::FrequencyTable fit_table =
      bpm::pad_cells(tr.table, static_cast<std::size_t>(rf.m_star));

  const int chains = std::max(1, rf.sampler.n_chains);
  std::vector<std::future<bpm::Chain>> futs;
  futs.reserve(chains);
  for (int i = 0; i < chains; ++i) {
    bpm::SamplerConfig sc = rf.sampler;
    sc.seed = i == 0 ? rf.sampler.seed
                     : splitmix(rf.sampler.seed + static_cast<std::uint64_t>(i));
    futs.push_back(std::async(std::launch::async, [&fit_table, &rf, sc] {
      return bpm::run_sampler(fit_table, rf.prior, sc, rf.mode);
    }));
  }
  std::vector<bpm::Chain> results;
  results.reserve(chains);
  for (auto& f : futs) results.push_back(f.get());

  bpm::Chain pooled = results.front();
  for (int i = 1; i < chains; ++i) {
    pooled.N.insert(pooled.N.end(), results[i].N.begin(), results[i].N.end());
    pooled.u.insert(pooled.u.end(), results[i].u.begin(), results[i].u.end());
    pooled.m1.insert(pooled.m1.end(), results[i].m1.begin(), results[i].m1.end());
  }
  const bpm::EstimateReport report = bpm::summarize(pooled, tr.tail_units, rf.level);

  std::vector<std::string> outputs;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    outputs.push_back(name);
  };

  for (int i = 0; i < chains; ++i) {
    const std::string name =
        i == 0 ? "chain.csv" : "chain_" + std::to_string(i + 1) + ".csv";
    emit(name, bpm::chain_to_csv(results[i]));
  }
  const int max_lag =
      std::min<int>(40, static_cast<int>(results.front().size()) - 1);
  emit("acf.csv", acf_csv(results.front(), max_lag));
  emit("hist.csv", hist_csv(pooled.N));

  const std::string table_txt =
      bpm::report_table({{method_name(rf.prior.n_prior), report}});
  emit("table.txt", table_txt);

  json summary;
  summary["dataset"] = rf.dataset_ref;
  summary["label"] = rf.table.label;
  summary["m_star"] = rf.m_star;
  summary["tail_units"] = tr.tail_units;
  summary["prior"] = prior_name(rf.prior.n_prior);
  summary["mode"] = rf.mode == bpm::FitMode::penalized ? "penalized" : "bayes";
  summary["chains"] = chains;
  summary["estimate"] = estimate_json(report);
  try {
    summary["chao_lower_bound"] =
        std::llround(bpm::chao_lower_bound(fit_table));
  } catch (const std::invalid_argument&) {
    summary["chao_lower_bound"] = nullptr;
  }
  json per_chain = json::array();
  for (const auto& ch : results)
    per_chain.push_back(json::parse(bpm::chain_summary_json(ch)));
  summary["per_chain"] = std::move(per_chain);
  emit("summary.json", summary.dump(2) + "\n");

  json manifest;
  manifest["command"] = "fit";
  manifest["version"] = bpm::version;
  manifest["dataset"] = rf.dataset_ref;
  manifest["table"] = bpm::serialize(rf.table);
  manifest["config"] = {
      {"m_star", rf.m_star},
      {"prior", prior_name(rf.prior.n_prior)},
      {"n_upper", rf.prior.n_upper ? json(*rf.prior.n_upper) : json(nullptr)},
      {"u_lower", rf.prior.u_lower},
      {"u_upper", rf.prior.u_upper},
      {"mode", rf.mode == bpm::FitMode::penalized ? "penalized" : "bayes"},
      {"iterations", rf.sampler.iterations},
      {"burn_in", rf.sampler.burn_in},
      {"thin", rf.sampler.thin},
      {"seed", rf.sampler.seed},
      {"chains", chains},
      {"step_c", rf.sampler.step_c},
      {"step_log_u", rf.sampler.step_log_u},
      {"step_gamma", rf.sampler.step_gamma},
      {"step_slide", rf.sampler.step_slide},
      {"step_n", rf.sampler.step_n},
      {"ridge_moves", rf.sampler.ridge_moves},
      {"store_c", rf.sampler.store_c},
      {"level", rf.level},
  };
  manifest["outputs"] = outputs;
  manifest["started"] = started;
  manifest["finished"] = iso_now();
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::fputs(table_txt.c_str(), stdout);
  if (tr.tail_units > 0)
    std::printf("tail adjustment: +%lld units observed above M* = %d\n",
                tr.tail_units, rf.m_star);
  if (!summary["chao_lower_bound"].is_null())
    std::printf("Chao lower bound: %lld\n",
                summary["chao_lower_bound"].get<long long>());
  std::printf("outputs written to %s\n", out_dir.string().c_str());
  return 0;
}

ResolvedFit resolve_from_manifest(const json& m) {
  if (!m.contains("command") || m["command"] != "fit")
    throw std::invalid_argument("manifest does not describe a fit run");
  ResolvedFit rf;
  rf.dataset_ref = m["dataset"].get<std::string>();
  rf.table = bpm::parse_frequency_table(m["table"].get<std::string>(),
                                        rf.dataset_ref);
  const json& c = m["config"];
  rf.m_star = c["m_star"].get<int>();
  rf.prior.n_prior = parse_prior(c["prior"].get<std::string>());
  if (!c["n_upper"].is_null()) rf.prior.n_upper = c["n_upper"].get<long long>();
  rf.prior.u_lower = c["u_lower"].get<double>();
  rf.prior.u_upper = c["u_upper"].get<double>();
  rf.mode = c["mode"] == "penalized" ? bpm::FitMode::penalized
                                     : bpm::FitMode::full_bayes;
  rf.sampler.iterations = c["iterations"].get<long long>();
  rf.sampler.burn_in = c["burn_in"].get<long long>();
  rf.sampler.thin = c["thin"].get<long long>();
  rf.sampler.seed = c["seed"].get<std::uint64_t>();
  rf.sampler.n_chains = c["chains"].get<int>();
  rf.sampler.step_c = c["step_c"].get<double>();
  rf.sampler.step_log_u = c["step_log_u"].get<double>();
  rf.sampler.step_gamma = c["step_gamma"].get<double>();
  rf.sampler.step_slide = c["step_slide"].get<double>();
  rf.sampler.step_n = c["step_n"].get<long long>();
  rf.sampler.ridge_moves = c["ridge_moves"].get<bool>();
  rf.sampler.store_c = c["store_c"].get<bool>();
  rf.level = c["level"].get<double>();
  return rf;
}

struct CsvChain {
  std::vector<std::string> header;
  std::vector<long long> iter;
  std::vector<std::vector<double>> cols;  // by column, excluding iter
};

CsvChain read_chain_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  CsvChain out;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(path.string() + ": empty file");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) out.header.push_back(cell);
  if (out.header.size() < 2 || out.header[0] != "iter")
    throw std::invalid_argument(path.string() + ": not a chain CSV (no iter column)");
  out.cols.resize(out.header.size() - 1);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::size_t col = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        if (col == 0)
          out.iter.push_back(std::stoll(cell));
        else if (col <= out.cols.size())
          out.cols[col - 1].push_back(std::stod(cell));
        else
          throw std::invalid_argument("extra column");
      } catch (const std::exception&) {
        throw std::invalid_argument(path.string() + ": line " +
                                    std::to_string(lineno) + ": bad cell '" + cell +
                                    "'");
      }
      ++col;
    }
    if (col != out.header.size())
      throw std::invalid_argument(path.string() + ": line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(out.header.size()) +
                                  " cells");
  }
  if (out.iter.empty())
    throw std::invalid_argument(path.string() + ": no samples");
  return out;
}

int cmd_diagnose(const std::string& chain_path, long long thin, int max_lag,
                 const std::string& out_flag) {
  if (thin < 1) throw std::invalid_argument("--thin must be >= 1");
  const CsvChain full = read_chain_csv(chain_path);
  CsvChain kept;
  kept.header = full.header;
  kept.cols.resize(full.cols.size());
  for (std::size_t i = 0; i < full.iter.size(); i += static_cast<std::size_t>(thin)) {
    kept.iter.push_back(full.iter[i]);
    for (std::size_t c = 0; c < full.cols.size(); ++c)
      kept.cols[c].push_back(full.cols[c][i]);
  }

  const fs::path out_dir = resolve_out_dir(out_flag);
  fs::create_directories(out_dir);

  std::string trace = kept.header[0];
  for (std::size_t c = 1; c < kept.header.size(); ++c) trace += ',' + kept.header[c];
  trace += '\n';
  char buf[64];
  for (std::size_t i = 0; i < kept.iter.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld", kept.iter[i]);
    trace += buf;
    for (const auto& col : kept.cols) {
      std::snprintf(buf, sizeof(buf), ",%.17g", col[i]);
      trace += buf;
    }
    trace += '\n';
  }
  write_file(out_dir / "trace.csv", trace);

  const int lag =
      std::min<int>(max_lag, static_cast<int>(kept.iter.size()) - 1);
  std::string acf_out = "lag";
  for (std::size_t c = 1; c < kept.header.size(); ++c) acf_out += ',' + kept.header[c];
  acf_out += '\n';
  std::vector<std::vector<double>> acfs;
  for (const auto& col : kept.cols) acfs.push_back(bpm::acf(col, lag));
  for (int k = 0; k <= lag; ++k) {
    std::snprintf(buf, sizeof(buf), "%d", k);
    acf_out += buf;
    for (const auto& a : acfs) {
      std::snprintf(buf, sizeof(buf), ",%.17g", a[k]);
      acf_out += buf;
    }
    acf_out += '\n';
  }
  write_file(out_dir / "acf.csv", acf_out);

  json ess_report;
  ess_report["samples"] = kept.iter.size();
  ess_report["thin"] = thin;
  json per = json::object();
  for (std::size_t c = 0; c < kept.cols.size(); ++c)
    per[kept.header[c + 1]] = bpm::ess(kept.cols[c]);
  ess_report["ess"] = per;
  write_file(out_dir / "ess.json", ess_report.dump(2) + "\n");

  std::printf("%zu samples (thin %lld)\n", kept.iter.size(), thin);
  for (std::size_t c = 0; c < kept.cols.size(); ++c)
    std::printf("ess %-4s %.1f\n", kept.header[c + 1].c_str(),
                per[kept.header[c + 1]].get<double>());
  return 0;
}

int cmd_simulate(const std::vector<int>& settings_sel, long long true_n, int reps,
                 int m_star, std::uint64_t seed, long long iters, long long burnin,
                 const std::string& prior_s, const std::string& conv_s,
                 const std::string& mode_s, const std::string& out_flag) {
  const auto all = bpm::table1_settings(parse_convention(conv_s));
  std::vector<bpm::SimSetting> chosen;
  for (int id : settings_sel) chosen.push_back(all.at(static_cast<std::size_t>(id - 1)));

  bpm::StudyConfig cfg;
  cfg.true_N = true_n;
  cfg.reps = reps;
  cfg.m_star = m_star;
  cfg.master_seed = seed;
  cfg.prior.n_prior = parse_prior(prior_s);
  cfg.sampler.iterations = iters;
  cfg.sampler.burn_in = burnin;
  cfg.mode = mode_s == "penalized" ? bpm::FitMode::penalized
                                   : bpm::FitMode::full_bayes;

  const std::string started = iso_now();
  const auto results = bpm::run_study(chosen, cfg);

  const fs::path out_dir = resolve_out_dir(out_flag);
  fs::create_directories(out_dir);
  write_file(out_dir / "study.csv", bpm::study_to_csv(results));
  write_file(out_dir / "study.json", bpm::study_to_json(results));

  json manifest;
  manifest["command"] = "simulate";
  manifest["version"] = bpm::version;
  manifest["settings"] = settings_sel;
  manifest["config"] = {{"true_n", true_n},     {"reps", reps},
                        {"m_star", m_star},     {"seed", seed},
                        {"iterations", iters},  {"burn_in", burnin},
                        {"prior", prior_s},     {"convention", conv_s},
                        {"mode", mode_s}};
  manifest["outputs"] = {"study.csv", "study.json"};
  manifest["started"] = started;
  manifest["finished"] = iso_now();
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  for (const auto& r : results) {
    const std::string failed =
        r.failures ? "  (" + std::to_string(r.failures) + " failed)" : "";
    std::printf("setting %2d  %-32s median %.0f  rmse %.1f  coverage %.2f  width %.0f%s\n",
                r.setting_id, r.label.c_str(), r.median_point, r.rmse, r.coverage,
                r.mean_width, failed.c_str());
  }
  std::printf("outputs written to %s\n", out_dir.string().c_str());
  return 0;
}

int cmd_rerun(const std::string& manifest_path, const std::string& out_flag) {
  const json m = json::parse(read_file(manifest_path));
  const std::string cmd = m.value("command", "");
  if (cmd == "fit") {
    const ResolvedFit rf = resolve_from_manifest(m);
    return run_fit(rf, resolve_out_dir(out_flag));
  }
  if (cmd == "simulate") {
    const json& c = m["config"];
    return cmd_simulate(m["settings"].get<std::vector<int>>(),
                        c["true_n"].get<long long>(), c["reps"].get<int>(),
                        c["m_star"].get<int>(), c["seed"].get<std::uint64_t>(),
                        c["iterations"].get<long long>(),
                        c["burn_in"].get<long long>(), c["prior"].get<std::string>(),
                        c["convention"].get<std::string>(),
                        c["mode"].get<std::string>(), out_flag);
  }
  throw std::invalid_argument("manifest has no runnable command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian population-size estimation from zero-truncated counts"};
  app.set_config("--config", "",
                 "flat key=value config file (keys like fit.prior, simulate.reps); "
                 "flags take precedence");
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit a dataset and write chain/summary files");
  fit->fallthrough();
  std::string fit_dataset;
  int fit_mstar = 0;
  std::string fit_prior = "uniform";
  long long fit_n_upper = 0;
  double fit_u_lower = 0.5, fit_u_upper = 1e3;
  std::string fit_mode = "bayes";
  long long fit_iters = 110000, fit_burnin = 10000, fit_thin = 1;
  std::uint64_t fit_seed = 0;
  int fit_chains = 1;
  double fit_level = 0.95;
  bool fit_store_c = false, fit_no_ridge = false;
  std::string fit_out;
  fit->add_option("dataset", fit_dataset,
                  "builtin name (traffic, root, polyps_low, polyps_high, scrapie, "
                  "methamphetamine) or a file path")
      ->required();
  fit->add_option("--mstar", fit_mstar, "model dimension M*; default: largest "
                                        "observed count (flagged tails truncated)");
  fit->add_option("--prior", fit_prior, "N prior: uniform|reciprocal|rissanen")
      ->check(CLI::IsMember({"uniform", "reciprocal", "rissanen"}));
  fit->add_option("--n-upper", fit_n_upper, "cap on N (0 = uncapped)");
  fit->add_option("--u-lower", fit_u_lower, "lower bound of the u prior");
  fit->add_option("--u-upper", fit_u_upper, "upper bound of the u prior");
  fit->add_option("--mode", fit_mode, "bayes|penalized")
      ->check(CLI::IsMember({"bayes", "penalized"}));
  fit->add_option("--iters", fit_iters, "total MCMC iterations");
  fit->add_option("--burnin", fit_burnin, "burn-in iterations");
  fit->add_option("--thin", fit_thin, "keep every thin-th post-burn-in draw");
  fit->add_option("--seed", fit_seed, "RNG seed");
  fit->add_option("--chains", fit_chains, "independent chains run concurrently")
      ->check(CLI::PositiveNumber);
  fit->add_option("--level", fit_level, "credible level for the interval");
  fit->add_flag("--store-c", fit_store_c, "record canonical coordinates in the chain");
  fit->add_flag("--no-ridge-moves", fit_no_ridge, "disable the ridge Metropolis moves");
  fit->add_option("--out", fit_out, "output directory (default $BPM_OUT_DIR or .)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "run replication studies over the "
                                             "twelve benchmark settings");
  sim->fallthrough();
  std::vector<int> sim_settings;
  long long sim_true_n = 1000;
  int sim_reps = 20, sim_mstar = 10;
  std::uint64_t sim_seed = 0;
  long long sim_iters = 20000, sim_burnin = 2000;
  std::string sim_prior = "uniform", sim_conv = "rate", sim_mode = "bayes";
  std::string sim_out;
  sim->add_option("--setting", sim_settings, "setting id(s), 1..12")
      ->required()
      ->check(CLI::Range(1, 12));
  sim->add_option("--true-n", sim_true_n, "true population size")
      ->check(CLI::PositiveNumber);
  sim->add_option("--reps", sim_reps, "replications per setting")
      ->check(CLI::PositiveNumber);
  sim->add_option("--mstar", sim_mstar, "fixed model dimension")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--iters", sim_iters, "MCMC iterations per replication");
  sim->add_option("--burnin", sim_burnin, "burn-in per replication");
  sim->add_option("--prior", sim_prior, "N prior")
      ->check(CLI::IsMember({"uniform", "reciprocal", "rissanen"}));
  sim->add_option("--convention", sim_conv, "gamma second-parameter reading")
      ->check(CLI::IsMember({"rate", "scale", "mean"}));
  sim->add_option("--mode", sim_mode, "bayes|penalized")
      ->check(CLI::IsMember({"bayes", "penalized"}));
  sim->add_option("--out", sim_out, "output directory");

  // chao
  auto* chao = app.add_subcommand("chao", "print the Chao lower bound");
  std::string chao_dataset;
  chao->add_option("dataset", chao_dataset, "builtin name or file path")->required();

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "re-thin a chain CSV and emit "
                                              "trace/acf/ess files");
  diag->fallthrough();
  std::string diag_chain, diag_out;
  long long diag_thin = 1;
  int diag_maxlag = 40;
  diag->add_option("chain", diag_chain, "chain CSV written by fit")->required();
  diag->add_option("--thin", diag_thin, "re-thinning factor");
  diag->add_option("--max-lag", diag_maxlag, "largest autocorrelation lag")
      ->check(CLI::PositiveNumber);
  diag->add_option("--out", diag_out, "output directory");

  // rerun
  auto* rerun = app.add_subcommand("rerun", "reproduce a run from its manifest");
  std::string rerun_manifest, rerun_out;
  rerun->add_option("manifest", rerun_manifest, "manifest.json from a previous run")
      ->required();
  rerun->add_option("--out", rerun_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*fit) {
      ResolvedFit rf;
      rf.table = load_table(fit_dataset);
      rf.dataset_ref = fit_dataset;
      if (fit_mstar > 0) {
        rf.m_star = fit_mstar;
      } else if (rf.table.tail_flagged) {
        rf.m_star = rf.table.max_count() - 1;  // fit below the aggregated tail
      } else {
        rf.m_star = rf.table.max_count();
      }
      rf.prior.n_prior = parse_prior(fit_prior);
      if (fit_n_upper > 0) rf.prior.n_upper = fit_n_upper;
      rf.prior.u_lower = fit_u_lower;
      rf.prior.u_upper = fit_u_upper;
      rf.mode = fit_mode == "penalized" ? bpm::FitMode::penalized
                                        : bpm::FitMode::full_bayes;
      rf.sampler.iterations = fit_iters;
      rf.sampler.burn_in = fit_burnin;
      rf.sampler.thin = fit_thin;
      rf.sampler.seed = fit_seed;
      rf.sampler.n_chains = fit_chains;
      rf.sampler.ridge_moves = !fit_no_ridge;
      rf.sampler.store_c = fit_store_c;
      rf.level = fit_level;
      return run_fit(rf, resolve_out_dir(fit_out));
    }
    if (*sim)
      return cmd_simulate(sim_settings, sim_true_n, sim_reps, sim_mstar, sim_seed,
                          sim_iters, sim_burnin, sim_prior, sim_conv, sim_mode,
                          sim_out);
    if (*chao) {
      const double bound = bpm::chao_lower_bound(load_table(chao_dataset));
      std::printf("%lld\n", std::llround(bound));
      return 0;
    }
    if (*diag) return cmd_diagnose(diag_chain, diag_thin, diag_maxlag, diag_out);
    if (*rerun) return cmd_rerun(rerun_manifest, rerun_out);
  } catch (const bpm::moment_space_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}
