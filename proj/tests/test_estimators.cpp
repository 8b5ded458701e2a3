#include <numeric>
#include <string>
#include <vector>

#include "bpm/estimators.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bpm;

namespace {

Chain make_chain(std::vector<long long> n) {
  Chain c;
  c.N = std::move(n);
  c.u.assign(c.N.size(), 1.0);
  c.m1.assign(c.N.size(), 0.5);
  return c;
}

FrequencyTable make_table(std::vector<long long> f) {
  FrequencyTable t;
  t.freqs = std::move(f);
  t.label = "test";
  return t;
}

}  // namespace

TEST_CASE("summarize: constant chain") {
  auto r = summarize(make_chain({42, 42, 42, 42}), 0);
  CHECK(r.point == 42);
  CHECK(r.interval_lower == 42);
  CHECK(r.interval_upper == 42);
  CHECK(r.posterior_mode == 42);
  CHECK(r.tail_adjustment == 0);
  CHECK(r.level == 0.95);
}

TEST_CASE("summarize: 1..1000 gives the lower median and type-1 quantiles") {
  std::vector<long long> v(1000);
  std::iota(v.begin(), v.end(), 1);
  auto r = summarize(make_chain(std::move(v)), 0);
  CHECK(r.point == 500);
  CHECK(r.interval_lower == 25);   // smallest x with F(x) >= 0.025
  CHECK(r.interval_upper == 975);
}

TEST_CASE("summarize: order does not matter") {
  auto a = summarize(make_chain({9, 2, 7, 2, 5}), 0);
  auto b = summarize(make_chain({2, 2, 5, 7, 9}), 0);
  CHECK(a.point == b.point);
  CHECK(a.point == 5);
  CHECK(a.posterior_mode == 2);
  CHECK(a.interval_lower == 2);
  CHECK(a.interval_upper == 9);
}

TEST_CASE("summarize: mode ties resolve to the smallest value") {
  auto r = summarize(make_chain({7, 3, 5, 5, 3}), 0);
  CHECK(r.posterior_mode == 3);
}

TEST_CASE("summarize: tail units shift point, bounds, and mode") {
  std::vector<long long> v(1000);
  std::iota(v.begin(), v.end(), 1);
  auto r = summarize(make_chain(std::move(v)), 22);
  CHECK(r.point == 522);
  CHECK(r.interval_lower == 47);
  CHECK(r.interval_upper == 997);
  CHECK(r.tail_adjustment == 22);
  CHECK(r.posterior_mode == 23);  // every value once; smallest wins, plus tail
}

TEST_CASE("summarize: narrower level nests inside the wider one") {
  std::vector<long long> v(5000);
  std::iota(v.begin(), v.end(), 1);
  Chain c = make_chain(std::move(v));
  auto wide = summarize(c, 0, 0.95);
  auto tight = summarize(c, 0, 0.5);
  CHECK(tight.interval_lower >= wide.interval_lower);
  CHECK(tight.interval_upper <= wide.interval_upper);
  CHECK(tight.level == 0.5);
}

TEST_CASE("summarize rejects empty chains and bad levels") {
  CHECK_THROWS_AS(summarize(make_chain({}), 0), std::invalid_argument);
  CHECK_THROWS_AS(summarize(make_chain({1, 2}), 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(summarize(make_chain({1, 2}), 0, 1.0), std::invalid_argument);
}

TEST_CASE("chao_lower_bound on the benchmark tables") {
  CHECK(chao_lower_bound(builtin_dataset("traffic")) ==
        doctest::Approx(1621.0 + 1317.0 * 1317.0 / (2.0 * 239.0)).epsilon(1e-12));
  CHECK(chao_lower_bound(builtin_dataset("methamphetamine")) ==
        doctest::Approx(3345.0 + 3114.0 * 3114.0 / (2.0 * 163.0)).epsilon(1e-12));
}

TEST_CASE("chao_lower_bound edge cases") {
  // no singletons: the data give no evidence of unseen units
  CHECK(chao_lower_bound(make_table({0, 5, 2})) == 7.0);
  CHECK_THROWS_WITH(chao_lower_bound(make_table({4, 0, 1})),
                    doctest::Contains("f_2 = 0"));
}

TEST_CASE("coverage_and_error") {
  EstimateReport a;
  a.point = 900;
  a.interval_lower = 850;
  a.interval_upper = 1000;
  EstimateReport b;
  b.point = 1100;
  b.interval_lower = 1050;
  b.interval_upper = 1200;
  auto s = coverage_and_error({a, b}, 1000);
  CHECK(s.count == 2);
  CHECK(s.median_point == 900.0);  // lower median
  CHECK(s.rmse == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(s.coverage == 0.5);  // the first interval covers at its endpoint
  CHECK(s.mean_width == doctest::Approx(150.0).epsilon(1e-12));
  CHECK_THROWS_AS(coverage_and_error({}, 10), std::invalid_argument);
}

TEST_CASE("report_to_json") {
  EstimateReport r;
  r.point = 12511;
  r.interval_lower = 7681;
  r.interval_upper = 60776;
  r.posterior_mode = 9000;
  r.tail_adjustment = 22;
  r.level = 0.95;
  auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["point"] == 12511);
  CHECK(j["interval_lower"] == 7681);
  CHECK(j["interval_upper"] == 60776);
  CHECK(j["posterior_mode"] == 9000);
  CHECK(j["tail_adjustment"] == 22);
  CHECK(j["level"].get<double>() == doctest::Approx(0.95));
}

TEST_CASE("report_table layout") {
  EstimateReport r;
  r.point = 5250;
  r.interval_lower = 4800;
  r.interval_upper = 6100;
  EstimateReport q;
  q.point = 12511;
  q.interval_lower = 7681;
  q.interval_upper = 60776;
  const std::string table = report_table({{"Chao", r}, {"BPM 1/N", q}});
  CHECK(table.rfind("Methods", 0) == 0);
  CHECK(table.find("N^") != std::string::npos);
  CHECK(table.find("N^-") != std::string::npos);
  CHECK(table.find("N^+") != std::string::npos);
  CHECK(table.find("Chao") != std::string::npos);
  CHECK(table.find("BPM 1/N") != std::string::npos);
  CHECK(table.find("5250") != std::string::npos);
  CHECK(table.find("60776") != std::string::npos);
  // three lines, all the same width
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < table.size()) {
    const auto nl = table.find('\n', pos);
    lines.push_back(table.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].size() == lines[1].size());
  CHECK(lines[1].size() == lines[2].size());
}
