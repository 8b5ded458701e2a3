#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "bpm/moments.hpp"
#include "doctest.h"

using namespace bpm;

namespace {

CanonicalMoments make_c(std::vector<double> v) {
  CanonicalMoments c;
  c.c = std::move(v);
  return c;
}

// log|det| by Gaussian elimination with partial pivoting
double log_abs_det(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double log_det = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return -HUGE_VAL;
    std::swap(a[piv], a[col]);
    log_det += std::log(std::fabs(a[col][col]));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= factor * a[col][cc];
    }
  }
  return log_det;
}

double fd_log_det_jacobian(const CanonicalMoments& c) {
  const std::size_t M = c.size();
  const double h = 1e-6;
  std::vector<std::vector<double>> jac(M, std::vector<double>(M));
  for (std::size_t j = 0; j < M; ++j) {
    CanonicalMoments lo = c, hi = c;
    lo.c[j] -= h;
    hi.c[j] += h;
    const auto mlo = canonical_to_ordinary(lo);
    const auto mhi = canonical_to_ordinary(hi);
    for (std::size_t i = 0; i < M; ++i) jac[i][j] = (mhi[i] - mlo[i]) / (2.0 * h);
  }
  return log_abs_det(std::move(jac));
}

}  // namespace

TEST_CASE("point masses: c1 = 1 and c1 = 0") {
  auto m1 = canonical_to_ordinary(make_c({1.0, 0.5, 0.5}));
  CHECK(m1[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m1[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m1[2] == doctest::Approx(1.0).epsilon(1e-15));
  auto m0 = canonical_to_ordinary(make_c({0.0, 0.5, 0.5}));
  CHECK(m0[0] == 0.0);
  CHECK(m0[1] == 0.0);
  CHECK(m0[2] == 0.0);
}

TEST_CASE("arcsine: c = (1/2,...) gives m_k = C(2k,k)/4^k, cross-checked by quadrature") {
  auto m = canonical_to_ordinary(make_c({0.5, 0.5, 0.5, 0.5}));
  const double expected[] = {0.5, 0.375, 0.3125, 0.2734375};
  for (int k = 0; k < 4; ++k) CHECK(m[k] == doctest::Approx(expected[k]).epsilon(1e-12));

  // int x^k / (pi sqrt(x(1-x))) dx with x = sin^2(t): the integrand smooths out
  boost::math::quadrature::tanh_sinh<double> integ;
  for (int k = 1; k <= 4; ++k) {
    const double q = integ.integrate(
        [k](double t) { return 2.0 / M_PI * std::pow(std::sin(t), 2 * k); }, 0.0,
        M_PI / 2.0);
    CHECK(m[k - 1] == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("uniform moments 1/(k+1) roundtrip within 1e-12") {
  std::vector<double> m(6);
  for (int k = 1; k <= 6; ++k) m[k - 1] = 1.0 / (k + 1);
  CanonicalMoments c = ordinary_to_canonical(OrdinaryMoments(m));
  CHECK(c.c[0] == doctest::Approx(0.5).epsilon(1e-12));
  auto back = canonical_to_ordinary(c);
  for (int k = 0; k < 6; ++k) CHECK(std::fabs(back[k] - m[k]) < 1e-12);
}

TEST_CASE("inverse: uniform prefix and the direct two-moment formula") {
  auto c = ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.5, 1.0 / 3, 0.25}));
  CHECK(c.c[0] == doctest::Approx(0.5).epsilon(1e-12));
  auto c2 = ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.7, 0.5}));
  // c2 = (m2 - m1^2) / (m1 (1 - m1))
  CHECK(c2.c[1] == doctest::Approx((0.5 - 0.49) / (0.7 * 0.3)).epsilon(1e-12));
}

TEST_CASE("inverse rejects vectors outside the moment space") {
  CHECK_THROWS_AS(ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.5, 0.6})),
                  moment_space_error);
  CHECK_THROWS_WITH(ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.5, 0.6})),
                    doctest::Contains("m_2"));
  CHECK_THROWS_AS(ordinary_to_canonical(OrdinaryMoments(std::vector<double>{1.2})),
                  moment_space_error);
}

TEST_CASE("boundary point terminates the canonical sequence") {
  auto c = ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.5, 0.25}));
  REQUIRE(c.terminated_at.has_value());
  CHECK(*c.terminated_at == 1);
  CHECK(c.c.size() == 2);
  CHECK(c.c[1] == 0.0);
}

TEST_CASE("moments after a boundary must match the determined continuation") {
  // point mass at 1/2: m_k = 2^-k
  auto ok = ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.5, 0.25, 0.125}));
  CHECK(ok.terminated_at.has_value());
  CHECK_THROWS_WITH(
      ordinary_to_canonical(OrdinaryMoments(std::vector<double>{0.5, 0.25, 0.3})),
      doctest::Contains("m_3"));
}

TEST_CASE("roundtrip: random interior points, M* = 1..12") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  for (std::size_t M = 1; M <= 12; ++M) {
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      CanonicalMoments c;
      c.c.resize(M);
      for (auto& v : c.c) v = unif(rng);
      auto m = canonical_to_ordinary(c);
      auto back = ordinary_to_canonical(m);
      REQUIRE_FALSE(back.terminated_at.has_value());
      for (std::size_t i = 0; i < M; ++i)
        worst = std::max(worst, std::fabs(back.c[i] - c.c[i]));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("forward map is monotone and stays inside the moment space") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.01, 0.99);
  for (int rep = 0; rep < 50; ++rep) {
    CanonicalMoments c;
    c.c.resize(10);
    for (auto& v : c.c) v = unif(rng);
    auto m = canonical_to_ordinary(c).values();
    double prev = 1.0;
    for (double mk : m) {
      CHECK(mk <= prev);
      CHECK(mk >= 0.0);
      prev = mk;
    }
    CHECK(is_in_moment_space(m));
  }
}

TEST_CASE("stability at M* = 30") {
  // the last coordinate is recovered from ratios that have shed ~10 digits;
  // anything near 1e-6 means the extended-precision walk is intact
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int rep = 0; rep < 5; ++rep) {
    CanonicalMoments c;
    c.c.resize(30);
    for (auto& v : c.c) v = unif(rng);
    auto m = canonical_to_ordinary(c);
    auto back = ordinary_to_canonical(m);
    REQUIRE_FALSE(back.terminated_at.has_value());
    double worst = 0.0;
    for (std::size_t i = 0; i < 30; ++i)
      worst = std::max(worst, std::fabs(back.c[i] - c.c[i]));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("moment_bounds: empty prefix, one moment, and the (1/2,1/3) prefix") {
  MomentRange r0 = moment_bounds({});
  CHECK(r0.lower == 0.0);
  CHECK(r0.upper == 1.0);

  MomentRange r1 = moment_bounds({0.3});
  CHECK(r1.lower == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(r1.upper == doctest::Approx(0.3).epsilon(1e-12));

  // brute force: three-point distributions matching (m1, m2) = (1/2, 1/3)
  MomentRange r2 = moment_bounds({0.5, 1.0 / 3});
  double lo = 1.0, hi = 0.0;
  const int G = 100;
  for (int i = 0; i <= G; ++i) {
    for (int j = i + 1; j <= G; ++j) {
      for (int k = j + 1; k <= G; ++k) {
        const double x1 = static_cast<double>(i) / G;
        const double x2 = static_cast<double>(j) / G;
        const double x3 = static_cast<double>(k) / G;
        // solve w1+w2+w3=1, sum w x = 1/2, sum w x^2 = 1/3
        const double det = (x2 - x1) * (x3 - x1) * (x3 - x2);
        if (det == 0.0) continue;
        const double m1 = 0.5, m2 = 1.0 / 3;
        const double w3 = (m2 - m1 * (x1 + x2) + x1 * x2) / ((x3 - x1) * (x3 - x2));
        const double w2 = (m1 - x1 - w3 * (x3 - x1)) / (x2 - x1);
        const double w1 = 1.0 - w2 - w3;
        if (w1 < 0.0 || w2 < 0.0 || w3 < 0.0) continue;
        const double m3 = w1 * x1 * x1 * x1 + w2 * x2 * x2 * x2 + w3 * x3 * x3 * x3;
        lo = std::min(lo, m3);
        hi = std::max(hi, m3);
      }
    }
  }
  CHECK(r2.lower == doctest::Approx(lo).epsilon(2e-3));
  CHECK(r2.upper == doctest::Approx(hi).epsilon(2e-3));
  CHECK_THROWS_AS(moment_bounds({0.5, 0.6}), moment_space_error);
}

TEST_CASE("bound consistency: appending c = 0 or 1 lands on the endpoints") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int rep = 0; rep < 30; ++rep) {
    CanonicalMoments c;
    c.c.resize(6);
    for (auto& v : c.c) v = unif(rng);
    auto m = canonical_to_ordinary(c).values();
    for (std::size_t k = 1; k < 6; ++k) {
      std::vector<double> prefix(m.begin(), m.begin() + k);
      MomentRange r = moment_bounds(prefix);
      CanonicalMoments clo, chi;
      clo.c.assign(c.c.begin(), c.c.begin() + k);
      chi.c = clo.c;
      clo.c.push_back(0.0);
      chi.c.push_back(1.0);
      CHECK(std::fabs(canonical_to_ordinary(clo)[k] - r.lower) < 1e-12);
      CHECK(std::fabs(canonical_to_ordinary(chi)[k] - r.upper) < 1e-12);
    }
  }
}

TEST_CASE("moment_bounds on a boundary prefix is the determined point") {
  MomentRange r = moment_bounds({0.5, 0.25});  // point mass at 1/2
  CHECK(r.lower == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(r.upper == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("scale_moments") {
  OrdinaryMoments m(std::vector<double>{0.5, 0.3});
  CHECK(scale_moments(m, 2.0) == std::vector<double>{1.0, 1.2});
  CHECK(scale_moments(m, 1.0) == std::vector<double>{0.5, 0.3});
  OrdinaryMoments ones(std::vector<double>{1.0, 1.0, 1.0});
  auto s = scale_moments(ones, 3.0);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(9.0));
  CHECK(s[2] == doctest::Approx(27.0));
  CHECK_THROWS_AS(scale_moments(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(scale_moments(m, -1.0), std::invalid_argument);
}

TEST_CASE("chart log-Jacobian: closed cases and finite differences") {
  CHECK(log_jacobian_canonical_to_ordinary(make_c({0.37})) == 0.0);
  CHECK(log_jacobian_canonical_to_ordinary(make_c({0.5, 0.5})) ==
        doctest::Approx(std::log(0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(log_jacobian_canonical_to_ordinary(make_c({1.0, 0.5})),
                  std::invalid_argument);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (std::size_t M = 2; M <= 8; ++M) {
    for (int rep = 0; rep < 4; ++rep) {
      CanonicalMoments c;
      c.c.resize(M);
      for (auto& v : c.c) v = unif(rng);
      const double closed = log_jacobian_canonical_to_ordinary(c);
      const double fd = fd_log_det_jacobian(c);
      CHECK(std::fabs(closed - fd) < 1e-6 * std::max(1.0, std::fabs(closed)));
    }
  }
}

TEST_CASE("is_in_moment_space") {
  CHECK(is_in_moment_space({0.5, 1.0 / 3, 0.25}));
  CHECK_FALSE(is_in_moment_space({0.5, 0.6}));
  CHECK(is_in_moment_space({0.5, 0.25}));
  CHECK_FALSE(is_in_moment_space({1.5}));
  CHECK(is_in_moment_space({}));
}

TEST_CASE("grid-discretized beta density: moments convert and invert consistently") {
  // Beta(2,3)-shaped weights on a 10^4-point midpoint grid
  const int G = 10000;
  std::vector<double> w(G), x(G);
  double total = 0.0;
  for (int i = 0; i < G; ++i) {
    x[i] = (i + 0.5) / G;
    w[i] = x[i] * (1.0 - x[i]) * (1.0 - x[i]);
    total += w[i];
  }
  std::vector<double> m(8, 0.0);
  for (int i = 0; i < G; ++i) {
    double p = w[i] / total, xk = 1.0;
    for (int k = 0; k < 8; ++k) {
      xk *= x[i];
      m[k] += p * xk;
    }
  }
  CHECK(is_in_moment_space(m));
  auto c = ordinary_to_canonical(OrdinaryMoments(m));
  REQUIRE_FALSE(c.terminated_at.has_value());
  auto back = canonical_to_ordinary(c);
  for (int k = 0; k < 8; ++k) CHECK(std::fabs(back[k] - m[k]) < 1e-10);
}
