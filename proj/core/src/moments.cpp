#include "bpm/moments.hpp"

#include <cmath>
#include <cstddef>

namespace bpm {

namespace {

constexpr double kBoundaryBand = 1e-13;  // inverse: |c_k| within band counts as boundary

// Forward recursion via the zeta products z_1 = c_1, z_j = (1-c_{j-1}) c_j and
// the three-term Jacobi walk; cancellation-free (sums/products of positives).
void forward_transform(const std::vector<hp_real>& c, std::vector<hp_real>& m_out) {
  const std::size_t K = c.size();
  m_out.assign(K, hp_real(0));
  if (K == 0) return;
  std::vector<hp_real> z(K + 1, hp_real(0));
  z[1] = c[0];
  for (std::size_t j = 2; j <= K; ++j) z[j] = (hp_real(1) - c[j - 2]) * c[j - 1];
  const std::size_t levels = K / 2 + 1;
  std::vector<hp_real> alpha(levels, hp_real(0)), beta(levels, hp_real(0));
  for (std::size_t i = 0; i < levels; ++i) {
    hp_real a = 0;
    if (2 * i >= 1 && 2 * i <= K) a += z[2 * i];
    if (2 * i + 1 <= K) a += z[2 * i + 1];
    alpha[i] = a;
    if (i >= 1 && 2 * i <= K) beta[i] = z[2 * i - 1] * z[2 * i];
  }
  std::vector<hp_real> v(levels, hp_real(0)), w(levels, hp_real(0));
  v[0] = 1;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < levels; ++i) {
      hp_real acc = alpha[i] * v[i];
      if (i + 1 < levels) acc += v[i + 1];
      if (i >= 1) acc += beta[i] * v[i - 1];
      w[i] = acc;
    }
    v.swap(w);
    m_out[k] = v[0];
  }
}

std::vector<hp_real> to_hp(const std::vector<double>& c) {
  return std::vector<hp_real>(c.begin(), c.end());
}

void check_canonical_range(const CanonicalMoments& c) {
  for (std::size_t i = 0; i < c.c.size(); ++i) {
    const double ci = c.c[i];
    if (!(ci >= 0.0 && ci <= 1.0))
      throw std::invalid_argument("canonical moment c_" + std::to_string(i + 1) +
                                  " outside [0,1]");
  }
}

}  // namespace

OrdinaryMoments::OrdinaryMoments(const std::vector<double>& m)
    : m_(m.begin(), m.end()) {}

OrdinaryMoments OrdinaryMoments::from_raw(std::vector<hp_real> m) {
  OrdinaryMoments out;
  out.m_ = std::move(m);
  return out;
}

double OrdinaryMoments::operator[](std::size_t i) const {
  return static_cast<double>(m_.at(i));
}

std::vector<double> OrdinaryMoments::values() const {
  std::vector<double> out(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) out[i] = static_cast<double>(m_[i]);
  return out;
}

OrdinaryMoments canonical_to_ordinary(const CanonicalMoments& c) {
  check_canonical_range(c);
  std::vector<hp_real> m;
  forward_transform(to_hp(c.c), m);
  return OrdinaryMoments::from_raw(std::move(m));
}

CanonicalMoments ordinary_to_canonical(const OrdinaryMoments& m) {
  const std::size_t K = m.size();
  CanonicalMoments out;
  out.c.reserve(K);
  std::vector<hp_real> prefix;  // accepted canonical components
  std::vector<hp_real> m_lo;
  hp_real delta = 1;  // prod_j c_j (1 - c_j) over the prefix
  for (std::size_t k = 0; k < K; ++k) {
    // attainable range of m_{k+1}: endpoints are the appended c = 0 / c = 1 values
    prefix.push_back(hp_real(0));
    forward_transform(prefix, m_lo);
    const hp_real lower = m_lo[k];
    const hp_real mk = m.raw()[k];
    const hp_real ck = (mk - lower) / delta;  // width of the range is delta
    const double ck_d = static_cast<double>(ck);
    if (ck_d < -kBoundaryBand || ck_d > 1.0 + kBoundaryBand)
      throw moment_space_error(k + 1, "m_" + std::to_string(k + 1) +
                                          " outside its attainable range");
    if (ck_d <= kBoundaryBand || ck_d >= 1.0 - kBoundaryBand) {
      // boundary: the measure has finite support and every later moment is
      // determined; verify them before returning the truncated sequence
      const double boundary = ck_d <= kBoundaryBand ? 0.0 : 1.0;
      prefix.back() = hp_real(boundary);
      prefix.resize(K, hp_real(0.5));  // post-boundary components are inert
      std::vector<hp_real> m_det;
      forward_transform(prefix, m_det);
      for (std::size_t j = k + 1; j < K; ++j) {
        if (std::abs(static_cast<double>(m.raw()[j] - m_det[j])) > kBoundaryBand)
          throw moment_space_error(
              j + 1, "m_" + std::to_string(j + 1) +
                         " inconsistent with the boundary point reached at m_" +
                         std::to_string(k + 1));
      }
      out.c.push_back(boundary);
      out.terminated_at = k;
      return out;
    }
    out.c.push_back(ck_d);
    prefix.back() = ck;
    delta *= ck * (hp_real(1) - ck);
  }
  return out;
}

MomentRange moment_bounds(const std::vector<double>& m_prefix) {
  CanonicalMoments c = ordinary_to_canonical(OrdinaryMoments(m_prefix));
  std::vector<hp_real> work = to_hp(c.c);
  work.resize(m_prefix.size(), hp_real(0.5));  // inert if the prefix terminated
  std::vector<hp_real> m;
  work.push_back(hp_real(0));
  forward_transform(work, m);
  const double lower = static_cast<double>(m.back());
  work.back() = hp_real(1);
  forward_transform(work, m);
  const double upper = static_cast<double>(m.back());
  return {lower, upper};
}

std::vector<double> scale_moments(const OrdinaryMoments& m, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("u must be positive");
  std::vector<double> out(m.size());
  double power = 1.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    power *= u;
    out[k] = power * m[k];
  }
  return out;
}

double log_jacobian_canonical_to_ordinary(const CanonicalMoments& c) {
  check_canonical_range(c);
  const std::size_t K = c.size();
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 <= K; ++j) {  // j = 1..K-1, 1-based component c_j
    const double t = c.c[j - 1] * (1.0 - c.c[j - 1]);
    if (t <= 0.0)
      throw std::invalid_argument("Jacobian degenerate at boundary component c_" +
                                  std::to_string(j));
    sum += static_cast<double>(K - j) * std::log(t);
  }
  return sum;
}

bool is_in_moment_space(const std::vector<double>& m) {
  try {
    (void)ordinary_to_canonical(OrdinaryMoments(m));
    return true;
  } catch (const moment_space_error&) {
    return false;
  }
}

}  // namespace bpm
