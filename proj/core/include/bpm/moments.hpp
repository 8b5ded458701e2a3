#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpm/precision.hpp"

namespace bpm {

// Point in C_{M*} = [0,1]^{M*}, the box reparameterization of the truncated
// moment space.  A boundary component (0 or 1) terminates the sequence: the
// underlying distribution is then a unique finite atom mixture and later
// components are meaningless; such sequences carry terminated_at.
struct CanonicalMoments {
  std::vector<double> c;
  std::optional<std::size_t> terminated_at;  // 0-based index of the boundary hit

  CanonicalMoments() = default;
  explicit CanonicalMoments(std::vector<double> values) : c(std::move(values)) {}
  std::size_t size() const { return c.size(); }
};

// Ordinary moments m_1..m_{M*} of a probability distribution on [0,1]
// (m_0 = 1 implicit).  Stored in extended precision so that inversion back
// to canonical moments stays within the documented roundtrip bound.
class OrdinaryMoments {
 public:
  OrdinaryMoments() = default;
  explicit OrdinaryMoments(const std::vector<double>& m);
  static OrdinaryMoments from_raw(std::vector<hp_real> m);

  std::size_t size() const { return m_.size(); }
  double operator[](std::size_t i) const;  // m_{i+1} rounded to double
  std::vector<double> values() const;
  const std::vector<hp_real>& raw() const { return m_; }

 private:
  std::vector<hp_real> m_;
};

struct MomentRange {
  double lower;  // m^-_{k+1}
  double upper;  // m^+_{k+1}
};

// Thrown when a moment vector leaves the truncated moment space; index is the
// first violated moment index (1-based).
class moment_space_error : public std::runtime_error {
 public:
  moment_space_error(std::size_t violated_index, const std::string& what)
      : std::runtime_error(what), index(violated_index) {}
  std::size_t index;
};

OrdinaryMoments canonical_to_ordinary(const CanonicalMoments& c);

// Inverse of canonical_to_ordinary.  Interior sequences roundtrip within
// 1e-10 in max norm; boundary sequences come back truncated with a
// termination flag; vectors outside the moment space throw.
CanonicalMoments ordinary_to_canonical(const OrdinaryMoments& m);

// Attainable range of m_{k+1} given the prefix m_1..m_k (empty prefix -> (0,1)).
MomentRange moment_bounds(const std::vector<double>& m_prefix);

// Moments of G̃_u: (u m_1, u^2 m_2, ..., u^{M*} m_{M*}).
std::vector<double> scale_moments(const OrdinaryMoments& m, double u);

// log|det dm/dc| = sum_{j=1}^{M*-1} (M*-j) log(c_j (1-c_j)); the matrix is
// lower triangular in recursion order.
double log_jacobian_canonical_to_ordinary(const CanonicalMoments& c);

bool is_in_moment_space(const std::vector<double>& m);

}  // namespace bpm
