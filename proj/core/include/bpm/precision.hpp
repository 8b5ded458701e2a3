#pragma once

namespace bpm {

// Extended-precision scalar used inside the moment transforms.  The forward
// canonical->ordinary recursion is cancellation-free, but its inverse divides
// by Delta_k = prod_j c_j(1-c_j); in double precision the roundtrip drifts
// past 1e-10 already around M* = 8.  Quad precision keeps it intact to M* = 30.
#if defined(__SIZEOF_FLOAT128__)
using hp_real = __float128;
#else
using hp_real = long double;
#endif

}  // namespace bpm
