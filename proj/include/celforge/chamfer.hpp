#pragma once

#include <cmath>

#include "celforge/distance.hpp"

namespace celforge {

// "Diameter" used in the chamfer normalization.  Diagonal is the default;
// max(H, W) is kept for sensitivity checks.
enum class ChamferDiameter { Diagonal, MaxSide };

struct ChamferOptions {
  ChamferDiameter diameter = ChamferDiameter::Diagonal;
};

// CD = (sum x0*DT(x1) + sum x1*DT(x0)) / (2*H*W*D).  Symmetric, >= 0,
// zero iff the sketches are identical.  Blank sketches are an error so
// callers must decide their own policy for blank frames.
inline double chamfer(const BinarySketch& x0, const BinarySketch& x1,
                      const ChamferOptions& opts = {}, const Parallel& par = {}) {
  if (!x0.same_extent(x1))
    throw InvalidInput("chamfer: sketch dimensions differ");
  if (x0.empty_mask() || x1.empty_mask())
    throw EmptySketchError("chamfer: sketch has no line pixels");

  const DistanceField dt0 = edt(x0, par);
  const DistanceField dt1 = edt(x1, par);
  double sum = 0.0;
  const std::size_t n = x0.bits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (x0.bits[i]) sum += dt1.values[i];
    if (x1.bits[i]) sum += dt0.values[i];
  }
  const double h = x0.height, w = x0.width;
  const double diameter = opts.diameter == ChamferDiameter::Diagonal
                              ? std::sqrt(h * h + w * w)
                              : std::max(h, w);
  return sum / (2.0 * h * w * diameter);
}

}  // namespace celforge
