#pragma once

#include <vector>

#include "loopmaps/mapcount.hpp"
#include "loopmaps/ringgen.hpp"

namespace loopmaps::gasket {

// A loop model: loop fugacity n, bare face weights, and the ring family
// weighting the visited annuli. Cutting out the outermost loops reduces it
// to plain maps with effective face weights fixed by
//   g_k = g_k^0 + n sum_{k'} A_{k,k'} F_{k'}(g_1, g_2, ...).
struct LoopModel {
  double n = 0;
  mapcount::WeightProfile bare;
  ringgen::RingFamily rings;
};

struct FixedPointOptions {
  int K = 40;          // hole-degree truncation
  double tol = 1e-10;  // residual target on the weight vector
  int max_picard = 500;
  int max_newton = 25;
};

struct EffectiveWeights {
  std::vector<double> g;  // effective g_k, k = 1..K
  int iterations = 0;
  double residual = 0;
  // Certified bound on everything the truncation drops (inner sums beyond
  // k' = K and effective weights beyond k = K), from the exponentiation
  // geometry of the ring family.
  double tail_estimate = 0;

  mapcount::WeightProfile profile() const { return mapcount::WeightProfile(g); }
};

// Damped Picard iteration with a finite-difference Newton fallback when
// Picard stalls. Throws std::domain_error with a "beyond critical surface"
// diagnostic when the iteration diverges, and "K too small" when the tail
// certificate exceeds the tolerance.
EffectiveWeights fixed_point_weights(const LoopModel& m, FixedPointOptions opt = {});

// Formal counterpart: everything exact, graded by total face count (rings
// contribute their face count, so each order of g_k depends on strictly
// lower orders). n_factor is either a constant series or a marker variable.
struct FormalLoopModel {
  qseries::TruncatedSeries n_factor;
  mapcount::FormalWeights bare;
  ringgen::RingFamily rings;
};

mapcount::FormalWeights fixed_point_weights_formal(const FormalLoopModel& m);

// Loop-model disk function F_p as an exact series in the size marker.
qseries::TruncatedSeries loop_disk_series(const FormalLoopModel& m, int p);

struct PotentialParts {
  double v0_prime = 0;   // x - sum g_k^0 x^{k-1}
  double v_prime = 0;    // x - sum g_k x^{k-1} with effective weights
  double ring_term = 0;  // (1/2 pi i) contour integral A(x,y) W(y) dy
};

// The ring term is evaluated by residues: -x s'(x) W(s(x)) + x s''(x)/(2 s'(x)).
PotentialParts loop_potential(const LoopModel& m, const EffectiveWeights& ew, double x);

// Residual of W(x+i0)+W(x-i0) - n s'(x) W(s(x)) = V_0'(x) - n s''(x)/(2 s'(x))
// for x strictly inside the cut of the effective model; requires s(x) outside
// the cut.
double one_pole_residual(const LoopModel& m, const EffectiveWeights& ew, double x,
                         double tol = 1e-10);

}  // namespace loopmaps::gasket
