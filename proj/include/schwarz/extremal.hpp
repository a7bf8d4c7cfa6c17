#pragma once

// Extremal boundary data for the Schwarz bound and sharpness checks along the
// axis x = rN. For x = RN the data
//
//   f_R(t) = sign(P_R(t) - a*) |P_R(t) - a*|^{q-1}
//
// has zero mean and turns the Holder step into an equality at RN.

#include "schwarz/quadrature.hpp"
#include "schwarz/schwarz_bound.hpp"

namespace schwarz {

struct SharpnessReport {
  double R;
  ExponentPair exponents;
  BallDim dim;
  double lhs;           // u_R(RN)
  double norm;          // ||f_R||_p
  double bound;         // g_p(R)
  double ratio;         // lhs / (norm * bound)
  double origin_value;  // u_R(0)
};

// Requires R in (0, 1) and p > 1. For p = inf the profile is sign(t).
ZonalProfile extremal_boundary(double R, const ExponentPair& ex, BallDim dim,
                               const SolverOptions& opts = {});

// Poisson extension of zonal boundary data evaluated at rN.
double poisson_extend_axial(const ZonalProfile& f, double r, BallDim dim,
                            const SolverOptions& opts = {});

// Boundary L^p(sigma) norm. p = inf is a sup over a dense t-grid plus the
// profile's kinks.
double hp_norm_zonal(const ZonalProfile& f, const ExponentPair& ex, BallDim dim,
                     const SolverOptions& opts = {});

// Throws Inconsistency when the ratio exceeds 1 + kSharpnessTolerance.
SharpnessReport sharpness_report(double R, const ExponentPair& ex, BallDim dim,
                                 const SolverOptions& opts = {});

inline constexpr double kSharpnessTolerance = 1e-6;

// ||Du(0)|| / ||f||_p for the boundary data sign(t)|t|^{q-1}; equals the sharp
// gradient constant. Requires p in (1, inf].
double gradient_extremal_check(const ExponentPair& ex, BallDim dim,
                               const SolverOptions& opts = {});

}  // namespace schwarz
