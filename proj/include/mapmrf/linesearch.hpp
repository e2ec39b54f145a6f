#pragma once

#include <vector>

#include "mapmrf/model.hpp"

namespace mapmrf {

/// Coefficients (low order first) of p(alpha) = E(x + alpha * r), a
/// polynomial of degree at most the model degree. The constant term is E(x)
/// exactly; the rest are recovered from p evaluated at the fixed probe
/// points k/D, k = 1..D.
std::vector<double> poly_coeffs_probed(const MrfModel& model, const ContinuousAssignment& x,
                                       const BlockVector& r);

/// Closed-form quadratic coefficients {C, B, A} for models of degree <= 2.
std::vector<double> poly_coeffs_pairwise(const MrfModel& model, const ContinuousAssignment& x,
                                         const BlockVector& r);

/// Dispatches to the pairwise closed form when the degree allows, otherwise
/// to probe recovery.
std::vector<double> poly_coeffs(const MrfModel& model, const ContinuousAssignment& x,
                                const BlockVector& r);

double eval_poly(const std::vector<double>& coeffs, double alpha);

/// Global minimizer of the polynomial over [0, 1]. Degree <= 3 is solved in
/// closed form through the derivative roots plus endpoints; higher degrees
/// fall back to an exhaustive scan with the given increment. Ties prefer the
/// smaller alpha, so a flat polynomial yields 0.
double minimize_poly(const std::vector<double>& coeffs, double scan_delta = 1e-4);

/// argmin over [0, 1] of E(x + alpha * r).
double line_search(const MrfModel& model, const ContinuousAssignment& x, const BlockVector& r,
                   double scan_delta = 1e-4);

}  // namespace mapmrf
