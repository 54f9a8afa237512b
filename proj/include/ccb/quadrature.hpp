#pragma once

#include <functional>

namespace ccb {

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
// Recursion splits until the Richardson error estimate is below the local
// budget; max_depth caps pathological cases.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

} // namespace ccb
