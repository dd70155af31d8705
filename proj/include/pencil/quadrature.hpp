#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pencil {

/// Composite Simpson over uniformly spaced samples f[0..n]. With an odd number
/// of panels the last panel is a trapezoid. Fewer than two samples give 0.
double simpson(std::span<const double> f, double step);

/// Running integrals F[i] = int_0^{x_i} f, each computed by `simpson` over the
/// first i+1 samples.
std::vector<double> cumulative_simpson(std::span<const double> f, double step);

}  // namespace pencil
