#include "pencil/quadrature.hpp"

namespace pencil {

double simpson(std::span<const double> f, double step) {
  if (f.size() < 2) return 0.0;
  const std::size_t panels = f.size() - 1;
  const std::size_t even = panels - panels % 2;
  double acc = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) acc += f[i] + 4.0 * f[i + 1] + f[i + 2];
  acc *= step / 3.0;
  if (even != panels) acc += 0.5 * step * (f[panels - 1] + f[panels]);
  return acc;
}

std::vector<double> cumulative_simpson(std::span<const double> f, double step) {
  std::vector<double> out(f.size(), 0.0);
  // even prefix sums are exact Simpson; odd ones add a trapezoid panel
  double even_sum = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (i % 2 == 0) {
      even_sum += step / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
      out[i] = even_sum;
    } else {
      out[i] = even_sum + 0.5 * step * (f[i - 1] + f[i]);
    }
  }
  return out;
}

}  // namespace pencil
