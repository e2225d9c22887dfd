#include "adiabat/quadrature.hpp"

namespace adiabat {

CumulativeResult cumulative_with_check(const Grid& grid, const std::vector<std::complex<double>>& f) {
  CumulativeResult r;
  r.values = cumulative_integral(grid, f);
  const auto trap = cumulative_trapezoid(grid, f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    r.richardson_difference = std::max(r.richardson_difference, std::abs(r.values[k] - trap[k]));
  }
  return r;
}

}  // namespace adiabat
