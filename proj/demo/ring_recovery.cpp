// Observe one agent of a 12-node ring running continuous-time consensus and
// recover the eigenvalues visible from that agent.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numbers>

#include "lapspec/lapspec.hpp"

int main() {
  using namespace lapspec;
#if defined(LAPSPEC_HAS_QUAD)
  using S = quad;
#else
  using S = double;
#endif
  const int n = 12;
  const auto g = generate_ring(n);
  const auto L = laplacian<S>(g, LaplacianKind::Combinatorial);
  const auto obs = random_observation<S>(n, 7, ObservationMode::single(1));
  const auto series = simulate_ct_integrator(L, obs, S(1), 2 * n);

  const auto est = recover_ct_spectrum(series);
  std::cout << "Hankel rank " << est.rank << ", " << est.samples_consumed << " samples used\n";
  std::cout << std::setprecision(12);
  for (const S& lam : est.eigenvalues) {
    // The ring spectrum is 2 - 2 cos(2 pi k / n); show the nearest k.
    const double x = to_double(lam);
    const double k = std::acos(std::clamp(1.0 - x / 2.0, -1.0, 1.0)) * n / (2 * std::numbers::pi);
    std::cout << "  lambda = " << x << "   (k ~ " << std::round(k) << ")\n";
  }
}
