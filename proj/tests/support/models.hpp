// Hand-built models with known coefficients, for tests that need exact
// parameters rather than estimates.
#pragma once

#include <array>
#include <vector>

#include "parpmon/parp.hpp"

namespace handmade {

inline parpmon::PeriodicModel par(const std::array<std::vector<double>, 12>& phi, const std::array<double, 12>& mean,
                                  const std::array<double, 12>& stdev, double resid_std) {
  parpmon::PeriodicModel m;
  m.kind = parpmon::ModelKind::kParp;
  for (int i = 0; i < 12; ++i) {
    m.phi[i] = phi[i];
    m.orders[i] = static_cast<int>(phi[i].size());
    m.stats.mean[i] = mean[i];
    m.stats.std[i] = stdev[i];
    m.stats.count[i] = 100;
    m.resid_std[i] = resid_std;
  }
  return m;
}

inline parpmon::PeriodicModel flat_par1(double phi, double mean, double stdev, double resid_std) {
  std::array<std::vector<double>, 12> p;
  std::array<double, 12> mu, sd;
  for (int i = 0; i < 12; ++i) {
    p[i] = {phi};
    mu[i] = mean;
    sd[i] = stdev;
  }
  return par(p, mu, sd, resid_std);
}

/// Adds an annual term with the given coefficient and normalizers.
inline parpmon::PeriodicModel with_annual(parpmon::PeriodicModel m, double psi, double a_mean, double a_std) {
  m.kind = parpmon::ModelKind::kParpA;
  parpmon::AnnualStats an;
  an.window = 12;
  an.a_mean.fill(a_mean);
  an.a_std.fill(a_std);
  an.count.fill(100);
  m.annual = an;
  m.psi.fill(psi);
  return m;
}

}  // namespace handmade
