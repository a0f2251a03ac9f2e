#pragma once

// Test-only oracles. These stay independent of the library's integration and
// gradient code paths so they can vouch for them.

#include <functional>

#include "jacnet/linalg.hpp"

namespace oracle {

// Central finite differences of a scalar function of a flat vector.
inline jacnet::Vector fd_grad(const std::function<double(const jacnet::Vector&)>& f,
                              const jacnet::Vector& theta0, double h = 1e-5) {
  jacnet::Vector g(theta0.size());
  jacnet::Vector th = theta0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double keep = th[i];
    th[i] = keep + h;
    const double up = f(th);
    th[i] = keep - h;
    const double dn = f(th);
    th[i] = keep;
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

// Composite trapezoid rule over t in [0,1] for a vector-valued integrand.
inline jacnet::Vector trapezoid(const std::function<jacnet::Vector(double)>& g, int n) {
  jacnet::Vector acc = g(0.0);
  for (double& v : acc) v *= 0.5;
  for (int i = 1; i < n; ++i) {
    const jacnet::Vector gi = g(static_cast<double>(i) / n);
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += gi[c];
  }
  const jacnet::Vector gn = g(1.0);
  for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += 0.5 * gn[c];
  for (double& v : acc) v /= n;
  return acc;
}

// inf-norm error of a against reference b, relative to b's magnitude.
inline double rel_err_inf(const jacnet::Vector& a, const jacnet::Vector& b,
                          double floor = 1e-12) {
  double diff = 0.0;
  double mag = floor;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    mag = std::max(mag, std::abs(b[i]));
  }
  return diff / mag;
}

}  // namespace oracle
