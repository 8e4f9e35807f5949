#include "fsi/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fsi/errors.hpp"

namespace fsi {
namespace {

void add_centroid(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

void add_s21(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (const auto& p : {std::array<double, 3>{a, a, b}, std::array<double, 3>{a, b, a},
                        std::array<double, 3>{b, a, a}}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

void add_s111(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const auto& p : {std::array<double, 3>{a, b, c}, std::array<double, 3>{a, c, b},
                        std::array<double, 3>{b, a, c}, std::array<double, 3>{b, c, a},
                        std::array<double, 3>{c, a, b}, std::array<double, 3>{c, b, a}}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

}  // namespace

// Orbit parameters solved from the moment equations at 40 digits.
QuadratureRule quad_rule_triangle(int degree) {
  QuadratureRule r;
  switch (degree) {
    case 1:
      r.degree = 1;
      add_centroid(r, 0.5);
      break;
    case 2:
      r.degree = 2;
      add_s21(r, 1.0 / 6.0, 1.0 / 6.0);
      break;
    case 3:
    case 4:
      r.degree = 4;
      add_s21(r, 0.44594849091596488632, 0.11169079483900573285);
      add_s21(r, 0.09157621350977074346, 0.054975871827660933819);
      break;
    case 5:
      r.degree = 5;
      add_centroid(r, 0.1125);
      add_s21(r, 0.47014206410511508977, 0.066197076394253090369);
      add_s21(r, 0.1012865073234563388, 0.062969590272413576298);
      break;
    case 6:
      r.degree = 6;
      add_s21(r, 0.24928674517091042129, 0.058393137863189683013);
      add_s21(r, 0.06308901449150222834, 0.02542245318510340846);
      add_s111(r, 0.053145049844816947353, 0.31035245103378440542, 0.041425537809186787597);
      break;
    case 7:
    case 8:
      r.degree = 8;
      add_centroid(r, 0.072157803838893584126);
      add_s21(r, 0.45929258829272315603, 0.047545817133642312397);
      add_s21(r, 0.17056930775176020662, 0.051608685267359125141);
      add_s21(r, 0.050547228317030975458, 0.016229248811599040155);
      add_s111(r, 0.0083947774099576053372, 0.26311282963463811342, 0.013615157087217497132);
      break;
    default:
      throw ConfigError("unsupported triangle quadrature degree " + std::to_string(degree));
  }
  return r;
}

LineRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one point");
  LineRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.points[i] = 0.5 * (1.0 - x);
    r.points[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[i] = 0.5 * w;
    r.weights[n - 1 - i] = 0.5 * w;
  }
  return r;
}

}  // namespace fsi
