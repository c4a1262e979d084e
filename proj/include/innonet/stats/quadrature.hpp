#pragma once

#include <array>
#include <cmath>

namespace innonet::stats {

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1]: Kronrod abscissae (positive half) and weights.
inline constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                               0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                               0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                               0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                               0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                               0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                               0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss 7-point weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, double& result, double& error) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double rk = fc * kWgk[7], rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    rk += kWgk[j] * s;
    if (j % 2 == 1) rg += kWg[j / 2] * s;
  }
  result = rk * h;
  error = std::abs((rk - rg) * h);
}

template <class F>
double adaptive(F& f, double a, double b, double whole, double err, double tol, int depth) {
  if (err <= tol || depth <= 0 || b - a < 1e-14 * (std::abs(a) + std::abs(b) + 1e-300)) return whole;
  const double m = 0.5 * (a + b);
  double l, le, r, re;
  gk15(f, a, m, l, le);
  gk15(f, m, b, r, re);
  return adaptive(f, a, m, l, le, 0.5 * tol, depth - 1) + adaptive(f, m, b, r, re, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] to absolute tolerance `tol`.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  double whole, err;
  detail::gk15(f, a, b, whole, err);
  return detail::adaptive(f, a, b, whole, err, tol, max_depth);
}

}  // namespace innonet::stats
