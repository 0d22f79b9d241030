// Shared quadrature for the singular kernels |sin|^t and |cos|^t with
// t in (-1,0], plus the real zeta evaluation used by the kernel series.
// Every potential in the project funnels through these routines so the
// transfer-operator side and the Fourier side agree on kernel masses.
#pragma once

#include <functional>

namespace projlab {

// Adaptive Simpson on a smooth integrand; absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48);

// Integral over [a,b] of g(x) |x - s0|^t with g smooth and t in (-1,0].
// The pure power part is integrated exactly; the remainder (which vanishes
// like |x-s0|^{1+t}) goes through adaptive Simpson.
double quad_power_singular(const std::function<double(double)>& g, double t, double s0,
                           double a, double b, double tol = 1e-10);

// Integral over [lo,hi] (radians, any reals) of |sin u|^t, splitting at the
// zeros of sin inside the interval. Exact building block for kernel cell
// masses; |cos|^t integrals are the same with a pi/2 shift.
double integral_abs_sin_pow(double t, double lo, double hi, double tol = 1e-10);

// C_{lambda,t} = (2/pi) * int_0^{pi/2} sin(x)^t dx, by quadrature.
double lambda_constant(double t);

// Same constant in closed form via log-Gamma; used as an independent oracle.
double lambda_constant_gamma(double t);

// Riemann zeta for real s != 1 (Euler-Maclaurin; accurate to ~1e-14).
double riemann_zeta(double s);

}  // namespace projlab
