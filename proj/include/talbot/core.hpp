#pragma once

#include <complex>
#include <vector>

namespace talbot {

using ComplexAmplitude = std::complex<double>;

// Truncated Fourier-series model of a periodic transmission object:
//   A(x) = sum_{n=-N..N} c_n * exp(-i 2*pi*n*x / a)
// Coefficients are stored densely, index n maps to slot n + truncation.
struct PeriodicObject {
    double period = 0.0;                          // a, meters
    int truncation = 0;                           // N >= 1
    std::vector<ComplexAmplitude> coefficients;   // size 2N+1

    const ComplexAmplitude& coefficient(int n) const;
    int max_harmonic() const { return truncation; }
};

// Binary amplitude grating with the open slit centered on x = 0:
//   c_0 = duty, c_n = sin(pi*n*duty) / (pi*n) for n != 0.
// Real, even coefficients (c_n = c_{-n}).
PeriodicObject rect_grating(double period, double duty, int truncation);

// Transmission amplitude at x. The position is reduced modulo the period
// before summation so the result is exactly periodic: evaluating at x and
// at x + k*a (whenever that sum is representable) yields identical bits.
ComplexAmplitude evaluate_object(const PeriodicObject& obj, double x);

// Revival distance of first-order (one-photon) diffraction: 2 a^2 / lambda.
double classical_talbot_length(double period, double lambda);

// Revival scale of the two-photon imaging configuration: 2 a^2 / lambda_s.
double imaging_talbot_length(double period, double lambda_s);

// Revival scale of the two-photon lithography configuration: a^2 / lambda,
// exactly half of classical_talbot_length.
double litho_talbot_length(double period, double lambda);

// Upper bound used when the paraxial criterion does not bind (tol huge or
// z tiny): callers never need more harmonics than this.
inline constexpr int kParaxialOrderCap = 10000;

// Largest diffraction order n whose quartic path-length error stays within
// tol over distance z:  z * (n*lambda/a)^4 / 8 <= tol.
// Result is clamped to [0, kParaxialOrderCap].
int paraxial_max_order(double period, double lambda, double z, double tol);

// sum_n |c_n|^2 over all stored harmonics (mean transmitted power of the
// truncated object; Parseval).
double coefficient_power_sum(const PeriodicObject& obj);

}  // namespace talbot
