#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "talbot/core.hpp"
#include "talbot/imaging.hpp"
#include "talbot/lithography.hpp"

namespace talbot {

// Raised when the requested node spacing cannot resolve the integrand's
// local oscillation (Nyquist bound violated). Runtime failure, CLI exit 1.
class QuadratureError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Finite-support stand-in for the infinite periodic object: W full periods
// centered on the origin, sampled at uniform midpoint nodes for composite
// midpoint quadrature. Node amplitudes equal evaluate_object exactly.
struct WindowedObject {
    PeriodicObject base;
    int window_periods = 0;      // W >= 1
    int samples_per_period = 0;  // >= 16
    std::vector<double> nodes;              // midpoint positions, ascending
    std::vector<ComplexAmplitude> samples;  // object amplitude at each node

    WindowedObject(PeriodicObject base_obj, int window, int per_period);

    double node_spacing() const { return base.period / samples_per_period; }
    double half_width() const { return 0.5 * window_periods * base.period; }
};

// Optional smooth edge taper for the quadrature window: amplitude weight 1
// on the inner (1 - 2*fraction) share of the window, falling as cos^2 to 0
// at the edges. 0 disables it (the default). Suppresses the edge-diffraction
// waves of the finite window, which otherwise dominate comparison error;
// all thresholds quoted by the verification command assume a tapered window.
// Central-region values are unaffected to the quoted tolerances.
double edge_taper_weight(const WindowedObject& wobj, double position, double fraction);

// First-order Fresnel propagation of the windowed object to distance z:
//   u(x) = h/sqrt(lambda z) * sum_j w_j A(rho_j) exp(i pi (x - rho_j)^2/(lambda z))
// The constant makes a fully transparent object give |u| = 1. Summation is
// a fixed ascending pass over nodes, so results are bit-deterministic.
// Throws QuadratureError unless spacing^2 < lambda*z/4.
std::vector<ComplexAmplitude> classical_propagate(const WindowedObject& wobj,
                                                  double lambda, double z,
                                                  const std::vector<double>& xs,
                                                  double apodization = 0.0);

// Brute-force counterpart of coincidence_rate: direct quadrature of
//   |int A(rho) exp(i pi rho^2 (1/d_s2 + 1/Z2)/lambda_s)
//             exp(-i 2 pi rho (x1/d_s2 + x2/Z2)/lambda_s) d rho|^2
// over the window, evaluated at each queried (x1, x2) and normalized to
// unit maximum over the queried set. Requires Z2 > 0.
std::vector<double> imaging_oracle(const WindowedObject& wobj,
                                   const ImagingGeometry& geom,
                                   const std::vector<std::pair<double, double>>& points,
                                   double apodization = 0.0);

// Brute-force counterpart of litho_coincidence_rate, integrating the
// squared transmission:
//   |int A^2(rho) exp(i 2 pi rho^2/(lambda d_0))
//               exp(-i 2 pi rho (x1+x2)/(lambda d_0)) d rho|^2
// normalized to unit maximum over the queried set. Requires d_0 > 0.
// Note this kernel is not algebraically equivalent to the diagonal-series
// fast path; the verification command reports their disagreement without
// asserting a threshold.
std::vector<double> litho_oracle(const WindowedObject& wobj, const LithoGeometry& geom,
                                 const std::vector<std::pair<double, double>>& points,
                                 double apodization = 0.0);

// Mean of |A|^2 over the window (quadrature sum divided by window length);
// the brute-force counterpart of singles_rate.
double singles_oracle(const WindowedObject& wobj);

// Comparison helpers shared by tests and the verification command. The
// metrics compare their inputs as given; rescale with normalize_to_unit_max
// first when a scale-free comparison is wanted.
std::vector<double> normalize_to_unit_max(std::vector<double> values);
double rel_l2_distance(const std::vector<double>& got, const std::vector<double>& want);
double linf_distance(const std::vector<double>& got, const std::vector<double>& want);

}  // namespace talbot
