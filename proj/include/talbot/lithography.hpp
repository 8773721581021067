#pragma once

#include <vector>

#include "talbot/core.hpp"
#include "talbot/imaging.hpp"

namespace talbot {

// Two-photon lithography arrangement: the degenerate pair illuminates the
// object together and both photons travel the same distance d_0 to the
// two-photon-sensitive recording plane.
struct LithoGeometry {
    double d_0 = 0.0;     // object -> detectors, meters
    double lambda = 0.0;  // degenerate wavelength, meters
};

void validate_geometry(const LithoGeometry& geom);

// Transverse two-photon amplitude of the lithography configuration:
//   B(x1,x2) = sum_n c_n^2 * exp(-i 2 pi n^2 lambda d_0 / a^2)
//                        * exp(+i 2 pi n (x1 + x2) / a)
// Depends on the detector coordinates only through u = x1 + x2, which is
// what doubles the printed resolution under a synchronous scan.
ComplexAmplitude litho_correlation_amplitude(const PeriodicObject& obj,
                                             const LithoGeometry& geom,
                                             double x1, double x2);

// |B(x1,x2)|^2, un-normalized.
double litho_coincidence_rate(const PeriodicObject& obj, const LithoGeometry& geom,
                              double x1, double x2);

// Distances d_0 in [d_0_min, d_0_max] where q = 2 lambda d_0 / a^2 is a
// positive integer. Even q gives a Direct revival (all localization phases
// unity), odd q a HalfShifted one (phases (-1)^n). index_m = q/2, so plane
// spacing is a^2/(2 lambda) -- half the imaging configuration's spacing.
std::vector<PlaneInfo> litho_revival_planes(const PeriodicObject& obj, double lambda,
                                            double d_0_min, double d_0_max);

}  // namespace talbot
