#pragma once

#include <stdexcept>
#include <vector>

#include "talbot/core.hpp"

namespace talbot {

// Raised when a geometry collapses (idler-side conjugate distance of zero
// with an off-axis detector, division by a vanishing arm, ...). Maps to a
// runtime failure (CLI exit 1), unlike validation errors (exit 2).
class DegenerateGeometryError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct PhotonPair {
    double lambda_s = 0.0;  // signal wavelength, meters
    double lambda_i = 0.0;  // idler wavelength, meters
};

// Two-photon imaging arrangement: the pair is born at the crystal, the
// signal photon crosses the object after d_s1 and reaches its detector
// after d_s2 more; the idler photon flies d_i straight to its detector.
struct ImagingGeometry {
    double d_s1 = 0.0;  // crystal -> object
    double d_s2 = 0.0;  // object -> signal detector
    double d_i = 0.0;   // crystal -> idler detector
    PhotonPair pair;

    double signal_arm() const { return d_s1 + d_s2; }
    // Distance the idler arm contributes on the object side once its
    // wavelength is referred to the signal's: Z2 = d_s1 + (lambda_i/lambda_s)*d_i.
    double conjugate_distance() const {
        return d_s1 + (pair.lambda_i / pair.lambda_s) * d_i;
    }
};

void validate_geometry(const ImagingGeometry& geom);

// Z_eff = 1 / (1/d_s2 + 1/Z2); returns 0 when Z2 = 0.
double effective_distance(const ImagingGeometry& geom);

// Transverse two-photon amplitude for detectors at x1 (signal) and x2 (idler):
//   B(x1,x2) = sum_n c_n * exp(-i pi n^2 lambda_s Z_eff / a^2)
//                      * exp(+i 2 pi n (Z2*x1 + d_s2*x2) / ((Z2 + d_s2) * a))
// The n^2 factor decides where self-images form; the linear factor carries
// the magnified transverse pattern. Throws DegenerateGeometryError when
// Z2 = 0 and x2 != 0 (the idler coordinate loses meaning there).
ComplexAmplitude correlation_amplitude(const PeriodicObject& obj,
                                       const ImagingGeometry& geom,
                                       double x1, double x2);

// |B(x1,x2)|^2, un-normalized (carpet generation rescales to a grid max).
double coincidence_rate(const PeriodicObject& obj, const ImagingGeometry& geom,
                        double x1, double x2);

enum class PlaneKind { Direct, HalfShifted };

struct PlaneInfo {
    double position = 0.0;   // solved longitudinal coordinate, meters
    double index_m = 0.0;    // self-imaging index (integer or half-odd)
    PlaneKind classification = PlaneKind::Direct;
};

// All idler-detector distances d_i inside [d_i_min, d_i_max] satisfying
//   1/(lambda_s d_s2) + 1/(lambda_s d_s1 + lambda_i d_i) = 1/(2 m a^2)
// for m = k/2, k = 1, 2, ...; integer m gives a Direct plane, half-odd m a
// HalfShifted plane (pattern displaced by half the magnified period).
// Sorted ascending by position; empty when none fall in range.
std::vector<PlaneInfo> self_image_planes(const PeriodicObject& obj,
                                         const ImagingGeometry& geom_base,
                                         double d_i_min, double d_i_max);

enum class ScanMode { ScanIdler, ScanSignal, Synchronous };

// Lateral magnification of the recorded pattern for each scan strategy:
//   ScanIdler    -> 1 + Z2/d_s2     (x1 fixed at 0, x2 scanned)
//   ScanSignal   -> 1 + d_s2/Z2     (x2 fixed at 0, x1 scanned)
//   Synchronous  -> exactly 1       (both detectors move together)
double magnification(const ImagingGeometry& geom, ScanMode mode);

// Single-detector counting rate: the per-period mean of |A_o|^2, i.e.
// sum_n |c_n|^2. Position-independent; x1 exists so flatness is testable
// at the interface.
double singles_rate(const PeriodicObject& obj, double x1);

}  // namespace talbot
