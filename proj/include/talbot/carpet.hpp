#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "talbot/core.hpp"
#include "talbot/fresnel_oracle.hpp"
#include "talbot/imaging.hpp"
#include "talbot/lithography.hpp"

namespace talbot {

// What varies along the scan grid:
//   ImagingFixedSignal : signal detector parked at x1 = 0, idler scanned in
//                        x; z binds to the idler distance d_i.
//   ImagingSynchronous : both detectors at x1 = x2 = x; z binds to d_i.
//   LithoFixedOne      : one recording coordinate at 0, the other scanned;
//                        z binds to d_0.
//   LithoSynchronous   : both recording coordinates at x; z binds to d_0.
//   ClassicalIntensity : first-order |u(x,z)|^2 via the quadrature
//                        propagator; z is the propagation distance.
enum class CarpetMode {
    ImagingFixedSignal,
    ImagingSynchronous,
    LithoFixedOne,
    LithoSynchronous,
    ClassicalIntensity,
};

// Wavelength carrier for ClassicalIntensity scans (no detector geometry).
struct ClassicalGeometry {
    double lambda = 0.0;
};

struct ScanSpec {
    CarpetMode mode = CarpetMode::ImagingFixedSignal;
    double x_min = 0.0, x_max = 0.0;
    int n_x = 1;
    double z_min = 0.0, z_max = 0.0;
    int n_z = 1;
    PeriodicObject object;
    std::variant<ImagingGeometry, LithoGeometry, ClassicalGeometry> geometry;
    // Quadrature controls, used by ClassicalIntensity only.
    int window_periods = 128;
    int samples_per_period = 64;
    double apodization = 0.0;
    // Worker threads for grid evaluation; 0 means hardware concurrency.
    // Output bytes are identical for every thread count.
    int threads = 0;
};

// Normalized rate map over the scan grid. values is z-major:
// values[iz * n_x + ix] pairs z_axis[iz] with x_axis[ix].
struct Carpet {
    std::vector<double> x_axis;
    std::vector<double> z_axis;
    std::vector<double> values;

    int n_x() const { return static_cast<int>(x_axis.size()); }
    int n_z() const { return static_cast<int>(z_axis.size()); }
    double at(int iz, int ix) const {
        return values[static_cast<std::size_t>(iz) * x_axis.size() +
                      static_cast<std::size_t>(ix)];
    }
};

// Throws std::domain_error on ill-ordered ranges, non-positive counts, or
// a geometry that does not match the mode.
void validate_spec(const ScanSpec& spec);

// Evaluates the mode's rate on the full grid, then rescales so the grid
// maximum is 1 (all-zero grids stay zero). Grid cells are pure pointwise
// evaluations -- no interpolation -- so refining the grid never changes
// values at shared points. Deterministic for any thread count.
Carpet generate_carpet(const ScanSpec& spec);

// One row of the carpet at the grid z nearest to z_value (which must lie
// inside the z range), normalized to that row's own maximum.
std::vector<std::pair<double, double>> transverse_profile(const ScanSpec& spec,
                                                          double z_value);

}  // namespace talbot
