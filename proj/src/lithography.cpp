#include "talbot/lithography.hpp"

#include <cmath>

namespace talbot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

ComplexAmplitude unit_phase(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

void validate_geometry(const LithoGeometry& geom) {
    if (!(geom.lambda > 0.0)) throw std::domain_error("lambda must be positive");
    if (!(geom.d_0 >= 0.0)) throw std::domain_error("d_0 must be >= 0");
}

ComplexAmplitude litho_correlation_amplitude(const PeriodicObject& obj,
                                             const LithoGeometry& geom,
                                             double x1, double x2) {
    validate_geometry(geom);
    const double a = obj.period;
    const double u = x1 + x2;
    const double q = geom.lambda * geom.d_0 / (a * a);
    // Reduce the coordinate sum into [0, a) first; fmod is exact, so detector
    // placements whose sums reduce to the same representative produce
    // bit-identical amplitudes (the dependence on u is exactly a-periodic).
    double u_red = std::fmod(u, a);
    if (u_red < 0.0) u_red += a;
    if (u_red == 0.0) u_red = 0.0;  // canonicalize -0.0
    const double u_frac = u_red / a;

    ComplexAmplitude acc{0.0, 0.0};
    const int N = obj.truncation;
    for (int n = -N; n <= N; ++n) {
        const ComplexAmplitude c = obj.coefficients[static_cast<std::size_t>(n + N)];
        // Reduced phases: at revival planes n^2*q is an integer and the
        // localization factor collapses to 1 or (-1)^n without drift.
        const double loc_turns = std::remainder(static_cast<double>(n) * n * q, 1.0);
        const double lin_turns = std::remainder(n * u_frac, 1.0);
        const double angle = -2.0 * kPi * loc_turns + 2.0 * kPi * lin_turns;
        acc += c * c * unit_phase(angle);
    }
    return acc;
}

double litho_coincidence_rate(const PeriodicObject& obj, const LithoGeometry& geom,
                              double x1, double x2) {
    return std::norm(litho_correlation_amplitude(obj, geom, x1, x2));
}

std::vector<PlaneInfo> litho_revival_planes(const PeriodicObject& obj, double lambda,
                                            double d_0_min, double d_0_max) {
    if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
    if (!(d_0_min <= d_0_max)) throw std::domain_error("d_0 range must be well-ordered");
    const double a = obj.period;
    const double half_step = a * a / (2.0 * lambda);  // d_0 distance per unit q

    std::vector<PlaneInfo> planes;
    for (int q = 1;; ++q) {
        const double d_0 = q * half_step;
        if (d_0 > d_0_max) break;
        if (d_0 >= d_0_min) {
            PlaneInfo info;
            info.position = d_0;
            info.index_m = 0.5 * q;
            info.classification = (q % 2 == 0) ? PlaneKind::Direct : PlaneKind::HalfShifted;
            planes.push_back(info);
        }
    }
    return planes;
}

}  // namespace talbot
