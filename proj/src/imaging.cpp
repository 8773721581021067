#include "talbot/imaging.hpp"

#include <algorithm>
#include <cmath>

namespace talbot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

ComplexAmplitude unit_phase(double angle) {
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

void validate_geometry(const ImagingGeometry& geom) {
    if (!(geom.pair.lambda_s > 0.0) || !(geom.pair.lambda_i > 0.0)) {
        throw std::domain_error("wavelengths must be positive");
    }
    if (!(geom.d_s1 >= 0.0)) throw std::domain_error("d_s1 must be >= 0");
    if (!(geom.d_s2 > 0.0)) throw std::domain_error("d_s2 must be > 0");
    if (!(geom.d_i >= 0.0)) throw std::domain_error("d_i must be >= 0");
}

double effective_distance(const ImagingGeometry& geom) {
    validate_geometry(geom);
    const double z2 = geom.conjugate_distance();
    if (z2 == 0.0) return 0.0;
    return 1.0 / (1.0 / geom.d_s2 + 1.0 / z2);
}

ComplexAmplitude correlation_amplitude(const PeriodicObject& obj,
                                       const ImagingGeometry& geom,
                                       double x1, double x2) {
    validate_geometry(geom);
    const double a = obj.period;
    const double z2 = geom.conjugate_distance();
    if (z2 == 0.0 && x2 != 0.0) {
        throw DegenerateGeometryError(
            "idler conjugate distance is zero: x2 offset has no image plane");
    }
    // Z_eff * (x1/d_s2 + x2/Z2) == (Z2*x1 + d_s2*x2) / (Z2 + d_s2); the
    // grouped form keeps the synchronous scan (x1 = x2 = x) exact: the
    // linear phase is then x/a turns with no cancellation error.
    const double t = (z2 * x1 + geom.d_s2 * x2) / ((z2 + geom.d_s2) * a);
    const double z_eff = effective_distance(geom);
    const double chi = geom.pair.lambda_s * z_eff / (a * a);

    ComplexAmplitude acc{0.0, 0.0};
    const int N = obj.truncation;
    for (int n = -N; n <= N; ++n) {
        // Both phases are reduced before scaling by pi so that revival
        // planes (where n^2*chi is an even integer) come out exact.
        const double loc_turns = std::remainder(static_cast<double>(n) * n * chi, 2.0);
        const double lin_turns = std::remainder(n * t, 1.0);
        const double angle = -kPi * loc_turns + 2.0 * kPi * lin_turns;
        acc += obj.coefficients[static_cast<std::size_t>(n + N)] * unit_phase(angle);
    }
    return acc;
}

double coincidence_rate(const PeriodicObject& obj, const ImagingGeometry& geom,
                        double x1, double x2) {
    return std::norm(correlation_amplitude(obj, geom, x1, x2));
}

std::vector<PlaneInfo> self_image_planes(const PeriodicObject& obj,
                                         const ImagingGeometry& geom_base,
                                         double d_i_min, double d_i_max) {
    validate_geometry(geom_base);
    if (!(d_i_min <= d_i_max)) {
        throw std::domain_error("d_i range must be well-ordered");
    }
    const double a = obj.period;
    const double ls = geom_base.pair.lambda_s;
    const double li = geom_base.pair.lambda_i;
    const double inv_signal = 1.0 / (ls * geom_base.d_s2);

    std::vector<PlaneInfo> planes;
    for (int k = 1;; ++k) {
        const double m = 0.5 * k;
        const double target = 1.0 / (2.0 * m * a * a);
        // Need 1/(ls*ds1 + li*d_i) = target - inv_signal > 0, so the series
        // of planes ends once m reaches ls*d_s2 / (2 a^2).
        const double rest = target - inv_signal;
        if (!(rest > 0.0)) break;
        const double d_i = (1.0 / rest - ls * geom_base.d_s1) / li;
        if (d_i > d_i_max) break;  // d_i grows monotonically with m
        if (d_i >= d_i_min && d_i >= 0.0) {
            PlaneInfo info;
            info.position = d_i;
            info.index_m = m;
            info.classification = (k % 2 == 0) ? PlaneKind::Direct : PlaneKind::HalfShifted;
            planes.push_back(info);
        }
    }
    std::sort(planes.begin(), planes.end(),
              [](const PlaneInfo& p, const PlaneInfo& q) { return p.position < q.position; });
    return planes;
}

double magnification(const ImagingGeometry& geom, ScanMode mode) {
    validate_geometry(geom);
    const double z2 = geom.conjugate_distance();
    switch (mode) {
        case ScanMode::ScanIdler:
            return 1.0 + z2 / geom.d_s2;
        case ScanMode::ScanSignal:
            if (z2 == 0.0) {
                throw DegenerateGeometryError(
                    "idler conjugate distance is zero: signal-scan magnification diverges");
            }
            return 1.0 + geom.d_s2 / z2;
        case ScanMode::Synchronous:
            return 1.0;
    }
    throw std::domain_error("unknown scan mode");
}

double singles_rate(const PeriodicObject& obj, double /*x1*/) {
    return coefficient_power_sum(obj);
}

}  // namespace talbot
