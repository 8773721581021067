#include "talbot/fresnel_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace talbot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_nyquist(double spacing, double lambda_z, const char* what) {
    if (!(spacing * spacing < lambda_z / 4.0)) {
        throw QuadratureError(std::string(what) +
                              ": node spacing too coarse for the kernel oscillation "
                              "(requires spacing^2 < lambda*z/4); increase samples_per_period");
    }
}

// Weighted sample table: object amplitude times taper weight per node.
std::vector<ComplexAmplitude> weighted_samples(const WindowedObject& wobj, double apod) {
    std::vector<ComplexAmplitude> w(wobj.samples);
    if (apod > 0.0) {
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] *= edge_taper_weight(wobj, wobj.nodes[j], apod);
        }
    }
    return w;
}

}  // namespace

WindowedObject::WindowedObject(PeriodicObject base_obj, int window, int per_period)
    : base(std::move(base_obj)), window_periods(window), samples_per_period(per_period) {
    if (window_periods < 1) throw std::domain_error("window_periods must be >= 1");
    if (samples_per_period < 16) throw std::domain_error("samples_per_period must be >= 16");
    if (!(base.period > 0.0)) throw std::domain_error("object period must be positive");
    const std::size_t count =
        static_cast<std::size_t>(window_periods) * static_cast<std::size_t>(samples_per_period);
    const double h = node_spacing();
    const double left = -half_width();
    nodes.resize(count);
    samples.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        nodes[j] = left + (static_cast<double>(j) + 0.5) * h;
        samples[j] = evaluate_object(base, nodes[j]);
    }
}

double edge_taper_weight(const WindowedObject& wobj, double position, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 0.5)) {
        throw std::domain_error("apodization fraction must be within [0, 0.5]");
    }
    if (fraction == 0.0) return 1.0;
    const double R = wobj.half_width();
    const double flat = (1.0 - fraction) * R;
    const double d = std::abs(position);
    if (d <= flat) return 1.0;
    const double t = std::min(1.0, (d - flat) / (fraction * R));
    const double c = std::cos(0.5 * kPi * t);
    return c * c;
}

std::vector<ComplexAmplitude> classical_propagate(const WindowedObject& wobj,
                                                  double lambda, double z,
                                                  const std::vector<double>& xs,
                                                  double apodization) {
    if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
    if (!(z > 0.0)) throw std::domain_error("z must be positive");
    const double h = wobj.node_spacing();
    const double lz = lambda * z;
    check_nyquist(h, lz, "classical_propagate");

    const std::vector<ComplexAmplitude> amp = weighted_samples(wobj, apodization);
    const std::size_t count = amp.size();

    // Split the kernel: exp(i pi (x-rho)^2 / lz) =
    //   exp(i pi x^2/lz) * exp(i pi rho^2/lz) * exp(-i 2 pi x rho / lz).
    // The first two factors are precomputed; the x-dependent linear factor
    // advances by a constant ratio between uniform nodes, so the inner loop
    // is a complex-multiply recurrence (phase drift ~ count * eps, orders of
    // magnitude below quadrature error at these node budgets).
    std::vector<ComplexAmplitude> chirped(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double ph = kPi * wobj.nodes[j] * wobj.nodes[j] / lz;
        chirped[j] = amp[j] * ComplexAmplitude{std::cos(ph), std::sin(ph)};
    }

    const double scale = h / std::sqrt(lz);
    std::vector<ComplexAmplitude> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const double step_ph = -2.0 * kPi * x * h / lz;
        const ComplexAmplitude ratio{std::cos(step_ph), std::sin(step_ph)};
        const double first_ph = -2.0 * kPi * x * wobj.nodes[0] / lz;
        ComplexAmplitude lin{std::cos(first_ph), std::sin(first_ph)};
        ComplexAmplitude acc{0.0, 0.0};
        for (std::size_t j = 0; j < count; ++j) {
            acc += chirped[j] * lin;
            lin *= ratio;
        }
        const double x_ph = kPi * x * x / lz;
        out[i] = acc * ComplexAmplitude{std::cos(x_ph), std::sin(x_ph)} * scale;
    }
    return out;
}

std::vector<double> imaging_oracle(const WindowedObject& wobj,
                                   const ImagingGeometry& geom,
                                   const std::vector<std::pair<double, double>>& points,
                                   double apodization) {
    validate_geometry(geom);
    const double z2 = geom.conjugate_distance();
    if (!(z2 > 0.0)) {
        throw DegenerateGeometryError("imaging oracle requires a positive conjugate distance");
    }
    const double ls = geom.pair.lambda_s;
    const double curvature = 1.0 / geom.d_s2 + 1.0 / z2;  // 1/Z_eff
    check_nyquist(wobj.node_spacing(), ls / curvature, "imaging_oracle");

    const std::vector<ComplexAmplitude> amp = weighted_samples(wobj, apodization);
    const double h = wobj.node_spacing();

    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double X = points[i].first / geom.d_s2 + points[i].second / z2;
        ComplexAmplitude acc{0.0, 0.0};
        for (std::size_t j = 0; j < amp.size(); ++j) {
            const double rho = wobj.nodes[j];
            const double ph = (kPi * rho * rho * curvature - 2.0 * kPi * rho * X) / ls;
            acc += amp[j] * ComplexAmplitude{std::cos(ph), std::sin(ph)};
        }
        out[i] = std::norm(acc * h);
    }
    return normalize_to_unit_max(std::move(out));
}

std::vector<double> litho_oracle(const WindowedObject& wobj, const LithoGeometry& geom,
                                 const std::vector<std::pair<double, double>>& points,
                                 double apodization) {
    validate_geometry(geom);
    if (!(geom.d_0 > 0.0)) {
        throw DegenerateGeometryError("litho oracle requires d_0 > 0");
    }
    const double ld = geom.lambda * geom.d_0;
    // Kernel chirp exp(i 2 pi rho^2 / (lambda d_0)) oscillates twice as fast
    // as the classical one at equal distance.
    check_nyquist(wobj.node_spacing(), 0.5 * ld, "litho_oracle");

    const std::vector<ComplexAmplitude> amp = weighted_samples(wobj, apodization);
    const double h = wobj.node_spacing();

    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double u = points[i].first + points[i].second;
        ComplexAmplitude acc{0.0, 0.0};
        for (std::size_t j = 0; j < amp.size(); ++j) {
            const double rho = wobj.nodes[j];
            const double ph = 2.0 * kPi * rho * (rho - u) / ld;
            acc += amp[j] * amp[j] * ComplexAmplitude{std::cos(ph), std::sin(ph)};
        }
        out[i] = std::norm(acc * h);
    }
    return normalize_to_unit_max(std::move(out));
}

double singles_oracle(const WindowedObject& wobj) {
    double acc = 0.0;
    for (const auto& s : wobj.samples) acc += std::norm(s);
    return acc / static_cast<double>(wobj.samples.size());
}

std::vector<double> normalize_to_unit_max(std::vector<double> values) {
    double mx = 0.0;
    for (double v : values) mx = std::max(mx, v);
    if (mx > 0.0) {
        for (double& v : values) v /= mx;
    }
    return values;
}

double rel_l2_distance(const std::vector<double>& got, const std::vector<double>& want) {
    if (got.size() != want.size() || want.empty()) {
        throw std::domain_error("rel_l2_distance requires equal-size non-empty inputs");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double d = got[i] - want[i];
        num += d * d;
        den += want[i] * want[i];
    }
    if (den == 0.0) throw std::domain_error("rel_l2_distance reference is all zero");
    return std::sqrt(num / den);
}

double linf_distance(const std::vector<double>& got, const std::vector<double>& want) {
    if (got.size() != want.size() || want.empty()) {
        throw std::domain_error("linf_distance requires equal-size non-empty inputs");
    }
    double mx = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        mx = std::max(mx, std::abs(got[i] - want[i]));
    }
    return mx;
}

}  // namespace talbot
