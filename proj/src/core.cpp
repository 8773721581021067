#include "talbot/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace talbot {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::domain_error(std::string(name) + " must be positive and finite");
    }
}

}  // namespace

const ComplexAmplitude& PeriodicObject::coefficient(int n) const {
    if (n < -truncation || n > truncation) {
        throw std::out_of_range("harmonic index outside truncation range");
    }
    return coefficients[static_cast<std::size_t>(n + truncation)];
}

PeriodicObject rect_grating(double period, double duty, int truncation) {
    require_positive(period, "period");
    if (!(duty >= 0.0 && duty <= 1.0)) {
        throw std::domain_error("duty must be within [0, 1]");
    }
    if (truncation < 1) {
        throw std::domain_error("truncation must be >= 1");
    }
    PeriodicObject obj;
    obj.period = period;
    obj.truncation = truncation;
    obj.coefficients.assign(static_cast<std::size_t>(2 * truncation + 1), {0.0, 0.0});
    for (int n = -truncation; n <= truncation; ++n) {
        double c = (n == 0) ? duty : std::sin(kPi * n * duty) / (kPi * n);
        obj.coefficients[static_cast<std::size_t>(n + truncation)] = {c, 0.0};
    }
    return obj;
}

ComplexAmplitude evaluate_object(const PeriodicObject& obj, double x) {
    if (!(obj.period > 0.0)) {
        throw std::domain_error("object period must be positive");
    }
    // Reduce into [0, a) first; fmod is exact, so all positions that reduce
    // to the same representative produce bit-identical sums.
    double r = std::fmod(x, obj.period);
    if (r < 0.0) r += obj.period;
    if (r == 0.0) r = 0.0;  // canonicalize -0.0
    const double frac = r / obj.period;
    ComplexAmplitude acc{0.0, 0.0};
    const int N = obj.truncation;
    for (int n = -N; n <= N; ++n) {
        // Keep the phase argument reduced so large |n| does not degrade it.
        const double turns = std::remainder(n * frac, 1.0);
        const double phase = -2.0 * kPi * turns;
        acc += obj.coefficients[static_cast<std::size_t>(n + N)] *
               ComplexAmplitude{std::cos(phase), std::sin(phase)};
    }
    return acc;
}

double classical_talbot_length(double period, double lambda) {
    require_positive(period, "period");
    require_positive(lambda, "lambda");
    return 2.0 * period * period / lambda;
}

double imaging_talbot_length(double period, double lambda_s) {
    return classical_talbot_length(period, lambda_s);
}

double litho_talbot_length(double period, double lambda) {
    require_positive(period, "period");
    require_positive(lambda, "lambda");
    return period * period / lambda;
}

int paraxial_max_order(double period, double lambda, double z, double tol) {
    require_positive(period, "period");
    require_positive(lambda, "lambda");
    require_positive(z, "z");
    require_positive(tol, "tol");
    // Solve z * (n*lambda/a)^4 / 8 <= tol for the largest integer n.
    const double bound = std::sqrt(std::sqrt(8.0 * tol / z)) * (period / lambda);
    if (!(bound < static_cast<double>(kParaxialOrderCap))) {
        return kParaxialOrderCap;
    }
    int n = static_cast<int>(std::floor(bound));
    // floor() of a value computed with rounding can sit one below the true
    // integer answer; accept n+1 when it still satisfies the criterion.
    const auto ok = [&](int k) {
        const double s = static_cast<double>(k) * lambda / period;
        return z * (s * s) * (s * s) / 8.0 <= tol;
    };
    while (n > 0 && !ok(n)) --n;
    while (n < kParaxialOrderCap && ok(n + 1)) ++n;
    return n;
}

double coefficient_power_sum(const PeriodicObject& obj) {
    double sum = 0.0;
    for (const auto& c : obj.coefficients) sum += std::norm(c);
    return sum;
}

}  // namespace talbot
