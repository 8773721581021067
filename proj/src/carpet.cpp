#include "talbot/carpet.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <stdexcept>
#include <thread>

namespace talbot {

namespace {

bool is_imaging_mode(CarpetMode mode) {
    return mode == CarpetMode::ImagingFixedSignal || mode == CarpetMode::ImagingSynchronous;
}

bool is_litho_mode(CarpetMode mode) {
    return mode == CarpetMode::LithoFixedOne || mode == CarpetMode::LithoSynchronous;
}

std::vector<double> make_axis(double lo, double hi, int n) {
    std::vector<double> axis(static_cast<std::size_t>(n));
    if (n == 1) {
        axis[0] = lo;
        return axis;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        // lo + i*step (not accumulated) so shared points of refined grids
        // are computed from identical expressions.
        axis[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
    }
    return axis;
}

// Evaluates one carpet row (fixed z) into out[0..n_x).
void evaluate_row(const ScanSpec& spec, const std::vector<double>& xs, double z,
                  const WindowedObject* wobj, double* out) {
    switch (spec.mode) {
        case CarpetMode::ImagingFixedSignal:
        case CarpetMode::ImagingSynchronous: {
            ImagingGeometry g = std::get<ImagingGeometry>(spec.geometry);
            g.d_i = z;
            const bool sync = spec.mode == CarpetMode::ImagingSynchronous;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out[i] = sync ? coincidence_rate(spec.object, g, xs[i], xs[i])
                              : coincidence_rate(spec.object, g, 0.0, xs[i]);
            }
            return;
        }
        case CarpetMode::LithoFixedOne:
        case CarpetMode::LithoSynchronous: {
            LithoGeometry g = std::get<LithoGeometry>(spec.geometry);
            g.d_0 = z;
            const bool sync = spec.mode == CarpetMode::LithoSynchronous;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                out[i] = sync ? litho_coincidence_rate(spec.object, g, xs[i], xs[i])
                              : litho_coincidence_rate(spec.object, g, 0.0, xs[i]);
            }
            return;
        }
        case CarpetMode::ClassicalIntensity: {
            const auto& g = std::get<ClassicalGeometry>(spec.geometry);
            const auto u = classical_propagate(*wobj, g.lambda, z, xs, spec.apodization);
            for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::norm(u[i]);
            return;
        }
    }
    throw std::domain_error("unknown carpet mode");
}

}  // namespace

void validate_spec(const ScanSpec& spec) {
    if (spec.n_x < 1 || spec.n_z < 1) {
        throw std::domain_error("grid counts must be >= 1");
    }
    if (!(spec.x_min <= spec.x_max) || (spec.n_x > 1 && !(spec.x_min < spec.x_max))) {
        throw std::domain_error("x range must be increasing");
    }
    if (!(spec.z_min <= spec.z_max) || (spec.n_z > 1 && !(spec.z_min < spec.z_max))) {
        throw std::domain_error("z range must be increasing");
    }
    if (!(spec.object.period > 0.0)) {
        throw std::domain_error("scan object must have a positive period");
    }
    if (is_imaging_mode(spec.mode)) {
        if (!std::holds_alternative<ImagingGeometry>(spec.geometry)) {
            throw std::domain_error("imaging scan modes require an imaging geometry");
        }
        if (spec.z_min < 0.0) throw std::domain_error("d_i range must be >= 0");
        ImagingGeometry g = std::get<ImagingGeometry>(spec.geometry);
        g.d_i = spec.z_min;
        validate_geometry(g);
    } else if (is_litho_mode(spec.mode)) {
        if (!std::holds_alternative<LithoGeometry>(spec.geometry)) {
            throw std::domain_error("litho scan modes require a litho geometry");
        }
        if (spec.z_min < 0.0) throw std::domain_error("d_0 range must be >= 0");
        LithoGeometry g = std::get<LithoGeometry>(spec.geometry);
        g.d_0 = spec.z_min;
        validate_geometry(g);
    } else {
        if (!std::holds_alternative<ClassicalGeometry>(spec.geometry)) {
            throw std::domain_error("classical intensity scans require a wavelength geometry");
        }
        if (!(std::get<ClassicalGeometry>(spec.geometry).lambda > 0.0)) {
            throw std::domain_error("lambda must be positive");
        }
        if (!(spec.z_min > 0.0)) {
            throw std::domain_error("classical propagation requires z_min > 0");
        }
    }
}

Carpet generate_carpet(const ScanSpec& spec) {
    validate_spec(spec);
    Carpet carpet;
    carpet.x_axis = make_axis(spec.x_min, spec.x_max, spec.n_x);
    carpet.z_axis = make_axis(spec.z_min, spec.z_max, spec.n_z);
    carpet.values.assign(carpet.x_axis.size() * carpet.z_axis.size(), 0.0);

    std::unique_ptr<WindowedObject> wobj;
    if (spec.mode == CarpetMode::ClassicalIntensity) {
        wobj = std::make_unique<WindowedObject>(spec.object, spec.window_periods,
                                                spec.samples_per_period);
    }

    const int n_z = carpet.n_z();
    int worker_count = spec.threads > 0
                           ? spec.threads
                           : static_cast<int>(std::thread::hardware_concurrency());
    worker_count = std::clamp(worker_count, 1, n_z);

    // Rows are partitioned disjointly across workers; each cell is a pure
    // function of its coordinates, so the filled grid is byte-identical for
    // every worker count.
    const auto run_rows = [&](int z_begin, int z_end) {
        for (int iz = z_begin; iz < z_end; ++iz) {
            evaluate_row(spec, carpet.x_axis, carpet.z_axis[static_cast<std::size_t>(iz)],
                         wobj.get(),
                         carpet.values.data() + static_cast<std::size_t>(iz) * carpet.x_axis.size());
        }
    };

    if (worker_count == 1) {
        run_rows(0, n_z);
    } else {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(worker_count));
        const int rows_per_worker = (n_z + worker_count - 1) / worker_count;
        for (int w = 0; w < worker_count; ++w) {
            const int z_begin = w * rows_per_worker;
            const int z_end = std::min(n_z, z_begin + rows_per_worker);
            workers.emplace_back([&, w, z_begin, z_end] {
                try {
                    run_rows(z_begin, z_end);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : workers) t.join();
        for (const auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    double mx = 0.0;
    for (double v : carpet.values) mx = std::max(mx, v);
    if (mx > 0.0) {
        for (double& v : carpet.values) v /= mx;
    }
    return carpet;
}

std::vector<std::pair<double, double>> transverse_profile(const ScanSpec& spec,
                                                          double z_value) {
    validate_spec(spec);
    if (!(z_value >= spec.z_min && z_value <= spec.z_max)) {
        throw std::domain_error("requested z lies outside the scan's z range");
    }
    const std::vector<double> xs = make_axis(spec.x_min, spec.x_max, spec.n_x);
    const std::vector<double> zs = make_axis(spec.z_min, spec.z_max, spec.n_z);
    std::size_t iz = 0;
    if (spec.n_z > 1) {
        const double step = (spec.z_max - spec.z_min) / static_cast<double>(spec.n_z - 1);
        const auto idx = static_cast<long long>(std::llround((z_value - spec.z_min) / step));
        iz = static_cast<std::size_t>(std::clamp<long long>(idx, 0, spec.n_z - 1));
    }

    std::unique_ptr<WindowedObject> wobj;
    if (spec.mode == CarpetMode::ClassicalIntensity) {
        wobj = std::make_unique<WindowedObject>(spec.object, spec.window_periods,
                                                spec.samples_per_period);
    }
    std::vector<double> row(xs.size());
    evaluate_row(spec, xs, zs[iz], wobj.get(), row.data());

    double mx = 0.0;
    for (double v : row) mx = std::max(mx, v);
    std::vector<std::pair<double, double>> profile(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        profile[i] = {xs[i], mx > 0.0 ? row[i] / mx : 0.0};
    }
    return profile;
}

}  // namespace talbot
