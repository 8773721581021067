#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "talbot/carpet.hpp"
#include "talbot/core.hpp"

using talbot::CarpetMode;
using talbot::ClassicalGeometry;
using talbot::ImagingGeometry;
using talbot::LithoGeometry;
using talbot::PeriodicObject;
using talbot::PhotonPair;
using talbot::ScanSpec;

namespace {

constexpr double kPeriod = 1e-4;
constexpr double kLambda = 883.2e-9;

ImagingGeometry reference_geometry(double d_i) {
    return ImagingGeometry{0.11, 0.20, d_i, PhotonPair{kLambda, kLambda}};
}

ScanSpec imaging_spec(int harmonics) {
    ScanSpec spec;
    spec.mode = CarpetMode::ImagingFixedSignal;
    spec.x_min = -3e-4;
    spec.x_max = 3e-4;
    spec.n_x = 241;
    spec.z_min = 0.0;
    spec.z_max = 0.34;
    spec.n_z = 341;
    spec.object = talbot::rect_grating(kPeriod, 0.5, harmonics);
    spec.geometry = reference_geometry(0.0);
    return spec;
}

double row_contrast(const talbot::Carpet& c, int iz) {
    double lo = c.at(iz, 0);
    double hi = c.at(iz, 0);
    for (int ix = 1; ix < c.n_x(); ++ix) {
        lo = std::min(lo, c.at(iz, ix));
        hi = std::max(hi, c.at(iz, ix));
    }
    return (hi + lo) > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
}

}  // namespace

TEST_CASE("validate_spec: rejects ill-formed scans") {
    ScanSpec spec = imaging_spec(5);
    CHECK_NOTHROW(talbot::validate_spec(spec));

    spec.n_x = 0;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);
    spec = imaging_spec(5);
    spec.x_max = spec.x_min;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);
    spec = imaging_spec(5);
    spec.z_max = -0.1;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);
    spec = imaging_spec(5);
    spec.z_min = -0.01;
    spec.z_max = 0.1;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);

    // Geometry kind must match the scan mode.
    spec = imaging_spec(5);
    spec.geometry = LithoGeometry{0.01, kLambda};
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);
    spec = imaging_spec(5);
    spec.mode = CarpetMode::LithoSynchronous;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);
    spec = imaging_spec(5);
    spec.mode = CarpetMode::ClassicalIntensity;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);

    // Classical propagation cannot start from z = 0.
    spec = imaging_spec(5);
    spec.mode = CarpetMode::ClassicalIntensity;
    spec.geometry = ClassicalGeometry{kLambda};
    spec.z_min = 0.0;
    spec.z_max = 0.02;
    CHECK_THROWS_AS(talbot::validate_spec(spec), std::domain_error);
    spec.z_min = 0.005;
    CHECK_NOTHROW(talbot::validate_spec(spec));
}

TEST_CASE("generate_carpet: a single-cell grid normalizes to one") {
    ScanSpec spec = imaging_spec(5);
    spec.n_x = 1;
    spec.x_min = spec.x_max = 0.0;
    spec.n_z = 1;
    spec.z_min = spec.z_max = 0.05;
    const auto c = talbot::generate_carpet(spec);
    REQUIRE(c.n_x() == 1);
    REQUIRE(c.n_z() == 1);
    CHECK(c.x_axis[0] == 0.0);
    CHECK(c.z_axis[0] == 0.05);
    CHECK(c.values.size() == 1);
    CHECK(c.values[0] == 1.0);
}

TEST_CASE("generate_carpet: values are normalized to a unit maximum") {
    ScanSpec spec = imaging_spec(10);
    spec.n_x = 41;
    spec.n_z = 11;
    const auto c = talbot::generate_carpet(spec);
    double mx = 0.0;
    for (double v : c.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        mx = std::max(mx, v);
    }
    CHECK(mx == 1.0);
}

TEST_CASE("generate_carpet: an opaque object yields an all-zero carpet") {
    ScanSpec spec = imaging_spec(5);
    spec.object = talbot::rect_grating(kPeriod, 0.0, 5);
    spec.n_x = 5;
    spec.n_z = 3;
    spec.z_min = 0.01;
    const auto c = talbot::generate_carpet(spec);
    for (double v : c.values) CHECK(v == 0.0);
}

TEST_CASE("generate_carpet: grid refinement preserves shared points") {
    // Single smooth-object row at a direct self-image plane: doubling the
    // transverse resolution must not move values at the coarse grid's points.
    const PeriodicObject obj = talbot::rect_grating(kPeriod, 0.5, 1);
    const auto planes = talbot::self_image_planes(obj, reference_geometry(0.0), 0.14, 0.16);
    REQUIRE(planes.size() == 1);

    ScanSpec spec = imaging_spec(1);
    spec.object = obj;
    spec.n_z = 1;
    spec.z_min = spec.z_max = planes[0].position;
    spec.n_x = 241;
    const auto coarse = talbot::generate_carpet(spec);
    spec.n_x = 481;
    const auto fine = talbot::generate_carpet(spec);

    for (int i = 0; i < 241; ++i) {
        CHECK(fine.x_axis[static_cast<std::size_t>(2 * i)] == coarse.x_axis[static_cast<std::size_t>(i)]);
        CHECK(std::abs(fine.at(0, 2 * i) - coarse.at(0, i)) <= 1e-12);
    }
}

TEST_CASE("generate_carpet: synchronous scans repeat with the object period at every height") {
    ScanSpec spec = imaging_spec(50);
    spec.mode = CarpetMode::ImagingSynchronous;
    spec.n_z = 4;
    spec.z_min = 0.05;
    spec.z_max = 0.305;
    const auto c = talbot::generate_carpet(spec);
    // The 241-point axis over [-0.3, 0.3] mm steps by a/40, so a full object
    // period is exactly 40 columns.
    for (int iz = 0; iz < c.n_z(); ++iz) {
        for (int ix = 0; ix + 40 < c.n_x(); ++ix) {
            CHECK(std::abs(c.at(iz, ix + 40) - c.at(iz, ix)) <= 1e-12);
        }
    }
}

TEST_CASE("generate_carpet: byte-identical across worker counts") {
    ScanSpec spec = imaging_spec(20);
    spec.n_x = 31;
    spec.n_z = 8;
    spec.threads = 1;
    const auto serial = talbot::generate_carpet(spec);
    spec.threads = 4;
    const auto parallel = talbot::generate_carpet(spec);
    spec.threads = 3;
    const auto odd = talbot::generate_carpet(spec);

    REQUIRE(serial.values.size() == parallel.values.size());
    for (std::size_t i = 0; i < serial.values.size(); ++i) {
        CHECK(serial.values[i] == parallel.values[i]);
        CHECK(serial.values[i] == odd.values[i]);
    }
}

TEST_CASE("generate_carpet: contrast peaks at the self-image planes") {
    // Reference scan: per-height Michelson contrast of the idler profile has
    // local maxima at (or within one grid step of) every revival plane.
    ScanSpec spec = imaging_spec(50);
    const auto c = talbot::generate_carpet(spec);
    REQUIRE(c.n_z() == 341);

    std::vector<double> contrast(static_cast<std::size_t>(c.n_z()));
    for (int iz = 0; iz < c.n_z(); ++iz) contrast[static_cast<std::size_t>(iz)] = row_contrast(c, iz);

    std::vector<int> local_max_rows;
    for (int iz = 0; iz < c.n_z(); ++iz) {
        const bool up_ok = iz == 0 || contrast[iz] >= contrast[iz - 1];
        const bool down_ok = iz == c.n_z() - 1 || contrast[iz] >= contrast[iz + 1];
        if (up_ok && down_ok) local_max_rows.push_back(iz);
    }

    const auto planes =
        talbot::self_image_planes(spec.object, reference_geometry(0.0), spec.z_min, spec.z_max);
    REQUIRE(planes.size() == 6);
    const double step = (spec.z_max - spec.z_min) / (spec.n_z - 1);
    for (const auto& p : planes) {
        const int row = static_cast<int>(std::llround((p.position - spec.z_min) / step));
        bool near_peak = false;
        for (int l : local_max_rows) {
            if (std::abs(l - row) <= 1) {
                near_peak = true;
                break;
            }
        }
        CHECK(near_peak);
    }
}

TEST_CASE("transverse_profile: lithographic synchronous rows oscillate at twice the object frequency") {
    ScanSpec spec;
    spec.mode = CarpetMode::LithoSynchronous;
    spec.object = talbot::rect_grating(kPeriod, 0.5, 50);
    spec.geometry = LithoGeometry{0.0, kLambda};
    // 240 columns spanning exactly six object periods.
    spec.x_min = -3e-4;
    spec.x_max = 3e-4 - 2.5e-6;
    spec.n_x = 240;
    spec.z_min = 0.0;
    spec.z_max = 0.057;
    spec.n_z = 229;

    const auto planes = talbot::litho_revival_planes(spec.object, kLambda, spec.z_min, spec.z_max);
    int checked = 0;
    for (const auto& p : planes) {
        if (p.classification != talbot::PlaneKind::Direct) continue;
        const auto profile = talbot::transverse_profile(spec, p.position);
        std::vector<double> row(profile.size());
        for (std::size_t i = 0; i < profile.size(); ++i) row[i] = profile[i].second;
        // Twelve cycles across six periods: spatial frequency 2/a.
        CHECK(test_helpers::dft_argmax_bin(row, 120) == 12);
        ++checked;
    }
    CHECK(checked == 5);
}

TEST_CASE("transverse_profile: fully open object gives a flat unit profile") {
    ScanSpec spec = imaging_spec(10);
    spec.object = talbot::rect_grating(kPeriod, 1.0, 10);
    spec.n_x = 17;
    const auto profile = talbot::transverse_profile(spec, 0.2);
    for (const auto& [x, v] : profile) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transverse_profile: synchronous profile keeps the bare object period") {
    ScanSpec spec = imaging_spec(50);
    spec.mode = CarpetMode::ImagingSynchronous;
    const auto profile = talbot::transverse_profile(spec, 0.121);
    for (std::size_t i = 0; i + 40 < profile.size(); ++i) {
        CHECK(std::abs(profile[i + 40].second - profile[i].second) <= 1e-12);
    }
}

TEST_CASE("transverse_profile: fixed-signal profile repeats with the magnified period") {
    const PeriodicObject obj = talbot::rect_grating(kPeriod, 0.5, 50);
    const auto planes = talbot::self_image_planes(obj, reference_geometry(0.0), 0.14, 0.16);
    REQUIRE(planes.size() == 1);
    const double d5 = planes[0].position;
    const double mag =
        talbot::magnification(reference_geometry(d5), talbot::ScanMode::ScanIdler);
    CHECK(mag * kPeriod == doctest::Approx(0.230480e-3).epsilon(1e-5));

    ScanSpec spec = imaging_spec(50);
    spec.n_z = 1;
    spec.z_min = spec.z_max = d5;
    spec.x_min = 0.0;
    spec.x_max = 2 * mag * kPeriod;
    spec.n_x = 129;  // 64 columns per magnified period.
    const auto profile = talbot::transverse_profile(spec, d5);
    double max_diff = 0.0;
    for (std::size_t i = 0; i + 64 < profile.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(profile[i + 64].second - profile[i].second));
    }
    CHECK(max_diff <= 1e-9);
}

TEST_CASE("transverse_profile: nearest-row selection and range validation") {
    ScanSpec spec = imaging_spec(10);
    spec.n_x = 21;
    spec.n_z = 3;
    spec.z_min = 0.1;
    spec.z_max = 0.3;

    const auto snapped = talbot::transverse_profile(spec, 0.24);
    const auto exact = talbot::transverse_profile(spec, 0.2);
    REQUIRE(snapped.size() == exact.size());
    for (std::size_t i = 0; i < snapped.size(); ++i) {
        CHECK(snapped[i].first == exact[i].first);
        CHECK(snapped[i].second == exact[i].second);
    }

    CHECK_THROWS_AS(talbot::transverse_profile(spec, 0.35), std::domain_error);
    CHECK_THROWS_AS(talbot::transverse_profile(spec, 0.05), std::domain_error);

    // Profiles are normalized to their own row maximum.
    double mx = 0.0;
    for (const auto& [x, v] : snapped) mx = std::max(mx, v);
    CHECK(mx == 1.0);
}

TEST_CASE("generate_carpet: classical intensity scan is finite and normalized") {
    ScanSpec spec;
    spec.mode = CarpetMode::ClassicalIntensity;
    spec.object = talbot::rect_grating(kPeriod, 0.5, 10);
    spec.geometry = ClassicalGeometry{kLambda};
    spec.window_periods = 16;
    spec.samples_per_period = 64;
    spec.x_min = -kPeriod;
    spec.x_max = kPeriod;
    spec.n_x = 33;
    const double zt = talbot::classical_talbot_length(kPeriod, kLambda);
    spec.z_min = zt / 4;
    spec.z_max = zt;
    spec.n_z = 3;

    const auto c = talbot::generate_carpet(spec);
    double mx = 0.0;
    for (double v : c.values) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        mx = std::max(mx, v);
    }
    CHECK(mx == 1.0);
}

TEST_CASE("generate_carpet: runtime failures surface from worker threads") {
    ScanSpec spec;
    spec.mode = CarpetMode::ClassicalIntensity;
    spec.object = talbot::rect_grating(kPeriod, 0.5, 5);
    spec.geometry = ClassicalGeometry{kLambda};
    spec.window_periods = 8;
    spec.samples_per_period = 16;  // too coarse for the z range below
    spec.x_min = -kPeriod;
    spec.x_max = kPeriod;
    spec.n_x = 5;
    spec.z_min = 1e-4;
    spec.z_max = 2e-4;
    spec.n_z = 4;

    spec.threads = 1;
    CHECK_THROWS_AS(talbot::generate_carpet(spec), talbot::QuadratureError);
    spec.threads = 4;
    CHECK_THROWS_AS(talbot::generate_carpet(spec), talbot::QuadratureError);
}

TEST_CASE("generate_carpet: degenerate idler geometry at z = 0 is reported") {
    ScanSpec spec = imaging_spec(5);
    spec.geometry = ImagingGeometry{0.0, 0.20, 0.0, PhotonPair{kLambda, kLambda}};
    spec.n_x = 5;
    spec.n_z = 2;
    spec.z_min = 0.0;
    spec.z_max = 0.1;
    CHECK_THROWS_AS(talbot::generate_carpet(spec), talbot::DegenerateGeometryError);
}
