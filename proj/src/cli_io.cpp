#include "talbot/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "talbot/core.hpp"
#include "talbot/fresnel_oracle.hpp"
#include "talbot/imaging.hpp"
#include "talbot/lithography.hpp"

namespace talbot {

namespace {

using nlohmann::json;

[[noreturn]] void bad_length(const std::string& text) {
    throw std::domain_error("cannot parse length '" + text + "'");
}

std::string format_sig9(double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

std::string format_sig12(double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

}  // namespace

double parse_length(const std::string& text) {
    const std::size_t begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) bad_length(text);
    const std::size_t end = text.find_last_not_of(" \t");
    std::string body = text.substr(begin, end - begin + 1);

    // Peel a unit suffix (longest match first) and remember its decimal shift.
    int shift = 0;
    const auto ends_with = [&](const char* suffix) {
        const std::size_t n = std::char_traits<char>::length(suffix);
        return body.size() > n && body.compare(body.size() - n, n, suffix) == 0;
    };
    if (ends_with("nm")) {
        shift = -9;
        body.erase(body.size() - 2);
    } else if (ends_with("um")) {
        shift = -6;
        body.erase(body.size() - 2);
    } else if (ends_with("mm")) {
        shift = -3;
        body.erase(body.size() - 2);
    } else if (ends_with("cm")) {
        shift = -2;
        body.erase(body.size() - 2);
    } else if (ends_with("m")) {
        shift = 0;
        body.erase(body.size() - 1);
    }
    while (!body.empty() && (body.back() == ' ' || body.back() == '\t')) body.pop_back();
    if (body.empty()) bad_length(text);

    // Split mantissa / decimal exponent, fold the unit shift into the
    // exponent, and let one correctly-rounded parse produce the value. This
    // makes "0.1mm", "100um", and "1e-4" identical doubles.
    std::string mantissa = body;
    long exponent = 0;
    const std::size_t epos = body.find_first_of("eE");
    if (epos != std::string::npos) {
        mantissa = body.substr(0, epos);
        std::string etail = body.substr(epos + 1);
        if (!etail.empty() && etail.front() == '+') etail.erase(0, 1);
        int parsed = 0;
        const auto [ptr, ec] = std::from_chars(etail.data(), etail.data() + etail.size(), parsed);
        if (ec != std::errc{} || ptr != etail.data() + etail.size()) bad_length(text);
        exponent = parsed;
    }
    if (!mantissa.empty() && mantissa.front() == '+') mantissa.erase(0, 1);
    if (mantissa.empty()) bad_length(text);
    exponent += shift;

    const std::string rebuilt = mantissa + "e" + std::to_string(exponent);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(rebuilt.data(), rebuilt.data() + rebuilt.size(), value);
    if (ec != std::errc{} || ptr != rebuilt.data() + rebuilt.size() || !std::isfinite(value)) {
        bad_length(text);
    }
    return value;
}

namespace {

double json_length(const json& value, const std::string& key) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) return parse_length(value.get<std::string>());
    throw std::domain_error("config key '" + key + "' must be a number or a length string");
}

RunConfig apply_json(const json& j, const RunConfig& base) {
    if (!j.is_object()) throw std::domain_error("config root must be a JSON object");
    RunConfig cfg = base;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "subcommand") {
                cfg.subcommand = value.get<std::string>();
            } else if (key == "period") {
                cfg.period = json_length(value, key);
            } else if (key == "duty") {
                cfg.duty = value.get<double>();
            } else if (key == "harmonics") {
                cfg.harmonics = value.get<int>();
            } else if (key == "lambda_s") {
                cfg.lambda_s = json_length(value, key);
            } else if (key == "lambda_i") {
                cfg.lambda_i = json_length(value, key);
            } else if (key == "ds1") {
                cfg.ds1 = json_length(value, key);
            } else if (key == "ds2") {
                cfg.ds2 = json_length(value, key);
            } else if (key == "z_min") {
                cfg.z_min = json_length(value, key);
            } else if (key == "z_max") {
                cfg.z_max = json_length(value, key);
            } else if (key == "x_min") {
                cfg.x_min = json_length(value, key);
            } else if (key == "x_max") {
                cfg.x_max = json_length(value, key);
            } else if (key == "nx") {
                cfg.nx = value.get<int>();
            } else if (key == "nz") {
                cfg.nz = value.get<int>();
            } else if (key == "scan_mode") {
                cfg.scan_mode = value.get<std::string>();
            } else if (key == "out") {
                cfg.out = value.get<std::string>();
            } else if (key == "format") {
                cfg.format = value.get<std::string>();
            } else if (key == "window_periods") {
                cfg.window_periods = value.get<int>();
            } else if (key == "samples_per_period") {
                cfg.samples_per_period = value.get<int>();
            } else if (key == "di") {
                cfg.di = json_length(value, key);
            } else if (key == "set") {
                cfg.set = value.get<std::string>();
            } else if (key == "threads") {
                cfg.threads = value.get<int>();
            } else {
                throw std::domain_error("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& ex) {
        throw std::domain_error(std::string("invalid config value: ") + ex.what());
    }
    return cfg;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["subcommand"] = cfg.subcommand;
    j["period"] = cfg.period;
    j["duty"] = cfg.duty;
    j["harmonics"] = cfg.harmonics;
    j["lambda_s"] = cfg.lambda_s;
    j["lambda_i"] = cfg.lambda_i;
    j["ds1"] = cfg.ds1;
    j["ds2"] = cfg.ds2;
    j["z_min"] = cfg.z_min;
    j["z_max"] = cfg.z_max;
    j["x_min"] = cfg.x_min;
    j["x_max"] = cfg.x_max;
    j["nx"] = cfg.nx;
    j["nz"] = cfg.nz;
    j["scan_mode"] = cfg.scan_mode;
    j["out"] = cfg.out;
    j["format"] = cfg.format;
    j["window_periods"] = cfg.window_periods;
    j["samples_per_period"] = cfg.samples_per_period;
    j["di"] = cfg.di;
    j["set"] = cfg.set;
    j["threads"] = cfg.threads;
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& json_text, const RunConfig& base) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& ex) {
        throw std::domain_error(std::string("invalid JSON config: ") + ex.what());
    }
    return apply_json(j, base);
}

void write_csv(const Carpet& carpet, std::ostream& out) {
    std::string text;
    text.reserve(16 + carpet.values.size() * 32);
    text += "x_m,z_m,rate\n";
    for (std::size_t iz = 0; iz < carpet.n_z(); ++iz) {
        const std::string z_text = format_sig9(carpet.z_axis[iz]);
        for (std::size_t ix = 0; ix < carpet.n_x(); ++ix) {
            text += format_sig9(carpet.x_axis[ix]);
            text += ',';
            text += z_text;
            text += ',';
            text += format_sig9(carpet.at(iz, ix));
            text += '\n';
        }
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_csv(const Carpet& carpet, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(carpet, file);
    file.flush();
    if (!file) throw std::runtime_error("failed while writing '" + path + "'");
}

void write_pgm(const Carpet& carpet, std::ostream& out) {
    std::ostringstream header;
    header << "P5\n" << carpet.n_x() << ' ' << carpet.n_z() << "\n255\n";
    const std::string head = header.str();
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    std::string bytes;
    bytes.reserve(carpet.values.size());
    for (std::size_t iz = 0; iz < carpet.n_z(); ++iz) {
        for (std::size_t ix = 0; ix < carpet.n_x(); ++ix) {
            const double v = std::clamp(carpet.at(iz, ix), 0.0, 1.0);
            bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
        }
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_pgm(const Carpet& carpet, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_pgm(carpet, file);
    file.flush();
    if (!file) throw std::runtime_error("failed while writing '" + path + "'");
}

namespace {

struct CaseResult {
    std::string name;
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    bool thresholded = false;
    bool pass = true;
};

// Comparison truncations are fixed per case: every summed beam must stay
// inside the quadrature window, and harmonic n walks off-axis by roughly
// n * lambda * z_eff / period, so high orders would probe the window edge
// rather than the physics. The chosen orders keep the finite-window error
// orders of magnitude below each threshold.
CaseResult run_imaging_case(const RunConfig& cfg) {
    const PeriodicObject obj = rect_grating(cfg.period, cfg.duty, 6);
    const ImagingGeometry base{cfg.ds1, cfg.ds2, 0.0, {cfg.lambda_s, cfg.lambda_i}};
    const auto planes = self_image_planes(obj, base, 0.0, 1.0e3);
    const PlaneInfo* chosen = nullptr;
    for (const auto& plane : planes) {
        if (plane.classification == PlaneKind::Direct && plane.index_m == 5.0) chosen = &plane;
    }
    if (chosen == nullptr) {
        for (const auto& plane : planes) {
            if (plane.classification == PlaneKind::Direct) {
                if (chosen == nullptr || plane.index_m < chosen->index_m) chosen = &plane;
            }
        }
    }
    if (chosen == nullptr) {
        throw std::domain_error("geometry admits no direct self-image plane; cannot verify imaging oracle");
    }

    ImagingGeometry geom = base;
    geom.d_i = chosen->position;
    const double mag = magnification(geom, ScanMode::ScanIdler);
    const double span = mag * cfg.period;

    std::vector<std::pair<double, double>> points;
    std::vector<double> series;
    points.reserve(64);
    series.reserve(64);
    for (int k = 0; k < 64; ++k) {
        const double x2 = -span / 2.0 + span * static_cast<double>(k) / 63.0;
        points.emplace_back(0.0, x2);
        series.push_back(coincidence_rate(obj, geom, 0.0, x2));
    }

    const WindowedObject wobj(obj, cfg.window_periods, cfg.samples_per_period);
    const std::vector<double> oracle = imaging_oracle(wobj, geom, points, 0.1);
    const std::vector<double> reference = normalize_to_unit_max(series);
    const double distance = rel_l2_distance(oracle, reference);
    return {"imaging", "rel_l2", distance, 1e-2, true, distance <= 1e-2};
}

CaseResult run_classical_case(const RunConfig& cfg) {
    const PeriodicObject obj = rect_grating(cfg.period, cfg.duty, 10);
    const double z_t = classical_talbot_length(cfg.period, cfg.lambda_s);
    const WindowedObject wobj(obj, cfg.window_periods, cfg.samples_per_period);

    std::vector<double> xs;
    std::vector<double> reference;
    xs.reserve(512);
    reference.reserve(512);
    for (int k = 0; k < 512; ++k) {
        const double x = (static_cast<double>(k) - 255.5) * cfg.period / 64.0;
        xs.push_back(x);
        reference.push_back(std::norm(evaluate_object(obj, x)));
    }

    const std::vector<ComplexAmplitude> field = classical_propagate(wobj, cfg.lambda_s, z_t, xs, 0.25);
    std::vector<double> intensity(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) intensity[i] = std::norm(field[i]);
    const double distance =
        linf_distance(normalize_to_unit_max(intensity), normalize_to_unit_max(reference));
    return {"classical", "linf", distance, 1e-2, true, distance <= 1e-2};
}

CaseResult run_singles_case(const RunConfig& cfg) {
    const PeriodicObject obj = rect_grating(cfg.period, cfg.duty, 200);
    const double series = singles_rate(obj, 0.0);
    // >= 2*200+1 samples per period makes the discrete period average agree
    // with the coefficient power sum to rounding error.
    const int spp = std::max(cfg.samples_per_period, 512);
    const WindowedObject wobj(obj, std::min(cfg.window_periods, 16), spp);
    const double oracle = singles_oracle(wobj);
    const double distance = std::abs(series - oracle);
    return {"singles", "abs_diff", distance, 1e-3, true, distance <= 1e-3};
}

CaseResult run_litho_case(const RunConfig& cfg) {
    const PeriodicObject obj = rect_grating(cfg.period, cfg.duty, cfg.harmonics);
    const double d_0 = litho_talbot_length(cfg.period, cfg.lambda_s);
    const LithoGeometry geom{d_0, cfg.lambda_s};
    const WindowedObject wobj(obj, cfg.window_periods, std::max(cfg.samples_per_period, 256));

    std::vector<std::pair<double, double>> points;
    std::vector<double> series;
    points.reserve(129);
    series.reserve(129);
    for (int k = 0; k < 129; ++k) {
        const double u = -cfg.period + 2.0 * cfg.period * static_cast<double>(k) / 128.0;
        points.emplace_back(0.0, u);
        series.push_back(litho_coincidence_rate(obj, geom, 0.0, u));
    }

    const std::vector<double> oracle = litho_oracle(wobj, geom, points, 0.1);
    const double distance = rel_l2_distance(oracle, normalize_to_unit_max(series));
    // Diagnostic only: the factorized detection model and the double-pass
    // quadrature describe different measurements at shared detector offsets,
    // so the gap is reported without a pass threshold.
    return {"litho", "rel_l2", distance, 0.0, false, true};
}

}  // namespace

int verify_oracle_report(const RunConfig& cfg, std::ostream& out) {
    const std::string& set = cfg.set;
    const bool all = (set == "all");
    if (!all && set != "imaging" && set != "classical" && set != "singles" && set != "litho") {
        throw std::domain_error("--set must be one of: all, imaging, classical, singles, litho");
    }

    std::vector<CaseResult> results;
    if (all || set == "imaging") results.push_back(run_imaging_case(cfg));
    if (all || set == "classical") results.push_back(run_classical_case(cfg));
    if (all || set == "singles") results.push_back(run_singles_case(cfg));
    if (all || set == "litho") results.push_back(run_litho_case(cfg));

    int failures = 0;
    for (const auto& result : results) {
        char line[192];
        if (result.thresholded) {
            if (!result.pass) ++failures;
            std::snprintf(line, sizeof line, "set=%s metric=%s value=%.3e threshold=%.1e result=%s\n",
                          result.name.c_str(), result.metric.c_str(), result.value, result.threshold,
                          result.pass ? "PASS" : "FAIL");
        } else {
            std::snprintf(line, sizeof line, "set=%s metric=%s value=%.3e threshold=none result=REPORTED\n",
                          result.name.c_str(), result.metric.c_str(), result.value);
        }
        out << line;
    }
    return failures == 0 ? 0 : 1;
}

namespace {

struct RawOptions {
    std::string config_path;
    std::string period;
    double duty = 0.0;
    int harmonics = 0;
    std::string lambda_s, lambda_i, ds1, ds2;
    std::string z_min, z_max, x_min, x_max;
    int nx = 0, nz = 0;
    std::string scan_mode, out, format;
    int window_periods = 0, samples_per_period = 0;
    std::string di;
    std::string set;
    int threads = 0;
    std::map<std::string, CLI::Option*> handles;
};

void add_options(CLI::App* sub, RawOptions& raw) {
    auto& h = raw.handles;
    h["config"] = sub->add_option("--config", raw.config_path,
                                  "JSON config file; explicit flags override its values");
    h["period"] = sub->add_option("--period", raw.period, "grating period (length, e.g. 0.1mm)");
    h["duty"] = sub->add_option("--duty", raw.duty, "open fraction of each period, in [0, 1]");
    h["harmonics"] = sub->add_option("--harmonics", raw.harmonics,
                                     "series truncation order N (harmonics -N..N)");
    h["lambda_s"] = sub->add_option("--lambda-s", raw.lambda_s, "signal wavelength (length)");
    h["lambda_i"] = sub->add_option("--lambda-i", raw.lambda_i, "idler wavelength (length)");
    h["ds1"] = sub->add_option("--ds1", raw.ds1, "source-to-object distance, signal arm (length)");
    h["ds2"] = sub->add_option("--ds2", raw.ds2, "object-to-detector distance, signal arm (length)");
    h["z_min"] = sub->add_option("--z-min", raw.z_min, "first longitudinal sample (length)");
    h["z_max"] = sub->add_option("--z-max", raw.z_max, "last longitudinal sample (length)");
    h["x_min"] = sub->add_option("--x-min", raw.x_min, "first transverse sample (length)");
    h["x_max"] = sub->add_option("--x-max", raw.x_max, "last transverse sample (length)");
    h["nx"] = sub->add_option("--nx", raw.nx, "number of transverse samples");
    h["nz"] = sub->add_option("--nz", raw.nz, "number of longitudinal samples");
    h["scan_mode"] = sub->add_option("--scan-mode", raw.scan_mode, "detector scan mode");
    h["out"] = sub->add_option("--out", raw.out, "output path (CSV defaults to stdout)");
    h["format"] = sub->add_option("--format", raw.format, "output format: csv or pgm");
    h["window_periods"] = sub->add_option("--window-periods", raw.window_periods,
                                          "quadrature window width in grating periods");
    h["samples_per_period"] = sub->add_option("--samples-per-period", raw.samples_per_period,
                                              "quadrature samples per grating period");
    h["di"] = sub->add_option("--di", raw.di, "idler-arm detector distance (length)");
    h["set"] = sub->add_option("--set", raw.set,
                               "comparison set: all, imaging, classical, singles, litho");
    h["threads"] = sub->add_option("--threads", raw.threads,
                                   "worker threads for carpet rows (0 = hardware)");
}

void finalize_defaults(RunConfig& cfg, const std::set<std::string>& provided) {
    const auto missing = [&](const char* key) { return provided.count(key) == 0; };
    if (missing("x_min")) cfg.x_min = -3e-4;
    if (missing("x_max")) cfg.x_max = 3e-4;
    if (cfg.subcommand == "litho-carpet") {
        if (missing("z_min")) cfg.z_min = 0.0;
        if (missing("z_max")) cfg.z_max = 0.057;
        if (missing("scan_mode")) cfg.scan_mode = "LithoFixedOne";
    } else if (cfg.subcommand == "classical-carpet") {
        const double z_t = classical_talbot_length(cfg.period, cfg.lambda_s);
        if (missing("z_min")) cfg.z_min = z_t / 4.0;
        if (missing("z_max")) cfg.z_max = 2.0 * z_t;
        if (missing("nz")) cfg.nz = 121;
        if (missing("samples_per_period")) cfg.samples_per_period = 256;
        if (missing("scan_mode")) cfg.scan_mode = "ClassicalIntensity";
    } else {
        // imaging-carpet, planes, and the scalar subcommands share the
        // idler-distance range that covers the default geometry's planes.
        if (missing("z_min")) cfg.z_min = 0.0;
        if (missing("z_max")) cfg.z_max = 0.34;
        if (cfg.subcommand == "imaging-carpet" && missing("scan_mode")) {
            cfg.scan_mode = "ImagingFixedSignal";
        }
    }
}

void validate_config(const RunConfig& cfg) {
    const auto require = [](bool ok, const char* message) {
        if (!ok) throw std::domain_error(message);
    };
    require(cfg.period > 0.0, "--period must be positive");
    require(cfg.duty >= 0.0 && cfg.duty <= 1.0, "--duty must be within [0, 1]");
    require(cfg.harmonics >= 1, "--harmonics must be at least 1");
    require(cfg.lambda_s > 0.0, "--lambda-s must be positive");
    require(cfg.lambda_i > 0.0, "--lambda-i must be positive");
    require(cfg.ds1 >= 0.0, "--ds1 must be non-negative");
    require(cfg.ds2 > 0.0, "--ds2 must be positive");
    require(cfg.nx >= 1, "--nx must be at least 1");
    require(cfg.nz >= 1, "--nz must be at least 1");
    require(cfg.nx == 1 || cfg.x_max > cfg.x_min, "--x-max must exceed --x-min when --nx > 1");
    require(cfg.nz == 1 || cfg.z_max > cfg.z_min, "--z-max must exceed --z-min when --nz > 1");
    require(cfg.z_min >= 0.0, "--z-min must be non-negative");
    if (cfg.subcommand == "classical-carpet") {
        require(cfg.z_min > 0.0, "--z-min must be positive for classical propagation");
    }
    require(cfg.window_periods >= 1, "--window-periods must be at least 1");
    require(cfg.samples_per_period >= 16, "--samples-per-period must be at least 16");
    require(cfg.threads >= 0, "--threads must be non-negative");
    require(cfg.format == "csv" || cfg.format == "pgm", "--format must be csv or pgm");
    require(cfg.di >= 0.0, "--di must be non-negative");
}

RunConfig build_config(const std::string& name, const RawOptions& raw) {
    RunConfig cfg;
    cfg.subcommand = name;
    std::set<std::string> provided;

    if (raw.handles.at("config")->count() > 0) {
        std::ifstream file(raw.config_path);
        if (!file) throw std::domain_error("cannot read config file '" + raw.config_path + "'");
        std::stringstream buffer;
        buffer << file.rdbuf();
        json j;
        try {
            j = json::parse(buffer.str());
        } catch (const json::exception& ex) {
            throw std::domain_error(std::string("invalid JSON config: ") + ex.what());
        }
        cfg = apply_json(j, cfg);
        cfg.subcommand = name;
        if (j.is_object()) {
            for (const auto& item : j.items()) provided.insert(item.key());
        }
    }

    const auto given = [&](const char* key) { return raw.handles.at(key)->count() > 0; };
    const auto mark = [&](const char* key) { provided.insert(key); };
    if (given("period")) { cfg.period = parse_length(raw.period); mark("period"); }
    if (given("duty")) { cfg.duty = raw.duty; mark("duty"); }
    if (given("harmonics")) { cfg.harmonics = raw.harmonics; mark("harmonics"); }
    if (given("lambda_s")) { cfg.lambda_s = parse_length(raw.lambda_s); mark("lambda_s"); }
    if (given("lambda_i")) { cfg.lambda_i = parse_length(raw.lambda_i); mark("lambda_i"); }
    if (given("ds1")) { cfg.ds1 = parse_length(raw.ds1); mark("ds1"); }
    if (given("ds2")) { cfg.ds2 = parse_length(raw.ds2); mark("ds2"); }
    if (given("z_min")) { cfg.z_min = parse_length(raw.z_min); mark("z_min"); }
    if (given("z_max")) { cfg.z_max = parse_length(raw.z_max); mark("z_max"); }
    if (given("x_min")) { cfg.x_min = parse_length(raw.x_min); mark("x_min"); }
    if (given("x_max")) { cfg.x_max = parse_length(raw.x_max); mark("x_max"); }
    if (given("nx")) { cfg.nx = raw.nx; mark("nx"); }
    if (given("nz")) { cfg.nz = raw.nz; mark("nz"); }
    if (given("scan_mode")) { cfg.scan_mode = raw.scan_mode; mark("scan_mode"); }
    if (given("out")) { cfg.out = raw.out; mark("out"); }
    if (given("format")) { cfg.format = raw.format; mark("format"); }
    if (given("window_periods")) { cfg.window_periods = raw.window_periods; mark("window_periods"); }
    if (given("samples_per_period")) {
        cfg.samples_per_period = raw.samples_per_period;
        mark("samples_per_period");
    }
    if (given("di")) { cfg.di = parse_length(raw.di); mark("di"); }
    if (given("set")) { cfg.set = raw.set; mark("set"); }
    if (given("threads")) { cfg.threads = raw.threads; mark("threads"); }

    finalize_defaults(cfg, provided);
    validate_config(cfg);
    return cfg;
}

CarpetMode parse_carpet_mode(const RunConfig& cfg) {
    static const std::map<std::string, CarpetMode> modes = {
        {"ImagingFixedSignal", CarpetMode::ImagingFixedSignal},
        {"ImagingSynchronous", CarpetMode::ImagingSynchronous},
        {"LithoFixedOne", CarpetMode::LithoFixedOne},
        {"LithoSynchronous", CarpetMode::LithoSynchronous},
        {"ClassicalIntensity", CarpetMode::ClassicalIntensity},
    };
    const auto it = modes.find(cfg.scan_mode);
    if (it == modes.end()) {
        throw std::domain_error("--scan-mode '" + cfg.scan_mode + "' is not recognized");
    }
    const CarpetMode mode = it->second;
    const bool imaging_mode =
        mode == CarpetMode::ImagingFixedSignal || mode == CarpetMode::ImagingSynchronous;
    const bool litho_mode = mode == CarpetMode::LithoFixedOne || mode == CarpetMode::LithoSynchronous;
    if (cfg.subcommand == "imaging-carpet" && !imaging_mode) {
        throw std::domain_error("--scan-mode '" + cfg.scan_mode + "' is not valid for imaging-carpet");
    }
    if (cfg.subcommand == "litho-carpet" && !litho_mode) {
        throw std::domain_error("--scan-mode '" + cfg.scan_mode + "' is not valid for litho-carpet");
    }
    if (cfg.subcommand == "classical-carpet" && mode != CarpetMode::ClassicalIntensity) {
        throw std::domain_error("--scan-mode '" + cfg.scan_mode + "' is not valid for classical-carpet");
    }
    return mode;
}

ScanSpec make_scan_spec(const RunConfig& cfg) {
    ScanSpec spec;
    spec.mode = parse_carpet_mode(cfg);
    spec.object = rect_grating(cfg.period, cfg.duty, cfg.harmonics);
    spec.x_min = cfg.x_min;
    spec.x_max = cfg.x_max;
    spec.n_x = cfg.nx;
    spec.z_min = cfg.z_min;
    spec.z_max = cfg.z_max;
    spec.n_z = cfg.nz;
    spec.window_periods = cfg.window_periods;
    spec.samples_per_period = cfg.samples_per_period;
    spec.threads = cfg.threads;
    switch (spec.mode) {
        case CarpetMode::ImagingFixedSignal:
        case CarpetMode::ImagingSynchronous:
            spec.geometry = ImagingGeometry{cfg.ds1, cfg.ds2, 0.0, {cfg.lambda_s, cfg.lambda_i}};
            break;
        case CarpetMode::LithoFixedOne:
        case CarpetMode::LithoSynchronous:
            spec.geometry = LithoGeometry{0.0, cfg.lambda_s};
            break;
        case CarpetMode::ClassicalIntensity:
            spec.geometry = ClassicalGeometry{cfg.lambda_s};
            break;
    }
    return spec;
}

void maybe_warn_paraxial(const RunConfig& cfg, std::ostream& err) {
    double z_equivalent = 0.0;
    if (cfg.subcommand == "imaging-carpet") {
        ImagingGeometry geom{cfg.ds1, cfg.ds2, cfg.z_max, {cfg.lambda_s, cfg.lambda_i}};
        z_equivalent = effective_distance(geom);
    } else if (cfg.subcommand == "litho-carpet" || cfg.subcommand == "classical-carpet") {
        z_equivalent = cfg.z_max;
    }
    if (z_equivalent <= 0.0) return;
    const int n_max =
        paraxial_max_order(cfg.period, cfg.lambda_s, z_equivalent, cfg.lambda_s / 4.0);
    if (cfg.harmonics > n_max) {
        err << "warning: harmonics above n=" << n_max
            << " exceed the paraxial accuracy estimate for this geometry; they are summed anyway\n";
    }
}

void emit_text(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + cfg.out + "' for writing");
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    file.flush();
    if (!file) throw std::runtime_error("failed while writing '" + cfg.out + "'");
}

int run_carpet(const RunConfig& cfg) {
    const ScanSpec spec = make_scan_spec(cfg);
    validate_spec(spec);
    if (cfg.format == "pgm" && cfg.out.empty()) {
        throw std::domain_error("--out is required when --format is pgm");
    }
    maybe_warn_paraxial(cfg, std::cerr);
    const Carpet carpet = generate_carpet(spec);
    if (cfg.format == "pgm") {
        write_pgm(carpet, cfg.out);
    } else if (cfg.out.empty()) {
        write_csv(carpet, std::cout);
    } else {
        write_csv(carpet, cfg.out);
    }
    return 0;
}

int run_planes(const RunConfig& cfg) {
    const PeriodicObject obj = rect_grating(cfg.period, cfg.duty, cfg.harmonics);
    const ImagingGeometry base{cfg.ds1, cfg.ds2, 0.0, {cfg.lambda_s, cfg.lambda_i}};
    const auto planes = self_image_planes(obj, base, cfg.z_min, cfg.z_max);
    std::string text = "d_i_m,index_m,classification\n";
    for (const auto& plane : planes) {
        text += format_sig9(plane.position);
        text += ',';
        text += format_sig9(plane.index_m);
        text += ',';
        text += plane.classification == PlaneKind::Direct ? "Direct" : "HalfShifted";
        text += '\n';
    }
    emit_text(cfg, text);
    return 0;
}

int run_magnify(const RunConfig& cfg) {
    const ImagingGeometry geom{cfg.ds1, cfg.ds2, cfg.di, {cfg.lambda_s, cfg.lambda_i}};
    validate_geometry(geom);
    static const std::pair<const char*, ScanMode> all_modes[] = {
        {"ScanIdler", ScanMode::ScanIdler},
        {"ScanSignal", ScanMode::ScanSignal},
        {"Synchronous", ScanMode::Synchronous},
    };
    std::string text = "scan_mode,magnification\n";
    bool matched = false;
    for (const auto& [name, mode] : all_modes) {
        if (!cfg.scan_mode.empty() && cfg.scan_mode != name) continue;
        matched = true;
        text += name;
        text += ',';
        text += format_sig12(magnification(geom, mode));
        text += '\n';
    }
    if (!matched) {
        throw std::domain_error("--scan-mode must be one of: ScanIdler, ScanSignal, Synchronous");
    }
    emit_text(cfg, text);
    return 0;
}

int run_singles(const RunConfig& cfg) {
    const PeriodicObject obj = rect_grating(cfg.period, cfg.duty, cfg.harmonics);
    emit_text(cfg, format_sig12(singles_rate(obj, 0.0)) + "\n");
    return 0;
}

int dispatch(const RunConfig& cfg) {
    if (cfg.subcommand == "imaging-carpet" || cfg.subcommand == "litho-carpet" ||
        cfg.subcommand == "classical-carpet") {
        return run_carpet(cfg);
    }
    if (cfg.subcommand == "planes") return run_planes(cfg);
    if (cfg.subcommand == "magnify") return run_magnify(cfg);
    if (cfg.subcommand == "singles") return run_singles(cfg);
    if (cfg.subcommand == "verify-oracle") return verify_oracle_report(cfg, std::cout);
    throw std::domain_error("unknown subcommand '" + cfg.subcommand + "'");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Second-order Talbot self-imaging simulator"};
    app.require_subcommand(1);

    static constexpr std::pair<const char*, const char*> kSubcommands[] = {
        {"imaging-carpet", "coincidence-rate carpet over the idler detector distance"},
        {"litho-carpet", "two-photon absorption carpet behind the grating"},
        {"classical-carpet", "classical single-photon intensity carpet"},
        {"planes", "list self-image planes over the idler distance range"},
        {"magnify", "report image magnification for each scan mode"},
        {"singles", "report the uniform singles rate behind the grating"},
        {"verify-oracle", "compare series results against direct quadrature"},
    };

    std::vector<std::unique_ptr<RawOptions>> storage;
    std::map<const CLI::App*, RawOptions*> raw_by_sub;
    for (const auto& [name, description] : kSubcommands) {
        CLI::App* sub = app.add_subcommand(name, description);
        auto raw = std::make_unique<RawOptions>();
        add_options(sub, *raw);
        raw_by_sub[sub] = raw.get();
        storage.push_back(std::move(raw));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const CLI::App* sub = app.get_subcommands().at(0);
    try {
        const RunConfig cfg = build_config(sub->get_name(), *raw_by_sub.at(sub));
        return dispatch(cfg);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DegenerateGeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const QuadratureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace talbot
