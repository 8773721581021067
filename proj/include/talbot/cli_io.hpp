#pragma once

#include <iosfwd>
#include <string>

#include "talbot/carpet.hpp"

namespace talbot {

// Flat, fully-resolved run description. Field names double as the JSON
// config keys (long CLI flag names with dashes turned into underscores).
// Lengths are SI meters.
struct RunConfig {
    std::string subcommand;

    double period = 1e-4;
    double duty = 0.5;
    int harmonics = 50;
    double lambda_s = 883.2e-9;
    double lambda_i = 883.2e-9;
    double ds1 = 0.11;
    double ds2 = 0.20;

    double z_min = 0.0;
    double z_max = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    int nx = 241;
    int nz = 341;

    std::string scan_mode;  // resolved per subcommand when left empty
    std::string out;        // output path; empty keeps text output on stdout
    std::string format = "csv";

    int window_periods = 128;
    int samples_per_period = 64;

    double di = 0.0;          // idler distance for `magnify`
    std::string set = "all";  // comparison set for `verify-oracle`
    int threads = 0;

    bool operator==(const RunConfig&) const = default;
};

// Parse "0.1mm", "100um", "883.2nm", "1e-4" (bare meters), ... The decimal
// exponent is adjusted before the one binary rounding, so every spelling of
// the same physical length parses to the identical double.
double parse_length(const std::string& text);

// JSON round-trip for RunConfig. Length-valued keys may hold either numbers
// (meters) or suffixed strings; serialization always writes numbers.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& json_text, const RunConfig& base);

// Serialize a carpet as CSV: header `x_m,z_m,rate`, one line per cell,
// z-major, 9 significant digits, LF endings. Throws std::runtime_error
// (with the path in the message) on I/O failure.
void write_csv(const Carpet& carpet, const std::string& path);
void write_csv(const Carpet& carpet, std::ostream& out);

// Serialize as binary PGM: `P5\n{n_x} {n_z}\n255\n` then one byte per cell,
// round(value*255); row 0 is the smallest z, column 0 the smallest x.
void write_pgm(const Carpet& carpet, const std::string& path);
void write_pgm(const Carpet& carpet, std::ostream& out);

// Run the comparison sets selected by config.set ("all" or one of imaging |
// classical | singles | litho), printing one metric line per case. Returns
// 0 when every thresholded case passes, 1 otherwise (the litho case is a
// diagnostic: always reported, never thresholded).
int verify_oracle_report(const RunConfig& config, std::ostream& out);

// Full command-line entry point (argument parsing, dispatch, serialization).
// Returns the process exit code: 0 success, 1 runtime failure (quadrature /
// degenerate geometry / I/O), 2 parse or validation failure.
int run_cli(int argc, const char* const* argv);

}  // namespace talbot
