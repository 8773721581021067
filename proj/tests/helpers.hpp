#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "talbot/cli_io.hpp"

namespace test_helpers {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    if (n == 1) {
        xs[0] = lo;
        return xs;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + i * step;
    return xs;
}

// Magnitude of the k-th DFT coefficient of a real sequence.
inline double dft_magnitude(const std::vector<double>& v, int bin) {
    const double two_pi = 6.283185307179586476925286766559;
    std::complex<double> acc{0.0, 0.0};
    const auto n = static_cast<double>(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double ph = -two_pi * static_cast<double>(bin) * static_cast<double>(j) / n;
        acc += v[j] * std::complex<double>{std::cos(ph), std::sin(ph)};
    }
    return std::abs(acc);
}

// Bin with the largest DFT magnitude among 1..max_bin (mean removed, so the
// DC term never competes). This is the fundamental spatial frequency in
// cycles per record length.
inline int dft_argmax_bin(const std::vector<double>& v, int max_bin) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    std::vector<double> centered(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) centered[j] = v[j] - mean;
    int best = 1;
    double best_mag = -1.0;
    for (int k = 1; k <= max_bin; ++k) {
        const double m = dft_magnitude(centered, k);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    return best;
}

// Mean over congruence classes modulo p: collapses a (nearly) periodic
// record to one period of length p.
inline std::vector<double> fold_period(const std::vector<double>& v, int p) {
    std::vector<double> folded(static_cast<std::size_t>(p), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(p), 0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        folded[j % static_cast<std::size_t>(p)] += v[j];
        ++counts[j % static_cast<std::size_t>(p)];
    }
    for (std::size_t j = 0; j < folded.size(); ++j) folded[j] /= counts[j];
    return folded;
}

// Lag maximizing the circular cross-correlation sum_k a[k] * b[(k+lag) % n].
inline int circular_xcorr_argmax(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    int best = 0;
    double best_val = -1e300;
    for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[(k + lag) % n];
        if (acc > best_val) {
            best_val = acc;
            best = static_cast<int>(lag);
        }
    }
    return best;
}

inline bool file_exists(const std::string& path) {
    std::ifstream f(path);
    return f.good();
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

// Invokes the full CLI in-process with a synthesized argv.
inline int run_cli_args(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"talbot"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(storage.size());
    for (const auto& s : storage) argv.push_back(s.c_str());
    return talbot::run_cli(static_cast<int>(argv.size()), argv.data());
}

// RAII redirect of a std::ostream (cout/cerr) into a string buffer.
class CaptureStream {
   public:
    explicit CaptureStream(std::ostream& stream) : stream_(stream), old_(stream.rdbuf(buffer_.rdbuf())) {}
    ~CaptureStream() { stream_.rdbuf(old_); }
    std::string text() const { return buffer_.str(); }

   private:
    std::ostream& stream_;
    std::ostringstream buffer_;
    std::streambuf* old_;
};

}  // namespace test_helpers
