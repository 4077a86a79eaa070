#pragma once

#include <optional>
#include <vector>

#include "ambientlink/ecsd.hpp"
#include "ambientlink/schedule.hpp"
#include "ambientlink/synth.hpp"

namespace ambientlink {

enum class DecodeMode { complex, psd_diff };

std::string to_string(DecodeMode m);
DecodeMode decode_mode_from(const std::string& name);

std::vector<cplx> delta_series(const EcsdSeries& series);

struct DecodeResult {
    std::vector<int> bits;  // preamble first
    std::vector<cplx> deltas;
    cplx signature;
    std::vector<double> margins;
    double noise_floor = 0.0;
    double snr = 0.0;  // |signature| / noise_floor
    std::size_t preamble = 0;
    std::size_t preamble_errors = 0;
};

// In psd_diff mode only the real parts of the series are used.
DecodeResult decode(const EcsdSeries& series, DecodeMode mode, const std::vector<int>& preamble_bits,
                    bool allow_unreliable = false);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};
Interval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

struct MeasurementNoise {
    double sigma = 0.0;
    double t_meas = 0.0;
};

// Streams slot segments through the estimator without holding the whole record.
EcsdSeries simulate_series(const FieldSynthesizer& synth, const SlotSchedule& schedule, RealizationSeed seed,
                           const WindowSpec& windows, double omega, DecodeMode mode, const MeasurementNoise& noise = {});

struct BerOptions {
    std::size_t n_bits = 100;
    std::size_t n_trials = 1;
    std::uint64_t seed = 1;
    DecodeMode mode = DecodeMode::complex;
    std::vector<int> preamble = std::vector<int>(8, 1);
    bool allow_unreliable = false;
    MeasurementNoise noise;
    unsigned workers = 1;
};

struct BerStats {
    std::size_t bits = 0;
    std::size_t errors = 0;
    double ber = 0.0;
    Interval interval;
    std::size_t unreliable_trials = 0;
    std::vector<double> trial_snr;
};

BerStats run_ber(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows,
                 const SynthOptions& synth, double rho1, const BerOptions& options);

std::vector<int> draw_bits(std::size_t n, std::uint64_t seed, std::uint64_t trial);

}
