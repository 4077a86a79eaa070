#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "ambientlink/kernel.hpp"
#include "ambientlink/record.hpp"
#include "ambientlink/rng.hpp"
#include "ambientlink/schedule.hpp"

namespace ambientlink {

// How per-bin receiver covariances are obtained.
//   expansion:  2x2 covariance from the five-term kernel expansion
//   quadrature: 2x2 covariance from the finite shell quadrature
//   direct:     per-node source amplitudes propagated through green_full
enum class SynthKernel { expansion, quadrature, direct };

std::string to_string(SynthKernel k);
SynthKernel synth_kernel_from(const std::string& name);

struct SynthOptions {
    SynthKernel kernel = SynthKernel::expansion;
    double oversample = 2.0;      // FFT period / segment length
    double sample_factor = 1.0;   // dt = 2 pi / (5 (w0 + B)) / sample_factor
    std::size_t shell_nodes = 0;  // 0: Nyquist minimum
    unsigned workers = 1;
};

struct SlotSegment {
    std::size_t first = 0;  // index of the first sample in the record
    std::vector<double> r, rp;
};

struct RecordLayout {
    double dt = 0.0;
    double t0 = 0.0;
    std::size_t guard = 0;
    std::size_t n_samples = 0;
    std::vector<std::size_t> starts;  // first sample of each slot, plus n_samples

    std::size_t slot_size(std::size_t s) const { return starts[s + 1] - starts[s]; }
};

class FieldSynthesizer {
public:
    FieldSynthesizer(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows,
                     const SynthOptions& options = {});
    ~FieldSynthesizer();
    FieldSynthesizer(const FieldSynthesizer&) = delete;
    FieldSynthesizer& operator=(const FieldSynthesizer&) = delete;

    double dt() const { return dt_; }
    RecordLayout layout(const SlotSchedule& schedule) const;
    SlotSegment segment(const SlotSchedule& schedule, const RecordLayout& layout, RealizationSeed seed,
                        std::size_t slot) const;
    FieldRecord realize(const SlotSchedule& schedule, RealizationSeed seed) const;

private:
    struct Tables;
    const Tables& tables(std::size_t n_fft, bool on) const;

    Scene scene_on_, scene_off_;
    NoiseSpectrum spectrum_;
    WindowSpec windows_;
    SynthOptions options_;
    double dt_ = 0.0;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<std::size_t, bool>, std::shared_ptr<Tables>> cache_;
};

double default_dt(const NoiseSpectrum& spectrum, double sample_factor = 1.0);
std::size_t fft_size_at_least(std::size_t n);

FieldRecord synth_realization(const Scene& scene, const NoiseSpectrum& spectrum, const SlotSchedule& schedule,
                              const WindowSpec& windows, RealizationSeed seed, const SynthOptions& options = {});

// Gaussian covariance sigma^2 exp(-pi (t/t_meas)^2), independent per receiver. Samples are
// white noise keyed by absolute index smoothed by a sampled Gaussian kernel, so any
// sub-range can be regenerated on its own.
void add_measurement_noise_range(std::span<double> samples, std::size_t first, std::size_t receiver, double dt,
                                 double sigma_meas, double t_meas, RealizationSeed seed);
FieldRecord add_measurement_noise(const FieldRecord& record, double sigma_meas, double t_meas, RealizationSeed seed);

}
