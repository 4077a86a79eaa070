#include "ambientlink/synth.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "ambientlink/error.hpp"
#include "ambientlink/parallel.hpp"

namespace ambientlink {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_plan c2r_plan(std::size_t n)
{
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    auto* out = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(n, p);
    return p;
}

struct FftBuffers {
    explicit FftBuffers(std::size_t n)
        : spec(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))),
          time(static_cast<double*>(fftw_malloc(sizeof(double) * n)))
    {
        std::memset(spec, 0, sizeof(fftw_complex) * (n / 2 + 1));
    }
    ~FftBuffers()
    {
        fftw_free(spec);
        fftw_free(time);
    }
    FftBuffers(const FftBuffers&) = delete;
    FftBuffers& operator=(const FftBuffers&) = delete;

    fftw_complex* spec;
    double* time;
};

}

struct FieldSynthesizer::Tables {
    std::size_t m_lo = 0;
    std::size_t m_hi = 0;  // inclusive
    // reduced modes: lower Cholesky factor of power * [[Q11, conj Q12], [Q12, Q22]]
    std::vector<double> l11, l22;
    std::vector<cplx> l21;
    // direct mode: sqrt(power * weight) * G(x, y_n) per node, bin-major
    std::size_t n_nodes = 0;
    std::vector<cplx> gr, grp;
};

std::string to_string(SynthKernel k)
{
    switch (k) {
    case SynthKernel::expansion: return "expansion";
    case SynthKernel::quadrature: return "quadrature";
    case SynthKernel::direct: return "direct";
    }
    return "?";
}

SynthKernel synth_kernel_from(const std::string& name)
{
    if (name == "expansion") return SynthKernel::expansion;
    if (name == "quadrature") return SynthKernel::quadrature;
    if (name == "direct") return SynthKernel::direct;
    fail(ErrorKind::validation, "unknown synthesis kernel '" + name + "'");
}

double default_dt(const NoiseSpectrum& spectrum, double sample_factor)
{
    return 2.0 * pi / (5.0 * (spectrum.omega0 + spectrum.B)) / sample_factor;
}

std::size_t fft_size_at_least(std::size_t n)
{
    std::size_t best = std::size_t(1) << 62;
    for (std::size_t p2 = 1; p2 < best; p2 *= 2)
        for (std::size_t p3 = p2; p3 < best; p3 *= 3)
            for (std::size_t p5 = p3; p5 < best; p5 *= 5) {
                if (p5 >= n) {
                    best = std::min(best, p5);
                    break;
                }
            }
    return std::max<std::size_t>(best, 2);
}

FieldSynthesizer::FieldSynthesizer(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows,
                                   const SynthOptions& options)
    : scene_on_(scene.with_state(true)),
      scene_off_(scene.with_state(false)),
      spectrum_(spectrum),
      windows_(windows),
      options_(options)
{
    validate(spectrum_);
    validate(windows_);
    if (!(options_.oversample >= 1.0)) fail(ErrorKind::validation, "synthesis: oversample must be at least 1");
    if (!(options_.sample_factor >= 1.0)) fail(ErrorKind::validation, "synthesis: sample_factor must be at least 1");
    dt_ = default_dt(spectrum_, options_.sample_factor);
}

FieldSynthesizer::~FieldSynthesizer() = default;

RecordLayout FieldSynthesizer::layout(const SlotSchedule& schedule) const
{
    if (schedule.bits.empty()) fail(ErrorKind::validation, "synthesis: empty schedule");
    if (schedule.T * spectrum_.B < 10.0) fail(ErrorKind::regime, "synthesis: slot scale T below 10/B");
    RecordLayout l;
    l.dt = dt_;
    l.guard = static_cast<std::size_t>(std::ceil(windows_.psi_half_width() / dt_));
    l.t0 = -static_cast<double>(l.guard) * dt_;
    const std::size_t main = static_cast<std::size_t>(std::ceil(schedule.duration() / dt_)) + 1;
    l.n_samples = 2 * l.guard + main;
    const std::size_t slots = schedule.n_slots();
    l.starts.resize(slots + 1);
    l.starts[0] = 0;
    for (std::size_t s = 1; s < slots; ++s)
        l.starts[s] = l.guard + static_cast<std::size_t>(std::ceil(schedule.slot_start(s) / dt_ - 1e-9));
    l.starts[slots] = l.n_samples;
    return l;
}

const FieldSynthesizer::Tables& FieldSynthesizer::tables(std::size_t n_fft, bool on) const
{
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find({n_fft, on});
        if (it != cache_.end()) return *it->second;
    }
    auto t = std::make_shared<Tables>();
    const Scene& scene = on ? scene_on_ : scene_off_;
    const double dw = 2.0 * pi / (static_cast<double>(n_fft) * dt_);
    const double lo = spectrum_.omega0 - spectrum_.B * spectrum_.s_max();
    const double hi = spectrum_.omega0 + spectrum_.B * spectrum_.s_max();
    t->m_lo = static_cast<std::size_t>(std::max(1.0, std::floor(lo / dw + 0.5)));
    t->m_hi = static_cast<std::size_t>(std::ceil(hi / dw - 0.5));
    if (t->m_hi >= n_fft / 2) fail(ErrorKind::regime, "synthesis: band exceeds the sampling grid");
    const std::size_t bins = t->m_hi - t->m_lo + 1;
    std::vector<double> power(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double w = dw * static_cast<double>(t->m_lo + b);
        power[b] = spectrum_.band_power(std::max(lo, w - 0.5 * dw), std::min(hi, w + 0.5 * dw));
    }
    const Vec3& xr = scene.receivers.xr;
    const Vec3& xrp = scene.receivers.xrp;

    if (options_.kernel == SynthKernel::direct) {
        const std::size_t n = check_quadrature_regime(hi, xr, xrp, scene, options_.shell_nodes);
        const SourceShell shell = make_shell(scene.shell.L_src, n);
        t->n_nodes = n;
        t->gr.resize(bins * n);
        t->grp.resize(bins * n);
        parallel_for(bins, options_.workers, [&](std::size_t b) {
            const double w = dw * static_cast<double>(t->m_lo + b);
            const double a = std::sqrt(power[b] * shell.weights[0]);
            for (std::size_t k = 0; k < n; ++k) {
                t->gr[b * n + k] = a * green_full(w, xr, shell.nodes[k], scene.surface.inclusions, scene.background);
                t->grp[b * n + k] = a * green_full(w, xrp, shell.nodes[k], scene.surface.inclusions, scene.background);
            }
        });
    } else {
        t->l11.resize(bins);
        t->l22.resize(bins);
        t->l21.resize(bins);
        parallel_for(bins, options_.workers, [&](std::size_t b) {
            const double w = dw * static_cast<double>(t->m_lo + b);
            double q11, q22;
            cplx q12;
            if (options_.kernel == SynthKernel::expansion) {
                q11 = q_hat(w, xr, xr, scene).real();
                q22 = q_hat(w, xrp, xrp, scene).real();
                q12 = q_hat(w, xr, xrp, scene);
            } else {
                q11 = q_quadrature(w, xr, xr, scene, options_.shell_nodes).real();
                q22 = q_quadrature(w, xrp, xrp, scene, options_.shell_nodes).real();
                q12 = q_quadrature(w, xr, xrp, scene, options_.shell_nodes);
            }
            const double p = power[b];
            const double a11 = std::max(0.0, p * q11);
            const double l11 = std::sqrt(a11);
            const cplx l21 = l11 > 0.0 ? p * q12 / l11 : cplx(0.0);
            t->l11[b] = l11;
            t->l21[b] = l21;
            t->l22[b] = std::sqrt(std::max(0.0, p * q22 - std::norm(l21)));
        });
    }

    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = cache_.emplace(std::make_pair(n_fft, on), t);
    return *it->second;
}

SlotSegment FieldSynthesizer::segment(const SlotSchedule& schedule, const RecordLayout& layout, RealizationSeed seed,
                                      std::size_t slot) const
{
    const std::size_t m = layout.slot_size(slot);
    const std::size_t n_fft = fft_size_at_least(static_cast<std::size_t>(std::ceil(options_.oversample * static_cast<double>(m))));
    if (static_cast<double>(n_fft) * dt_ < 2.0 * schedule.T) {
        fail(ErrorKind::regime, "synthesis: frequency grid coarser than 2 pi / slot duration");
    }
    const Tables& t = tables(n_fft, schedule.slot_on(slot));
    const std::size_t bins = t.m_hi - t.m_lo + 1;

    SlotSegment seg;
    seg.first = layout.starts[slot];
    FftBuffers fr(n_fft), frp(n_fft);
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t bin = t.m_lo + b;
        cplx zr, zrp;
        if (options_.kernel == SynthKernel::direct) {
            for (std::size_t k = 0; k < t.n_nodes; ++k) {
                CounterRng rng(stream_key({static_cast<std::uint64_t>(StreamTag::node_field), seed.master, seed.index,
                                           slot, k, bin}));
                const cplx a = rng.complex_normal();
                zr += a * t.gr[b * t.n_nodes + k];
                zrp += a * t.grp[b * t.n_nodes + k];
            }
        } else {
            CounterRng rng(stream_key({static_cast<std::uint64_t>(StreamTag::field), seed.master, seed.index, slot, bin}));
            const cplx x1 = rng.complex_normal();
            const cplx x2 = rng.complex_normal();
            zr = t.l11[b] * x1;
            zrp = t.l21[b] * x1 + t.l22[b] * x2;
        }
        // u = 2 Re sum Z e^{-i w t}; the c2r transform applies e^{+i w t} to its input.
        fr.spec[bin][0] = zr.real();
        fr.spec[bin][1] = -zr.imag();
        frp.spec[bin][0] = zrp.real();
        frp.spec[bin][1] = -zrp.imag();
    }
    const fftw_plan plan = c2r_plan(n_fft);
    fftw_execute_dft_c2r(plan, fr.spec, fr.time);
    fftw_execute_dft_c2r(plan, frp.spec, frp.time);
    seg.r.assign(fr.time, fr.time + m);
    seg.rp.assign(frp.time, frp.time + m);
    return seg;
}

FieldRecord FieldSynthesizer::realize(const SlotSchedule& schedule, RealizationSeed seed) const
{
    const RecordLayout l = layout(schedule);
    FieldRecord rec;
    rec.dt = l.dt;
    rec.t0 = l.t0;
    rec.samples.assign(2, std::vector<double>(l.n_samples));
    for (std::size_t s = 0; s <= schedule.n_slots(); ++s) rec.slot_boundaries.push_back(schedule.slot_start(s));
    parallel_for(schedule.n_slots(), options_.workers, [&](std::size_t s) {
        const SlotSegment seg = segment(schedule, l, seed, s);
        std::copy(seg.r.begin(), seg.r.end(), rec.samples[0].begin() + static_cast<std::ptrdiff_t>(seg.first));
        std::copy(seg.rp.begin(), seg.rp.end(), rec.samples[1].begin() + static_cast<std::ptrdiff_t>(seg.first));
    });
    return rec;
}

FieldRecord synth_realization(const Scene& scene, const NoiseSpectrum& spectrum, const SlotSchedule& schedule,
                              const WindowSpec& windows, RealizationSeed seed, const SynthOptions& options)
{
    return FieldSynthesizer(scene, spectrum, windows, options).realize(schedule, seed);
}

void add_measurement_noise_range(std::span<double> samples, std::size_t first, std::size_t receiver, double dt,
                                 double sigma_meas, double t_meas, RealizationSeed seed)
{
    if (sigma_meas == 0.0) return;
    if (!(t_meas >= 2.0 * dt)) fail(ErrorKind::regime, "measurement noise: t_meas below 2 dt");
    // exp(-2 pi s^2) autocorrelates to exp(-pi s^2)
    const std::size_t half = static_cast<std::size_t>(std::ceil(2.0 * t_meas / dt));
    std::vector<double> h(2 * half + 1);
    double energy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double s = (static_cast<double>(i) - static_cast<double>(half)) * dt / t_meas;
        h[i] = std::exp(-2.0 * pi * s * s);
        energy += h[i] * h[i];
    }
    const double scale = sigma_meas / std::sqrt(energy);
    const std::size_t n = samples.size();
    std::vector<double> white(n + 2 * half);
    for (std::size_t k = 0; k < white.size(); ++k) {
        // absolute index shifted by `half` so that it stays unsigned
        const std::uint64_t index = first + k;
        CounterRng rng(stream_key({static_cast<std::uint64_t>(StreamTag::measurement), seed.master, seed.index,
                                   receiver, index}));
        white[k] = std::sqrt(2.0) * rng.complex_normal().real();
    }
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * white[j + i];
        samples[j] += scale * acc;
    }
}

FieldRecord add_measurement_noise(const FieldRecord& record, double sigma_meas, double t_meas, RealizationSeed seed)
{
    FieldRecord out = record;
    for (std::size_t r = 0; r < out.samples.size(); ++r)
        add_measurement_noise_range(out.samples[r], 0, r, out.dt, sigma_meas, t_meas, seed);
    return out;
}

}
