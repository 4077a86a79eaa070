#include "ambientlink/link.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <variant>

#include "ambientlink/error.hpp"
#include "ambientlink/parallel.hpp"

namespace ambientlink {

double SlotSchedule::im_rho(double t) const
{
    if (t < 0.0 || t >= duration()) return 0.0;
    const auto s = static_cast<std::size_t>(std::floor(t / (2.0 * T)));
    return slot_on(std::min(s, n_slots() - 1)) ? rho1 : 0.0;
}

double SlotSchedule::payload_rate() const
{
    return static_cast<double>(bits.size() - preamble) / duration();
}

SlotSchedule encode(const std::vector<int>& bits, double rho1, double T, const std::vector<int>& preamble)
{
    if (bits.empty() && preamble.empty()) fail(ErrorKind::validation, "encode: no bits");
    if (!(rho1 >= 0.0)) fail(ErrorKind::validation, "encode: rho1 must be nonnegative");
    if (!(T > 0.0)) fail(ErrorKind::validation, "encode: T must be positive");
    SlotSchedule s;
    s.T = T;
    s.rho1 = rho1;
    s.preamble = preamble.size();
    s.bits = preamble;
    s.bits.insert(s.bits.end(), bits.begin(), bits.end());
    for (int& b : s.bits) {
        if (b != 0 && b != 1) fail(ErrorKind::validation, "encode: bits must be 0 or 1");
    }
    return s;
}

SlotSchedule unmodulated(std::size_t n_bits, double T)
{
    return encode(std::vector<int>(n_bits, 0), 0.0, T, {});
}

std::string to_string(DecodeMode m)
{
    return m == DecodeMode::complex ? "complex" : "psd_diff";
}

DecodeMode decode_mode_from(const std::string& name)
{
    if (name == "complex") return DecodeMode::complex;
    if (name == "psd_diff") return DecodeMode::psd_diff;
    fail(ErrorKind::validation, "unknown decode mode '" + name + "'");
}

std::vector<cplx> delta_series(const EcsdSeries& series)
{
    if (series.size() % 2 != 0) fail(ErrorKind::validation, "delta_series: series length is odd");
    std::vector<cplx> d(series.size() / 2);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = series.values[2 * k + 1] - series.values[2 * k];
    return d;
}

DecodeResult decode(const EcsdSeries& series, DecodeMode mode, const std::vector<int>& preamble_bits,
                    bool allow_unreliable)
{
    EcsdSeries s = series;
    if (mode == DecodeMode::psd_diff)
        for (auto& v : s.values) v = v.real();
    DecodeResult r;
    r.deltas = delta_series(s);
    r.preamble = preamble_bits.size();
    if (r.preamble > r.deltas.size()) fail(ErrorKind::validation, "decode: preamble longer than the series");
    std::size_t ones = 0;
    cplx g = 0.0;
    for (std::size_t k = 0; k < r.preamble; ++k) {
        if (preamble_bits[k]) {
            g += r.deltas[k];
            ++ones;
        }
    }
    if (ones == 0) fail(ErrorKind::validation, "decode: preamble contains no 1-bit");
    g /= static_cast<double>(ones);
    r.signature = g;

    // Reference slots (even index) all sit at level 0; their spread sets the floor of the
    // preamble average of differences.
    const std::size_t K = r.deltas.size();
    cplx mean = 0.0;
    for (std::size_t k = 0; k < K; ++k) mean += s.values[2 * k];
    mean /= static_cast<double>(K);
    double var = 0.0;
    for (std::size_t k = 0; k < K; ++k) var += std::norm(s.values[2 * k] - mean);
    var = K > 1 ? var / static_cast<double>(K - 1) : 0.0;
    r.noise_floor = std::sqrt(2.0 * var / static_cast<double>(ones));
    r.snr = r.noise_floor > 0.0 ? std::abs(g) / r.noise_floor : std::numeric_limits<double>::infinity();
    if (!allow_unreliable && std::abs(g) < 5.0 * r.noise_floor) {
        std::ostringstream os;
        os << "unreliable signature: |g| / noise floor = " << r.snr << " < 5";
        fail(ErrorKind::unreliable, os.str(), r.snr);
    }

    const double g2 = std::norm(g);
    r.bits.resize(K);
    r.margins.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double m = g2 > 0.0 ? (r.deltas[k] * std::conj(g)).real() / g2 : 0.0;
        r.margins[k] = m;
        r.bits[k] = m > 0.5 ? 1 : 0;
        if (k < r.preamble && r.bits[k] != preamble_bits[k]) ++r.preamble_errors;
    }
    return r;
}

Interval wilson_interval(std::size_t successes, std::size_t n, double z)
{
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double den = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
    return {successes == 0 ? 0.0 : std::max(0.0, center - half), successes == n ? 1.0 : std::min(1.0, center + half)};
}

EcsdSeries simulate_series(const FieldSynthesizer& synth, const SlotSchedule& schedule, RealizationSeed seed,
                           const WindowSpec& windows, double omega, DecodeMode mode, const MeasurementNoise& noise)
{
    const RecordLayout layout = synth.layout(schedule);
    const std::size_t slots = schedule.n_slots();
    EcsdSeries out;
    out.omega = omega;
    out.values.resize(slots);
    out.centers.resize(slots);

    std::deque<SlotSegment> ring;  // segments for slots [first_slot, first_slot + ring.size())
    std::size_t first_slot = 0;
    auto produce = [&](std::size_t s) {
        SlotSegment seg = synth.segment(schedule, layout, seed, s);
        if (noise.sigma > 0.0) {
            add_measurement_noise_range(seg.r, seg.first, 0, layout.dt, noise.sigma, noise.t_meas, seed);
            add_measurement_noise_range(seg.rp, seg.first, 1, layout.dt, noise.sigma, noise.t_meas, seed);
        }
        ring.push_back(std::move(seg));
    };

    std::vector<double> r, rp;
    for (std::size_t k = 0; k < slots; ++k) {
        const std::size_t need_hi = std::min(slots - 1, k + 1);
        while (first_slot + ring.size() <= need_hi) produce(first_slot + ring.size());
        while (first_slot + 1 < k) {
            ring.pop_front();
            ++first_slot;
        }
        r.clear();
        rp.clear();
        for (const auto& seg : ring) {
            r.insert(r.end(), seg.r.begin(), seg.r.end());
            rp.insert(rp.end(), seg.rp.begin(), seg.rp.end());
        }
        const RecordView v{layout.dt, layout.t0, r, rp, ring.front().first};
        out.centers[k] = schedule.slot_center(k);
        if (mode == DecodeMode::psd_diff) {
            out.values[k] = ecsd_psd_diff(v, omega, out.centers[k], windows);
        } else {
            out.values[k] = ecsd_at(v, omega, out.centers[k], windows);
        }
    }
    return out;
}

std::vector<int> draw_bits(std::size_t n, std::uint64_t seed, std::uint64_t trial)
{
    std::vector<int> bits(n);
    for (std::size_t k = 0; k < n; ++k) {
        CounterRng rng(stream_key({static_cast<std::uint64_t>(StreamTag::bits), seed, trial, k}));
        bits[k] = rng.uniform() < 0.5 ? 1 : 0;
    }
    return bits;
}

BerStats run_ber(const Scene& scene, const NoiseSpectrum& spectrum, const WindowSpec& windows,
                 const SynthOptions& synth_options, double rho1, const BerOptions& options)
{
    Scene s = scene;
    s.surface.tunable.rho1 = rho1;
    for (auto& inc : s.surface.inclusions)
        if (auto* t = std::get_if<Tunable>(&inc.reflectivity)) t->rho1 = rho1;
    SynthOptions so = synth_options;
    so.workers = 1;
    const FieldSynthesizer synth(s, spectrum, windows, so);

    struct Trial {
        std::size_t errors = 0;
        double snr = 0.0;
        bool unreliable = false;
    };
    std::vector<Trial> trials(options.n_trials);
    parallel_for(options.n_trials, options.workers, [&](std::size_t t) {
        const std::vector<int> payload = draw_bits(options.n_bits, options.seed, t);
        const SlotSchedule schedule = encode(payload, rho1, windows.T, options.preamble);
        const EcsdSeries series = simulate_series(synth, schedule, RealizationSeed{options.seed, t}, windows,
                                                  spectrum.omega0, options.mode, options.noise);
        DecodeResult d = decode(series, options.mode, options.preamble, true);
        trials[t].snr = d.snr;
        trials[t].unreliable = std::abs(d.signature) < 5.0 * d.noise_floor;
        if (trials[t].unreliable && !options.allow_unreliable) {
            std::ostringstream os;
            os << "trial " << t << ": unreliable signature, |g| / noise floor = " << d.snr;
            fail(ErrorKind::unreliable, os.str(), d.snr);
        }
        for (std::size_t k = 0; k < payload.size(); ++k)
            if (d.bits[options.preamble.size() + k] != payload[k]) ++trials[t].errors;
    });

    BerStats st;
    for (const auto& t : trials) {
        st.bits += options.n_bits;
        st.errors += t.errors;
        st.trial_snr.push_back(t.snr);
        if (t.unreliable) ++st.unreliable_trials;
    }
    st.ber = st.bits > 0 ? static_cast<double>(st.errors) / static_cast<double>(st.bits) : 0.0;
    st.interval = wilson_interval(st.errors, st.bits);
    return st;
}

}
