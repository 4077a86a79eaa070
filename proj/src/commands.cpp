#include "ambientlink/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "ambientlink/csv.hpp"
#include "ambientlink/ecsd.hpp"
#include "ambientlink/kernel.hpp"
#include "ambientlink/link.hpp"
#include "ambientlink/parallel.hpp"
#include "ambientlink/rng.hpp"
#include "ambientlink/synth.hpp"

namespace ambientlink {

namespace fs = std::filesystem;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string prepare(const ScenarioConfig& cfg, const std::string& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create " + out_dir + ": " + ec.message());
    save_text((fs::path(out_dir) / "config.echo.json").string(), config_echo(cfg));
    return config_hash(cfg);
}

std::string path_in(const std::string& dir, const std::string& name)
{
    return (fs::path(dir) / name).string();
}

std::string num(double v, int prec = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

struct CheckRow {
    std::string name;
    double measured;
    double tolerance;
    std::string status;
};

std::string check_table(const std::vector<CheckRow>& rows)
{
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-50s %14s %14s  %s\n", "check", "measured", "tolerance", "status");
    os << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-50s %14.6g %14.6g  %s\n", r.name.c_str(), r.measured, r.tolerance,
                      r.status.c_str());
        os << line;
    }
    return os.str();
}

std::string pass(bool ok)
{
    return ok ? "PASS" : "FAIL";
}

Scene scene_with_rho1(const ScenarioConfig& cfg, bool on)
{
    return make_scene(cfg).with_state(on);
}

}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::regime: return 2;
    case ErrorKind::unreliable: return 3;
    default: return 1;
    }
}

ScenarioConfig apply_sweep(const ScenarioConfig& cfg, double value)
{
    ScenarioConfig c = cfg;
    const std::string& axis = cfg.sweep.axis;
    if (axis == "T") {
        c.windows.T = value;
    } else if (axis == "J") {
        const auto n = static_cast<std::size_t>(std::llround(std::sqrt(value)));
        const double spacing = cfg.metasurface.D / static_cast<double>(cfg.metasurface.n_side);
        c.metasurface.n_side = n;
        c.metasurface.D = spacing * static_cast<double>(n);
    } else if (axis == "L") {
        const Vec3 d = cfg.metasurface.center - cfg.receivers.xr;
        c.metasurface.center = cfg.receivers.xr + d * (value / norm(d));
    } else if (axis == "sigma_meas") {
        c.measurement_noise.sigma = value;
    }
    revalidate(c);
    return c;
}

std::string cmd_verify(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers)
{
    prepare(cfg, out_dir);
    workers = resolve_workers(workers);
    std::vector<CheckRow> rows;
    const double w0 = cfg.spectrum.omega0;
    const double lambda0 = cfg.spectrum.lambda0(cfg.background.c0);

    {
        const Bubble air_water{1.0, 340.0, 1.29e3 / 1e6, 1482.0};
        const cplx r = rho_of(air_water, minnaert_frequency(air_water)) / air_water.R;
        const double rel = std::abs(r - cplx(0.0, 880.0)) / 880.0;
        rows.push_back({"minnaert rho(w_M)/R vs 880i (relative)", rel, 0.01, pass(rel <= 0.01)});
    }

    {
        // Random pairs at 1..5 wavelengths, residual relative to max(|Im G0|, 0.1/(4 pi)).
        double sum50 = 0.0, sum100 = 0.0, worst50 = 0.0;
        const int pairs = 10;
        for (int i = 0; i < pairs; ++i) {
            CounterRng rng(stream_key({0x686b, cfg.seed, static_cast<std::uint64_t>(i)}));
            const Vec3 x{(rng.uniform() - 0.5) * 5.0 * lambda0, (rng.uniform() - 0.5) * 5.0 * lambda0,
                         (rng.uniform() - 0.5) * 5.0 * lambda0};
            const double zc = 2.0 * rng.uniform() - 1.0;
            const double ph = 2.0 * pi * rng.uniform();
            const double rs = std::sqrt(1.0 - zc * zc);
            const double d = lambda0 * (1.0 + 4.0 * rng.uniform());
            const Vec3 y = x + Vec3{rs * std::cos(ph), rs * std::sin(ph), zc} * d;
            const double scale =
                std::max(std::abs(green0(w0, x, y, cfg.background).imag()), 0.1 / (4.0 * pi));
            const double r50 = hk_residual_standard(w0, x, y, 50.0 * lambda0, 0, cfg.background, workers) / scale;
            const double r100 = hk_residual_standard(w0, x, y, 100.0 * lambda0, 0, cfg.background, workers) / scale;
            sum50 += r50;
            sum100 += r100;
            worst50 = std::max(worst50, r50);
        }
        rows.push_back({"standard HK residual at 50 lambda (max)", worst50, 1e-2, pass(worst50 <= 1e-2)});
        rows.push_back({"standard HK mean residual 100 / 50 lambda", sum100 / sum50, 1.0, pass(sum100 < sum50)});
    }

    {
        const Scene on = scene_with_rho1(cfg, true);
        const auto& xr = on.receivers.xr;
        const auto& xrp = on.receivers.xrp;
        const QTerms q = q_expansion(w0, xr, xrp, on.surface.inclusions, on.background);
        const cplx quad = q_quadrature(w0, xr, xrp, on, on.shell.n_nodes, workers);
        const cplx rho = rho_of(on.surface.inclusions.front().reflectivity, w0);
        const double tol = std::max(1e-2 * std::abs(q.term1 + q.term3),
                                    10.0 * std::norm(rho / lambda0) * std::abs(q.term3));
        const double diff = std::abs(quad - q.total());
        rows.push_back({"generalized HK |quadrature - expansion|", diff, tol, pass(diff <= tol)});

        Scene far = on;
        far.shell.L_src = 2.0 * on.shell.L_src;
        const double diff2 = hk_residual_generalized(w0, xr, xrp, far, 0, workers);
        rows.push_back({"generalized HK residual at 2 L_src", diff2, tol, pass(diff2 <= tol)});
    }

    {
        // phi = psi Gaussian with T' = 2T: the auto-ECSD is a squared modulus and should come out
        // exponential, std/mean near 1. Diagnostic only; decoding never uses these windows.
        WindowSpec w;
        w.phi_shape = w.psi_shape = WindowShape::gaussian;
        w.T = 5.0 / cfg.spectrum.B;
        w.Tprime = 2.0 * w.T;
        const SlotSchedule sched = unmodulated(1, 30.0 / cfg.spectrum.B);
        const FieldSynthesizer synth(make_scene(cfg), cfg.spectrum, w, cfg.synthesis);
        const std::size_t n = 400;
        std::vector<double> v(n);
        parallel_for(n, workers, [&](std::size_t i) {
            const FieldRecord rec = synth.realize(sched, {cfg.seed ^ 0x5d1a, i});
            const RecordView auto_view{rec.dt, rec.t0, rec.samples[0], rec.samples[0]};
            v[i] = ecsd_at(auto_view, w0, sched.slot_center(0), w).real();
        });
        double mean = 0.0, var = 0.0;
        for (double x : v) mean += x / static_cast<double>(n);
        for (double x : v) var += (x - mean) * (x - mean) / static_cast<double>(n - 1);
        const double cv = std::sqrt(var) / mean;
        rows.push_back({"auto ECSD std/mean, phi = psi gaussian, T' = 2T", cv, 0.2,
                        std::abs(cv - 1.0) <= 0.2 ? "UNSTABLE (as expected)" : "FAIL"});
    }

    {
        const Scene s = make_scene(cfg);
        const FresnelCheck f = fresnel_bound_check(s.surface, s.receivers.xr, w0, s.background);
        rows.push_back({"fresnel |R_B1| vs 4 lambda0 L / (pi D^2)", f.abs_R_B1, f.bound,
                        f.regime_ok ? pass(f.holds()) : std::string(f.holds() ? "FLAGGED (holds)" : "FLAGGED")});
        std::ostringstream os;
        os << check_table(rows);
        for (const auto& w : f.warnings) os << "warning: " << w << "\n";
        for (const auto& w : cfg.warnings) os << "warning: " << w << "\n";
        save_text(path_in(out_dir, "verify.txt"), os.str());
        return os.str();
    }
}

std::string cmd_predict(const ScenarioConfig& cfg, const std::string& out_dir, unsigned)
{
    const std::string hash = prepare(cfg, out_dir);
    const Scene scene = make_scene(cfg);
    const LinkBudget b = snr_budget(scene, cfg.spectrum, cfg.windows, cfg.metasurface.rho1);
    const double noise_var = cfg.measurement_noise.sigma > 0.0
                                 ? measurement_noise_var(cfg.measurement_noise.sigma, cfg.measurement_noise.t_meas,
                                                         cfg.windows)
                                 : 0.0;

    CsvTable t(hash, {"quantity", "re_value", "im_value", "unit"});
    auto add = [&](const std::string& q, cplx v, const std::string& unit) {
        t.row({q, fmt(v.real()), fmt(v.imag()), unit});
    };
    add("mean_I", b.mean_I, "field^2*time");
    add("mean_II", b.mean_II, "field^2*time");
    add("mean_III", b.mean_III, "field^2*time");
    add("variance", b.variance, "field^4*time^2");
    add("measurement_noise_variance", noise_var, "field^4*time^2");
    add("snr_ratio", b.snr_ratio, "1");
    add("cond_ratio", b.cond_ratio, "1");
    add("rho_B", b.rho_B, "length");
    add("R_B1", b.R_B1, "1");
    add("R_B2", b.R_B2, "length");
    add("fresnel_bound", b.fresnel_bound, "1");
    add("alpha", b.alpha, "rad");
    add("L", b.L, "length");
    add("lambda0", b.lambda0, "length");
    add("J", static_cast<double>(b.J), "1");
    add("slot_rate", b.rate, "bit/time");
    add("implied_rate", b.implied_rate, "bit/time");
    add("T_for_snr", b.T_for_snr, "time");
    add("rate_for_snr", b.rate_for_snr, "bit/time");
    t.save(path_in(out_dir, "budget.csv"));

    std::ostringstream os;
    os << "link budget (config " << hash << ")\n";
    os << "  J = " << b.J << ", L = " << num(b.L) << ", lambda0 = " << num(b.lambda0) << ", rho1 = "
       << num(cfg.metasurface.rho1) << ", BT = " << num(cfg.spectrum.B * cfg.windows.T) << "\n";
    os << "  mean  I = " << num(b.mean_I) << "  II = " << num(b.mean_II) << "  III = " << num(b.mean_III.real())
       << (b.mean_III.imag() < 0 ? " - " : " + ") << num(std::abs(b.mean_III.imag())) << "i\n";
    os << "  variance = " << num(b.variance);
    if (noise_var > 0.0) os << " (+ measurement noise " << num(noise_var) << ")";
    os << "\n";
    os << "  snr_ratio |mean_III| / std = " << num(b.snr_ratio) << "\n";
    os << "  cond_ratio J lambda0 rho1 sqrt(BT) / L^2 = " << num(b.cond_ratio) << "\n";
    os << "  slot rate 1/(4T) = " << num(b.rate) << ", implied rate B (J lambda0 rho1 / L^2)^2 / 10 = "
       << num(b.implied_rate) << "\n";
    os << "  T for snr sqrt(10) = " << num(b.T_for_snr) << " (rate " << num(b.rate_for_snr) << ")\n";
    for (const auto& w : b.warnings) os << "warning: " << w << "\n";
    for (const auto& w : cfg.warnings) os << "warning: " << w << "\n";
    save_text(path_in(out_dir, "budget.txt"), os.str());
    return os.str();
}

std::string cmd_simulate(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers)
{
    const std::string hash = prepare(cfg, out_dir);
    workers = resolve_workers(workers);
    const Scene scene = make_scene(cfg);
    const SlotSchedule schedule = make_schedule(cfg);
    SynthOptions so = cfg.synthesis;
    so.workers = 1;
    const FieldSynthesizer synth(scene, cfg.spectrum, cfg.windows, so);
    const double w0 = cfg.spectrum.omega0;

    if (cfg.write_fld) {
        FieldRecord rec = synth.realize(schedule, {cfg.seed, 0});
        if (cfg.measurement_noise.sigma > 0.0)
            rec = add_measurement_noise(rec, cfg.measurement_noise.sigma, cfg.measurement_noise.t_meas, {cfg.seed, 0});
        write_fld(rec, path_in(out_dir, "record_0000.fld"));
    }

    std::vector<EcsdSeries> all(cfg.n_realizations);
    parallel_for(cfg.n_realizations, workers, [&](std::size_t i) {
        all[i] = simulate_series(synth, schedule, {cfg.seed, i}, cfg.windows, w0, DecodeMode::complex,
                                 cfg.measurement_noise);
    });
    series_table(all.front(), hash).save(path_in(out_dir, "ecsd_k.csv"));

    CsvTable samples(hash, {"realization", "k", "t_center[time]", "re_S[field^2*time]", "im_S[field^2*time]"});
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t k = 0; k < all[i].size(); ++k)
            samples.row({std::to_string(i), std::to_string(k), fmt(all[i].centers[k]), fmt(all[i].values[k].real()),
                         fmt(all[i].values[k].imag())});
    samples.save(path_in(out_dir, "ecsd_samples.csv"));

    // Pool slots by array state.
    struct Acc {
        std::size_t n = 0;
        cplx sum = 0.0;
        double sum_re2 = 0.0, sum_im2 = 0.0;
    };
    Acc acc[2];
    for (const auto& s : all) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            Acc& a = acc[schedule.slot_on(k) ? 1 : 0];
            ++a.n;
            a.sum += s.values[k];
            a.sum_re2 += s.values[k].real() * s.values[k].real();
            a.sum_im2 += s.values[k].imag() * s.values[k].imag();
        }
    }
    const double var_pred = var_closed_form(cfg.spectrum, cfg.windows) +
                            (cfg.measurement_noise.sigma > 0.0
                                 ? measurement_noise_var(cfg.measurement_noise.sigma, cfg.measurement_noise.t_meas,
                                                         cfg.windows)
                                 : 0.0);
    CsvTable moments(hash, {"state", "n_samples", "emp_mean_re[field^2*time]", "emp_mean_im[field^2*time]",
                            "se_re[field^2*time]", "se_im[field^2*time]", "emp_var[field^4*time^2]",
                            "pred_mean_re[field^2*time]", "pred_mean_im[field^2*time]",
                            "closed_mean_re[field^2*time]", "closed_mean_im[field^2*time]",
                            "pred_var[field^4*time^2]"});
    std::ostringstream os;
    os << "simulate: " << cfg.n_realizations << " realizations, " << schedule.n_slots() << " slots, dt = "
       << num(synth.dt()) << " (config " << hash << ")\n";
    for (int state = 0; state < 2; ++state) {
        const Acc& a = acc[state];
        if (a.n == 0) continue;
        const double n = static_cast<double>(a.n);
        const cplx mean = a.sum / n;
        const double vre = a.n > 1 ? (a.sum_re2 - n * mean.real() * mean.real()) / (n - 1.0) : 0.0;
        const double vim = a.n > 1 ? (a.sum_im2 - n * mean.imag() * mean.imag()) / (n - 1.0) : 0.0;
        const Scene s = scene.with_state(state == 1);
        const cplx pred = mean_general(w0, s.receivers.xr, s.receivers.xrp, s, cfg.spectrum, cfg.windows);
        cplx closed(nan, nan);
        try {
            closed = mean_closed_form(s, cfg.spectrum, cfg.windows).total();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::regime) throw;
        }
        moments.row({state ? "on" : "off", std::to_string(a.n), fmt(mean.real()), fmt(mean.imag()),
                     fmt(std::sqrt(vre / n)), fmt(std::sqrt(vim / n)), fmt(vre + vim), fmt(pred.real()),
                     fmt(pred.imag()), fmt(closed.real()), fmt(closed.imag()), fmt(var_pred)});
        os << "  " << (state ? "on " : "off") << ": mean " << num(mean.real()) << " " << num(mean.imag())
           << "i (SE " << num(std::sqrt(vre / n)) << ", " << num(std::sqrt(vim / n)) << ") predicted "
           << num(pred.real()) << " " << num(pred.imag()) << "i; variance " << num(vre + vim) << " predicted "
           << num(var_pred) << "\n";
    }
    moments.save(path_in(out_dir, "moments.csv"));
    for (const auto& w : cfg.warnings) os << "warning: " << w << "\n";
    return os.str();
}

std::string cmd_ber(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers)
{
    const std::string hash = prepare(cfg, out_dir);
    workers = resolve_workers(workers);
    std::vector<double> points = cfg.sweep.values;
    const bool swept = cfg.sweep.axis != "none";
    if (!swept) points = {nan};

    CsvTable t(hash, {"axis", "value", "bits", "errors", "ber[1]", "wilson_lo[1]", "wilson_hi[1]", "snr_ratio[1]",
                      "cond_ratio[1]", "mean_trial_snr[1]", "unreliable_trials"});
    std::ostringstream rep;
    rep << "ber report\n";
    rep << "config_hash: " << hash << "\n";
    rep << "axis: " << cfg.sweep.axis << "\n";
    rep << "decode_mode: " << to_string(cfg.decode_mode) << "\n";
    rep << "trials_per_point: " << cfg.ber_trials << "\n";
    rep << "payload_bits_per_trial: " << cfg.ber_bits << "\n";
    for (double v : points) {
        const ScenarioConfig c = swept ? apply_sweep(cfg, v) : cfg;
        const Scene scene = make_scene(c);
        double snr = nan, cond = nan;
        try {
            const LinkBudget b = snr_budget(scene, c.spectrum, c.windows, c.metasurface.rho1);
            snr = b.snr_ratio;
            cond = b.cond_ratio;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::regime) throw;
        }
        const BerStats st =
            run_ber(scene, c.spectrum, c.windows, c.synthesis, c.metasurface.rho1, make_ber_options(c, workers));
        double mean_snr = 0.0;
        for (double s : st.trial_snr) mean_snr += s;
        mean_snr /= static_cast<double>(st.trial_snr.size());
        t.row({cfg.sweep.axis, swept ? fmt(v) : "", std::to_string(st.bits), std::to_string(st.errors), fmt(st.ber),
               fmt(st.interval.lo), fmt(st.interval.hi), fmt(snr), fmt(cond), fmt(mean_snr),
               std::to_string(st.unreliable_trials)});
        rep << "\n[point]\n";
        if (swept) rep << "value: " << num(v, 17) << "\n";
        rep << "bits: " << st.bits << "\nerrors: " << st.errors << "\nber: " << num(st.ber) << "\n";
        rep << "wilson95: [" << num(st.interval.lo) << ", " << num(st.interval.hi) << "]\n";
        rep << "predicted_snr_ratio: " << num(snr) << "\ncond_ratio: " << num(cond) << "\n";
        rep << "mean_trial_snr: " << num(mean_snr) << "\nunreliable_trials: " << st.unreliable_trials << "\n";
    }
    for (const auto& w : cfg.warnings) rep << "warning: " << w << "\n";
    t.save(path_in(out_dir, "ber.csv"));
    save_text(path_in(out_dir, "ber_report.txt"), rep.str());
    return rep.str();
}

std::string cmd_decode(const ScenarioConfig& cfg, const std::string& series_csv, const std::string& out_dir,
                       unsigned)
{
    const EcsdSeries series = read_series_csv(series_csv);
    const std::string hash = prepare(cfg, out_dir);
    const DecodeResult d = decode(series, cfg.decode_mode, cfg.schedule.preamble, cfg.allow_unreliable);
    decode_table(d, hash).save(path_in(out_dir, "deltas.csv"));
    std::ostringstream os;
    os << "decoded " << d.bits.size() << " bits (" << d.preamble << " preamble, " << d.preamble_errors
       << " preamble errors), signature " << num(d.signature.real()) << " " << num(d.signature.imag())
       << "i, noise floor " << num(d.noise_floor) << ", snr " << num(d.snr) << "\n";
    os << "payload: ";
    for (std::size_t k = d.preamble; k < d.bits.size(); ++k) os << d.bits[k];
    os << "\n";
    return os.str();
}

}
