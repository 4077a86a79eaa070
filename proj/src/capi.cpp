#include "ambientlink/ambientlink.h"

#include <exception>
#include <string>

#include "ambientlink/commands.hpp"
#include "ambientlink/config.hpp"
#include "ambientlink/csv.hpp"
#include "ambientlink/ecsd.hpp"
#include "ambientlink/kernel.hpp"
#include "ambientlink/link.hpp"
#include "ambientlink/synth.hpp"

struct al_scenario {
    ambientlink::ScenarioConfig cfg;
};

struct al_record {
    ambientlink::FieldRecord rec;
};

struct al_series {
    ambientlink::EcsdSeries series;
};

struct al_text {
    std::string text;
};

namespace {

thread_local std::string last_error;
thread_local double last_value = 0.0;

template <class F>
al_status guarded(F&& f)
{
    try {
        last_error.clear();
        last_value = 0.0;
        f();
        return AL_OK;
    } catch (const ambientlink::Error& e) {
        last_error = e.what();
        last_value = e.value();
        return static_cast<al_status>(static_cast<int>(e.kind()));
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return AL_ERR_INTERNAL;
}

void need(const void* p, const char* what)
{
    if (!p) ambientlink::fail(ambientlink::ErrorKind::argument, std::string(what) + " is null");
}

al_text* text(std::string s)
{
    return new al_text{std::move(s)};
}

template <class Cmd>
al_status run_cmd(const al_scenario* s, const char* out_dir, al_text** report, Cmd&& cmd)
{
    return guarded([&] {
        need(s, "scenario");
        need(report, "report");
        *report = nullptr;
        const std::string dir = out_dir ? out_dir : s->cfg.out_dir;
        *report = text(cmd(dir));
    });
}

}

extern "C" {

const char* al_version(void)
{
    return "1.0.0";
}

const char* al_last_error(void)
{
    return last_error.c_str();
}

double al_last_error_value(void)
{
    return last_value;
}

int al_exit_code(al_status status)
{
    switch (status) {
    case AL_OK: return 0;
    case AL_ERR_REGIME: return 2;
    case AL_ERR_UNRELIABLE: return 3;
    default: return 1;
    }
}

const char* al_text_get(const al_text* t)
{
    return t ? t->text.c_str() : "";
}

void al_text_free(al_text* t)
{
    delete t;
}

al_status al_scenario_load(const char* path, int override_spacing, al_scenario** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new al_scenario{ambientlink::parse_config(path, override_spacing != 0)};
    });
}

al_status al_scenario_parse(const char* json_text, int override_spacing, al_scenario** out)
{
    return guarded([&] {
        need(json_text, "json_text");
        need(out, "out");
        *out = nullptr;
        *out = new al_scenario{ambientlink::parse_config_text(json_text, "<config>", override_spacing != 0)};
    });
}

void al_scenario_free(al_scenario* s)
{
    delete s;
}

al_status al_scenario_set_seed(al_scenario* s, uint64_t seed)
{
    return guarded([&] {
        need(s, "scenario");
        s->cfg.seed = seed;
    });
}

al_status al_scenario_out_dir(const al_scenario* s, al_text** out)
{
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = text(s->cfg.out_dir);
    });
}

al_status al_scenario_echo(const al_scenario* s, al_text** out)
{
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = text(ambientlink::config_echo(s->cfg));
    });
}

al_status al_scenario_warnings(const al_scenario* s, al_text** out)
{
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = text(ambientlink::join_lines(s->cfg.warnings));
    });
}

al_status al_scenario_budget(const al_scenario* s, double* snr_ratio, double* cond_ratio, double* implied_rate)
{
    return guarded([&] {
        need(s, "scenario");
        const auto b = ambientlink::snr_budget(ambientlink::make_scene(s->cfg), s->cfg.spectrum, s->cfg.windows,
                                               s->cfg.metasurface.rho1);
        if (snr_ratio) *snr_ratio = b.snr_ratio;
        if (cond_ratio) *cond_ratio = b.cond_ratio;
        if (implied_rate) *implied_rate = b.implied_rate;
    });
}

al_status al_cmd_verify(const al_scenario* s, const char* out_dir, unsigned workers, al_text** report)
{
    return run_cmd(s, out_dir, report, [&](const std::string& d) { return ambientlink::cmd_verify(s->cfg, d, workers); });
}

al_status al_cmd_predict(const al_scenario* s, const char* out_dir, unsigned workers, al_text** report)
{
    return run_cmd(s, out_dir, report, [&](const std::string& d) { return ambientlink::cmd_predict(s->cfg, d, workers); });
}

al_status al_cmd_simulate(const al_scenario* s, const char* out_dir, unsigned workers, al_text** report)
{
    return run_cmd(s, out_dir, report,
                   [&](const std::string& d) { return ambientlink::cmd_simulate(s->cfg, d, workers); });
}

al_status al_cmd_ber(const al_scenario* s, const char* out_dir, unsigned workers, al_text** report)
{
    return run_cmd(s, out_dir, report, [&](const std::string& d) { return ambientlink::cmd_ber(s->cfg, d, workers); });
}

al_status al_cmd_decode(const al_scenario* s, const char* series_csv, const char* out_dir, unsigned workers,
                        al_text** report)
{
    return run_cmd(s, out_dir, report, [&](const std::string& d) {
        need(series_csv, "series_csv");
        return ambientlink::cmd_decode(s->cfg, series_csv, d, workers);
    });
}

al_status al_record_simulate(const al_scenario* s, uint64_t realization, al_record** out)
{
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = nullptr;
        const auto& c = s->cfg;
        const ambientlink::RealizationSeed seed{c.seed, realization};
        auto rec = ambientlink::synth_realization(ambientlink::make_scene(c), c.spectrum, ambientlink::make_schedule(c),
                                                  c.windows, seed, c.synthesis);
        if (c.measurement_noise.sigma > 0.0)
            rec = ambientlink::add_measurement_noise(rec, c.measurement_noise.sigma, c.measurement_noise.t_meas, seed);
        *out = new al_record{std::move(rec)};
    });
}

al_status al_record_read(const char* path, al_record** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new al_record{ambientlink::read_fld(path)};
    });
}

al_status al_record_write(const al_record* r, const char* path)
{
    return guarded([&] {
        need(r, "record");
        need(path, "path");
        ambientlink::write_fld(r->rec, path);
    });
}

void al_record_free(al_record* r)
{
    delete r;
}

size_t al_record_size(const al_record* r)
{
    return r ? r->rec.size() : 0;
}

size_t al_record_receivers(const al_record* r)
{
    return r ? r->rec.samples.size() : 0;
}

double al_record_dt(const al_record* r)
{
    return r ? r->rec.dt : 0.0;
}

double al_record_t0(const al_record* r)
{
    return r ? r->rec.t0 : 0.0;
}

al_status al_record_samples(const al_record* r, size_t receiver, const double** data, size_t* n)
{
    return guarded([&] {
        need(r, "record");
        need(data, "data");
        need(n, "n");
        if (receiver >= r->rec.samples.size())
            ambientlink::fail(ambientlink::ErrorKind::argument, "receiver index out of range");
        *data = r->rec.samples[receiver].data();
        *n = r->rec.samples[receiver].size();
    });
}

al_status al_series_from_record(const al_record* r, const al_scenario* s, al_series** out)
{
    return guarded([&] {
        need(r, "record");
        need(s, "scenario");
        need(out, "out");
        *out = nullptr;
        const auto schedule = ambientlink::make_schedule(s->cfg);
        *out = new al_series{
            ambientlink::ecsd_series(r->rec, schedule, s->cfg.windows, s->cfg.spectrum.omega0, 1)};
    });
}

al_status al_series_read_csv(const char* path, al_series** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        *out = new al_series{ambientlink::read_series_csv(path)};
    });
}

void al_series_free(al_series* s)
{
    delete s;
}

size_t al_series_size(const al_series* s)
{
    return s ? s->series.size() : 0;
}

al_status al_series_get(const al_series* s, size_t k, double* t_center, double* re, double* im)
{
    return guarded([&] {
        need(s, "series");
        if (k >= s->series.size()) ambientlink::fail(ambientlink::ErrorKind::argument, "slot index out of range");
        if (t_center) *t_center = s->series.centers[k];
        if (re) *re = s->series.values[k].real();
        if (im) *im = s->series.values[k].imag();
    });
}

al_status al_series_decode(const al_series* s, const al_scenario* sc, int* bits, size_t n_bits, double* snr)
{
    return guarded([&] {
        need(s, "series");
        need(sc, "scenario");
        need(bits, "bits");
        const auto d = ambientlink::decode(s->series, sc->cfg.decode_mode, sc->cfg.schedule.preamble,
                                           sc->cfg.allow_unreliable);
        if (n_bits < d.bits.size()) ambientlink::fail(ambientlink::ErrorKind::argument, "bits buffer too small");
        for (std::size_t k = 0; k < d.bits.size(); ++k) bits[k] = d.bits[k];
        if (snr) *snr = d.snr;
    });
}

al_status al_green0(double omega, double c0, const double x[3], const double y[3], double out[2])
{
    return guarded([&] {
        need(x, "x");
        need(y, "y");
        need(out, "out");
        const auto g = ambientlink::green0(omega, {x[0], x[1], x[2]}, {y[0], y[1], y[2]}, ambientlink::Background{c0});
        out[0] = g.real();
        out[1] = g.imag();
    });
}

al_status al_minnaert_rho(double R, double c1, double delta, double c0, double* omega_m, double out[2])
{
    return guarded([&] {
        need(out, "out");
        const ambientlink::Bubble b{R, c1, delta, c0};
        ambientlink::validate(ambientlink::ReflectivityModel{b});
        const double w = ambientlink::minnaert_frequency(b);
        const auto r = ambientlink::rho_of(b, w);
        if (omega_m) *omega_m = w;
        out[0] = r.real();
        out[1] = r.imag();
    });
}

al_status al_fresnel(double d, double out[2])
{
    return guarded([&] {
        need(out, "out");
        const auto f = ambientlink::fresnel_cs(d);
        out[0] = f.C;
        out[1] = f.S;
    });
}

al_status al_wilson_interval(size_t errors, size_t n, double out[2])
{
    return guarded([&] {
        need(out, "out");
        if (errors > n) ambientlink::fail(ambientlink::ErrorKind::argument, "errors exceed trials");
        const auto iv = ambientlink::wilson_interval(errors, n);
        out[0] = iv.lo;
        out[1] = iv.hi;
    });
}

}
