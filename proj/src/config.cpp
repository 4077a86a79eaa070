#include "ambientlink/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ambientlink/csv.hpp"
#include "ambientlink/error.hpp"

namespace ambientlink {

using nlohmann::json;

namespace {

// Walks one JSON object, records type errors and unknown keys against dotted paths.
class Reader {
public:
    Reader(const json* node, std::string path, std::vector<std::string>& errors)
        : node_(node), path_(std::move(path)), errors_(errors)
    {
        if (node_ && !node_->is_object()) {
            error("", "expected an object");
            node_ = nullptr;
        }
    }

    ~Reader()
    {
        if (!node_) return;
        for (const auto& [k, v] : node_->items())
            if (!seen_.count(k)) error(k, "unknown key");
    }

    Reader child(const char* key)
    {
        seen_.insert(key);
        if (!node_ || !node_->contains(key)) return Reader(nullptr, join(key), errors_);
        return Reader(&node_->at(key), join(key), errors_);
    }

    bool has(const char* key) const { return node_ && node_->contains(key) && !node_->at(key).is_null(); }

    void get(const char* key, double& out)
    {
        if (const json* v = find(key)) {
            if (v->is_number()) out = v->get<double>();
            else error(key, "expected a number");
        }
    }

    void get(const char* key, std::size_t& out)
    {
        if (const json* v = find(key)) {
            if (v->is_number_unsigned()) out = v->get<std::size_t>();
            else error(key, "expected a nonnegative integer");
        }
    }

    void get(const char* key, std::uint64_t& out, int)
    {
        std::size_t v = out;
        get(key, v);
        out = v;
    }

    void get(const char* key, bool& out)
    {
        if (const json* v = find(key)) {
            if (v->is_boolean()) out = v->get<bool>();
            else error(key, "expected true or false");
        }
    }

    void get(const char* key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (v->is_string()) out = v->get<std::string>();
            else error(key, "expected a string");
        }
    }

    void get(const char* key, Vec3& out)
    {
        if (const json* v = find(key)) {
            if (v->is_array() && v->size() == 3 && (*v)[0].is_number() && (*v)[1].is_number() && (*v)[2].is_number())
                out = {(*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>()};
            else error(key, "expected an array of 3 numbers");
        }
    }

    void get(const char* key, std::vector<int>& out)
    {
        if (const json* v = find(key)) {
            bool ok = v->is_array();
            std::vector<int> bits;
            if (ok) {
                for (const auto& b : *v) {
                    if (b.is_number_unsigned() && b.get<unsigned>() <= 1) bits.push_back(b.get<int>());
                    else ok = false;
                }
            }
            if (ok) out = bits;
            else error(key, "expected an array of 0/1 bits");
        }
    }

    void get(const char* key, std::vector<double>& out)
    {
        if (const json* v = find(key)) {
            bool ok = v->is_array();
            std::vector<double> xs;
            if (ok) {
                for (const auto& x : *v) {
                    if (x.is_number()) xs.push_back(x.get<double>());
                    else ok = false;
                }
            }
            if (ok) out = xs;
            else error(key, "expected an array of numbers");
        }
    }

    void error(const std::string& key, const std::string& msg) { errors_.push_back("key '" + join(key) + "': " + msg); }

private:
    const json* find(const char* key)
    {
        seen_.insert(key);
        if (!node_) return nullptr;
        auto it = node_->find(key);
        if (it == node_->end() || it->is_null()) return nullptr;
        return &*it;
    }

    std::string join(const std::string& key) const
    {
        if (key.empty()) return path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* node_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

template <class F>
void check(std::vector<std::string>& errors, F&& f)
{
    try {
        f();
    } catch (const Error& e) {
        errors.push_back(e.what());
    }
}

void collect_warnings(ScenarioConfig& cfg)
{
    auto& w = cfg.warnings;
    w.clear();
    const double lambda0 = cfg.spectrum.lambda0(cfg.background.c0);
    const double D = cfg.metasurface.D;
    const double L = distance(cfg.receivers.xr, cfg.metasurface.center);
    const double BT = cfg.spectrum.B * cfg.windows.T;
    if (cfg.spectrum.B / cfg.spectrum.omega0 > 0.1)
        w.push_back("narrowband: B/omega0 = " + fmt(cfg.spectrum.B / cfg.spectrum.omega0) + " is not small");
    if (!(D >= 2.5 * lambda0)) w.push_back("paraxial: D = " + fmt(D) + " is not much larger than lambda0");
    if (!(L >= 2.5 * D)) w.push_back("paraxial: L = " + fmt(L) + " is not much larger than D");
    if (BT < 100.0) w.push_back("long_window: BT = " + fmt(BT) + " is below 100");
    if (cfg.measurement_noise.sigma > 0.0 && cfg.measurement_noise.t_meas > 0.1 * cfg.windows.Tprime)
        w.push_back("short_coherence: t_meas exceeds T'/10");
}

void validate_all(ScenarioConfig& cfg, std::vector<std::string>& errors)
{
    check(errors, [&] { validate(cfg.background); });
    check(errors, [&] { validate(cfg.spectrum); });
    check(errors, [&] { validate(cfg.windows); });
    const auto& m = cfg.metasurface;
    if (m.n_side < 1) errors.push_back("metasurface: n_side must be at least 1");
    if (!(m.D > 0.0)) errors.push_back("metasurface: D must be positive");
    if (!(norm(m.normal) > 0.0)) errors.push_back("metasurface: normal must be nonzero");
    if (m.model != "tunable" && m.model != "bubble" && m.model != "drude")
        errors.push_back("metasurface: model must be tunable, bubble or drude");
    if (!(m.rho1 >= 0.0)) errors.push_back("metasurface: rho1 must be nonnegative");
    if (m.model == "bubble") check(errors, [&] { validate(ReflectivityModel{m.bubble}); });
    if (m.model == "drude") check(errors, [&] { validate(ReflectivityModel{m.drude}); });
    if (!(cfg.shell.L_src > 0.0)) errors.push_back("shell: L_src must be positive");
    if (!finite(cfg.receivers.xr) || !finite(cfg.receivers.xrp)) errors.push_back("receivers: coordinates must be finite");
    const double sep = cfg.receivers.separation();
    if (!(sep > 0.0)) errors.push_back("receivers: xr and xrp coincide");
    if (std::isfinite(cfg.background.c0) && cfg.spectrum.omega0 > 0.0 && !cfg.override_spacing) {
        const double half = 0.5 * cfg.spectrum.lambda0(cfg.background.c0);
        if (std::abs(sep - half) > 1e-6 * half)
            errors.push_back("receivers: spacing " + fmt(sep) + " is not lambda0/2 = " + fmt(half) +
                             "; the receiver pair must sit half a carrier wavelength apart (use --override-spacing)");
    }
    if (cfg.n_realizations < 1) errors.push_back("monte_carlo: n_realizations must be at least 1");
    if (!(cfg.measurement_noise.sigma >= 0.0)) errors.push_back("measurement_noise: sigma must be nonnegative");
    if (cfg.measurement_noise.sigma > 0.0 && !(cfg.measurement_noise.t_meas > 0.0))
        errors.push_back("measurement_noise: t_meas must be positive when sigma > 0");
    if (!(cfg.synthesis.oversample >= 1.0)) errors.push_back("synthesis: oversample must be at least 1");
    if (!(cfg.synthesis.sample_factor >= 1.0)) errors.push_back("synthesis: sample_factor must be at least 1");
    if (cfg.schedule.bits.empty() && cfg.schedule.n_bits < 1) errors.push_back("schedule: no payload bits");
    if (std::find(cfg.schedule.preamble.begin(), cfg.schedule.preamble.end(), 1) == cfg.schedule.preamble.end())
        errors.push_back("schedule: preamble must contain at least one 1-bit");
    const auto& s = cfg.sweep;
    if (s.axis != "none" && s.axis != "T" && s.axis != "J" && s.axis != "L" && s.axis != "sigma_meas")
        errors.push_back("sweep: axis must be none, T, J, L or sigma_meas");
    if (s.axis != "none" && s.values.empty()) errors.push_back("sweep: empty sweep over " + s.axis);
    for (double v : s.values) {
        if (!(v >= 0.0) || !std::isfinite(v)) errors.push_back("sweep: values must be finite and nonnegative");
        if (s.axis == "J" && (v < 1.0 || std::round(std::sqrt(v)) * std::round(std::sqrt(v)) != v))
            errors.push_back("sweep: J values must be perfect squares");
        if ((s.axis == "T" || s.axis == "L") && !(v > 0.0)) errors.push_back("sweep: " + s.axis + " values must be positive");
    }
    if (cfg.ber_bits < 1 || cfg.ber_trials < 1) errors.push_back("ber: n_bits and n_trials must be at least 1");
}

}

ScenarioConfig parse_config_text(const std::string& text, const std::string& source, bool override_spacing)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream os;
        os << source << ":" << line << ":" << col << ": parse error: " << e.what();
        fail(ErrorKind::validation, os.str());
    }

    ScenarioConfig cfg;
    cfg.override_spacing = override_spacing;
    std::vector<std::string> errors;
    {
        Reader r(&root, "", errors);
        r.get("override_spacing", cfg.override_spacing);
        cfg.override_spacing = cfg.override_spacing || override_spacing;
        {
            auto b = r.child("background");
            b.get("c0", cfg.background.c0);
        }
        {
            auto s = r.child("spectrum");
            s.get("omega0", cfg.spectrum.omega0);
            double ratio = cfg.spectrum.B / cfg.spectrum.omega0;
            s.get("B_over_omega0", ratio);
            cfg.spectrum.B = ratio * cfg.spectrum.omega0;
            if (s.has("B") && s.has("B_over_omega0")) s.error("B", "give either B or B_over_omega0");
            s.get("B", cfg.spectrum.B);
            std::string shape = to_string(cfg.spectrum.shape);
            s.get("shape", shape);
            check(errors, [&] { cfg.spectrum.shape = spectrum_shape_from(shape); });
        }
        {
            auto s = r.child("shell");
            s.get("L_src", cfg.shell.L_src);
            s.get("n_nodes", cfg.shell.n_nodes);
        }
        const double lambda0 = cfg.spectrum.omega0 > 0.0 ? cfg.spectrum.lambda0(cfg.background.c0) : 1.0;
        {
            auto m = r.child("metasurface");
            auto& ms = cfg.metasurface;
            ms.center = {0.0, 0.0, 10.0 * lambda0};
            m.get("n_side", ms.n_side);
            if (!m.has("D")) ms.D = 0.5 * lambda0 * static_cast<double>(ms.n_side);
            m.get("D", ms.D);
            m.get("center", ms.center);
            m.get("normal", ms.normal);
            m.get("model", ms.model);
            m.get("re_rho", ms.re_rho);
            m.get("rho1", ms.rho1);
            {
                auto b = m.child("bubble");
                b.get("R", ms.bubble.R);
                b.get("c1", ms.bubble.c1);
                b.get("delta", ms.bubble.delta);
                b.get("c0", ms.bubble.c0);
            }
            {
                auto d = m.child("drude");
                d.get("eps0", ms.drude.eps0);
                d.get("mu0", ms.drude.mu0);
                d.get("omega_p", ms.drude.omega_p);
                d.get("omega_r", ms.drude.omega_r);
                d.get("tau", ms.drude.tau);
                d.get("F_f", ms.drude.F_f);
                d.get("volume", ms.drude.volume);
                d.get("c0", ms.drude.c0);
            }
        }
        {
            auto rc = r.child("receivers");
            cfg.receivers.xr = {0.25 * lambda0, 0.0, 0.0};
            cfg.receivers.xrp = {-0.25 * lambda0, 0.0, 0.0};
            rc.get("xr", cfg.receivers.xr);
            rc.get("xrp", cfg.receivers.xrp);
        }
        {
            auto w = r.child("windows");
            const double B = cfg.spectrum.B;
            double BT = 100.0, BTp = 1.0;
            w.get("BT", BT);
            w.get("BTprime", BTp);
            cfg.windows.T = BT / B;
            cfg.windows.Tprime = BTp / B;
            if (w.has("T") && w.has("BT")) w.error("T", "give either T or BT");
            if (w.has("Tprime") && w.has("BTprime")) w.error("Tprime", "give either Tprime or BTprime");
            w.get("T", cfg.windows.T);
            w.get("Tprime", cfg.windows.Tprime);
            std::string phi = to_string(cfg.windows.phi_shape), psi = to_string(cfg.windows.psi_shape);
            w.get("phi", phi);
            w.get("psi", psi);
            check(errors, [&] { cfg.windows.phi_shape = window_shape_from(phi); });
            check(errors, [&] { cfg.windows.psi_shape = window_shape_from(psi); });
        }
        {
            auto s = r.child("schedule");
            s.get("bits", cfg.schedule.bits);
            s.get("n_bits", cfg.schedule.n_bits);
            s.get("bits_seed", cfg.schedule.bits_seed, 0);
            s.get("preamble", cfg.schedule.preamble);
        }
        {
            auto m = r.child("monte_carlo");
            m.get("n_realizations", cfg.n_realizations);
            m.get("seed", cfg.seed, 0);
        }
        {
            auto n = r.child("measurement_noise");
            n.get("sigma", cfg.measurement_noise.sigma);
            n.get("t_meas", cfg.measurement_noise.t_meas);
        }
        {
            auto s = r.child("synthesis");
            std::string kernel = to_string(cfg.synthesis.kernel);
            s.get("kernel", kernel);
            check(errors, [&] { cfg.synthesis.kernel = synth_kernel_from(kernel); });
            s.get("oversample", cfg.synthesis.oversample);
            s.get("sample_factor", cfg.synthesis.sample_factor);
            s.get("shell_nodes", cfg.synthesis.shell_nodes);
        }
        {
            auto d = r.child("decode");
            std::string mode = to_string(cfg.decode_mode);
            d.get("mode", mode);
            check(errors, [&] { cfg.decode_mode = decode_mode_from(mode); });
            d.get("allow_unreliable", cfg.allow_unreliable);
        }
        {
            auto s = r.child("sweep");
            if (root.is_object() && root.contains("sweep")) cfg.sweep.axis = "";
            s.get("axis", cfg.sweep.axis);
            s.get("values", cfg.sweep.values);
            if (cfg.sweep.axis.empty()) s.error("axis", "missing sweep axis");
        }
        {
            auto b = r.child("ber");
            b.get("n_bits", cfg.ber_bits);
            b.get("n_trials", cfg.ber_trials);
        }
        {
            auto o = r.child("outputs");
            o.get("directory", cfg.out_dir);
            o.get("write_fld", cfg.write_fld);
        }
    }
    if (errors.empty()) validate_all(cfg, errors);
    if (!errors.empty()) fail(ErrorKind::validation, source + ": invalid configuration\n" + join_lines(errors));
    collect_warnings(cfg);
    return cfg;
}

ScenarioConfig parse_config(const std::string& path, bool override_spacing)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::validation, "cannot open config " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config_text(os.str(), path, override_spacing);
}

void revalidate(ScenarioConfig& cfg)
{
    std::vector<std::string> errors;
    validate_all(cfg, errors);
    if (!errors.empty()) fail(ErrorKind::validation, "invalid configuration\n" + join_lines(errors));
    collect_warnings(cfg);
}

std::string config_echo(const ScenarioConfig& cfg)
{
    auto vec = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
    const auto& m = cfg.metasurface;
    json j;
    j["background"] = {{"c0", cfg.background.c0}};
    j["spectrum"] = {{"omega0", cfg.spectrum.omega0}, {"B", cfg.spectrum.B}, {"shape", to_string(cfg.spectrum.shape)}};
    j["shell"] = {{"L_src", cfg.shell.L_src}, {"n_nodes", cfg.shell.n_nodes}};
    j["metasurface"] = {
        {"n_side", m.n_side},
        {"D", m.D},
        {"center", vec(m.center)},
        {"normal", vec(m.normal)},
        {"model", m.model},
        {"re_rho", m.re_rho},
        {"rho1", m.rho1},
        {"bubble", {{"R", m.bubble.R}, {"c1", m.bubble.c1}, {"delta", m.bubble.delta}, {"c0", m.bubble.c0}}},
        {"drude",
         {{"eps0", m.drude.eps0},
          {"mu0", m.drude.mu0},
          {"omega_p", m.drude.omega_p},
          {"omega_r", m.drude.omega_r},
          {"tau", std::isfinite(m.drude.tau) ? json(m.drude.tau) : json(nullptr)},
          {"F_f", m.drude.F_f},
          {"volume", m.drude.volume},
          {"c0", m.drude.c0}}}};
    j["receivers"] = {{"xr", vec(cfg.receivers.xr)}, {"xrp", vec(cfg.receivers.xrp)}};
    j["windows"] = {{"T", cfg.windows.T},
                    {"Tprime", cfg.windows.Tprime},
                    {"phi", to_string(cfg.windows.phi_shape)},
                    {"psi", to_string(cfg.windows.psi_shape)}};
    j["schedule"] = {{"bits", cfg.schedule.bits},
                     {"n_bits", cfg.schedule.n_bits},
                     {"bits_seed", cfg.schedule.bits_seed},
                     {"preamble", cfg.schedule.preamble}};
    j["monte_carlo"] = {{"n_realizations", cfg.n_realizations}, {"seed", cfg.seed}};
    j["measurement_noise"] = {{"sigma", cfg.measurement_noise.sigma}, {"t_meas", cfg.measurement_noise.t_meas}};
    j["synthesis"] = {{"kernel", to_string(cfg.synthesis.kernel)},
                      {"oversample", cfg.synthesis.oversample},
                      {"sample_factor", cfg.synthesis.sample_factor},
                      {"shell_nodes", cfg.synthesis.shell_nodes}};
    j["decode"] = {{"mode", to_string(cfg.decode_mode)}, {"allow_unreliable", cfg.allow_unreliable}};
    j["sweep"] = {{"axis", cfg.sweep.axis}, {"values", cfg.sweep.values}};
    j["ber"] = {{"n_bits", cfg.ber_bits}, {"n_trials", cfg.ber_trials}};
    j["outputs"] = {{"directory", cfg.out_dir}, {"write_fld", cfg.write_fld}};
    j["override_spacing"] = cfg.override_spacing;
    return j.dump(2) + "\n";
}

std::string config_hash(const ScenarioConfig& cfg)
{
    return hex64(fnv1a(config_echo(cfg)));
}

Scene make_scene(const ScenarioConfig& cfg)
{
    const auto& m = cfg.metasurface;
    Scene s;
    s.background = cfg.background;
    s.shell = cfg.shell;
    s.receivers = cfg.receivers;
    s.surface = make_metasurface(m.n_side, m.D, m.center, m.normal, Tunable{m.re_rho, m.rho1, false});
    if (m.model != "tunable") {
        const ReflectivityModel model = m.model == "bubble" ? ReflectivityModel{m.bubble} : ReflectivityModel{m.drude};
        for (auto& inc : s.surface.inclusions) inc.reflectivity = model;
    }
    return s;
}

SlotSchedule make_schedule(const ScenarioConfig& cfg)
{
    std::vector<int> bits = cfg.schedule.bits;
    if (bits.empty()) bits = draw_bits(cfg.schedule.n_bits, cfg.schedule.bits_seed, 0);
    return encode(bits, cfg.metasurface.rho1, cfg.windows.T, cfg.schedule.preamble);
}

BerOptions make_ber_options(const ScenarioConfig& cfg, unsigned workers)
{
    BerOptions o;
    o.n_bits = cfg.ber_bits;
    o.n_trials = cfg.ber_trials;
    o.seed = cfg.seed;
    o.mode = cfg.decode_mode;
    o.preamble = cfg.schedule.preamble;
    o.allow_unreliable = cfg.allow_unreliable;
    o.noise = cfg.measurement_noise;
    o.workers = workers;
    return o;
}

std::string defaults_table()
{
    return R"(| key | default | meaning |
|---|---|---|
| background.c0 | 1 | wave speed |
| spectrum.omega0 | 2π | carrier frequency |
| spectrum.B (or B_over_omega0) | 0.05·omega0 | bandwidth; B/omega0 > 0.2 is refused |
| spectrum.shape | boxcar | boxcar, raised-cosine, truncated-gaussian |
| shell.L_src | 60 | source shell radius |
| shell.n_nodes | 0 | shell nodes; 0 selects the Nyquist minimum |
| metasurface.n_side | 8 | J = n_side² elements |
| metasurface.D | n_side·λ0/2 | array side |
| metasurface.center | (0, 0, 10·λ0) | array centre |
| metasurface.normal | (0, 0, −1) | array normal |
| metasurface.model | tunable | tunable, bubble, drude |
| metasurface.re_rho | 0 | Re ρ of the tunable element |
| metasurface.rho1 | 0.1 | Im ρ in the on state |
| receivers.xr / xrp | (±λ0/4, 0, 0) | receiver pair; spacing must be λ0/2 |
| windows.T (or BT) | 100/B | slot window scale |
| windows.Tprime (or BTprime) | 1/B | lag window scale |
| windows.phi / psi | triangle / gaussian | window shapes |
| schedule.bits | [] | explicit payload; empty draws n_bits |
| schedule.n_bits | 8 | payload bits drawn from bits_seed |
| schedule.bits_seed | 1 | seed for drawn payload bits |
| schedule.preamble | eight 1-bits | known leading bits |
| monte_carlo.n_realizations | 100 | realizations for `simulate` |
| monte_carlo.seed | 1 | master seed (`--seed` overrides) |
| measurement_noise.sigma | 0 | noise standard deviation |
| measurement_noise.t_meas | 0 | noise coherence time |
| synthesis.kernel | expansion | expansion, quadrature, direct |
| synthesis.oversample | 2 | FFT period over segment length |
| synthesis.sample_factor | 1 | extra oversampling of dt |
| synthesis.shell_nodes | 0 | nodes for quadrature/direct kernels |
| decode.mode | complex | complex, psd_diff |
| decode.allow_unreliable | false | decode below the signature threshold |
| sweep.axis | none | none, T, J, L, sigma_meas |
| sweep.values | [] | sweep points; an empty list with an axis is refused |
| ber.n_bits | 100 | payload bits per trial |
| ber.n_trials | 4 | trials per sweep point |
| outputs.directory | out | run directory (`--out` overrides) |
| outputs.write_fld | true | write `.fld` records from `simulate` |
| override_spacing | false | accept receiver spacing other than λ0/2 |
)";
}

}
