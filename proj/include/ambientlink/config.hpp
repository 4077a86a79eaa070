#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ambientlink/link.hpp"
#include "ambientlink/scene.hpp"
#include "ambientlink/spectrum.hpp"
#include "ambientlink/synth.hpp"

namespace ambientlink {

struct MetasurfaceConfig {
    std::size_t n_side = 8;
    double D = 4.0;
    Vec3 center{0.0, 0.0, 10.0};
    Vec3 normal{0.0, 0.0, -1.0};
    std::string model = "tunable";  // tunable | bubble | drude
    double re_rho = 0.0;
    double rho1 = 0.1;
    Bubble bubble;
    Drude drude;
};

struct ScheduleConfig {
    std::vector<int> bits;  // explicit payload; empty: draw n_bits from bits_seed
    std::size_t n_bits = 8;
    std::uint64_t bits_seed = 1;
    std::vector<int> preamble = std::vector<int>(8, 1);
};

struct SweepConfig {
    std::string axis = "none";  // none | T | J | L | sigma_meas
    std::vector<double> values;
};

struct ScenarioConfig {
    Background background;
    NoiseSpectrum spectrum;
    SourceShellSpec shell;
    MetasurfaceConfig metasurface;
    ReceiverPair receivers;
    WindowSpec windows;
    ScheduleConfig schedule;
    std::size_t n_realizations = 100;
    std::uint64_t seed = 1;
    MeasurementNoise measurement_noise;
    SynthOptions synthesis;
    DecodeMode decode_mode = DecodeMode::complex;
    bool allow_unreliable = false;
    SweepConfig sweep;
    std::size_t ber_bits = 100;
    std::size_t ber_trials = 4;
    std::string out_dir = "out";
    bool write_fld = true;
    bool override_spacing = false;

    std::vector<std::string> warnings;  // "name: message"
};

// Parses and validates; every validation failure is collected into one error.
ScenarioConfig parse_config_text(const std::string& text, const std::string& source = "<config>",
                                 bool override_spacing = false);
ScenarioConfig parse_config(const std::string& path, bool override_spacing = false);
// Re-runs validation and regime warnings after programmatic edits.
void revalidate(ScenarioConfig& cfg);

// Full config with defaults filled, as pretty JSON.
std::string config_echo(const ScenarioConfig& cfg);
std::string config_hash(const ScenarioConfig& cfg);

Scene make_scene(const ScenarioConfig& cfg);
SlotSchedule make_schedule(const ScenarioConfig& cfg);
BerOptions make_ber_options(const ScenarioConfig& cfg, unsigned workers);

// Markdown table of every key and its default.
std::string defaults_table();

}
