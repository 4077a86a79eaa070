#pragma once

#include <string>

#include "ambientlink/config.hpp"
#include "ambientlink/error.hpp"

namespace ambientlink {

// Each command writes its files plus config.echo.json into out_dir and returns a
// human-readable report. Failures throw Error.
std::string cmd_verify(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers);
std::string cmd_predict(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers);
std::string cmd_simulate(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers);
std::string cmd_ber(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers);
std::string cmd_decode(const ScenarioConfig& cfg, const std::string& series_csv, const std::string& out_dir,
                       unsigned workers);

// 0 success, 1 validation, 2 regime refusal, 3 unreliable signature.
int exit_code(ErrorKind kind);

// Applies one sweep point to a copy of the config.
ScenarioConfig apply_sweep(const ScenarioConfig& cfg, double value);

}
