#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ambientlink/ambientlink.h"

namespace fs = std::filesystem;

namespace {

const char* small_config = R"({"schedule": {"n_bits": 4}, "windows": {"BT": 40},
                               "metasurface": {"n_side": 32, "rho1": 4.0},
                               "monte_carlo": {"n_realizations": 2, "seed": 3}})";

std::string take(al_text* t)
{
    std::string s = al_text_get(t);
    al_text_free(t);
    return s;
}

}

TEST_CASE("status codes, exit codes and error reporting")
{
    CHECK(std::string(al_version()) == "1.0.0");
    CHECK(al_exit_code(AL_OK) == 0);
    CHECK(al_exit_code(AL_ERR_VALIDATION) == 1);
    CHECK(al_exit_code(AL_ERR_REGIME) == 2);
    CHECK(al_exit_code(AL_ERR_UNRELIABLE) == 3);
    CHECK(al_exit_code(AL_ERR_IO) == 1);

    al_scenario* s = nullptr;
    CHECK(al_scenario_parse(R"({"spectrum": {"B_over_omega0": 0.5}})", 0, &s) == AL_ERR_VALIDATION);
    CHECK(s == nullptr);
    CHECK(std::string(al_last_error()).find("B") != std::string::npos);
    CHECK(al_scenario_parse(nullptr, 0, &s) == AL_ERR_ARGUMENT);
    CHECK(al_scenario_load("/nonexistent/config.json", 0, &s) == AL_ERR_VALIDATION);
    CHECK(al_scenario_parse("{}", 0, nullptr) == AL_ERR_ARGUMENT);

    CHECK(al_scenario_parse(R"({"receivers": {"xr": [0.4, 0, 0], "xrp": [-0.4, 0, 0]}})", 0, &s) == AL_ERR_VALIDATION);
    REQUIRE(al_scenario_parse(R"({"receivers": {"xr": [0.4, 0, 0], "xrp": [-0.4, 0, 0]}})", 1, &s) == AL_OK);
    al_scenario_free(s);
    CHECK(std::string(al_text_get(nullptr)).empty());
    al_text_free(nullptr);
    al_scenario_free(nullptr);
}

TEST_CASE("scenario accessors")
{
    al_scenario* s = nullptr;
    REQUIRE(al_scenario_parse(R"({"windows": {"BT": 50}, "outputs": {"directory": "runs/x"}})", 0, &s) == AL_OK);
    al_text* t = nullptr;
    REQUIRE(al_scenario_out_dir(s, &t) == AL_OK);
    CHECK(take(t) == "runs/x");
    REQUIRE(al_scenario_warnings(s, &t) == AL_OK);
    CHECK(take(t).find("long_window") != std::string::npos);
    REQUIRE(al_scenario_echo(s, &t) == AL_OK);
    const std::string echo = take(t);
    al_scenario* back = nullptr;
    REQUIRE(al_scenario_parse(echo.c_str(), 0, &back) == AL_OK);
    REQUIRE(al_scenario_echo(back, &t) == AL_OK);
    CHECK(take(t) == echo);
    double snr = 0.0, cond = 0.0, rate = 0.0;
    CHECK(al_scenario_budget(s, &snr, &cond, &rate) == AL_OK);
    CHECK(snr > 0.0);
    CHECK(cond > 0.0);
    CHECK(rate > 0.0);
    CHECK(al_scenario_set_seed(s, 9) == AL_OK);
    CHECK(al_scenario_set_seed(nullptr, 9) == AL_ERR_ARGUMENT);
    al_scenario_free(back);
    al_scenario_free(s);
}

TEST_CASE("records, series and decoding through handles")
{
    const fs::path dir = fs::temp_directory_path() / "ambientlink_capi";
    fs::remove_all(dir);
    fs::create_directories(dir);

    al_scenario* s = nullptr;
    REQUIRE(al_scenario_parse(small_config, 0, &s) == AL_OK);
    al_record* rec = nullptr;
    REQUIRE(al_record_simulate(s, 0, &rec) == AL_OK);
    CHECK(al_record_receivers(rec) == 2);
    CHECK(al_record_size(rec) > 0);
    CHECK(al_record_dt(rec) > 0.0);
    CHECK(al_record_t0(rec) < 0.0);
    const double* data = nullptr;
    size_t n = 0;
    REQUIRE(al_record_samples(rec, 1, &data, &n) == AL_OK);
    CHECK(n == al_record_size(rec));
    CHECK(al_record_samples(rec, 2, &data, &n) == AL_ERR_ARGUMENT);

    const std::string path = (dir / "r.fld").string();
    REQUIRE(al_record_write(rec, path.c_str()) == AL_OK);
    al_record* again = nullptr;
    REQUIRE(al_record_read(path.c_str(), &again) == AL_OK);
    const double* a = nullptr;
    const double* b = nullptr;
    size_t na = 0, nb = 0;
    al_record_samples(rec, 0, &a, &na);
    al_record_samples(again, 0, &b, &nb);
    REQUIRE(na == nb);
    CHECK(std::equal(a, a + na, b));
    CHECK(al_record_read((dir / "missing.fld").string().c_str(), &again) == AL_ERR_IO);

    al_series* series = nullptr;
    REQUIRE(al_series_from_record(rec, s, &series) == AL_OK);
    CHECK(al_series_size(series) == 2 * 12);
    double tc = 0.0, re = 0.0, im = 0.0;
    REQUIRE(al_series_get(series, 1, &tc, &re, &im) == AL_OK);
    CHECK(tc > 0.0);
    CHECK(al_series_get(series, 99, &tc, &re, &im) == AL_ERR_ARGUMENT);

    std::vector<int> bits(12, -1);
    double snr = 0.0;
    const al_status st = al_series_decode(series, s, bits.data(), bits.size(), &snr);
    CHECK((st == AL_OK || st == AL_ERR_UNRELIABLE));
    if (st == AL_ERR_UNRELIABLE) CHECK(al_last_error_value() == doctest::Approx(snr).epsilon(1.0));
    int small[2];
    if (st == AL_OK) CHECK(al_series_decode(series, s, small, 2, &snr) == AL_ERR_ARGUMENT);

    al_series_free(series);
    al_record_free(again);
    al_record_free(rec);
    al_scenario_free(s);
}

TEST_CASE("commands through the library")
{
    const fs::path dir = fs::temp_directory_path() / "ambientlink_capi_cmd";
    fs::remove_all(dir);
    al_scenario* s = nullptr;
    REQUIRE(al_scenario_parse(small_config, 0, &s) == AL_OK);
    al_text* report = nullptr;
    REQUIRE(al_cmd_simulate(s, dir.string().c_str(), 1, &report) == AL_OK);
    CHECK(take(report).find("simulate") != std::string::npos);
    CHECK(fs::exists(dir / "ecsd_k.csv"));
    CHECK(fs::exists(dir / "config.echo.json"));

    al_series* series = nullptr;
    REQUIRE(al_series_read_csv((dir / "ecsd_k.csv").string().c_str(), &series) == AL_OK);
    CHECK(al_series_size(series) == 24);
    al_series_free(series);

    REQUIRE(al_cmd_predict(s, dir.string().c_str(), 1, &report) == AL_OK);
    al_text_free(report);
    CHECK(fs::exists(dir / "budget.csv"));
    CHECK(al_cmd_decode(s, nullptr, dir.string().c_str(), 1, &report) == AL_ERR_ARGUMENT);
    CHECK(al_cmd_simulate(nullptr, nullptr, 1, &report) == AL_ERR_ARGUMENT);

    al_scenario* short_slots = nullptr;
    REQUIRE(al_scenario_parse(R"({"windows": {"BT": 5}})", 0, &short_slots) == AL_OK);
    CHECK(al_cmd_simulate(short_slots, dir.string().c_str(), 1, &report) == AL_ERR_REGIME);
    al_scenario_free(short_slots);
    al_scenario_free(s);
}

TEST_CASE("primitives")
{
    const double x[3] = {0, 0, 0}, y[3] = {0, 0, 2};
    double g[2];
    REQUIRE(al_green0(M_PI, 1.0, x, y, g) == AL_OK);
    CHECK(std::hypot(g[0], g[1]) == doctest::Approx(1.0 / (8.0 * M_PI)));
    CHECK(al_green0(M_PI, 1.0, x, x, g) == AL_ERR_DOMAIN);

    double wm = 0.0, rho[2];
    REQUIRE(al_minnaert_rho(1.0, 340.0, 1.29e-3, 1482.0, &wm, rho) == AL_OK);
    CHECK(rho[1] == doctest::Approx(880.6).epsilon(1e-4));
    CHECK(al_minnaert_rho(1.0, 340.0, 2.0, 1482.0, &wm, rho) == AL_ERR_VALIDATION);

    double f[2];
    REQUIRE(al_fresnel(1.0, f) == AL_OK);
    CHECK(f[0] == doctest::Approx(0.9045242379));
    CHECK(f[1] == doctest::Approx(0.3102683017));

    double iv[2];
    REQUIRE(al_wilson_interval(5, 10, iv) == AL_OK);
    CHECK(iv[0] == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(iv[1] == doctest::Approx(0.7634).epsilon(1e-3));
    CHECK(al_wilson_interval(11, 10, iv) == AL_ERR_ARGUMENT);
}
