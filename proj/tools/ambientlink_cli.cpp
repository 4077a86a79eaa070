#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ambientlink/ambientlink.h"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
    bool override_spacing = false;
    std::string series;
};

unsigned workers_from(const Options& o)
{
    if (o.workers) return *o.workers;
    if (const char* env = std::getenv("AMBIENTLINK_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0') return static_cast<unsigned>(v);
        std::fprintf(stderr, "ambientlink: ignoring malformed AMBIENTLINK_WORKERS='%s'\n", env);
    }
    return 0;
}

int report_failure(al_status st)
{
    std::fprintf(stderr, "ambientlink: %s\n", al_last_error());
    return al_exit_code(st);
}

int run(const std::string& command, const Options& o)
{
    al_scenario* sc = nullptr;
    al_status st = al_scenario_load(o.config.c_str(), o.override_spacing ? 1 : 0, &sc);
    if (st != AL_OK) return report_failure(st);
    if (o.seed) al_scenario_set_seed(sc, *o.seed);

    al_text* warnings = nullptr;
    if (al_scenario_warnings(sc, &warnings) == AL_OK && *al_text_get(warnings))
        std::fprintf(stderr, "%s\n", al_text_get(warnings));
    al_text_free(warnings);

    const char* out = o.out.empty() ? nullptr : o.out.c_str();
    const unsigned workers = workers_from(o);
    al_text* report = nullptr;
    if (command == "verify") st = al_cmd_verify(sc, out, workers, &report);
    else if (command == "predict") st = al_cmd_predict(sc, out, workers, &report);
    else if (command == "simulate") st = al_cmd_simulate(sc, out, workers, &report);
    else if (command == "ber") st = al_cmd_ber(sc, out, workers, &report);
    else st = al_cmd_decode(sc, o.series.c_str(), out, workers, &report);
    al_scenario_free(sc);
    if (st != AL_OK) return report_failure(st);
    std::fputs(al_text_get(report), stdout);
    al_text_free(report);
    return 0;
}

}

int main(int argc, char** argv)
{
    CLI::App app{"Passive metasurface link simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", al_version());
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed (overrides monte_carlo.seed)");
        sub->add_option("--workers", o.workers, "worker threads, 0 for all cores (env AMBIENTLINK_WORKERS)");
        sub->add_option("--out", o.out, "output directory (overrides outputs.directory)");
        sub->add_flag("--override-spacing", o.override_spacing, "accept receiver spacing other than lambda0/2");
    };
    common(app.add_subcommand("verify", "identity and bound checks"));
    common(app.add_subcommand("predict", "analytic link budget"));
    common(app.add_subcommand("simulate", "Monte Carlo records, ECSD series and moments"));
    common(app.add_subcommand("ber", "bit error rate over the configured sweep"));
    auto* dec = app.add_subcommand("decode", "decode an ECSD series CSV");
    common(dec);
    dec->add_option("series", o.series, "ECSD series CSV")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return run(app.get_subcommands().front()->get_name(), o);
}
