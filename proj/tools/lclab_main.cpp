#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lclab/experiment.hpp"

namespace {

struct SubSpec {
    const char* name;
    const char* desc;
};

constexpr SubSpec kSubcommands[] = {
    {"spaceform-table", "warp function and supporting-radius tables"},
    {"measure", "area and volume of a body, with closed-form anchors"},
    {"check", "lambda-convexity and global supporting-ball containment"},
    {"variation-verify", "finite-difference validation of the variation formulas"},
    {"perturb", "volume-constrained two-bump area-increasing trajectory"},
    {"maximize", "volume-preserving area ascent within the lambda-convex class"},
    {"lens", "lens enclosure chain: midpoint ball, brute force, distance profiles"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for lambda-convex bodies in spaceforms"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool verbose = false;
    for (const SubSpec& s : kSubcommands) {
        CLI::App* sub = app.add_subcommand(s.name, s.desc);
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_dir, "output directory for summary.json and CSVs");
        sub->add_option("--seed", seed, "RNG seed override");
        sub->add_flag("--verbose", verbose, "echo the effective configuration");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    lclab::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path, std::ios::binary);
            if (!f) throw lclab::DomainError("cannot read config file: " + config_path);
            std::ostringstream text;
            text << f.rdbuf();
            cfg = lclab::config_from_json(text.str());
        }
        cfg.subcommand = sub->get_name();
        if (sub->count("--out")) cfg.out_dir = out_dir;
        if (sub->count("--seed")) cfg.rng_seed = seed;
        if (sub->count("--verbose")) cfg.verbose = true;
        lclab::validate_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    if (cfg.verbose) std::cout << lclab::config_to_json(cfg);
    try {
        return lclab::run_experiment(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
