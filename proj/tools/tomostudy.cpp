#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tomo/run.hpp"

namespace {

struct SubInfo {
    const char* name;
    const char* desc;
};

constexpr SubInfo kSubcommands[] = {
    {"phantom", "Generate a test object and write it as a 16-bit PGM"},
    {"project", "Forward-project a phantom into a sinogram CSV"},
    {"reconstruct", "Reconstruct one dataset with the l1 or TV solver"},
    {"phase-diagram", "Recovery fraction over a (k, mu) grid"},
    {"dose-study", "Optimal RMSE over an (N_e, N_p) grid at fixed tilt range"},
    {"wedge-study", "Optimal RMSE over a (theta, N_p) grid at fixed dose"},
    {"eps-sweep", "RMSE versus data-tolerance epsilon for one dataset"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-sampling tomography studies: parallel-beam projector, "
                 "l1/TV constrained reconstruction, and the sampling-limit "
                 "study pipelines"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;

    for (const SubInfo& info : kSubcommands) {
        CLI::App* sub = app.add_subcommand(info.name, info.desc);
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--seed", seed, "base seed (overrides the config)");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "worker threads (overrides the config)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        tomo::RunConfig cfg;
        if (sub->count("--config")) cfg = tomo::parse_config_file(config_path);
        if (!cfg.subcommand.empty() && cfg.subcommand != sub->get_name())
            throw std::invalid_argument("config names subcommand \"" + cfg.subcommand +
                                        "\" but \"" + sub->get_name() + "\" was invoked");
        cfg.subcommand = sub->get_name();
        if (sub->count("--seed")) cfg.base_seed = seed;
        if (sub->count("--out")) cfg.out_dir = out_dir;
        if (sub->count("--threads")) cfg.threads = threads;
        tomo::run_subcommand(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
