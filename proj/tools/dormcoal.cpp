#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dormcoal/experiments.hpp"

using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    std::int64_t replicates = -1;
    std::int64_t workers = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--seed", f.seed, "master seed (overrides config)");
    cmd->add_option("--replicates", f.replicates, "replicate count (overrides config)");
    cmd->add_option("--workers", f.workers,
                    "worker threads; 0 = auto (DORMCOAL_WORKERS or hardware)");
    cmd->add_option("--out", f.out_dir, "output directory (overrides config)");
}

json load_config(const CommonFlags& f) {
    json cfg = json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + f.config_path);
        try {
            in >> cfg;
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("config parse error in " + f.config_path + ": " +
                                        e.what());
        }
    }
    if (f.seed >= 0) cfg["master_seed"] = std::uint64_t(f.seed);
    if (f.replicates >= 0) cfg["replicates"] = std::uint64_t(f.replicates);
    if (f.workers >= 0) cfg["workers"] = std::uint64_t(f.workers);
    if (!f.out_dir.empty()) cfg["out"] = f.out_dir;
    return cfg;
}

void print_result(const json& summary) {
    std::cout << "wrote:";
    for (const auto& p : summary.at("outputs")) std::cout << " " << p.get<std::string>();
    std::cout << "\n" << summary.at("results").dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dormcoal: dormancy Cannings model and Lambda-coalescent toolkit"};
    app.require_subcommand(1);

    CommonFlags fwd, gen, coal, ver, cons;

    CLI::App* c_fwd = app.add_subcommand("forward", "simulate single generations");
    add_common(c_fwd, fwd);

    CLI::App* c_gen = app.add_subcommand("genealogy", "trace ancestral partition trajectories");
    add_common(c_gen, gen);
    std::int64_t sample_size = -1;
    c_gen->add_option("--sample-size", sample_size, "lineages to trace (n)");

    CLI::App* c_coal =
        app.add_subcommand("coalescent", "rates tables and Lambda-coalescent trajectories");
    add_common(c_coal, coal);

    CLI::App* c_ver = app.add_subcommand("verify", "limit-condition and bound checks");
    add_common(c_ver, ver);
    std::string task;
    c_ver->add_option("--task", task, "limit | cn | tail | polya | coupling");

    CLI::App* c_cons =
        app.add_subcommand("construct", "build the mixture model for a target Lambda");
    add_common(c_cons, cons);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exit 0 with usage text
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        json summary;
        if (c_fwd->parsed()) {
            summary = dormcoal::cmd_forward(load_config(fwd));
        } else if (c_gen->parsed()) {
            json cfg = load_config(gen);
            if (sample_size > 0) cfg["sample_size"] = sample_size;
            summary = dormcoal::cmd_genealogy(std::move(cfg));
        } else if (c_coal->parsed()) {
            summary = dormcoal::cmd_coalescent(load_config(coal));
        } else if (c_ver->parsed()) {
            json cfg = load_config(ver);
            if (!task.empty()) cfg["task"] = task;
            summary = dormcoal::cmd_verify(std::move(cfg));
        } else if (c_cons->parsed()) {
            summary = dormcoal::cmd_construct(load_config(cons));
        }
        print_result(summary);
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
