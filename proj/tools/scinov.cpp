#include <iostream>

#include <CLI11.hpp>

#include "scinov/error.hpp"
#include "scinov/pipeline.hpp"

namespace {

namespace pl = scinov::pipeline;

std::vector<pl::Stage> selected(const std::string& name) {
    if (name == "all") return pl::all_stages();
    return {*pl::parse_stage(name)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Novelty and impact metrics for scholarly corpora"};
    app.set_version_flag("--version", SCINOV_VERSION);
    app.require_subcommand(1, 1);

    std::string config_path;
    unsigned threads = 0;
    bool force = false;
    bool strict = false;
    app.add_option("--config", config_path, "pipeline settings (key = value)")->required()->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "worker threads; overrides the config")->check(CLI::Range(1U, 1024U));
    app.add_flag("--force", force, "overwrite artifacts produced under different settings");
    app.add_flag("--strict", strict, "abort ingest on the first malformed record");

    for (auto s : pl::all_stages()) {
        const std::string name(pl::stage_name(s));
        app.add_subcommand(name, "run the " + name + " stage");
    }
    app.add_subcommand("all", "run every stage in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        auto config = pl::PipelineConfig::load(config_path);
        if (threads > 0) config.threads = threads;
        if (strict) config.strict = true;
        const auto stages = selected(app.get_subcommands().front()->get_name());
        for (const auto& r : pl::run(config, stages, {force}))
            std::cerr << pl::stage_name(r.stage) << (r.skipped ? ": up to date\n" : ": done\n");
        return 0;
    } catch (const scinov::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const scinov::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
