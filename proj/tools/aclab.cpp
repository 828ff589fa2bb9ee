// Command-line front end: one subcommand per pipeline.

#include "aclab/error.hpp"
#include "aclab/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <map>

namespace {

const char* describe(const std::string& pipeline) {
    static const std::map<std::string, const char*> text{
        {"profile", "1D heteroclinic profile and its linearized spectrum"},
        {"cone", "link eigenvalues, indicial roots and cone stability class"},
        {"minsurf", "shoot the area-minimizing leaf and fit its decay"},
        {"fermi", "inner residual, projection and mean-curvature expansion"},
        {"solve", "Newton solve of the reduced Allen-Cahn equation for each eps"},
        {"stability", "dilation derivative, bottom spectrum and quadratic-form trials"},
        {"full", "every stage and every acceptance check"},
    };
    return text.at(pipeline);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Allen-Cahn solutions near minimizing cones"};
    app.require_subcommand(1);

    std::string config_file;
    std::map<std::string, std::string> overrides;
    for (const std::string& name : aclab::pipeline_names()) {
        CLI::App* sub = app.add_subcommand(name, describe(name));
        sub->add_option("--config", config_file, "key = value configuration file");
        for (const std::string& key : aclab::config_keys()) {
            if (key == "pipeline") continue;
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            sub->add_option(flag, overrides[key], "overrides '" + key + "'");
        }
    }
    CLI11_PARSE(app, argc, argv);

    try {
        aclab::RunConfig config = config_file.empty() ? aclab::RunConfig{} : aclab::load_config(config_file);
        config.pipeline = app.get_subcommands().front()->get_name();
        for (const auto& [key, value] : overrides)
            if (!value.empty()) aclab::set_config_value(config, key, value);

        const aclab::RunReport report = aclab::run_pipeline(config);
        for (const aclab::CriterionResult& c : report.criteria)
            std::printf("[%s] %d %s: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), c.detail.c_str());
        std::printf("report: %s/report.json\n", config.output_dir.c_str());
        return report.all_pass() ? 0 : 1;
    } catch (const aclab::Error& e) {
        std::fprintf(stderr, "aclab: %s\n", e.what());
        return 2;
    }
}
