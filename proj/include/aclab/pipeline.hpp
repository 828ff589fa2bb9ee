#pragma once

#include "aclab/cone.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace aclab {

inline constexpr int kReportSchemaVersion = 1;

/// Run configuration. The text form is one `key = value` per line, `#`
/// starts a comment, and `eps` takes a comma-separated list.
struct RunConfig {
    std::string pipeline = "full";
    LinkSpec spec{3, 3};
    std::vector<double> eps{0.25, 0.125};
    double radius = 16.0;
    /// Grid spacing per eps is eps / h_divisor.
    double h_divisor = 8.0;
    double delta_star = 0.5;
    double c_star = 0.2;
    /// Weights of the curve norms of zeta0 (nu) and of J zeta0 (nu_prime).
    double nu = -1.75;
    double nu_prime = -3.75;
    double shoot_tol = 1e-10;
    double shoot_smax = 200.0;
    double curve_spacing = 0.01;
    double newton_tol = 1e-10;
    int newton_maxit = 20;
    double lambda_step = 1e-3;
    int spectrum_k = 4;
    double spectrum_shift = -0.01;
    int trials = 20;
    std::uint64_t seed = 42;
    std::string output_dir = "aclab-run";

    /// Throws InvalidArgument on an unknown pipeline, nonpositive tolerances,
    /// h > min(eps) / 8, R / h not an integer, or a nu outside (-2, nu0+)
    /// when that window is nonempty.
    void validate() const;
};

const std::vector<std::string>& config_keys();
const std::vector<std::string>& pipeline_names();

/// Throws InvalidArgument on an unknown key or an unparsable value.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const RunConfig& config, const std::string& key);
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
std::string format_config(const RunConfig& config);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Evaluates acceptance criterion 1..9 from the stage results of a report.
/// A criterion whose stages are missing fails with a detail saying so.
CriterionResult evaluate_criterion(int id, const nlohmann::json& stages);

/// Criteria covered by a pipeline: every criterion whose stages it runs.
std::vector<int> criteria_for(const std::string& pipeline);

struct RunReport {
    nlohmann::json json;
    std::vector<CriterionResult> criteria;
    bool all_pass() const;
};

/// Runs the pipeline's stages in dependency order inside output_dir.
///
/// Every stage unit writes `<unit>.json` plus its artifacts. A later run
/// reuses a unit when its recorded config hash matches and every artifact
/// still has its recorded SHA-256; anything else is recomputed. The report
/// goes to `report.json` with the timings kept under their own key, so two
/// runs of the same config differ only there. A `.lock` file guards the
/// directory. Throws StageError when a stage fails.
RunReport run_pipeline(const RunConfig& config);

/// Writes plot_<kind>.csv into the run directory from existing artifacts and
/// returns its path. Kinds: decay (log_r, log_value, fit), zeroset
/// (s1, s2, source), spectrum (index, eigenvalue). Throws InvalidArgument on
/// an unknown kind or a missing artifact.
std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir, const std::string& kind);

}  // namespace aclab
