#include "aclab/error.hpp"
#include "aclab/io.hpp"
#include "aclab/minsurf.hpp"
#include "aclab/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace aclab;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp dir, removed on scope exit.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        std::random_device rd;
        path = fs::temp_directory_path() / ("aclab-test-" + tag + "-" + std::to_string(rd()));
        fs::remove_all(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

RunConfig small_config(const std::string& pipeline, const fs::path& dir) {
    RunConfig c;
    c.pipeline = pipeline;
    c.eps = {0.25};
    c.radius = 4.0;
    c.output_dir = dir.string();
    return c;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("config: text round trip") {
    RunConfig c;
    c.pipeline = "solve";
    c.spec = {2, 4};
    c.eps = {0.5, 0.25, 0.125};
    c.radius = 12.0;
    c.nu = -1.9;
    c.seed = 7;
    c.output_dir = "somewhere";
    std::istringstream in(format_config(c));
    const RunConfig back = parse_config(in);
    CHECK(format_config(back) == format_config(c));
    CHECK(back.eps == c.eps);
    CHECK(back.spec.n1 == 2);
    CHECK(back.spec.n2 == 4);

    std::istringstream commented("# a run\npipeline = cone   # trailing\n\n n1 = 4\nn2=4\neps = 0.5, 0.25\n");
    const RunConfig p = parse_config(commented);
    CHECK(p.pipeline == "cone");
    CHECK(p.spec.n1 == 4);
    CHECK(p.eps == std::vector<double>{0.5, 0.25});

    CHECK(config_keys().size() == 21);
    for (const std::string& k : config_keys()) CHECK(get_config_value(back, k) == get_config_value(c, k));

    RunConfig x;
    CHECK_THROWS_AS(set_config_value(x, "colour", "blue"), InvalidArgument);
    CHECK_THROWS_AS(set_config_value(x, "radius", "big"), InvalidArgument);
    CHECK_THROWS_AS(set_config_value(x, "newton_maxit", "2.5"), InvalidArgument);
    CHECK_THROWS_AS(set_config_value(x, "seed", "-1"), InvalidArgument);
    std::istringstream bad("radius 4\n");
    CHECK_THROWS_AS(parse_config(bad), InvalidArgument);
    CHECK_THROWS_AS(load_config("/nonexistent/aclab.conf"), InvalidArgument);
}

TEST_CASE("config: validation") {
    CHECK_NOTHROW(RunConfig{}.validate());
    RunConfig c;
    c.pipeline = "everything";
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.h_divisor = 4.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.radius = 16.1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.newton_tol = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = {};
    c.eps = {};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);

    // For (4,4) the window is (-2, (sqrt(17) - 7) / 2) = (-2, -1.438...).
    c = {};
    c.spec = {4, 4};
    c.nu = -1.75;
    CHECK_NOTHROW(c.validate());
    c.nu = -1.3;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.nu = -2.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("pipeline: criteria per pipeline") {
    CHECK(criteria_for("profile") == std::vector<int>{2});
    CHECK(criteria_for("cone") == std::vector<int>{1});
    CHECK(criteria_for("full").size() == 9);
    const CriterionResult missing = evaluate_criterion(7, nlohmann::json::object());
    CHECK(!missing.pass);
    CHECK(!missing.detail.empty());
}

TEST_CASE("pipeline: cone run, reuse and manifest") {
    ScratchDir dir("cone");
    const RunConfig c = small_config("cone", dir.path);
    const RunReport first = run_pipeline(c);
    REQUIRE(first.criteria.size() == 1);
    CHECK(first.criteria[0].pass);
    const nlohmann::json& spec = first.json["stages"]["cone"]["spec"];
    CHECK(spec["nu0_plus"].get<double>() == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(spec["nu0_minus"].get<double>() == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(first.json["schema_version"] == kReportSchemaVersion);
    CHECK(first.json["timings"]["cone"]["status"] == "computed");
    CHECK(!fs::exists(dir.path / ".lock"));

    nlohmann::json a = read_json(dir.path / "report.json");
    const RunReport second = run_pipeline(c);
    CHECK(second.json["timings"]["cone"]["status"] == "reused");
    nlohmann::json b = read_json(dir.path / "report.json");
    a.erase("timings");
    b.erase("timings");
    CHECK(a.dump() == b.dump());

    for (const auto& [name, sha] : b["manifest"].items()) CHECK(sha256_file(dir.path / name) == sha.get<std::string>());

    // A changed key that the unit depends on invalidates it.
    RunConfig other = c;
    other.spec = {2, 4};
    const RunReport third = run_pipeline(other);
    CHECK(third.json["timings"]["cone"]["status"] == "computed");
}

TEST_CASE("pipeline: deleting an artifact recomputes only its unit") {
    ScratchDir dir("solve");
    const RunConfig c = small_config("solve", dir.path);
    const RunReport first = run_pipeline(c);
    CHECK(first.json["stages"]["solve"]["0.25"]["newton"]["converged"] == true);
    REQUIRE(fs::exists(dir.path / "u_eps0.25.field"));
    REQUIRE(fs::exists(dir.path / "curve.csv"));

    fs::remove(dir.path / "u_eps0.25.field");
    const RunReport second = run_pipeline(c);
    CHECK(second.json["timings"]["minsurf"]["status"] == "reused");
    CHECK(second.json["timings"]["solve-eps0.25"]["status"] == "computed");
    CHECK(fs::exists(dir.path / "u_eps0.25.field"));

    // Tampering counts as deletion.
    {
        std::ofstream out(dir.path / "curve.csv", std::ios::app);
        out << "0,0,0,0\n";
    }
    const RunReport third = run_pipeline(c);
    CHECK(third.json["timings"]["minsurf"]["status"] == "computed");

    SUBCASE("plot data") {
        CHECK(first_line(emit_plot_data(dir.path, "zeroset")) == "s1,s2,source");
        CHECK(first_line(emit_plot_data(dir.path, "decay")) == "log_r,log_value,fit");
        CHECK_THROWS_AS(emit_plot_data(dir.path, "spectrum"), InvalidArgument);
        CHECK_THROWS_AS(emit_plot_data(dir.path, "histogram"), InvalidArgument);
    }
}

TEST_CASE("pipeline: lock file blocks a concurrent run") {
    ScratchDir dir("lock");
    const RunConfig c = small_config("profile", dir.path);
    fs::create_directories(dir.path);
    std::ofstream(dir.path / ".lock").close();
    CHECK_THROWS_AS(run_pipeline(c), Error);
    fs::remove(dir.path / ".lock");
    CHECK_NOTHROW(run_pipeline(c));
}

TEST_CASE("pipeline: a failing stage reports its name") {
    ScratchDir dir("fail");
    RunConfig c = small_config("fermi", dir.path);
    c.spec = {1, 1};
    try {
        run_pipeline(c);
        FAIL("expected a StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "fermi");
    }
    CHECK(!fs::exists(dir.path / ".lock"));
}

TEST_CASE("io: field and curve round trips") {
    ScratchDir dir("io");
    fs::create_directories(dir.path);
    const Grid2D g({2, 3}, 1.0, 0.125);
    ScalarField2D f(g);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double& v : f.values()) v = n(rng);
    write_field(dir.path / "f.field", f);
    const ScalarField2D back = read_field(dir.path / "f.field");
    CHECK(back.values() == f.values());
    CHECK(back.grid().spec().n2 == 3);
    CHECK(back.grid().spacing() == 0.125);

    {
        std::ofstream out(dir.path / "short.field", std::ios::binary);
        out << "aclab-field 1 2 3 1 0.125 9\n" << "abc";
    }
    CHECK_THROWS_AS(read_field(dir.path / "short.field"), InvalidArgument);
    CHECK_THROWS_AS(read_field(dir.path / "missing.field"), InvalidArgument);

    ShootOptions so;
    so.s_max = 20.0;
    const GeneratingCurve c = shoot_hardt_simon({3, 3}, so);
    write_curve_csv(dir.path / "c.csv", c);
    const GeneratingCurve cb = read_curve_csv(dir.path / "c.csv");
    REQUIRE(cb.size() == c.size());
    CHECK(cb.spacing() == c.spacing());
    CHECK(cb.orientation() == c.orientation());
    for (std::size_t i = 0; i < c.size(); i += 97) {
        CHECK(cb.x(i) == c.x(i));
        CHECK(cb.y(i) == c.y(i));
        CHECK(cb.theta(i) == c.theta(i));
    }

    CHECK(sha256_text("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_text("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(format_double(0.1) == "0.10000000000000001");
}
