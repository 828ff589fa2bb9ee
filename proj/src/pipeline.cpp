#include "aclab/pipeline.hpp"

#include "aclab/decay_fit.hpp"
#include "aclab/error.hpp"
#include "aclab/fermi.hpp"
#include "aclab/io.hpp"
#include "aclab/jacobi.hpp"
#include "aclab/minsurf.hpp"
#include "aclab/profile1d.hpp"
#include "aclab/stability.hpp"
#include "aclab/zeroset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace aclab {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw InvalidArgument("config " + key + ": not a number: '" + v + "'");
    return out;
}

long long parse_integer(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw InvalidArgument("config " + key + ": not an integer: '" + v + "'");
    return out;
}

struct KeyDef {
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

KeyDef real_key(const std::string& key, double RunConfig::*field) {
    return {key, [key, field](RunConfig& c, const std::string& v) { c.*field = parse_double(key, v); },
            [field](const RunConfig& c) { return format_double(c.*field); }};
}

KeyDef int_key(const std::string& key, int RunConfig::*field) {
    return {key,
            [key, field](RunConfig& c, const std::string& v) {
                c.*field = static_cast<int>(parse_integer(key, v));
            },
            [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

const std::vector<KeyDef>& key_table() {
    static const std::vector<KeyDef> table = [] {
        std::vector<KeyDef> t;
        t.push_back({"pipeline", [](RunConfig& c, const std::string& v) { c.pipeline = v; },
                     [](const RunConfig& c) { return c.pipeline; }});
        t.push_back({"n1",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.n1 = static_cast<int>(parse_integer("n1", v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.spec.n1); }});
        t.push_back({"n2",
                     [](RunConfig& c, const std::string& v) {
                         c.spec.n2 = static_cast<int>(parse_integer("n2", v));
                     },
                     [](const RunConfig& c) { return std::to_string(c.spec.n2); }});
        t.push_back({"eps",
                     [](RunConfig& c, const std::string& v) {
                         c.eps.clear();
                         std::stringstream ss(v);
                         std::string item;
                         while (std::getline(ss, item, ',')) c.eps.push_back(parse_double("eps", trim(item)));
                     },
                     [](const RunConfig& c) {
                         std::string out;
                         for (std::size_t i = 0; i < c.eps.size(); ++i)
                             out += (i ? "," : "") + format_double(c.eps[i]);
                         return out;
                     }});
        t.push_back(real_key("radius", &RunConfig::radius));
        t.push_back(real_key("h_divisor", &RunConfig::h_divisor));
        t.push_back(real_key("delta_star", &RunConfig::delta_star));
        t.push_back(real_key("c_star", &RunConfig::c_star));
        t.push_back(real_key("nu", &RunConfig::nu));
        t.push_back(real_key("nu_prime", &RunConfig::nu_prime));
        t.push_back(real_key("shoot_tol", &RunConfig::shoot_tol));
        t.push_back(real_key("shoot_smax", &RunConfig::shoot_smax));
        t.push_back(real_key("curve_spacing", &RunConfig::curve_spacing));
        t.push_back(real_key("newton_tol", &RunConfig::newton_tol));
        t.push_back(int_key("newton_maxit", &RunConfig::newton_maxit));
        t.push_back(real_key("lambda_step", &RunConfig::lambda_step));
        t.push_back(int_key("spectrum_k", &RunConfig::spectrum_k));
        t.push_back(real_key("spectrum_shift", &RunConfig::spectrum_shift));
        t.push_back(int_key("trials", &RunConfig::trials));
        t.push_back({"seed",
                     [](RunConfig& c, const std::string& v) {
                         const long long s = parse_integer("seed", v);
                         if (s < 0) throw InvalidArgument("config seed: must be nonnegative");
                         c.seed = static_cast<std::uint64_t>(s);
                     },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        t.push_back({"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                     [](const RunConfig& c) { return c.output_dir; }});
        return t;
    }();
    return table;
}

const KeyDef& find_key(const std::string& key) {
    for (const KeyDef& k : key_table())
        if (k.key == key) return k;
    throw InvalidArgument("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const KeyDef& k : key_table()) out.push_back(k.key);
        return out;
    }();
    return keys;
}

const std::vector<std::string>& pipeline_names() {
    static const std::vector<std::string> names{"profile", "cone",  "minsurf", "fermi",
                                                "solve",   "stability", "full"};
    return names;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
    find_key(key).set(config, trim(value));
}

std::string get_config_value(const RunConfig& config, const std::string& key) {
    return find_key(key).get(config);
}

RunConfig parse_config(std::istream& in) {
    RunConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return config;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    return parse_config(in);
}

std::string format_config(const RunConfig& config) {
    std::string out;
    for (const KeyDef& k : key_table()) out += k.key + " = " + k.get(config) + "\n";
    return out;
}

void RunConfig::validate() const {
    if (std::find(pipeline_names().begin(), pipeline_names().end(), pipeline) == pipeline_names().end())
        throw InvalidArgument("unknown pipeline '" + pipeline + "'");
    spec.validate();
    if (eps.empty()) throw InvalidArgument("config eps: empty list");
    for (double e : eps)
        if (!(e > 0.0)) throw InvalidArgument("config eps: values must be positive");
    const double positive[] = {radius,     h_divisor,     delta_star, c_star,     shoot_tol,
                               shoot_smax, curve_spacing, newton_tol, lambda_step};
    for (double v : positive)
        if (!(v > 0.0)) throw InvalidArgument("config: tolerances and sizes must be positive");
    if (newton_maxit < 1 || spectrum_k < 1 || trials < 1)
        throw InvalidArgument("config: newton_maxit, spectrum_k and trials must be >= 1");
    if (h_divisor < 8.0) throw InvalidArgument("config h_divisor: h must satisfy h <= min(eps) / 8");
    for (double e : eps) {
        const double cells = radius / (e / h_divisor);
        if (std::abs(cells - std::round(cells)) > 1e-9 * cells)
            throw InvalidArgument("config: radius / h must be an integer for every eps");
    }
    const double nu_plus = cone_spectrum(spec, 1).level0().nu_plus;
    if (nu_plus > -2.0 && !(nu > -2.0 && nu < nu_plus)) {
        std::ostringstream msg;
        msg << "config nu: must lie in (-2, " << nu_plus << ") for this cone";
        throw InvalidArgument(msg.str());
    }
}

// ---------------------------------------------------------------- stages

namespace {

std::string eps_label(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", eps);
    return buf;
}

std::string solve_unit(double eps) { return "solve-eps" + eps_label(eps); }
std::string field_name(double eps) { return "u_eps" + eps_label(eps) + ".field"; }

std::vector<std::string> keys_for(const std::string& unit) {
    std::vector<std::string> k;
    if (unit == "profile") return k;
    k = {"n1", "n2"};
    if (unit == "cone") return k;
    k.insert(k.end(), {"shoot_tol", "shoot_smax", "curve_spacing", "nu", "nu_prime"});
    if (unit == "minsurf") return k;
    if (unit == "fermi") {
        k.insert(k.end(), {"eps", "c_star", "seed"});
        return k;
    }
    k.insert(k.end(), {"radius", "h_divisor", "delta_star", "c_star", "newton_tol", "newton_maxit"});
    if (unit.rfind("solve", 0) == 0) return k;
    k.insert(k.end(), {"eps", "lambda_step", "spectrum_k", "spectrum_shift", "trials", "seed"});
    return k;
}

struct Context {
    const RunConfig& cfg;
    fs::path dir;
    json stages = json::object();
    json timings = json::object();
    json manifest = json::object();
};

using Compute = std::function<json(std::vector<std::string>& artifacts)>;

json run_unit(Context& ctx, const std::string& unit, const Compute& compute) {
    std::string scope = unit + "\n";
    for (const std::string& k : keys_for(unit)) scope += k + "=" + get_config_value(ctx.cfg, k) + "\n";
    const std::string hash = sha256_text(scope);
    const fs::path record = ctx.dir / (unit + ".json");

    if (fs::exists(record)) {
        json prev;
        try {
            std::ifstream in(record);
            prev = json::parse(in);
        } catch (const std::exception&) {
            prev = json();
        }
        bool fresh = prev.is_object() && prev.value("config_hash", "") == hash && prev.contains("results");
        if (fresh)
            for (const auto& [name, sha] : prev["artifacts"].items())
                if (!fs::exists(ctx.dir / name) || sha256_file(ctx.dir / name) != sha.get<std::string>()) {
                    fresh = false;
                    break;
                }
        if (fresh) {
            ctx.timings[unit] = {{"status", "reused"}, {"seconds", prev.value("seconds", 0.0)}};
            for (const auto& [name, sha] : prev["artifacts"].items()) ctx.manifest[name] = sha;
            ctx.manifest[unit + ".json"] = sha256_file(record);
            return prev["results"];
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> artifacts;
    json results;
    try {
        results = compute(artifacts);
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(unit, e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json rec = {{"unit", unit}, {"config_hash", hash}, {"results", results}, {"seconds", seconds}};
    rec["artifacts"] = json::object();
    for (const std::string& a : artifacts) {
        rec["artifacts"][a] = sha256_file(ctx.dir / a);
        ctx.manifest[a] = rec["artifacts"][a];
    }
    {
        std::ofstream out(record);
        out << rec.dump(2) << '\n';
    }
    ctx.manifest[unit + ".json"] = sha256_file(record);
    ctx.timings[unit] = {{"status", "computed"}, {"seconds", seconds}};
    return results;
}

json fit_json(const DecayFit& f) {
    return {{"exponent", f.exponent}, {"amplitude", f.amplitude}, {"fit_residual", f.fit_residual},
            {"points", f.points}};
}

ShootOptions shoot_options(const RunConfig& cfg) {
    ShootOptions o;
    o.tol = cfg.shoot_tol;
    o.s_max = cfg.shoot_smax;
    o.spacing = cfg.curve_spacing;
    return o;
}

json stage_profile() {
    const L0Spectrum l0 = l0_eigencheck(20.0, 0.01);
    double energy = 0.0;
    for (int i = -2000; i <= 2000; ++i)
        energy = std::max(energy, std::abs(evaluate_profile(0.01 * i).energy));
    const ProfileMoments m = profile_moments(2);
    return {{"lambda0", l0.lambda0},
            {"lambda1", l0.lambda1},
            {"spectrum_edge", l0.spectrum_edge},
            {"w0_identity_residual", l0.w0_identity_residual},
            {"w1_identity_residual", l0.w1_identity_residual},
            {"energy_identity_max", energy},
            {"c", m.c},
            {"c_exact", 2.0 * std::numbers::sqrt2 / 3.0},
            {"m2", m.m2k.at(0)},
            {"m4", m.m2k.at(1)}};
}

json roots_json(const LinkSpec& spec) {
    const ConeSpectrum cs = cone_spectrum(spec, 1);
    const CharacteristicRoots& r = cs.level0();
    return {{"n1", spec.n1},
            {"n2", spec.n2},
            {"n", spec.n()},
            {"mu0", cs.entries.front().mode.mu},
            {"nu0_plus", r.nu_plus},
            {"nu0_minus", r.nu_minus},
            {"complex", r.complex_pair},
            {"stability", to_string(cs.stability)}};
}

json stage_cone(const RunConfig& cfg) {
    const ConeSpectrum cs = cone_spectrum(cfg.spec, 6);
    json modes = json::array();
    for (const ConeSpectrumEntry& e : cs.entries)
        modes.push_back({{"mu", e.mode.mu},
                         {"a", e.mode.a},
                         {"b", e.mode.b},
                         {"multiplicity", e.mode.multiplicity},
                         {"gamma_plus_re", e.roots.gamma_plus.real()},
                         {"gamma_plus_im", e.roots.gamma_plus.imag()},
                         {"gamma_minus_re", e.roots.gamma_minus.real()},
                         {"gamma_minus_im", e.roots.gamma_minus.imag()}});
    json table = json::array();
    for (int n = 3; n <= 7; ++n)
        for (int n1 = 1; 2 * n1 <= n - 1; ++n1) table.push_back(roots_json({n1, n - 1 - n1}));
    return {{"spec", roots_json(cfg.spec)},
            {"cone_angle", cone_angle(cfg.spec)},
            {"modes", modes},
            {"indicial_table", table}};
}

json stage_minsurf(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& artifacts) {
    json out;
    {
        const LinkSpec control{1, 1};
        json nc = roots_json(control);
        try {
            shoot_hardt_simon(control, shoot_options(cfg));
            nc["crossed"] = false;
        } catch (const CrossingError& e) {
            nc["crossed"] = true;
            nc["crossing_arclength"] = e.arclength();
        }
        out["negative_control"] = nc;
    }
    out["target_exponent"] = cone_spectrum(cfg.spec, 1).level0().nu_plus;

    GeneratingCurve curve;
    try {
        curve = shoot_hardt_simon(cfg.spec, shoot_options(cfg));
    } catch (const CrossingError& e) {
        out["crossed"] = true;
        out["crossing_arclength"] = e.arclength();
        return out;
    }
    out["crossed"] = false;
    write_curve_csv(dir / "curve.csv", curve);
    artifacts.push_back("curve.csv");

    const std::size_t n = curve.size();
    double min_dist = std::numeric_limits<double>::infinity();
    std::vector<double> r(n), dist(n), zeta = dilation_field(curve), abs_zeta(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = std::hypot(curve.x(i), curve.y(i));
        dist[i] = distance_to_cone(cfg.spec, curve.x(i), curve.y(i));
        abs_zeta[i] = std::abs(zeta[i]);
        if (i > 0) min_dist = std::min(min_dist, dist[i]);
    }
    const double angle = cone_angle(cfg.spec);
    const double polar = std::atan2(curve.y(n - 1), curve.x(n - 1));
    out["length"] = curve.length();
    out["samples"] = n;
    out["one_sided"] = min_dist > 0.0;
    out["min_cone_distance"] = min_dist;
    out["end"] = {{"x", curve.x(n - 1)},
                  {"y", curve.y(n - 1)},
                  {"theta", curve.theta(n - 1)},
                  {"polar_angle", polar},
                  {"cone_angle", angle},
                  {"theta_gap", std::abs(curve.theta(n - 1) - angle)},
                  {"polar_gap", std::abs(polar - angle)}};
    out["distance_fit"] = fit_json(fit_decay_exponent(r, dist, 10.0, 80.0));
    out["zeta0_fit"] = fit_json(fit_decay_exponent(r, abs_zeta, 10.0, 80.0));

    const JacobiApplication jz = jacobi_apply(curve, zeta);
    out["jacobi_scaled_residual"] = jacobi_scaled_residual(curve, zeta, jz);
    std::vector<double> jvals = jz.values;
    for (std::size_t i = 0; i < n; ++i)
        if (jz.one_sided[i]) jvals[i] = 0.0;
    out["zeta0_norm_nu"] = weighted_norm_curve(curve, zeta, cfg.nu);
    out["jacobi_norm_nu_prime"] = weighted_norm_curve(curve, jvals, cfg.nu_prime);

    const CurveGeometry geo = curve_geometry(curve);
    out["max_minimality_residual"] = geo.max_minimality_residual;
    out["max_speed_defect"] = geo.max_speed_defect;
    const FoliationReport fol = foliation_check(curve, {0.5, 1.0, 1.001, 2.0});
    json pairs = json::array();
    for (const FoliationPair& p : fol.pairs)
        pairs.push_back({{"scale_a", p.scale_a},
                         {"scale_b", p.scale_b},
                         {"min_distance", p.min_distance},
                         {"disjoint", p.disjoint}});
    out["foliation"] = {{"pairs", pairs},
                        {"polar_angle_monotone", fol.polar_angle_monotone},
                        {"ok", fol.ok()}};
    return out;
}

GeneratingCurve load_curve(const Context& ctx) {
    const json& m = ctx.stages.at("minsurf");
    if (m.value("crossed", true))
        throw InvalidArgument("the generating curve crosses the cone; no leaf to work with");
    return read_curve_csv(ctx.dir / "curve.csv");
}

json stage_fermi(const Context& ctx, std::vector<std::string>& artifacts) {
    const RunConfig& cfg = ctx.cfg;
    const GeneratingCurve curve = load_curve(ctx);
    const GeneratingCurve leaf44 = shoot_hardt_simon({4, 4}, shoot_options(cfg));
    const std::size_t ne = std::min<std::size_t>(cfg.eps.size(), 2);

    std::vector<double> d, pi_own, pi44;
    std::vector<std::vector<double>> sup(ne);
    for (double s = 2.5; s <= 30.5 + 1e-12; s += 0.25) {
        d.push_back(GeneratingCurve::d_gamma(s));
        for (std::size_t k = 0; k < ne; ++k) sup[k].push_back(inner_residual_sup(curve, s, cfg.eps[k], cfg.c_star));
        pi_own.push_back(std::abs(projected_inner_residual(curve, s, cfg.eps[0], cfg.c_star).value));
        pi44.push_back(std::abs(projected_inner_residual(leaf44, s, cfg.eps[0], cfg.c_star).value));
    }
    json out;
    json fits = json::array();
    for (std::size_t k = 0; k < ne; ++k) {
        json f = fit_json(fit_decay_exponent(d, sup[k], 3.0, 30.0));
        f["eps"] = cfg.eps[k];
        fits.push_back(f);
    }
    out["inner_residual_fits"] = fits;
    if (ne == 2) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d[i] >= 3.0 && d[i] <= 30.0) {
                lo = std::min(lo, sup[0][i] / sup[1][i]);
                hi = std::max(hi, sup[0][i] / sup[1][i]);
            }
        out["eps_ratio"] = {{"eps_coarse", cfg.eps[0]}, {"eps_fine", cfg.eps[1]}, {"min", lo}, {"max", hi}};
    }
    out["projected_fit"] = fit_json(fit_decay_exponent(d, pi_own, 3.0, 30.0));
    out["projected_fit_44"] = fit_json(fit_decay_exponent(d, pi44, 3.0, 30.0));
    out["projected_target_44"] = cone_spectrum({4, 4}, 1).level0().nu_plus - 4.0;

    // Closed-form parallel mean curvature against its order-12 expansion.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double gap = 0.0, tail = 0.0;
    const int samples = 1000;
    for (int i = 0; i < samples; ++i) {
        const double s = uni(rng) * curve.length();
        const PrincipalCurvatures k = principal_curvatures(curve, s);
        const double z = (2.0 * uni(rng) - 1.0) * 0.5 / k.max_abs();
        const ParallelMeanCurvature h = parallel_mean_curvature(k, z, 12);
        gap = std::max(gap, std::abs(h.exact - h.series));
        tail = std::max(tail, series_tail_bound(k, z, 12));
    }
    out["mean_curvature_series"] = {
        {"samples", samples}, {"order", 12}, {"max_gap", gap}, {"max_tail_bound", tail}};

    {
        std::ofstream csv(ctx.dir / "fermi_residual.csv");
        csv << "d_gamma";
        for (std::size_t k = 0; k < ne; ++k) csv << ",sup_eps" << eps_label(cfg.eps[k]);
        csv << ",pi_abs,pi_abs_44\n";
        for (std::size_t i = 0; i < d.size(); ++i) {
            csv << format_double(d[i]);
            for (std::size_t k = 0; k < ne; ++k) csv << ',' << format_double(sup[k][i]);
            csv << ',' << format_double(pi_own[i]) << ',' << format_double(pi44[i]) << '\n';
        }
    }
    artifacts.push_back("fermi_residual.csv");
    return out;
}

Grid2D grid_for(const RunConfig& cfg, double eps) {
    const double h = eps / cfg.h_divisor;
    return Grid2D(cfg.spec, cfg.radius, h);
}

json newton_json(const NewtonReport& r) {
    return {{"iterations", r.iterations},
            {"residuals", r.residuals},
            {"step_lengths", r.step_lengths},
            {"final_sup_residual", r.final_sup_residual},
            {"unknowns", r.unknowns},
            {"factor_nonzeros", r.factor_nonzeros},
            {"linear_solver", r.linear_solver},
            {"converged", r.converged},
            {"max_abs", r.max_abs}};
}

NewtonOptions newton_options(const RunConfig& cfg) {
    NewtonOptions o;
    o.tol = cfg.newton_tol;
    o.maxit = cfg.newton_maxit;
    return o;
}

json stage_solve(const Context& ctx, double eps, std::vector<std::string>& artifacts) {
    const RunConfig& cfg = ctx.cfg;
    const GeneratingCurve curve = load_curve(ctx);
    const Grid2D grid = grid_for(cfg, eps);
    const TubularMap map(curve, cfg.c_star);
    const TubeCoordinates tube = tube_coordinates(grid, map);
    const ScalarField2D approx = build_approx_solution(grid, tube, {eps, cfg.delta_star, 1});
    json out;
    out["eps"] = eps;
    out["grid"] = {{"radius", grid.radius()}, {"h", grid.spacing()}, {"cells", grid.cells()}};
    out["approx_sup_residual"] = pde_residual(grid, eps, approx).sup_norm;
    NewtonReport rep;
    const ScalarField2D u = newton_solve(grid, eps, approx, newton_options(cfg), rep);
    out["newton"] = newton_json(rep);
    write_field(ctx.dir / field_name(eps), u);
    artifacts.push_back(field_name(eps));

    const ZeroSet zero = zero_set_extract(u);
    const ZeroSetDeviation dev = zero_set_deviation(zero, map, 10.0);
    out["zero_set"] = {{"components", zero.components.size()},
                       {"vertices", zero.vertex_count()},
                       {"max_deviation", dev.max_dev},
                       {"max_deviation_over_eps", dev.max_dev / eps},
                       {"d_max", 10.0}};
    return out;
}

json stage_stability(const Context& ctx, std::vector<std::string>& artifacts) {
    const RunConfig& cfg = ctx.cfg;
    const double eps = cfg.eps.front();
    const GeneratingCurve curve = load_curve(ctx);
    const ScalarField2D u = read_field(ctx.dir / field_name(eps));

    DilationOptions dop;
    dop.eps = eps;
    dop.lambda_step = cfg.lambda_step;
    dop.delta_star = cfg.delta_star;
    dop.c_star = cfg.c_star;
    dop.newton = newton_options(cfg);
    const PhiReport phi = phi_from_dilation(curve, u, dop);
    dop.lambda_step = 0.5 * cfg.lambda_step;
    const PhiReport half = phi_from_dilation(curve, u, dop);

    // Where phi exceeds the difference-quotient noise floor, phi_fd must be positive too.
    const double sup = phi.phi.sup_norm();
    auto fd_min = [&](const PhiReport& p) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < p.phi.values().size(); ++k)
            if (phi.phi.values()[k] > 1e-6 * sup) m = std::min(m, p.phi_fd.values()[k]);
        return m;
    };
    double richardson = 0.0;
    for (std::size_t k = 0; k < phi.phi.values().size(); ++k)
        richardson = std::max(richardson, std::abs(phi.phi_fd.values()[k] - half.phi_fd.values()[k]));

    json out;
    out["eps"] = eps;
    out["phi"] = {{"positive", phi.positive},
                  {"min_interior", phi.min_interior},
                  {"max", sup},
                  {"tangent_kernel_residual", phi.kernel_residual},
                  {"kernel_residual", phi.fd_kernel_residual},
                  {"fd_agreement", phi.fd_agreement},
                  {"tube_agreement", phi.tube_agreement},
                  {"negative_pivots", phi.negative_pivots},
                  {"fd_min_above_noise", fd_min(phi)},
                  {"newton_plus", newton_json(phi.plus)},
                  {"newton_minus", newton_json(phi.minus)}};
    out["half_step"] = {{"lambda_step", 0.5 * cfg.lambda_step},
                        {"kernel_residual", half.fd_kernel_residual},
                        {"fd_agreement", half.fd_agreement},
                        {"fd_min_above_noise", fd_min(half)},
                        {"richardson_gap", sup > 0.0 ? richardson / sup : richardson}};
    write_field(ctx.dir / "phi.field", phi.phi);
    artifacts.push_back("phi.field");

    SpectrumOptions sop;
    sop.k = cfg.spectrum_k;
    sop.shift = cfg.spectrum_shift;
    sop.seed = cfg.seed;
    const SpectrumReport sp = linearization_spectrum(u, eps, sop);
    out["spectrum"] = {{"eigenvalues", sp.eigenvalues},
                       {"residuals", sp.residuals},
                       {"orthonormality_defect", sp.orthonormality_defect},
                       {"iterations", sp.iterations},
                       {"lambda_min", sp.eigenvalues.front()}};

    const auto psis = random_test_functions(curve, u.grid(), eps, cfg.trials, cfg.seed);
    const auto trials = quadratic_form_check(u, eps, phi.phi, psis);
    double min_ratio = std::numeric_limits<double>::infinity(), max_gap = 0.0;
    bool all_ok = true;
    std::ofstream csv(ctx.dir / "qtrials.csv");
    csv << "trial,q,norm2,rearranged,gap\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const QuadraticTrial& t = trials[i];
        min_ratio = std::min(min_ratio, t.q / t.norm2);
        max_gap = std::max(max_gap, t.gap);
        all_ok = all_ok && t.q >= -1e-4 * t.norm2;
        csv << i << ',' << format_double(t.q) << ',' << format_double(t.norm2) << ','
            << format_double(t.rearranged) << ',' << format_double(t.gap) << '\n';
    }
    csv.close();
    artifacts.push_back("qtrials.csv");
    out["quadratic_form"] = {{"trials", trials.size()},
                             {"min_q_over_norm2", min_ratio},
                             {"max_identity_gap", max_gap},
                             {"all_nonnegative", all_ok}};
    return out;
}

// Advisory lock on the run directory.
class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        std::FILE* f = std::fopen(path_.c_str(), "wx");
        if (!f) throw Error("run directory is locked (remove " + path_.string() + " if no run is active)");
        std::fclose(f);
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    fs::path path_;
};

bool runs(const std::string& pipeline, const std::string& stage) {
    return pipeline == "full" || pipeline == stage;
}

}  // namespace

// ---------------------------------------------------------------- criteria

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

CriterionResult missing(int id, const std::string& name, const std::string& stage) {
    return {id, name, false, "stage '" + stage + "' did not run"};
}

}  // namespace

CriterionResult evaluate_criterion(int id, const json& st) {
    switch (id) {
    case 1: {
        const std::string name = "indicial roots";
        if (!st.contains("cone")) return missing(id, name, "cone");
        double worst = 0.0;
        for (const json& row : st["cone"]["indicial_table"]) {
            const int n = row["n"];
            const double want_p = n == 7 ? -2.0 : (2.0 - n) / 2.0;
            const double want_m = n == 7 ? -3.0 : (2.0 - n) / 2.0;
            worst = std::max({worst, std::abs(row["nu0_plus"].get<double>() - want_p),
                              std::abs(row["nu0_minus"].get<double>() - want_m)});
        }
        return {id, name, worst <= 1e-12, fmt("max root error %.3g over n = 3..7 (tol 1e-12)", worst)};
    }
    case 2: {
        const std::string name = "1D spectrum";
        if (!st.contains("profile")) return missing(id, name, "profile");
        const json& p = st["profile"];
        const double l0 = p["lambda0"], l1 = p["lambda1"];
        const double idr = std::max(p["w0_identity_residual"].get<double>(), p["w1_identity_residual"].get<double>());
        const bool ok = std::abs(l0) < 1e-3 && std::abs(l1 - 1.5) < 1e-3 && idr <= 1e-12;
        return {id, name, ok, fmt("lambda0 %.3g, lambda1 %.6f, identity residual %.3g", l0, l1, idr)};
    }
    case 3: {
        const std::string name = "leaf shooting";
        if (!st.contains("minsurf")) return missing(id, name, "minsurf");
        const json& m = st["minsurf"];
        if (m["crossed"].get<bool>())
            return {id, name, false, fmt("curve crossed the cone at s = %.4g", m["crossing_arclength"].get<double>())};
        const double p = m["distance_fit"]["exponent"], target = m["target_exponent"];
        const double gap = std::max(m["end"]["theta_gap"].get<double>(), m["end"]["polar_gap"].get<double>());
        const bool ok = m["one_sided"].get<bool>() && gap < 1e-4 && std::abs(p - target) <= 0.15;
        return {id, name, ok,
                fmt("one-sided %.0f, end angle gap %.2g, distance exponent %.4f (target %.1f +- 0.15)",
                    m["one_sided"].get<bool>() ? 1.0 : 0.0, gap, p, target)};
    }
    case 4: {
        const std::string name = "Jacobi field";
        if (!st.contains("minsurf")) return missing(id, name, "minsurf");
        const json& m = st["minsurf"];
        if (m["crossed"].get<bool>()) return {id, name, false, "no leaf"};
        const double r = m["jacobi_scaled_residual"], p = m["zeta0_fit"]["exponent"], target = m["target_exponent"];
        return {id, name, r <= 0.05 && std::abs(p - target) <= 0.15,
                fmt("scaled residual %.3g (tol 0.05), zeta0 exponent %.4f (target %.1f +- 0.15)", r, p, target)};
    }
    case 5: {
        const std::string name = "mean-curvature series";
        if (!st.contains("fermi")) return missing(id, name, "fermi");
        const json& h = st["fermi"]["mean_curvature_series"];
        const double gap = h["max_gap"], tail = h["max_tail_bound"];
        return {id, name, gap <= 1e-10,
                fmt("max |closed - series| %.3g over %.0f samples (tol 1e-10); tail bound %.3g", gap,
                    h["samples"].get<double>(), tail)};
    }
    case 6: {
        const std::string name = "residual decay";
        if (!st.contains("fermi")) return missing(id, name, "fermi");
        const json& f = st["fermi"];
        const double slope = f["inner_residual_fits"][0]["exponent"];
        const double proj = f["projected_fit_44"]["exponent"];
        if (!f.contains("eps_ratio")) return {id, name, false, "needs two eps values"};
        const double lo = f["eps_ratio"]["min"], hi = f["eps_ratio"]["max"];
        const bool ok = std::abs(slope + 2.0) <= 0.2 && lo >= 3.6 && hi <= 4.4 && proj <= -5.0;
        return {id, name, ok,
                fmt("inner slope %.4f (-2 +- 0.2), eps ratio in [%.4f, %.4f] (4 +- 10%%), projected slope %.3f (<= -5)",
                    slope, lo, hi, proj)};
    }
    case 7: {
        const std::string name = "PDE solve";
        if (!st.contains("solve") || st["solve"].empty()) return missing(id, name, "solve");
        const json* coarse = nullptr;
        for (const auto& [k, v] : st["solve"].items())
            if (!coarse || v["eps"].get<double>() > (*coarse)["eps"].get<double>()) coarse = &v;
        const json* fine = nullptr;
        for (const auto& [k, v] : st["solve"].items())
            if (std::abs(v["eps"].get<double>() - 0.5 * (*coarse)["eps"].get<double>()) < 1e-12) fine = &v;
        const json& nr = (*coarse)["newton"];
        const double res = nr["final_sup_residual"];
        const int it = nr["iterations"];
        const bool newton_ok = nr["converged"].get<bool>() && res < 1e-10 && it <= 8;
        if (!fine)
            return {id, name, false, fmt("Newton %.0f iterations, residual %.3g; no eps/2 solve for the ratio", it, res)};
        const double ratio = (*coarse)["zero_set"]["max_deviation"].get<double>() /
                             (*fine)["zero_set"]["max_deviation"].get<double>();
        return {id, name, newton_ok && ratio >= 3.0,
                fmt("Newton %.0f iterations (<= 8), residual %.3g (< 1e-10), zero-set deviation ratio %.3f (>= 3)",
                    it, res, ratio)};
    }
    case 8: {
        const std::string name = "stability certificate";
        if (!st.contains("stability")) return missing(id, name, "stability");
        const json& s = st["stability"];
        const bool pos = s["phi"]["positive"];
        const double ker = s["phi"]["kernel_residual"], lmin = s["spectrum"]["lambda_min"];
        const double qmin = s["quadratic_form"]["min_q_over_norm2"], gap = s["quadratic_form"]["max_identity_gap"];
        const bool ok = pos && ker <= 1e-3 && lmin >= -1e-3 && s["quadratic_form"]["all_nonnegative"].get<bool>() &&
                        gap <= 1e-2;
        std::string detail = std::string("phi positive ") + (pos ? "yes" : "no");
        detail += fmt(", kernel residual %.3g (<= 1e-3), lambda_min %.4g (>= -1e-3), min Q/|psi|^2 %.4g, identity gap %.3g (<= 1e-2)",
                      ker, lmin, qmin, gap);
        return {id, name, ok, detail};
    }
    case 9: {
        const std::string name = "negative control";
        if (!st.contains("minsurf")) return missing(id, name, "minsurf");
        const json& nc = st["minsurf"]["negative_control"];
        const bool crossed = nc["crossed"], complex = nc["complex"];
        const bool non_strict = nc["stability"].get<std::string>() != to_string(Stability::strictly_stable);
        std::string detail = crossed ? fmt("(1,1) crosses the cone at s = %.4g", nc["crossing_arclength"].get<double>())
                                     : std::string("(1,1) did not cross");
        detail += std::string(", classified ") + nc["stability"].get<std::string>() +
                  (complex ? ", complex indicial roots" : ", real indicial roots");
        return {id, name, crossed && non_strict && complex, detail};
    }
    default:
        throw InvalidArgument("no acceptance criterion " + std::to_string(id));
    }
}

std::vector<int> criteria_for(const std::string& pipeline) {
    if (pipeline == "profile") return {2};
    if (pipeline == "cone") return {1};
    if (pipeline == "minsurf") return {3, 4, 9};
    if (pipeline == "fermi") return {5, 6};
    if (pipeline == "solve") return {7};
    if (pipeline == "stability") return {8};
    if (pipeline == "full") return {1, 2, 3, 4, 5, 6, 7, 8, 9};
    throw InvalidArgument("unknown pipeline '" + pipeline + "'");
}

bool RunReport::all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

// ---------------------------------------------------------------- driver

RunReport run_pipeline(const RunConfig& config) {
    config.validate();
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    DirLock lock(dir);
    Context ctx{config, dir};
    const std::string& p = config.pipeline;

    if (runs(p, "profile"))
        ctx.stages["profile"] = run_unit(ctx, "profile", [](auto&) { return stage_profile(); });
    if (runs(p, "cone"))
        ctx.stages["cone"] = run_unit(ctx, "cone", [&](auto&) { return stage_cone(config); });
    const bool need_curve = p == "full" || p == "minsurf" || p == "fermi" || p == "solve" || p == "stability";
    if (need_curve)
        ctx.stages["minsurf"] =
            run_unit(ctx, "minsurf", [&](auto& art) { return stage_minsurf(config, dir, art); });
    if (runs(p, "fermi"))
        ctx.stages["fermi"] = run_unit(ctx, "fermi", [&](auto& art) { return stage_fermi(ctx, art); });
    std::vector<double> solve_eps;
    if (runs(p, "solve")) solve_eps = config.eps;
    else if (p == "stability") solve_eps = {config.eps.front()};
    for (double e : solve_eps)
        ctx.stages["solve"][eps_label(e)] =
            run_unit(ctx, solve_unit(e), [&](auto& art) { return stage_solve(ctx, e, art); });
    if (runs(p, "stability"))
        ctx.stages["stability"] = run_unit(ctx, "stability", [&](auto& art) { return stage_stability(ctx, art); });

    std::vector<std::string> plots;
    if (ctx.stages.contains("minsurf") && !ctx.stages["minsurf"].value("crossed", true)) plots.push_back("decay");
    if (ctx.stages.contains("solve")) plots.push_back("zeroset");
    if (ctx.stages.contains("stability")) plots.push_back("spectrum");
    for (const std::string& kind : plots) {
        const fs::path out = emit_plot_data(dir, kind);
        ctx.manifest[out.filename().string()] = sha256_file(out);
    }

    RunReport report;
    json acceptance = json::array();
    for (int id : criteria_for(p)) {
        report.criteria.push_back(evaluate_criterion(id, ctx.stages));
        const CriterionResult& c = report.criteria.back();
        acceptance.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    json cfg = json::object();
    for (const std::string& k : config_keys()) cfg[k] = get_config_value(config, k);
    report.json = {{"schema_version", kReportSchemaVersion},
                   {"config", cfg},
                   {"stages", ctx.stages},
                   {"acceptance", acceptance},
                   {"all_pass", report.all_pass()},
                   {"manifest", ctx.manifest},
                   {"timings", ctx.timings}};
    std::ofstream out(dir / "report.json");
    out << report.json.dump(2) << '\n';
    return report;
}

// ---------------------------------------------------------------- plot data

fs::path emit_plot_data(const fs::path& run_dir, const std::string& kind) {
    auto results_of = [&](const std::string& unit) {
        const fs::path rec = run_dir / (unit + ".json");
        if (!fs::exists(rec)) throw InvalidArgument("emit_plot_data: missing artifact " + rec.string());
        std::ifstream in(rec);
        return json::parse(in).at("results");
    };
    const fs::path out_path = run_dir / ("plot_" + kind + ".csv");
    if (kind == "decay") {
        const json m = results_of("minsurf");
        const GeneratingCurve curve = read_curve_csv(run_dir / "curve.csv");
        const double p = m["distance_fit"]["exponent"], a = m["distance_fit"]["amplitude"];
        std::ofstream out(out_path);
        out << "log_r,log_value,fit\n";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double r = std::hypot(curve.x(i), curve.y(i));
            if (r < 10.0 || r > 80.0) continue;
            const double lr = std::log(r);
            out << format_double(lr) << ',' << format_double(std::log(distance_to_cone(curve.spec(), curve.x(i), curve.y(i))))
                << ',' << format_double(std::log(a) + p * lr) << '\n';
        }
    } else if (kind == "zeroset") {
        double eps = 0.0;
        for (const auto& entry : fs::directory_iterator(run_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("solve-eps", 0) == 0 && entry.path().extension() == ".json")
                eps = std::max(eps, results_of(entry.path().stem().string())["eps"].get<double>());
        }
        if (eps == 0.0) throw InvalidArgument("emit_plot_data: no solve artifact in " + run_dir.string());
        const ScalarField2D u = read_field(run_dir / field_name(eps));
        const GeneratingCurve curve = read_curve_csv(run_dir / "curve.csv");
        const double R = u.grid().radius();
        std::ofstream out(out_path);
        out << "s1,s2,source\n";
        for (std::size_t i = 0; i < curve.size(); ++i)
            if (curve.x(i) <= R && curve.y(i) <= R)
                out << format_double(curve.x(i)) << ',' << format_double(curve.y(i)) << ",gamma\n";
        for (const Polyline& line : zero_set_extract(u).components)
            for (const Vec2& v : line) out << format_double(v.x()) << ',' << format_double(v.y()) << ",zero\n";
    } else if (kind == "spectrum") {
        const json s = results_of("stability");
        std::ofstream out(out_path);
        out << "index,eigenvalue\n";
        const json& ev = s["spectrum"]["eigenvalues"];
        for (std::size_t i = 0; i < ev.size(); ++i) out << i << ',' << format_double(ev[i].get<double>()) << '\n';
    } else {
        throw InvalidArgument("emit_plot_data: unknown kind '" + kind + "'");
    }
    return out_path;
}

}  // namespace aclab
