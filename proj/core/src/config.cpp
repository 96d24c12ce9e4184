#include "mgt/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgt/csv.hpp"

namespace mgt {

using nlohmann::json;

namespace {

KernelPtr kernel_from_json(const json& spec, const std::filesystem::path& base_dir) {
    if (!spec.is_object() || !spec.contains("type"))
        throw ValidationError("kernel spec must be an object with a \"type\" field");
    const std::string type = spec.at("type").get<std::string>();
    KernelPtr kernel;
    if (type == "exponential") {
        kernel = make_exponential(spec.at("k").get<double>(), spec.at("nu").get<double>());
    } else if (type == "oscillating") {
        kernel = make_oscillating();
    } else if (type == "staircase") {
        kernel = make_staircase(spec.at("n_max").get<int>());
    } else if (type == "tabulated") {
        std::filesystem::path p = spec.at("path").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        const CsvTable table = read_csv(p);
        const std::size_t cs = table.column("s"), cg = table.column("g");
        std::vector<double> s, g;
        for (const auto& row : table.rows) {
            s.push_back(row[cs]);
            g.push_back(row[cg]);
        }
        kernel = make_tabulated(std::move(s), std::move(g));
    } else if (type == "zero" || type == "none") {
        kernel = make_zero();
    } else {
        throw ValidationError("unknown kernel type: " + type);
    }
    if (spec.contains("scale")) {
        const double c = spec.at("scale").get<double>();
        if (c != 1.0) kernel = make_scaled(std::move(kernel), c);
    }
    return kernel;
}

Spectrum spectrum_from_json(const json& spec) {
    if (spec.contains("eigenvalues"))
        return Spectrum(spec.at("eigenvalues").get<std::vector<double>>());
    if (spec.contains("preset")) {
        const std::string preset = spec.at("preset").get<std::string>();
        if (preset == "dirichlet1d")
            return Spectrum::dirichlet1d(spec.at("n_modes").get<std::size_t>());
        throw ValidationError("unknown spectrum preset: " + preset);
    }
    throw ValidationError("spectrum needs \"eigenvalues\" or a \"preset\"");
}

} // namespace

State random_initial_state(std::size_t n_modes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    State z = State::zero(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) z.u.c[j] = normal(rng);
    for (std::size_t j = 0; j < n_modes; ++j) z.v.c[j] = normal(rng);
    for (std::size_t j = 0; j < n_modes; ++j) z.w.c[j] = normal(rng);
    return z;
}

KernelPtr kernel_from_json_text(const std::string& text, const std::filesystem::path& base_dir) {
    json spec;
    try {
        spec = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("kernel spec is not valid JSON: ") + e.what());
    }
    return kernel_from_json(spec, base_dir);
}

ExperimentConfig ExperimentConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str(), path.has_parent_path() ? path.parent_path() : ".");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        cfg.params.alpha = j.at("alpha").get<double>();
        cfg.params.beta = j.at("beta").get<double>();
        cfg.params.gamma = j.at("gamma").get<double>();
        cfg.kernel = kernel_from_json(j.at("kernel"), base_dir);
        cfg.kernel_spec = j.at("kernel").dump();
        cfg.spectrum = spectrum_from_json(j.at("spectrum"));
        cfg.seed = j.value("seed", std::uint64_t{0});

        const std::size_t nm = cfg.spectrum.size();
        if (!j.contains("initial_data") || j.at("initial_data") == "random") {
            cfg.random_initial = true;
            cfg.initial = random_initial_state(nm, cfg.seed);
        } else {
            const json& init = j.at("initial_data");
            cfg.initial = State::zero(nm);
            cfg.initial.u.c = init.at("u0").get<std::vector<double>>();
            cfg.initial.v.c = init.at("v0").get<std::vector<double>>();
            cfg.initial.w.c = init.at("w0").get<std::vector<double>>();
        }

        cfg.rho = j.value("rho", 0.0);
        if (j.contains("rho_list")) cfg.rho_list = j.at("rho_list").get<std::vector<double>>();
        cfg.T = j.at("T").get<double>();
        cfg.dt = j.at("dt").get<double>();
        if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
        cfg.energy_stride = j.value("energy_stride", std::size_t{0});
        cfg.threads = j.value("threads", 1);
        if (j.contains("checks")) cfg.checks = j.at("checks").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    } catch (const ParameterError& e) {
        throw ValidationError(std::string("invalid config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    std::vector<std::string> issues;
    try {
        params.validate();
    } catch (const std::exception& e) {
        issues.emplace_back(e.what());
    }
    if (!kernel) issues.emplace_back("kernel missing");
    if (kernel && !kernel->is_zero() && !(kernel->kappa() < params.gamma))
        issues.push_back("kernel mass kappa = " + std::to_string(kernel->kappa()) +
                         " violates kappa < gamma = " + std::to_string(params.gamma));
    if (!(dt > 0.0)) issues.emplace_back("dt must be positive");
    if (!(T >= 0.0)) issues.emplace_back("T must be nonnegative");
    if (dt > 0.0) {
        const double n = std::round(T / dt);
        if (std::abs(n * dt - T) > 1e-9 * std::max(1.0, T))
            issues.emplace_back("dt must divide T");
    }
    if (rho < 0.0) issues.emplace_back("rho must be nonnegative");
    for (std::size_t i = 0; i + 1 < rho_list.size(); ++i)
        if (!(rho_list[i] > rho_list[i + 1]) || !(rho_list[i + 1] > 0.0)) {
            issues.emplace_back("rho_list must be strictly decreasing and positive");
            break;
        }
    const std::size_t nm = spectrum.size();
    if (initial.u.size() != nm || initial.v.size() != nm || initial.w.size() != nm)
        issues.emplace_back("initial data dimension does not match the spectrum");
    if (delta && (!(*delta > 0.0) || !(*delta < params.alpha)))
        issues.emplace_back("delta must satisfy 0 < delta < alpha");
    if (threads < 1) issues.emplace_back("threads must be >= 1");

    if (!issues.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ValidationError(msg);
    }
}

double ExperimentConfig::resolved_delta() const {
    if (delta) return *delta;
    if (auto d = kernel->g3_delta(params.alpha)) return *d;
    throw ValidationError("no certified delta available; set \"delta\" in the config");
}

std::size_t ExperimentConfig::resolved_stride(std::size_t n_steps) const {
    if (energy_stride > 0) return energy_stride;
    return std::max<std::size_t>(1, n_steps / 2000);
}

} // namespace mgt
