// mmqi: command-line surface of the multi-mode interferometry library.
//
// Subcommands: qfi, bound-sweep, pattern, sensitivity, reproduce-fig3.
// Exit codes: 0 success, 2 config error, 3 numerical-domain error, 4 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mmqi/mmqi.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting: floats capped at 12 significant digits so reruns are
// byte-identical across platforms.

std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

double round12(double x) { return std::strtod(fmt12(x).c_str(), nullptr); }

json jnum(double x) { return json(round12(x)); }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing " + path.string());
}

json make_warning(const std::string& code, const std::string& message) {
    json w;
    w["code"] = code;
    w["message"] = message;
    return w;
}

json operational_witness_warning() {
    return make_warning("W_OPERATIONAL_WITNESS_MULTIMODE",
                        "the fluctuations-to-visibility ratio eta^2/nu^2 is reliable only "
                        "when each arm is known to hold a single mode; same-arm "
                        "interference contaminates the visibility otherwise");
}

// ---------------------------------------------------------------------------
// Config ingestion

std::size_t dim_cap_from_env() {
    if (const char* env = std::getenv("MMQI_DIM_CAP")) {
        char* end = nullptr;
        const unsigned long long cap = std::strtoull(env, &end, 10);
        if (end == env || cap == 0) throw ConfigError("MMQI_DIM_CAP must be a positive integer");
        return static_cast<std::size_t>(cap);
    }
    return mmqi::kDefaultDimCap;
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

const json& require_field(const json& obj, const std::string& key,
                          const std::string& context) {
    if (!obj.contains(key))
        throw ConfigError(context + ": missing required field \"" + key + "\"");
    return obj.at(key);
}

double as_number(const json& value, const std::string& context) {
    if (!value.is_number()) throw ConfigError(context + ": expected a number");
    return value.get<double>();
}

int as_int(const json& value, const std::string& context) {
    if (!value.is_number_integer()) throw ConfigError(context + ": expected an integer");
    return value.get<int>();
}

Eigen::VectorXcd parse_complex_vector(const json& arr, const std::string& context) {
    if (!arr.is_array() || arr.empty())
        throw ConfigError(context + ": expected a nonempty array");
    Eigen::VectorXcd out(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& item = arr[i];
        if (item.is_number()) {
            out[i] = mmqi::Complex(item.get<double>(), 0.0);
        } else if (item.is_array() && item.size() == 2 && item[0].is_number() &&
                   item[1].is_number()) {
            out[i] = mmqi::Complex(item[0].get<double>(), item[1].get<double>());
        } else {
            throw ConfigError(context + ": entries must be numbers or [re, im] pairs");
        }
    }
    return out;
}

mmqi::ArmAmplitudes parse_amplitudes(const json& spec, int modes_per_arm,
                                     const std::string& context) {
    try {
        if (spec.contains("alpha") || spec.contains("beta")) {
            Eigen::VectorXcd alpha =
                parse_complex_vector(require_field(spec, "alpha", context), context);
            Eigen::VectorXcd beta =
                parse_complex_vector(require_field(spec, "beta", context), context);
            if (alpha.size() != modes_per_arm || beta.size() != modes_per_arm)
                throw ConfigError(context + ": alpha/beta must have M entries");
            return mmqi::ArmAmplitudes(std::move(alpha), std::move(beta));
        }
        const double z = as_number(require_field(spec, "z", context), context + ".z");
        const double phi =
            spec.contains("phi") ? as_number(spec.at("phi"), context + ".phi") : 0.0;
        if (modes_per_arm != 1)
            throw ConfigError(context + ": (z, phi) amplitudes require M = 1; "
                                        "use alpha/beta arrays for multi-mode arms");
        return mmqi::ArmAmplitudes::two_mode(z, phi);
    } catch (const mmqi::NormalizationError& e) {
        throw ConfigError(context + ": " + std::string(e.what()));
    } catch (const mmqi::RangeError& e) {
        throw ConfigError(context + ": " + std::string(e.what()));
    }
}

mmqi::Axis parse_generator(const json& config) {
    if (!config.contains("generator")) return mmqi::Axis::z();
    const json& gen = config.at("generator");
    if (gen.contains("axis")) {
        const std::string axis = gen.at("axis").get<std::string>();
        if (axis == "x") return mmqi::Axis::x();
        if (axis == "y") return mmqi::Axis::y();
        if (axis == "z") return mmqi::Axis::z();
        throw ConfigError("generator.axis must be one of x, y, z");
    }
    if (gen.contains("direction")) {
        const json& dir = gen.at("direction");
        if (!dir.is_array() || dir.size() != 3)
            throw ConfigError("generator.direction must be a 3-vector");
        Eigen::Vector3d n(as_number(dir[0], "direction"), as_number(dir[1], "direction"),
                          as_number(dir[2], "direction"));
        const double norm = n.norm();
        if (norm <= 0.0) throw ConfigError("generator.direction must be nonzero");
        return mmqi::Axis(n / norm);
    }
    throw ConfigError("generator needs either \"axis\" or \"direction\"");
}

mmqi::WeightLaw parse_weight_law(const json& spec) {
    if (!spec.contains("weight_law")) return mmqi::WeightLaw::kUniform;
    const std::string law = spec.at("weight_law").get<std::string>();
    if (law == "uniform") return mmqi::WeightLaw::kUniform;
    if (law == "dirichlet") return mmqi::WeightLaw::kDirichlet;
    throw ConfigError("state.weight_law must be \"uniform\" or \"dirichlet\"");
}

using BosonicState = std::variant<mmqi::StateVector, mmqi::DensityOperator>;

BosonicState build_bosonic_state(const json& spec,
                                 const std::shared_ptr<const mmqi::FockBasis>& basis) {
    const std::string type = require_field(spec, "type", "state").get<std::string>();
    if (type == "coherent")
        return mmqi::coherent_state(basis,
                                    parse_amplitudes(spec, basis->modes_per_arm(), "state"));
    if (type == "noon")
        return mmqi::noon_state(basis, as_int(require_field(spec, "mode", "state"), "mode"));
    if (type == "three_mode")
        return mmqi::three_mode_example(
            basis, as_number(require_field(spec, "z", "state"), "state.z"),
            as_number(require_field(spec, "zeta", "state"), "state.zeta"));
    if (type == "mixture") {
        const json& comps = require_field(spec, "components", "state");
        if (!comps.is_array() || comps.empty())
            throw ConfigError("state.components must be a nonempty array");
        mmqi::MixtureSpec mix;
        for (const json& comp : comps) {
            const double w =
                as_number(require_field(comp, "weight", "component"), "component.weight");
            mix.components.emplace_back(
                w, parse_amplitudes(comp, basis->modes_per_arm(), "component"));
        }
        try {
            return mmqi::separable_mixture(basis, mix);
        } catch (const mmqi::ProbabilityNormalization& e) {
            throw ConfigError(std::string("state.components: ") + e.what());
        }
    }
    if (type == "random_separable") {
        const int n_components =
            as_int(require_field(spec, "components", "state"), "state.components");
        const auto seed = static_cast<std::uint64_t>(
            as_int(require_field(spec, "seed", "state"), "state.seed"));
        return mmqi::random_separable(basis, n_components, seed, parse_weight_law(spec));
    }
    throw ConfigError("unknown bosonic state type \"" + type + "\"");
}

mmqi::TensorState build_distinguishable_state(const json& spec, int n_particles,
                                              int modes_per_arm, std::size_t cap) {
    const std::string type = require_field(spec, "type", "state").get<std::string>();
    if (type == "noon")
        return mmqi::noon_distinguishable(n_particles, modes_per_arm,
                                          as_int(require_field(spec, "mode", "state"), "mode"),
                                          cap);
    if (type == "product") {
        const json& particles = require_field(spec, "particles", "state");
        if (!particles.is_array() ||
            particles.size() != static_cast<std::size_t>(n_particles))
            throw ConfigError("state.particles must list exactly N amplitude pairs");
        std::vector<mmqi::SingleParticleAmps> amps;
        for (const json& p : particles)
            amps.push_back(parse_amplitudes(p, modes_per_arm, "particle"));
        return mmqi::product_state(amps, cap);
    }
    throw ConfigError("unknown distinguishable state type \"" + type + "\"");
}

json base_report(const std::string& task, const json& inputs) {
    json report;
    report["task"] = task;
    report["inputs"] = inputs;
    report["outputs"] = json::object();
    report["warnings"] = json::array();
    report["versions"] = json{{"mmqi", mmqi::kVersion}};
    report["seed"] = nullptr;
    return report;
}

void emit_report(const json& report, const std::optional<std::string>& out_path) {
    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (out_path) write_file(*out_path, text);
}

// ---------------------------------------------------------------------------
// qfi

int cmd_qfi(const json& config, const std::optional<std::string>& out_path) {
    const std::size_t cap = dim_cap_from_env();
    const std::string representation =
        config.contains("representation") ? config.at("representation").get<std::string>()
                                          : "bosonic";
    const mmqi::Axis axis = parse_generator(config);
    json report = base_report("qfi", config);
    if (config.contains("seed")) report["seed"] = config.at("seed");

    mmqi::QfiReport result{};
    if (representation == "bosonic" && config.contains("sectors")) {
        const json& sector_spec = config.at("sectors");
        if (!sector_spec.is_array() || sector_spec.empty())
            throw ConfigError("sectors must be a nonempty array");
        std::vector<std::pair<double, mmqi::DensityOperator>> sectors;
        for (const json& s : sector_spec) {
            const double p = as_number(require_field(s, "P", "sector"), "sector.P");
            const int n = as_int(require_field(s, "N", "sector"), "sector.N");
            const int m = as_int(require_field(s, "M", "sector"), "sector.M");
            const auto basis = mmqi::FockBasis::enumerate(n, m, cap);
            BosonicState state =
                build_bosonic_state(require_field(s, "state", "sector"), basis);
            mmqi::DensityOperator rho =
                std::holds_alternative<mmqi::StateVector>(state)
                    ? mmqi::DensityOperator::from_pure(std::get<mmqi::StateVector>(state))
                    : std::get<mmqi::DensityOperator>(state);
            sectors.emplace_back(p, std::move(rho));
        }
        try {
            result = mmqi::qfi_blockwise(mmqi::sector_union(std::move(sectors)), axis);
        } catch (const mmqi::ProbabilityNormalization& e) {
            throw ConfigError(e.what());
        }
    } else {
        const int n = as_int(require_field(config, "N", "config"), "N");
        const int m = as_int(require_field(config, "M", "config"), "M");
        const json& state_spec = require_field(config, "state", "config");
        if (representation == "bosonic") {
            const auto basis = mmqi::FockBasis::enumerate(n, m, cap);
            const mmqi::GeneratorSet gens = mmqi::build_generators(*basis);
            const mmqi::SparseHermitian gen = mmqi::direction_generator(gens, axis);
            const BosonicState state = build_bosonic_state(state_spec, basis);
            const double value =
                std::holds_alternative<mmqi::StateVector>(state)
                    ? mmqi::qfi_pure(std::get<mmqi::StateVector>(state), gen)
                    : mmqi::qfi_mixed(std::get<mmqi::DensityOperator>(state), gen);
            result = mmqi::make_qfi_report(value, n);
        } else if (representation == "distinguishable") {
            const mmqi::TensorState state =
                build_distinguishable_state(state_spec, n, m, cap);
            const mmqi::GeneratorSet gens = mmqi::build_generators_distinguishable(n, m, cap);
            const mmqi::SparseHermitian gen = mmqi::direction_generator(gens, axis);
            result = mmqi::make_qfi_report(mmqi::qfi_pure(state, gen), n);
        } else {
            throw ConfigError("representation must be \"bosonic\" or \"distinguishable\"");
        }
    }

    report["outputs"]["qfi"] = jnum(result.value);
    report["outputs"]["particle_budget"] = jnum(result.particle_budget);
    report["outputs"]["witness"] = mmqi::to_string(result.witness);
    emit_report(report, out_path);
    return 0;
}

// ---------------------------------------------------------------------------
// bound-sweep

struct SweepRow {
    int draw;
    int n_particles;
    int modes_per_arm;
    std::uint64_t direction_seed;
    double qfi;
    double budget;
    double margin;
};

int cmd_bound_sweep(const json& config, const std::string& out_path,
                    const std::optional<std::string>& summary_path) {
    const std::size_t cap = dim_cap_from_env();
    const std::string representation =
        config.contains("representation") ? config.at("representation").get<std::string>()
                                          : "bosonic";
    const int draws = as_int(require_field(config, "draws", "config"), "draws");
    if (draws < 1) throw ConfigError("draws must be >= 1");
    const auto seed = static_cast<std::uint64_t>(
        config.contains("seed") ? as_int(config.at("seed"), "seed") : 1);
    const int directions =
        config.contains("directions") ? as_int(config.at("directions"), "directions") : 10;
    const int components_max = config.contains("components_max")
                                   ? as_int(config.at("components_max"), "components_max")
                                   : 8;
    const bool noon_controls =
        config.contains("noon_controls") && config.at("noon_controls").get<bool>();

    std::vector<int> n_list, m_list;
    for (const json& v : require_field(config, "N_list", "config"))
        n_list.push_back(as_int(v, "N_list"));
    for (const json& v : require_field(config, "M_list", "config"))
        m_list.push_back(as_int(v, "M_list"));
    if (n_list.empty() || m_list.empty())
        throw ConfigError("N_list and M_list must be nonempty");
    if (representation != "bosonic" && representation != "distinguishable")
        throw ConfigError("representation must be \"bosonic\" or \"distinguishable\"");

    auto max_qfi_over_directions = [&](auto&& qfi_of_gen, const mmqi::GeneratorSet& gens,
                                       std::uint64_t direction_seed, bool include_z) {
        mmqi::Philox rng(direction_seed);
        double best = include_z ? qfi_of_gen(gens.jz) : -1.0;
        for (int d = 0; d < directions; ++d) {
            Eigen::Vector3d v(rng.next_normal(), rng.next_normal(), rng.next_normal());
            v.normalize();
            best =
                std::max(best, qfi_of_gen(mmqi::direction_generator(gens, mmqi::Axis(v))));
        }
        return best;
    };

    std::vector<SweepRow> rows;
    rows.reserve(draws);
    int row_id = 0;
    auto run_case = [&](int n, int m, bool control) {
        const std::uint64_t state_seed = seed + row_id;
        const std::uint64_t direction_seed = seed + 1000000 + row_id;
        double value = 0.0;
        if (representation == "bosonic") {
            const auto basis = mmqi::FockBasis::enumerate(n, m, cap);
            const mmqi::GeneratorSet gens = mmqi::build_generators(*basis);
            if (control) {
                const auto noon = mmqi::noon_state(basis, 0);
                value = max_qfi_over_directions(
                    [&](const mmqi::SparseHermitian& g) { return mmqi::qfi_pure(noon, g); },
                    gens, direction_seed, true);
            } else {
                const int n_components = 1 + row_id % components_max;
                const auto rho = mmqi::random_separable(basis, n_components, state_seed);
                const mmqi::DensityEigensystem eigen(rho.matrix());
                value = max_qfi_over_directions(
                    [&](const mmqi::SparseHermitian& g) { return eigen.qfi(g); }, gens,
                    direction_seed, false);
            }
        } else {
            const mmqi::GeneratorSet gens = mmqi::build_generators_distinguishable(n, m, cap);
            if (control) {
                const auto noon = mmqi::noon_distinguishable(n, m, 0, cap);
                value = max_qfi_over_directions(
                    [&](const mmqi::SparseHermitian& g) { return mmqi::qfi_pure(noon, g); },
                    gens, direction_seed, true);
            } else {
                mmqi::Philox rng(state_seed);
                std::vector<mmqi::SingleParticleAmps> particles;
                for (int j = 0; j < n; ++j)
                    particles.push_back(mmqi::random_amplitudes(m, rng));
                const auto psi = mmqi::product_state(particles, cap);
                value = max_qfi_over_directions(
                    [&](const mmqi::SparseHermitian& g) { return mmqi::qfi_pure(psi, g); },
                    gens, direction_seed, false);
            }
        }
        rows.push_back(SweepRow{row_id, n, m, direction_seed, value,
                                static_cast<double>(n), value - n});
        ++row_id;
    };

    for (int draw = 0; draw < draws; ++draw) {
        const int combo = draw % static_cast<int>(n_list.size() * m_list.size());
        run_case(n_list[combo % n_list.size()],
                 m_list[(combo / n_list.size()) % m_list.size()], false);
    }
    if (noon_controls)
        for (int n : n_list)
            for (int m : m_list) run_case(n, m, true);

    std::string csv = "draw,N,M,direction_seed,qfi,budget,margin\n";
    double max_margin = -1e300;
    json entangled = json::array();
    for (const SweepRow& row : rows) {
        csv += std::to_string(row.draw) + "," + std::to_string(row.n_particles) + "," +
               std::to_string(row.modes_per_arm) + "," + std::to_string(row.direction_seed) +
               "," + fmt12(row.qfi) + "," + fmt12(row.budget) + "," + fmt12(row.margin) +
               "\n";
        max_margin = std::max(max_margin, row.margin);
        if (row.margin > mmqi::kWitnessTol)
            entangled.push_back(json{{"draw", row.draw}, {"entangled", true}});
    }
    write_file(out_path, csv);

    json report = base_report("bound-sweep", config);
    report["seed"] = static_cast<std::int64_t>(seed);
    report["outputs"]["rows"] = rows.size();
    report["outputs"]["max_margin"] = jnum(max_margin);
    report["outputs"]["tolerance"] = mmqi::kWitnessTol;
    report["outputs"]["entangled_draws"] = entangled;
    report["outputs"]["csv"] = out_path;
    emit_report(report, summary_path);
    return 0;
}

// ---------------------------------------------------------------------------
// pattern / reproduce-fig3

struct PatternOutputs {
    mmqi::PatternSample sample;
    double eta2;
    double ratio;
    json summary;
};

PatternOutputs compute_pattern(double z, double zeta, double k, double dk, long grid,
                               double window, int n_particles) {
    const std::size_t cap = dim_cap_from_env();
    PatternOutputs out{
        mmqi::pattern_closed_form_threemode_sample(z, zeta, k, dk, grid, window), 0.0, 0.0,
        json::object()};
    const auto basis = mmqi::FockBasis::enumerate(n_particles, 2, cap);
    const auto psi = mmqi::three_mode_example(basis, z, zeta);
    out.eta2 = mmqi::eta_squared(psi);
    const double nu2 = out.sample.nu * out.sample.nu;
    out.ratio = mmqi::operational_xi(out.eta2, nu2);

    out.summary["nu2"] = jnum(nu2);
    out.summary["eta2"] = jnum(out.eta2);
    out.summary["ratio"] = jnum(out.ratio);
    out.summary["p_max"] = jnum(out.sample.p_max);
    out.summary["p_min"] = jnum(out.sample.p_min);
    out.summary["period"] = jnum(out.sample.period);
    out.summary["window_limited"] = out.sample.window_limited;
    out.summary["warnings"] = json::array({operational_witness_warning()});
    return out;
}

std::string pattern_csv(const mmqi::PatternSample& sample) {
    std::string csv = "x,p\n";
    csv.reserve(sample.xs.size() * 32);
    for (std::size_t i = 0; i < sample.xs.size(); ++i)
        csv += fmt12(sample.xs[i]) + "," + fmt12(sample.ps[i]) + "\n";
    return csv;
}

int cmd_pattern(double z, double zeta, double k, double dk, long grid, double window,
                int n_particles, const std::string& out_path,
                const std::optional<std::string>& summary_path) {
    const PatternOutputs out = compute_pattern(z, zeta, k, dk, grid, window, n_particles);
    write_file(out_path, pattern_csv(out.sample));
    std::cout << out.summary.dump(2) << "\n";
    if (summary_path) write_file(*summary_path, out.summary.dump(2) + "\n");
    return 0;
}

int cmd_reproduce_fig3(const std::string& outdir) {
    const double z = 0.91, zeta = 0.5, k = 10.0, dk = 0.5;
    const int n_particles = 4;
    const std::size_t cap = dim_cap_from_env();

    const PatternOutputs out = compute_pattern(z, zeta, k, dk, 200000, 0.0, n_particles);

    // True witnesses of the same state, for the side-by-side comparison.
    const auto basis = mmqi::FockBasis::enumerate(n_particles, 2, cap);
    const auto psi = mmqi::three_mode_example(basis, z, zeta);
    const mmqi::GeneratorSet gens = mmqi::build_generators(*basis);
    const double qfi = mmqi::qfi_pure(psi, gens.jz);
    const mmqi::QfiReport qfi_report = mmqi::make_qfi_report(qfi, n_particles);

    json comparison;
    comparison["parameters"] =
        json{{"z", z}, {"zeta", zeta}, {"k", k}, {"dk", dk}, {"N", n_particles}};
    comparison["operational_xi"] = jnum(out.ratio);
    comparison["xi_squared"] = jnum(mmqi::xi_squared(psi, gens));
    comparison["xi_s_squared"] = jnum(mmqi::xi_s_squared(psi, gens));
    comparison["qfi"] = jnum(qfi);
    comparison["particle_budget"] = jnum(qfi_report.particle_budget);
    comparison["qfi_witness"] = mmqi::to_string(qfi_report.witness);
    comparison["operational_flags_squeezing"] = out.ratio < 1.0;
    comparison["state_is_actually_squeezed"] = false;
    comparison["warnings"] = json::array({operational_witness_warning()});

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw IoError("cannot create output directory " + outdir);
    write_file(fs::path(outdir) / "pattern.csv", pattern_csv(out.sample));
    write_file(fs::path(outdir) / "summary.json", out.summary.dump(2) + "\n");
    write_file(fs::path(outdir) / "witness_comparison.json", comparison.dump(2) + "\n");
    std::cout << out.summary.dump(2) << "\n" << comparison.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sensitivity

int cmd_sensitivity(const json& config, const std::optional<std::string>& out_path) {
    const std::size_t cap = dim_cap_from_env();
    const std::string representation =
        config.contains("representation") ? config.at("representation").get<std::string>()
                                          : "bosonic";
    const int n = as_int(require_field(config, "N", "config"), "N");
    const int m_modes = as_int(require_field(config, "M", "config"), "M");
    const double theta =
        config.contains("theta") ? as_number(config.at("theta"), "theta") : 0.0;
    const int m = config.contains("m") ? as_int(config.at("m"), "m") : 1;
    const int repeats =
        config.contains("repeats") ? as_int(config.at("repeats"), "repeats") : 0;
    const auto seed = static_cast<std::uint64_t>(
        config.contains("seed") ? as_int(config.at("seed"), "seed") : 1);
    const double half_width =
        config.contains("search_half_width")
            ? as_number(config.at("search_half_width"), "search_half_width")
            : M_PI / 4.0;
    const json& state_spec = require_field(config, "state", "config");

    mmqi::SensitivityReport analytic{};
    double empirical = -1.0;
    if (representation == "bosonic") {
        const auto basis = mmqi::FockBasis::enumerate(n, m_modes, cap);
        const mmqi::GeneratorSet gens = mmqi::build_generators(*basis);
        const BosonicState state = build_bosonic_state(state_spec, basis);
        std::visit(
            [&](const auto& s) {
                analytic = mmqi::estimator_sensitivity(s, theta, m, gens);
                if (repeats > 0)
                    empirical = mmqi::empirical_sensitivity(s, theta, m, repeats, gens, seed,
                                                            half_width);
            },
            state);
    } else if (representation == "distinguishable") {
        const mmqi::TensorState state =
            build_distinguishable_state(state_spec, n, m_modes, cap);
        const mmqi::GeneratorSet gens = mmqi::build_generators_distinguishable(n, m_modes, cap);
        analytic = mmqi::estimator_sensitivity(state, theta, m, gens);
        if (repeats > 0)
            empirical =
                mmqi::empirical_sensitivity(state, theta, m, repeats, gens, seed, half_width);
    } else {
        throw ConfigError("representation must be \"bosonic\" or \"distinguishable\"");
    }

    json report = base_report("sensitivity", config);
    report["seed"] = static_cast<std::int64_t>(seed);
    report["outputs"]["theta"] = jnum(theta);
    report["outputs"]["m"] = m;
    report["outputs"]["delta2_theta"] = jnum(analytic.delta2_theta);
    report["outputs"]["crlb"] = jnum(analytic.crlb);
    report["outputs"]["snl_product"] = jnum(m * n * analytic.delta2_theta);
    if (repeats > 0) {
        report["outputs"]["empirical_delta2_theta"] = jnum(empirical);
        report["outputs"]["repeats"] = repeats;
    }
    emit_report(report, out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-mode two-arm interferometry: QFI bounds, far-field patterns, "
                 "and phase-estimation sensitivity"};
    app.require_subcommand(1);

    std::string config_path, summary_path, outdir;
    bool have_summary = false;

    auto* qfi = app.add_subcommand("qfi", "quantum Fisher information of a configured state");
    qfi->add_option("--config", config_path, "JSON config file")->required();
    std::string qfi_out;
    qfi->add_option("--out", qfi_out, "also write the report to this file");
    std::optional<int> override_seed;
    qfi->add_option("--seed", override_seed, "override config seed");

    auto* sweep = app.add_subcommand("bound-sweep",
                                     "random separable states against the shot-noise bound");
    sweep->add_option("--config", config_path, "JSON config file");
    std::optional<int> sweep_draws, sweep_seed;
    bool sweep_noon = false;
    std::string sweep_out = "bound_sweep.csv";
    std::string sweep_repr;
    sweep->add_option("--draws", sweep_draws, "number of random draws");
    sweep->add_option("--seed", sweep_seed, "master seed");
    sweep->add_option("--representation", sweep_repr, "bosonic or distinguishable");
    sweep->add_flag("--noon-controls", sweep_noon, "append entangled NOON control rows");
    sweep->add_option("--out", sweep_out, "CSV output path");
    sweep->add_option("--summary", summary_path, "write the summary JSON here too")
        ->each([&](const std::string&) { have_summary = true; });

    auto* pattern =
        app.add_subcommand("pattern", "three-mode far-field density and visibility");
    double z = 0.91, zeta = 0.5, k = 10.0, dk = 0.5, window = 0.0;
    long grid = 200000;
    int pattern_n = 4;
    std::string pattern_out = "pattern.csv";
    pattern->add_option("--z", z, "population imbalance of the arms");
    pattern->add_option("--zeta", zeta, "intra-arm splitting of arm a");
    pattern->add_option("--k", k, "carrier wavenumber");
    pattern->add_option("--dk", dk, "intra-arm wavenumber offset");
    pattern->add_option("--grid", grid, "number of grid points (>= 10^4)");
    pattern->add_option("--window", window, "window length; 0 selects one common period");
    pattern->add_option("--N", pattern_n, "particle number used for eta^2");
    pattern->add_option("--out", pattern_out, "CSV output path");
    pattern->add_option("--summary", summary_path, "write the summary JSON here too")
        ->each([&](const std::string&) { have_summary = true; });

    auto* sens = app.add_subcommand("sensitivity",
                                    "analytic and Monte Carlo phase-estimation sensitivity");
    sens->add_option("--config", config_path, "JSON config file")->required();
    std::string sens_out;
    sens->add_option("--out", sens_out, "also write the report to this file");
    std::optional<double> sens_theta;
    std::optional<int> sens_m, sens_repeats, sens_seed;
    sens->add_option("--theta", sens_theta, "override working point");
    sens->add_option("--m", sens_m, "override shots per estimate");
    sens->add_option("--repeats", sens_repeats, "override Monte Carlo repeats");
    sens->add_option("--seed", sens_seed, "override seed");

    auto* fig3 = app.add_subcommand(
        "reproduce-fig3", "emit the reference three-mode dataset and witness comparison");
    fig3->add_option("--outdir", outdir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (qfi->parsed()) {
            json config = load_config(config_path);
            if (override_seed) {
                config["seed"] = *override_seed;
                // The seed drives the sampled state when there is one.
                if (config.contains("state") && config["state"].value("type", "") ==
                                                    "random_separable")
                    config["state"]["seed"] = *override_seed;
            }
            return cmd_qfi(config, qfi_out.empty() ? std::nullopt
                                                   : std::optional<std::string>(qfi_out));
        }
        if (sweep->parsed()) {
            json config = config_path.empty() ? json::object() : load_config(config_path);
            if (sweep_draws) config["draws"] = *sweep_draws;
            if (sweep_seed) config["seed"] = *sweep_seed;
            if (!sweep_repr.empty()) config["representation"] = sweep_repr;
            if (sweep_noon) config["noon_controls"] = true;
            if (!config.contains("N_list")) config["N_list"] = json::array({2, 3, 4});
            if (!config.contains("M_list")) config["M_list"] = json::array({1, 2, 3});
            return cmd_bound_sweep(config, sweep_out,
                                   have_summary ? std::optional<std::string>(summary_path)
                                                : std::nullopt);
        }
        if (pattern->parsed()) {
            return cmd_pattern(z, zeta, k, dk, grid, window, pattern_n, pattern_out,
                               have_summary ? std::optional<std::string>(summary_path)
                                            : std::nullopt);
        }
        if (sens->parsed()) {
            json config = load_config(config_path);
            if (sens_theta) config["theta"] = *sens_theta;
            if (sens_m) config["m"] = *sens_m;
            if (sens_repeats) config["repeats"] = *sens_repeats;
            if (sens_seed) config["seed"] = *sens_seed;
            return cmd_sensitivity(config, sens_out.empty()
                                               ? std::nullopt
                                               : std::optional<std::string>(sens_out));
        }
        if (fig3->parsed()) {
            return cmd_reproduce_fig3(outdir);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const mmqi::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
