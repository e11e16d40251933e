#include "fluctlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "fluctlab/util.hpp"

namespace fluctlab {

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::validate: return "validate";
        case ExperimentKind::jarzynski: return "jarzynski";
        case ExperimentKind::crooks: return "crooks";
        case ExperimentKind::heat: return "heat";
        case ExperimentKind::feedback: return "feedback";
        case ExperimentKind::randomsuite: return "randomsuite";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "validate") return ExperimentKind::validate;
    if (name == "jarzynski") return ExperimentKind::jarzynski;
    if (name == "crooks") return ExperimentKind::crooks;
    if (name == "heat") return ExperimentKind::heat;
    if (name == "feedback") return ExperimentKind::feedback;
    if (name == "randomsuite") return ExperimentKind::randomsuite;
    throw ParseError("unknown experiment kind '" + name + "'");
}

namespace {

bool source_is_random(const nlohmann::json& src) {
    if (src.is_object()) {
        if (src.value("random", false)) return true;
        const std::string kind = src.value("kind", "");
        return kind == "haar_unitary" || kind == "mixture_of_unitaries" ||
               kind == "stinespring";
    }
    return false;
}

KrausChannel channel_from_source(const nlohmann::json& src, Rng& rng,
                                 const std::filesystem::path& base) {
    if (!src.is_object()) throw ParseError("channel source must be a JSON object");
    if (src.contains("file"))
        return load_channel(base / src["file"].get<std::string>());
    if (src.contains("kraus")) return channel_from_json(src);
    const std::string kind = src.value("kind", "");
    if (kind.empty()) throw ParseError("channel source needs 'kind', 'kraus' or 'file'");
    if (kind == "identity") return identity_channel(src.value("dim", 2));
    if (kind == "unitary")
        return unitary_channel(complex_matrix_from_json(src.at("matrix"), "channel unitary"));
    if (kind == "depolarizing") return depolarizing_channel(src.at("p").get<double>());
    if (kind == "phase_damping") return phase_damping_channel(src.at("lambda").get<double>());
    if (kind == "amplitude_damping")
        return amplitude_damping_channel(src.at("gamma").get<double>());
    if (kind == "swap") return swap_channel(src.value("dim", 2));
    if (kind == "mub_isometry")
        return mub_isometry_channel(src.at("dim_in").get<Index>(), src.at("dim_out").get<Index>());
    if (kind == "haar_unitary") return haar_unitary_channel(src.value("dim", 2), rng);
    if (kind == "mixture_of_unitaries")
        return mixture_of_unitaries_channel(src.value("dim", 2), src.value("unitaries", 4), rng);
    if (kind == "stinespring")
        return stinespring_channel(src.value("dim_in", 2), src.value("dim_out", 2),
                                   src.value("env", 2), rng);
    throw ParseError("unknown channel kind '" + kind + "'");
}

HermitianOperator observable_from_source(const nlohmann::json& src, Rng& rng) {
    if (src.is_array())
        return HermitianOperator(complex_matrix_from_json(src, "observable"));
    if (src.is_object()) {
        if (src.contains("diag")) {
            const auto& diag = src["diag"];
            if (!diag.is_array() || diag.empty())
                throw ParseError("observable 'diag' must be a non-empty array");
            ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(diag.size()),
                                                  static_cast<Index>(diag.size()));
            for (std::size_t i = 0; i < diag.size(); ++i) {
                if (!diag[i].is_number())
                    throw ParseError("observable diag[" + std::to_string(i) +
                                     "] is not a number");
                m(static_cast<Index>(i), static_cast<Index>(i)) = diag[i].get<double>();
            }
            return HermitianOperator(std::move(m));
        }
        if (src.value("random", false)) return random_hermitian(src.value("dim", 2), rng);
    }
    throw ParseError("observable source must be a matrix, {\"diag\": [...]}, "
                     "or {\"random\": true, \"dim\": d}");
}

ErrorModel random_error_model(Index outcomes, Rng& rng) {
    // Dirichlet-style rows: strictly positive and row-stochastic.
    RealMatrix r(outcomes, outcomes);
    for (Index mu = 0; mu < outcomes; ++mu) {
        double total = 0.0;
        for (Index nu = 0; nu < outcomes; ++nu) {
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            // Bias toward the diagonal so the confusion stays realistic.
            r(mu, nu) = -std::log(u) * (mu == nu ? 4.0 : 1.0);
            total += r(mu, nu);
        }
        r.row(mu) /= total;
        // Renormalize exactly to absorb the last rounding.
        r(mu, outcomes - 1) += 1.0 - r.row(mu).sum();
    }
    return ErrorModel(std::move(r));
}

FeedbackProtocol random_protocol(Index dim, Index outcomes, bool noisy, bool all_unital,
                                 double param, Rng& rng) {
    std::vector<KrausChannel> channels;
    std::vector<HermitianOperator> observables;
    channels.reserve(static_cast<std::size_t>(outcomes));
    observables.reserve(static_cast<std::size_t>(outcomes));
    for (Index k = 0; k < outcomes; ++k) {
        if (all_unital)
            channels.push_back(mixture_of_unitaries_channel(dim, 3, rng));
        else
            channels.push_back(stinespring_channel(dim, dim, 2, rng));
        observables.push_back(random_hermitian(dim, rng));
    }
    Measurement measurement =
        all_unital ? random_scaled_unitary_measurement(dim, outcomes, rng)
                   : random_complete_measurement(dim, outcomes, rng);
    std::optional<ErrorModel> errors;
    if (noisy) errors = random_error_model(outcomes, rng);
    return FeedbackProtocol{mixture_of_unitaries_channel(dim, 4, rng),
                            std::move(measurement),
                            std::move(channels),
                            std::move(observables),
                            random_hermitian(dim, rng),
                            param,
                            std::move(errors)};
}

FeedbackProtocol protocol_from_source(const nlohmann::json& src, double param, bool noisy,
                                      Rng& rng, const std::filesystem::path& base) {
    if (src.is_object() && src.contains("file")) {
        nlohmann::json doc;
        const std::filesystem::path path = base / src["file"].get<std::string>();
        try {
            doc = nlohmann::json::parse(read_file(path));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("protocol file " + path.string() + ": " + e.what());
        }
        return protocol_from_json(doc);
    }
    if (src.is_object() && src.value("random", false))
        return random_protocol(src.value("dim", 2), src.value("outcomes", 2),
                               noisy || src.value("noisy", false),
                               src.value("all_unital", false), param, rng);
    if (src.is_object()) return protocol_from_json(src);
    throw ParseError("protocol source must be an object, {\"file\": ...}, "
                     "or {\"random\": true, ...}");
}

}  // namespace

namespace {

ExperimentConfig parse_config_fields(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir,
                                     std::optional<ExperimentKind> expected_kind);

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir,
                              std::optional<ExperimentKind> expected_kind) {
    try {
        return parse_config_fields(j, base_dir, expected_kind);
    } catch (const nlohmann::json::exception& e) {
        // Wrong field types surface as parse errors, not raw JSON exceptions.
        throw ParseError(std::string("config: ") + e.what());
    }
}

namespace {

ExperimentConfig parse_config_fields(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir,
                                     std::optional<ExperimentKind> expected_kind) {
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    if (j.contains("experiment")) {
        if (!j["experiment"].is_string())
            throw ParseError("config: 'experiment' must be a string");
        cfg.kind = experiment_kind_from_string(j["experiment"].get<std::string>());
        if (expected_kind && cfg.kind != *expected_kind)
            throw ParseError("config: experiment '" + std::string(to_string(cfg.kind)) +
                             "' does not match the requested kind '" +
                             to_string(*expected_kind) + "'");
    } else if (expected_kind) {
        cfg.kind = *expected_kind;
    } else {
        throw ParseError("config: missing 'experiment' kind");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw ParseError("config: 'seed' must be a 64-bit unsigned integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("trials")) {
        cfg.trials = j["trials"].get<std::int64_t>();
        if (cfg.trials < 1) throw ParseError("config: 'trials' must be >= 1");
    }
    if (j.contains("tolerance")) {
        cfg.tolerance = j["tolerance"].get<double>();
        if (!(cfg.tolerance > 0.0)) throw ParseError("config: 'tolerance' must be positive");
    }
    if (j.contains("channel")) cfg.channel = j["channel"];
    if (j.contains("protocol")) cfg.protocol = j["protocol"];
    if (j.contains("observables")) {
        const auto& obs = j["observables"];
        if (!obs.is_object() || !obs.contains("a") || !obs.contains("b"))
            throw ParseError("config: 'observables' must hold fields 'a' and 'b'");
        cfg.observable_a = obs["a"];
        cfg.observable_b = obs["b"];
    }
    if (j.contains("params")) {
        const auto& params = j["params"];
        if (!params.is_object()) throw ParseError("config: 'params' must be an object");
        cfg.alpha = params.value("alpha", params.value("beta0", 1.0));
        cfg.beta = params.value("beta", params.value("beta1", 1.0));
    }
    if (j.contains("relation")) cfg.relation = j["relation"].get<std::string>();
    if (j.contains("dims")) {
        cfg.dims.clear();
        for (const auto& d : j["dims"]) {
            const int dim = d.get<int>();
            if (dim < 1) throw ParseError("config: 'dims' entries must be >= 1");
            cfg.dims.push_back(dim);
        }
        if (cfg.dims.empty()) throw ParseError("config: 'dims' must be non-empty");
    }
    if (j.contains("unitaries")) cfg.unitaries = j["unitaries"].get<int>();
    if (j.contains("noisy")) cfg.noisy = j["noisy"].get<bool>();
    if (j.contains("alpha_range"))
        cfg.alpha_range = {j["alpha_range"][0].get<double>(), j["alpha_range"][1].get<double>()};
    if (j.contains("beta_range"))
        cfg.beta_range = {j["beta_range"][0].get<double>(), j["beta_range"][1].get<double>()};
    if (j.contains("output")) {
        const auto& out = j["output"];
        if (out.contains("path")) cfg.out_path = base_dir / out["path"].get<std::string>();
        if (out.contains("format")) cfg.format = out["format"].get<std::string>();
        if (cfg.format != "json" && cfg.format != "csv")
            throw ParseError("config: output format must be 'json' or 'csv'");
    }

    // Kind-specific structure checks.
    const bool needs_channel = cfg.kind == ExperimentKind::validate ||
                               cfg.kind == ExperimentKind::jarzynski ||
                               cfg.kind == ExperimentKind::crooks ||
                               cfg.kind == ExperimentKind::heat;
    if (needs_channel && cfg.channel.is_null())
        throw ParseError("config: experiment '" + std::string(to_string(cfg.kind)) +
                         "' requires a 'channel'");
    if (cfg.kind != ExperimentKind::validate && needs_channel &&
        (cfg.observable_a.is_null() || cfg.observable_b.is_null()))
        throw ParseError("config: experiment '" + std::string(to_string(cfg.kind)) +
                         "' requires 'observables'");
    if (cfg.kind == ExperimentKind::feedback && cfg.protocol.is_null())
        throw ParseError("config: experiment 'feedback' requires a 'protocol'");
    if (cfg.kind == ExperimentKind::randomsuite) {
        if (cfg.relation.empty())
            throw ParseError("config: randomsuite requires a 'relation'");
        if (cfg.relation != "jarzynski" && cfg.relation != "crooks" &&
            cfg.relation != "heat" && cfg.relation != "feedback")
            throw ParseError("config: unknown randomsuite relation '" + cfg.relation + "'");
    }

    const bool randomized = cfg.kind == ExperimentKind::randomsuite ||
                            source_is_random(cfg.channel) ||
                            source_is_random(cfg.observable_a) ||
                            source_is_random(cfg.observable_b) || source_is_random(cfg.protocol);
    if (randomized && !cfg.seed)
        throw ParseError("config: seed required for randomized experiments");

    // Surface inline-object defects now, as parse errors.
    try {
        Rng probe(cfg.seed.value_or(0));
        if (!cfg.channel.is_null() && !source_is_random(cfg.channel))
            channel_from_source(cfg.channel, probe, cfg.base_dir);
        if (!cfg.observable_a.is_null() && !source_is_random(cfg.observable_a))
            observable_from_source(cfg.observable_a, probe);
        if (!cfg.observable_b.is_null() && !source_is_random(cfg.observable_b))
            observable_from_source(cfg.observable_b, probe);
        if (!cfg.protocol.is_null() && !source_is_random(cfg.protocol))
            protocol_from_source(cfg.protocol, cfg.alpha, cfg.noisy, probe, cfg.base_dir);
    } catch (const ParseError&) {
        throw;
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

}  // namespace

ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   std::optional<ExperimentKind> expected_kind) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config file " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path().empty() ? "." : path.parent_path(),
                        expected_kind);
}

namespace {

TrialRecord evaluate_fixed_trial(const ExperimentConfig& cfg, std::int64_t t, Rng& rng) {
    TrialRecord rec{};
    rec.trial = t;
    rec.kind = to_string(cfg.kind);
    switch (cfg.kind) {
        case ExperimentKind::validate: {
            const KrausChannel c = channel_from_source(cfg.channel, rng, cfg.base_dir);
            const ChannelReport report = validate(c, cfg.tolerance);
            rec.lhs = report.tp_defect;
            rec.rhs = report.unital_defect;
            rec.gap = report.tp_defect;
            rec.holds = report.is_tp;
            rec.tp_defect = report.tp_defect;
            rec.unital_defect = report.unital_defect;
            break;
        }
        case ExperimentKind::jarzynski: {
            const KrausChannel c = channel_from_source(cfg.channel, rng, cfg.base_dir);
            const HermitianOperator a = observable_from_source(cfg.observable_a, rng);
            const HermitianOperator b = observable_from_source(cfg.observable_b, rng);
            const JarzynskiReport report =
                jarzynski_check(c, a, b, cfg.alpha, cfg.beta, cfg.tolerance);
            rec.lhs = report.lhs;
            rec.rhs = report.rhs;
            rec.gap = report.relative_gap;
            rec.holds = report.holds;
            rec.tp_defect = report.channel_report.tp_defect;
            rec.unital_defect = report.channel_report.unital_defect;
            break;
        }
        case ExperimentKind::crooks: {
            const KrausChannel c = channel_from_source(cfg.channel, rng, cfg.base_dir);
            const HermitianOperator a = observable_from_source(cfg.observable_a, rng);
            const HermitianOperator b = observable_from_source(cfg.observable_b, rng);
            const CrooksReport report = crooks_check(c, a, b, cfg.alpha, cfg.tolerance);
            rec.lhs = report.max_residual;
            rec.rhs = 0.0;
            rec.gap = report.max_residual;
            rec.holds = report.holds;
            rec.tp_defect = report.channel_report.tp_defect;
            rec.unital_defect = report.channel_report.unital_defect;
            break;
        }
        case ExperimentKind::heat: {
            const KrausChannel c = channel_from_source(cfg.channel, rng, cfg.base_dir);
            const HermitianOperator a = observable_from_source(cfg.observable_a, rng);
            const HermitianOperator b = observable_from_source(cfg.observable_b, rng);
            const HeatExchangeReport report =
                heat_exchange_check(c, a, b, cfg.alpha, cfg.beta, cfg.tolerance);
            rec.lhs = report.identity_average;
            rec.rhs = 1.0;
            rec.gap = std::abs(report.identity_average - 1.0);
            rec.holds = report.identity_holds.value_or(false) && report.delta_S >= -1e-9;
            rec.tp_defect = report.channel_report.tp_defect;
            rec.unital_defect = report.channel_report.unital_defect;
            break;
        }
        case ExperimentKind::feedback: {
            const FeedbackProtocol p =
                protocol_from_source(cfg.protocol, cfg.alpha, cfg.noisy, rng, cfg.base_dir);
            const ProtocolResult res = p.error_model ? jsu_error_check(p, cfg.tolerance)
                                                     : jsu_check(p, cfg.tolerance);
            rec.lhs = res.generalized_average;
            rec.rhs = p.error_model ? res.gamma_tilde : res.gamma;
            rec.gap = std::abs(rec.lhs - rec.rhs);
            rec.holds = res.generalized_holds.value_or(false) &&
                        res.mi_equality_holds.value_or(true);
            const ChannelReport report = validate(p.first_channel, cfg.tolerance);
            rec.tp_defect = report.tp_defect;
            rec.unital_defect = report.unital_defect;
            break;
        }
        case ExperimentKind::randomsuite:
            break;  // handled by evaluate_random_trial
    }
    return rec;
}

TrialRecord evaluate_random_trial(const ExperimentConfig& cfg, std::int64_t t, Rng& rng) {
    TrialRecord rec{};
    rec.trial = t;
    rec.kind = cfg.relation;
    const int dim = cfg.dims[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(cfg.dims.size()) - 1))];
    const double alpha = rng.uniform(cfg.alpha_range[0], cfg.alpha_range[1]);
    const double beta = rng.uniform(cfg.beta_range[0], cfg.beta_range[1]);
    if (cfg.relation == "jarzynski") {
        const KrausChannel c = mixture_of_unitaries_channel(dim, cfg.unitaries, rng);
        const JarzynskiReport report =
            jarzynski_check(c, random_hermitian(dim, rng), random_hermitian(dim, rng), alpha,
                            beta, cfg.tolerance);
        rec.lhs = report.lhs;
        rec.rhs = report.rhs;
        rec.gap = report.relative_gap;
        rec.holds = report.holds;
        rec.tp_defect = report.channel_report.tp_defect;
        rec.unital_defect = report.channel_report.unital_defect;
    } else if (cfg.relation == "crooks") {
        const KrausChannel c = mixture_of_unitaries_channel(dim, cfg.unitaries, rng);
        const CrooksReport report = crooks_check(c, random_hermitian(dim, rng),
                                                 random_hermitian(dim, rng), alpha,
                                                 cfg.tolerance);
        rec.lhs = report.max_residual;
        rec.rhs = 0.0;
        rec.gap = report.max_residual;
        rec.holds = report.holds;
        rec.tp_defect = report.channel_report.tp_defect;
        rec.unital_defect = report.channel_report.unital_defect;
    } else if (cfg.relation == "heat") {
        const int da = cfg.dims[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(cfg.dims.size()) - 1))];
        const int db = cfg.dims[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(cfg.dims.size()) - 1))];
        const KrausChannel c = mixture_of_unitaries_channel(da * db, cfg.unitaries, rng);
        const HeatExchangeReport report =
            heat_exchange_check(c, random_hermitian(da, rng), random_hermitian(db, rng), alpha,
                                beta, cfg.tolerance);
        rec.lhs = report.identity_average;
        rec.rhs = 1.0;
        rec.gap = std::abs(report.identity_average - 1.0);
        rec.holds = report.identity_holds.value_or(false) && report.delta_S >= -1e-9;
        rec.tp_defect = report.channel_report.tp_defect;
        rec.unital_defect = report.channel_report.unital_defect;
    } else if (cfg.relation == "feedback") {
        const Index outcomes = rng.uniform_int(2, 4);
        const FeedbackProtocol p =
            random_protocol(dim, outcomes, cfg.noisy, cfg.noisy, alpha, rng);
        const ProtocolResult res =
            p.error_model ? jsu_error_check(p, cfg.tolerance) : jsu_check(p, cfg.tolerance);
        rec.lhs = res.generalized_average;
        rec.rhs = p.error_model ? res.gamma_tilde : res.gamma;
        rec.gap = std::abs(rec.lhs - rec.rhs);
        rec.holds =
            res.generalized_holds.value_or(false) && res.mi_equality_holds.value_or(true);
        const ChannelReport report = validate(p.first_channel, cfg.tolerance);
        rec.tp_defect = report.tp_defect;
        rec.unital_defect = report.unital_defect;
    }
    return rec;
}

TrialRecord run_trial(const ExperimentConfig& cfg, std::int64_t t) {
    const std::uint64_t trial_seed =
        derive_seed(cfg.seed.value_or(0), static_cast<std::uint64_t>(t));
    Rng rng(trial_seed);
    TrialRecord rec{};
    try {
        rec = cfg.kind == ExperimentKind::randomsuite ? evaluate_random_trial(cfg, t, rng)
                                                      : evaluate_fixed_trial(cfg, t, rng);
    } catch (const std::exception& e) {
        rec.trial = t;
        rec.kind = cfg.kind == ExperimentKind::randomsuite ? cfg.relation : to_string(cfg.kind);
        rec.holds = false;
        rec.error = e.what();
    }
    rec.seed = trial_seed;
    return rec;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, int jobs) {
    if (jobs < 1) throw DomainError("run_experiment: jobs must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    RunReport report{};
    report.experiment = to_string(cfg.kind);
    report.master_seed = cfg.seed.value_or(0);
    report.trials = cfg.trials;
    report.tolerance = cfg.tolerance;
    report.records.resize(static_cast<std::size_t>(cfg.trials));

    const int workers = static_cast<int>(
        std::min<std::int64_t>(jobs, cfg.trials));
    if (workers <= 1) {
        for (std::int64_t t = 0; t < cfg.trials; ++t)
            report.records[static_cast<std::size_t>(t)] = run_trial(cfg, t);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::int64_t t = next.fetch_add(1); t < cfg.trials;
                     t = next.fetch_add(1))
                    report.records[static_cast<std::size_t>(t)] = run_trial(cfg, t);
            });
        for (auto& th : pool) th.join();
    }

    report.max_gap = 0.0;
    report.pass_count = 0;
    report.fail_count = 0;
    report.any_contract_error = false;
    for (const auto& rec : report.records) {
        report.max_gap = std::max(report.max_gap, rec.gap);
        if (rec.holds)
            ++report.pass_count;
        else
            ++report.fail_count;
        if (rec.error) report.any_contract_error = true;
    }
    report.wall_time_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    return report;
}

nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : report.records) {
        nlohmann::json r{{"trial", rec.trial},
                         {"seed", rec.seed},
                         {"kind", rec.kind},
                         {"lhs", rec.lhs},
                         {"rhs", rec.rhs},
                         {"gap", rec.gap},
                         {"holds", rec.holds},
                         {"tp_defect", rec.tp_defect},
                         {"unital_defect", rec.unital_defect}};
        if (rec.error) r["error"] = *rec.error;
        records.push_back(std::move(r));
    }
    return {{"experiment", report.experiment},
            {"seed", report.master_seed},
            {"trials", report.trials},
            {"tolerance", report.tolerance},
            {"records", std::move(records)},
            {"summary",
             {{"max_gap", report.max_gap},
              {"pass_count", report.pass_count},
              {"fail_count", report.fail_count},
              {"wall_time_ms", report.wall_time_ms}}}};
}

std::string report_to_csv(const RunReport& report) {
    std::string out = "trial,seed,kind,lhs,rhs,gap,holds\n";
    for (const auto& rec : report.records) {
        out += std::to_string(rec.trial) + "," + std::to_string(rec.seed) + "," + rec.kind +
               "," + format_g17(rec.lhs) + "," + format_g17(rec.rhs) + "," +
               format_g17(rec.gap) + "," + (rec.holds ? "true" : "false") + "\n";
    }
    return out;
}

void emit_report(const RunReport& report, const std::string& format,
                 const std::filesystem::path& path) {
    if (format == "json")
        write_file(path, report_to_json(report).dump(2) + "\n");
    else if (format == "csv")
        write_file(path, report_to_csv(report));
    else
        throw DomainError("emit_report: unknown format '" + format + "'");
}

}  // namespace fluctlab
