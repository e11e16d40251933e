// Acceptance suite: one criterion per section, each printed as a PASS/FAIL
// line.  Exit status is nonzero when any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fluctlab/experiment.hpp"
#include "fluctlab/util.hpp"
#include "oracles.hpp"

using namespace fluctlab;

namespace {

struct CriterionFailure {
    std::string detail;
};

void require(bool cond, const std::string& detail) {
    if (!cond) throw CriterionFailure{detail};
}

int failures = 0;

void criterion(int number, const std::string& title, const std::function<void()>& body) {
    try {
        body();
        std::cout << "[PASS] criterion " << number << ": " << title << "\n";
    } catch (const CriterionFailure& f) {
        ++failures;
        std::cout << "[FAIL] criterion " << number << ": " << title << " -- " << f.detail
                  << "\n";
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "[FAIL] criterion " << number << ": " << title << " -- exception: "
                  << e.what() << "\n";
    }
}

HermitianOperator diag_operator(std::initializer_list<double> entries) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(entries.size()),
                                          static_cast<Index>(entries.size()));
    Index i = 0;
    for (const double e : entries) m(i, i) = e, ++i;
    return HermitianOperator(std::move(m));
}

FeedbackProtocol random_protocol(Index dim, Index outcomes, bool noisy, bool all_unital,
                                 Rng& rng) {
    std::vector<KrausChannel> channels;
    std::vector<HermitianOperator> observables;
    for (Index k = 0; k < outcomes; ++k) {
        channels.push_back(all_unital ? mixture_of_unitaries_channel(dim, 3, rng)
                                      : stinespring_channel(dim, dim, 2, rng));
        observables.push_back(random_hermitian(dim, rng));
    }
    std::optional<ErrorModel> errors;
    if (noisy) {
        RealMatrix r(outcomes, outcomes);
        for (Index mu = 0; mu < outcomes; ++mu) {
            double total = 0.0;
            for (Index nu = 0; nu < outcomes; ++nu) {
                r(mu, nu) = rng.uniform(0.05, 1.0) + (mu == nu ? 2.0 : 0.0);
                total += r(mu, nu);
            }
            r.row(mu) /= total;
            r(mu, outcomes - 1) += 1.0 - r.row(mu).sum();
        }
        errors = ErrorModel(std::move(r));
    }
    Measurement measurement = all_unital
                                  ? random_scaled_unitary_measurement(dim, outcomes, rng)
                                  : random_complete_measurement(dim, outcomes, rng);
    return FeedbackProtocol{mixture_of_unitaries_channel(dim, 4, rng),
                            std::move(measurement),
                            std::move(channels),
                            std::move(observables),
                            random_hermitian(dim, rng),
                            rng.uniform(-1.5, 1.5),
                            std::move(errors)};
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        (env.empty() ? std::string() : env + " ") + FLUCTLAB_BIN + " " + args;
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

}  // namespace

int main() {
    const auto tmp = std::filesystem::temp_directory_path() / "fluctlab_acceptance";
    std::filesystem::create_directories(tmp);

    criterion(1, "balance identity on 300 random bistochastic instances under 10 s", [] {
        const auto start = std::chrono::steady_clock::now();
        Rng rng(101);
        for (int trial = 0; trial < 300; ++trial) {
            const Index d = 2 + trial % 3;
            // Draws are sequenced so criterion 4 can replay the same stream.
            const KrausChannel c = mixture_of_unitaries_channel(d, 2 + trial % 4, rng);
            const HermitianOperator a = random_hermitian(d, rng);
            const HermitianOperator b = random_hermitian(d, rng);
            const double alpha = rng.uniform(-2.0, 2.0);
            const double beta = rng.uniform(-2.0, 2.0);
            const JarzynskiReport r = jarzynski_check(c, a, b, alpha, beta, 1e-9);
            require(r.relative_gap <= 1e-9,
                    "trial " + std::to_string(trial) + " gap " + format_g17(r.relative_gap));
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        require(seconds < 10.0, "sweep took " + format_g17(seconds) + " s");
    });

    criterion(2, "full-decay counterexample evaluates to 3/2 against 1", [] {
        const double eps = std::log(3.0);
        const HermitianOperator h = diag_operator({0.0, eps});
        const JarzynskiReport r =
            jarzynski_check(amplitude_damping_channel(1.0), h, h, 1.0, 1.0, 1e-9);
        require(std::abs(r.lhs - 1.5) <= 1e-12, "lhs = " + format_g17(r.lhs));
        require(std::abs(r.rhs - 1.0) <= 1e-12, "rhs = " + format_g17(r.rhs));
        require(!r.holds, "identity unexpectedly held");
        const WorkStatistics w =
            work_statistics(amplitude_damping_channel(1.0), h, h, 1.0);
        require(std::abs(w.jarzynski_average - 1.5) <= 1e-12,
                "work-form average = " + format_g17(w.jarzynski_average));
    });

    criterion(3, "detailed balance on 200 random bistochastic instances", [] {
        Rng rng(303);
        for (int trial = 0; trial < 200; ++trial) {
            const Index d = 2 + trial % 3;
            const CrooksReport r = crooks_check(
                mixture_of_unitaries_channel(d, 2 + trial % 3, rng),
                random_hermitian(d, rng), random_hermitian(d, rng),
                rng.uniform(-1.5, 1.5), 1e-9);
            require(r.max_residual <= 1e-9,
                    "trial " + std::to_string(trial) + " residual " +
                        format_g17(r.max_residual));
        }
        // Completely mixed inputs mirror the two histograms bin by bin.
        for (int trial = 0; trial < 20; ++trial) {
            const Index d = 2 + trial % 3;
            const CrooksReport r =
                crooks_check(mixture_of_unitaries_channel(d, 3, rng),
                             random_hermitian(d, rng), random_hermitian(d, rng), 0.0, 1e-9);
            require(r.forward.bins.size() == r.backward.bins.size(),
                    "bin count mismatch at alpha = 0");
            for (const auto& bin : r.forward.bins) {
                const auto partner = r.backward.probability_at(-bin.delta);
                require(partner.has_value(), "missing mirrored bin");
                require(std::abs(*partner - bin.probability) <= 1e-10,
                        "mirror gap " + format_g17(std::abs(*partner - bin.probability)));
            }
        }
    });

    criterion(4, "second law on the unital equal-temperature sweep", [] {
        Rng rng(101);  // the criterion-1 channel stream
        for (int trial = 0; trial < 300; ++trial) {
            const Index d = 2 + trial % 3;
            const KrausChannel c = mixture_of_unitaries_channel(d, 2 + trial % 4, rng);
            const HermitianOperator h0 = random_hermitian(d, rng);
            const HermitianOperator h1 = random_hermitian(d, rng);
            rng.uniform(-2.0, 2.0);  // keep the stream aligned with criterion 1
            rng.uniform(-2.0, 2.0);
            const double beta = 0.05 + 1.95 * (trial + 1) / 300.0;
            const WorkStatistics w = work_statistics(c, h0, h1, beta);
            require(w.second_law_gap >= -1e-9,
                    "trial " + std::to_string(trial) + " gap " +
                        format_g17(w.second_law_gap));
            require(std::exp(-beta * w.second_law_gap) <= 1.0 + 1e-9,
                    "Jensen route violated at trial " + std::to_string(trial));
        }
    });

    criterion(5, "heat-exchange identity on 100 composite unital channels", [] {
        Rng rng(505);
        for (int trial = 0; trial < 100; ++trial) {
            const HeatExchangeReport r = heat_exchange_check(
                mixture_of_unitaries_channel(4, 2 + trial % 4, rng),
                random_hermitian(2, rng), random_hermitian(2, rng),
                rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), 1e-9);
            require(std::abs(r.identity_average - 1.0) <= 1e-9,
                    "trial " + std::to_string(trial) + " average " +
                        format_g17(r.identity_average));
            require(r.delta_S >= -1e-9,
                    "trial " + std::to_string(trial) + " delta_S " + format_g17(r.delta_S));
        }
        const HermitianOperator h = diag_operator({0.0, 1.0});
        const HeatExchangeReport swap = heat_exchange_check(swap_channel(2), h, h, 2.0, 1.0, 1e-9);
        require(swap.delta_S > 0.0, "swap at distinct temperatures gave delta_S " +
                                        format_g17(swap.delta_S));
        require(std::abs(swap.identity_average - 1.0) <= 1e-9,
                "swap average " + format_g17(swap.identity_average));
    });

    criterion(6, "error-free feedback relation on 100 random protocols", [] {
        Rng rng(606);
        for (int trial = 0; trial < 100; ++trial) {
            const FeedbackProtocol p = random_protocol(2 + trial % 2, 2 + trial % 3,
                                                       false, false, rng);
            const ProtocolResult res = jsu_check(p, 1e-9);
            require(std::abs(res.generalized_average - res.gamma) <= 1e-9,
                    "trial " + std::to_string(trial) + " gap " +
                        format_g17(std::abs(res.generalized_average - res.gamma)));
        }
        // No feedback: one unital channel, one final observable, a dual
        // measurement; the efficacy collapses to 1.
        for (int trial = 0; trial < 10; ++trial) {
            const Index d = 2 + trial % 3;
            const KrausChannel shared = mixture_of_unitaries_channel(d, 3, rng);
            const HermitianOperator b = random_hermitian(d, rng);
            const Index outcomes = 2 + trial % 3;
            FeedbackProtocol p{mixture_of_unitaries_channel(d, 4, rng),
                               random_scaled_unitary_measurement(d, outcomes, rng),
                               std::vector<KrausChannel>(
                                   static_cast<std::size_t>(outcomes), shared),
                               std::vector<HermitianOperator>(
                                   static_cast<std::size_t>(outcomes), b),
                               random_hermitian(d, rng),
                               rng.uniform(-1.5, 1.5),
                               std::nullopt};
            const ProtocolResult res = jsu_check(p, 1e-9);
            require(std::abs(res.gamma - 1.0) <= 1e-10,
                    "no-feedback efficacy " + format_g17(res.gamma));
        }
    });

    criterion(7, "noisy feedback relations on 100 random protocols", [] {
        Rng rng(707);
        for (int trial = 0; trial < 100; ++trial) {
            const FeedbackProtocol p = random_protocol(2 + trial % 2, 2 + trial % 3,
                                                       true, false, rng);
            const ProtocolResult res = jsu_error_check(p, 1e-9);
            require(std::abs(res.generalized_average - res.gamma_tilde) <= 1e-9,
                    "trial " + std::to_string(trial) + " gap " +
                        format_g17(std::abs(res.generalized_average - res.gamma_tilde)));
        }
        for (int trial = 0; trial < 100; ++trial) {
            const FeedbackProtocol p = random_protocol(2 + trial % 2, 2 + trial % 3,
                                                       true, true, rng);
            const ProtocolResult res = jsu_error_check(p, 1e-9);
            require(res.mi_equality_holds.has_value(),
                    "information hypotheses unexpectedly unmet at trial " +
                        std::to_string(trial));
            require(std::abs(res.mi_equality_value - 1.0) <= 1e-9,
                    "trial " + std::to_string(trial) + " information value " +
                        format_g17(res.mi_equality_value));
        }
        // Identity readout reproduces the error-free numbers.
        Rng rng_a(717), rng_b(717);
        const FeedbackProtocol clean = random_protocol(2, 3, false, false, rng_a);
        FeedbackProtocol with_identity = random_protocol(2, 3, false, false, rng_b);
        with_identity.error_model = ErrorModel(RealMatrix::Identity(3, 3));
        const ProtocolResult res_clean = run_protocol(clean);
        const ProtocolResult res_id = run_protocol(with_identity);
        require(std::abs(res_id.generalized_average - res_clean.generalized_average) <= 1e-12,
                "identity-readout reduction differs by " +
                    format_g17(std::abs(res_id.generalized_average -
                                        res_clean.generalized_average)));
        require(std::abs(res_id.gamma_tilde - res_clean.gamma) <= 1e-12,
                "efficacy reduction differs");
    });

    criterion(8, "trajectory sampler matches the exact joint at 4 sigma", [] {
        Rng rng(808);
        const std::int64_t n = 100000;
        std::int64_t cells = 0, inside = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const Index d = 2 + trial % 3;
            const KrausChannel c = trial % 2 == 0
                                       ? mixture_of_unitaries_channel(d, 3, rng)
                                       : stinespring_channel(d, d, 2, rng);
            const GibbsState g = gibbs(random_hermitian(d, rng), rng.uniform(-1.0, 1.0));
            const Spectrum out = spectral_decompose(random_hermitian(d, rng));
            const ConditionalMatrix cond = conditional_probs(c, g.spectrum, out);
            const JointDistribution exact = make_joint(
                g.probabilities, cond, g.spectrum.eigenvalues, out.eigenvalues);
            const JointDistribution sampled = sample_trajectories(
                g.density, c, g.spectrum, out, n, derive_seed(999, trial));
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j) {
                    const double p = exact.joint(j, i);
                    const double band =
                        4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
                    ++cells;
                    if (std::abs(sampled.joint(j, i) - p) <= band) ++inside;
                }
        }
        require(static_cast<double>(inside) >= 0.99 * static_cast<double>(cells),
                std::to_string(inside) + "/" + std::to_string(cells) + " cells in band");
    });

    criterion(9, "structural sweep: adjoints, compositions, state preservation", [] {
        Rng rng(909);
        for (int trial = 0; trial < 50; ++trial) {
            const Index d = 2 + trial % 3;
            const KrausChannel c = mixture_of_unitaries_channel(d, 2 + trial % 3, rng);
            const ChannelReport adj = validate(adjoint(c), 1e-9);
            require(adj.is_tp && adj.is_unital,
                    "adjoint defects " + format_g17(adj.tp_defect) + ", " +
                        format_g17(adj.unital_defect));
            const KrausChannel other = mixture_of_unitaries_channel(d, 2, rng);
            const ChannelReport comp = validate(compose(other, c), 1e-9);
            require(comp.is_tp && comp.is_unital, "composition lost bistochasticity");
        }
        std::vector<KrausChannel> tp_channels;
        tp_channels.push_back(depolarizing_channel(0.35));
        tp_channels.push_back(amplitude_damping_channel(0.8));
        tp_channels.push_back(stinespring_channel(3, 2, 3, rng));
        tp_channels.push_back(mixture_of_unitaries_channel(4, 3, rng));
        for (const auto& c : tp_channels) {
            for (int trial = 0; trial < 50; ++trial) {
                ComplexMatrix g(c.dim_in(), c.dim_in());
                for (Index jj = 0; jj < c.dim_in(); ++jj)
                    for (Index ii = 0; ii < c.dim_in(); ++ii)
                        g(ii, jj) = rng.normal_complex();
                ComplexMatrix rho = g * g.adjoint();
                rho /= rho.trace();
                const DensityMatrix out = apply(c, DensityMatrix(std::move(rho)));
                require(std::abs(out.matrix().trace().real() - 1.0) <= 1e-9,
                        "trace drift");
                Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
                    out.matrix(), Eigen::EigenvaluesOnly);
                require(solver.eigenvalues().minCoeff() >= -1e-9, "negative output state");
            }
        }
    });

    criterion(10, "CLI determinism and exit codes", [&tmp] {
        const auto config = tmp / "suite.json";
        write_file(config, R"({
            "experiment": "randomsuite",
            "relation": "jarzynski",
            "seed": 42,
            "trials": 100,
            "dims": [2, 3, 4]
        })");
        const auto out1 = tmp / "run1.json";
        const auto out2 = tmp / "run2.json";
        int code = run_cli("randomsuite --config " + config.string() + " --out " +
                           out1.string() + " > /dev/null 2>&1");
        require(code == 0, "first run exited " + std::to_string(code));
        code = run_cli("randomsuite --config " + config.string() + " --out " +
                       out2.string() + " --jobs 4 > /dev/null 2>&1");
        require(code == 0, "second run exited " + std::to_string(code));
        nlohmann::json a = nlohmann::json::parse(read_file(out1));
        nlohmann::json b = nlohmann::json::parse(read_file(out2));
        require(a["summary"]["pass_count"].get<int>() == 100, "not all trials held");
        a["summary"].erase("wall_time_ms");
        b["summary"].erase("wall_time_ms");
        require(a.dump() == b.dump(), "reports differ beyond wall time");

        // The environment seed override shifts the whole stream.
        const auto out3 = tmp / "run3.json";
        code = run_cli("randomsuite --config " + config.string() + " --out " +
                       out3.string() + " > /dev/null 2>&1",
                       "FLUCTLAB_SEED=43");
        require(code == 0, "override run exited " + std::to_string(code));
        nlohmann::json c = nlohmann::json::parse(read_file(out3));
        require(c["seed"].get<std::uint64_t>() == 43, "seed override not recorded");
        require(c["records"][0]["seed"] != a["records"][0]["seed"],
                "override produced the same trial seeds");

        const auto fixture = tmp / "fixture.json";
        std::ostringstream doc;
        doc << R"({
            "experiment": "jarzynski",
            "seed": 1,
            "channel": { "kind": "amplitude_damping", "gamma": 1.0 },
            "observables": { "a": { "diag": [0.0, )"
            << format_g17(std::log(3.0)) << R"(] }, "b": { "diag": [0.0, )"
            << format_g17(std::log(3.0)) << R"(] } },
            "params": { "alpha": 1.0, "beta": 1.0 }
        })";
        write_file(fixture, doc.str());
        code = run_cli("jarzynski --config " + fixture.string() + " > /dev/null 2>&1");
        require(code == 2, "fixture exited " + std::to_string(code) + ", expected 2");
    });

    std::filesystem::remove_all(tmp);
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
