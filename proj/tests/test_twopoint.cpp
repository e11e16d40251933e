#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fluctlab/twopoint.hpp"
#include "oracles.hpp"

using namespace fluctlab;

namespace {

HermitianOperator diag_operator(std::initializer_list<double> entries) {
    ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(entries.size()),
                                          static_cast<Index>(entries.size()));
    Index i = 0;
    for (const double e : entries) m(i, i) = e, ++i;
    return HermitianOperator(std::move(m));
}

}  // namespace

TEST_CASE("gibbs states", "[twopoint]") {
    Rng rng(1234);
    SECTION("zero parameter gives the completely mixed state") {
        const GibbsState g = gibbs(random_hermitian(5, rng), 0.0);
        REQUIRE(max_abs((g.density.matrix() - 0.2 * ComplexMatrix::Identity(5, 5)).eval()) <=
                1e-12);
        REQUIRE_FALSE(g.free_energy.has_value());
        REQUIRE(g.partition_function == Catch::Approx(5.0).margin(1e-12));
    }
    SECTION("two-level closed form") {
        const double eps = 0.85, beta = 1.4;
        const GibbsState g = gibbs(diag_operator({0.0, eps}), beta);
        const double z = 1.0 + std::exp(-beta * eps);
        REQUIRE(g.probabilities(0) == Catch::Approx(1.0 / z).margin(1e-14));
        REQUIRE(g.probabilities(1) == Catch::Approx(std::exp(-beta * eps) / z).margin(1e-14));
        REQUIRE(*g.free_energy == Catch::Approx(-std::log(z) / beta).margin(1e-13));
    }
    SECTION("matches the operator-function route") {
        const double beta = 0.7;
        const HermitianOperator a = random_hermitian(4, rng);
        const GibbsState g = gibbs(a, beta);
        const ComplexMatrix expm =
            operator_function(a, [&](double x) { return std::exp(-beta * x); }).matrix();
        const ComplexMatrix direct = expm / expm.trace().real();
        REQUIRE(max_abs((g.density.matrix() - direct).eval()) <= 1e-10);
        REQUIRE(g.partition_function ==
                Catch::Approx(expm.trace().real()).epsilon(1e-12));
    }
    SECTION("overflow is reported with the shift hint") {
        REQUIRE_THROWS_WITH(gibbs(diag_operator({0.0, -1e4}), 1.0),
                            Catch::Matchers::ContainsSubstring("shift"));
    }
}

TEST_CASE("conditional probabilities", "[twopoint]") {
    Rng rng(55);
    SECTION("identity channel on a non-degenerate spectrum") {
        const HermitianOperator a = random_hermitian(3, rng);
        const Spectrum spec = spectral_decompose(a);
        const ConditionalMatrix cond =
            conditional_probs(identity_channel(3), spec, spec);
        REQUIRE(max_abs((cond.probs() - RealMatrix::Identity(3, 3)).eval()) <= 1e-10);
    }
    SECTION("unbiased isometry spreads uniformly") {
        const Spectrum in = spectral_decompose(diag_operator({0.0, 1.0}));
        const Spectrum out = spectral_decompose(diag_operator({0.0, 1.0, 2.0, 3.0}));
        const ConditionalMatrix cond =
            conditional_probs(mub_isometry_channel(2, 4), in, out);
        for (Index j = 0; j < 4; ++j)
            for (Index i = 0; i < 2; ++i)
                REQUIRE(cond(j, i) == Catch::Approx(0.25).margin(1e-12));
    }
    SECTION("columns sum to one; unital rows sum to d_in/d_out") {
        for (int trial = 0; trial < 200; ++trial) {
            const Index da = 2 + trial % 3;
            const Index db = 2 + (trial / 3) % 3;
            const bool square_unital = trial % 2 == 0;
            const KrausChannel c = square_unital
                                       ? mixture_of_unitaries_channel(da, 3, rng)
                                       : stinespring_channel(da, db, 2, rng);
            const Spectrum in = spectral_decompose(random_hermitian(c.dim_in(), rng));
            const Spectrum out = spectral_decompose(random_hermitian(c.dim_out(), rng));
            const ConditionalMatrix cond = conditional_probs(c, in, out);
            for (Index i = 0; i < cond.inputs(); ++i)
                REQUIRE(std::abs(cond.probs().col(i).sum() - 1.0) <= 1e-10);
            if (validate(c).is_unital) {
                const double expected = static_cast<double>(c.dim_in()) /
                                        static_cast<double>(c.dim_out());
                for (Index j = 0; j < cond.outputs(); ++j)
                    REQUIRE(std::abs(cond.probs().row(j).sum() - expected) <= 1e-10);
            }
        }
    }
    SECTION("agrees with the explicit-state oracle") {
        const KrausChannel c = stinespring_channel(3, 2, 2, rng);
        const Spectrum in = spectral_decompose(random_hermitian(3, rng));
        const Spectrum out = spectral_decompose(random_hermitian(2, rng));
        const ConditionalMatrix cond = conditional_probs(c, in, out);
        const RealMatrix expected =
            oracle::conditional(c, in.eigenvectors, out.eigenvectors);
        REQUIRE(max_abs((cond.probs() - expected).eval()) <= 1e-12);
    }
    SECTION("forward and dual transition tables are transposes") {
        for (int trial = 0; trial < 25; ++trial) {
            const bool bistochastic = trial % 2 == 0;
            const KrausChannel c = bistochastic ? mixture_of_unitaries_channel(3, 3, rng)
                                                : stinespring_channel(3, 3, 2, rng);
            const Spectrum in = spectral_decompose(random_hermitian(3, rng));
            const Spectrum out = spectral_decompose(random_hermitian(3, rng));
            const RealMatrix fwd = transition_matrix(c, in.eigenvectors, out.eigenvectors);
            const RealMatrix dual =
                transition_matrix(adjoint(c), out.eigenvectors, in.eigenvectors);
            REQUIRE(max_abs((fwd.transpose() - dual).eval()) <= 1e-10);
            if (bistochastic) {
                // The adjoint is itself a channel here, so the identity also
                // holds between the two conditional tables proper.
                const ConditionalMatrix cf = conditional_probs(c, in, out);
                const ConditionalMatrix cb = conditional_probs(adjoint(c), out, in);
                REQUIRE(max_abs((cf.probs().transpose() - cb.probs()).eval()) <= 1e-10);
            }
        }
    }
    SECTION("non-TP channels are rejected") {
        const KrausChannel half(2, 2, {0.5 * ComplexMatrix::Identity(2, 2)});
        const Spectrum spec = spectral_decompose(diag_operator({0.0, 1.0}));
        REQUIRE_THROWS_AS(conditional_probs(half, spec, spec), ContractError);
    }
    SECTION("mismatched spectra are rejected") {
        const Spectrum two = spectral_decompose(diag_operator({0.0, 1.0}));
        const Spectrum three = spectral_decompose(diag_operator({0.0, 1.0, 2.0}));
        REQUIRE_THROWS_AS(conditional_probs(identity_channel(2), three, two), ShapeError);
        REQUIRE_THROWS_AS(conditional_probs(identity_channel(2), two, three), ShapeError);
    }
}

TEST_CASE("joint averages", "[twopoint]") {
    Rng rng(808);
    const KrausChannel c = mixture_of_unitaries_channel(3, 3, rng);
    const HermitianOperator a = random_hermitian(3, rng);
    const HermitianOperator b = random_hermitian(3, rng);
    const GibbsState g = gibbs(a, 0.9);
    const Spectrum out_spec = spectral_decompose(b);
    const ConditionalMatrix cond = conditional_probs(c, g.spectrum, out_spec);

    SECTION("normalization") {
        const auto [value, joint] = joint_average(g.density, g.spectrum, cond, out_spec,
                                                  [](double, double) { return 1.0; });
        REQUIRE(value == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(joint.total_mass() == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("input-only functions reduce to a trace on the input state") {
        auto gfun = [](double x) { return x * x - 0.5 * x; };
        const auto [value, joint] = joint_average(
            g.density, g.spectrum, cond, out_spec,
            [&](double ai, double) { return gfun(ai); });
        const ComplexMatrix ga = operator_function(a, gfun).matrix();
        REQUIRE(value ==
                Catch::Approx((ga * g.density.matrix()).trace().real()).margin(1e-10));
    }
    SECTION("output-only functions reduce to a trace on the evolved state") {
        auto gfun = [](double x) { return std::sin(x); };
        const auto [value, joint] = joint_average(
            g.density, g.spectrum, cond, out_spec,
            [&](double, double bj) { return gfun(bj); });
        const ComplexMatrix gb = operator_function(b, gfun).matrix();
        const ComplexMatrix evolved = apply(c, g.density).matrix();
        REQUIRE(value == Catch::Approx((gb * evolved).trace().real()).margin(1e-10));
    }
    SECTION("inputs that do not commute with the eigenbasis are rejected") {
        // The Gibbs state of a generic second observable is not diagonal in
        // the eigenbasis of the first.
        const GibbsState other = gibbs(b, 1.1);
        REQUIRE_THROWS_AS(make_joint(other.density, g.spectrum, cond, out_spec),
                          ContractError);
    }
}

TEST_CASE("delta histograms", "[twopoint]") {
    SECTION("identity channel on matched diagonal observables") {
        const HermitianOperator a = diag_operator({0.0, 1.0});
        const GibbsState g = gibbs(a, 0.8);
        const ConditionalMatrix cond =
            conditional_probs(identity_channel(2), g.spectrum, g.spectrum);
        const JointDistribution joint =
            make_joint(g.probabilities, cond, g.spectrum.eigenvalues, g.spectrum.eigenvalues);
        const DeltaHistogram hist = delta_histogram(joint, DeltaSign::b_minus_a);
        REQUIRE(hist.bins.size() == 1);
        REQUIRE(hist.bins[0].delta == Catch::Approx(0.0).margin(1e-14));
        REQUIRE(hist.bins[0].probability == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("uniform enumeration case") {
        const RealVector probs = RealVector::Constant(2, 0.5);
        RealMatrix cond(2, 2);
        cond << 0.5, 0.5, 0.5, 0.5;
        RealVector a(2), b(2);
        a << 0.0, 1.0;
        b << 0.0, 2.0;
        const JointDistribution joint = make_joint(probs, ConditionalMatrix(cond), a, b);
        const DeltaHistogram hist = delta_histogram(joint, DeltaSign::b_minus_a);
        REQUIRE(hist.bins.size() == 4);
        const double expected_centers[] = {-1.0, 0.0, 1.0, 2.0};
        for (std::size_t k = 0; k < 4; ++k) {
            REQUIRE(hist.bins[k].delta == Catch::Approx(expected_centers[k]).margin(1e-14));
            REQUIRE(hist.bins[k].probability == Catch::Approx(0.25).margin(1e-14));
        }
        // Sign flip mirrors the support.
        const DeltaHistogram flipped = delta_histogram(joint, DeltaSign::a_minus_b);
        REQUIRE(flipped.bins.front().delta == Catch::Approx(-2.0).margin(1e-14));
        REQUIRE(flipped.probability_at(1.0).value() == Catch::Approx(0.25).margin(1e-14));
        REQUIRE_FALSE(flipped.probability_at(5.0).has_value());
    }
    SECTION("random instances conserve mass") {
        Rng rng(99);
        for (int trial = 0; trial < 20; ++trial) {
            const KrausChannel c = stinespring_channel(4, 3, 2, rng);
            const GibbsState g = gibbs(random_hermitian(4, rng), rng.uniform(-1.0, 1.0));
            const Spectrum out = spectral_decompose(random_hermitian(3, rng));
            const ConditionalMatrix cond = conditional_probs(c, g.spectrum, out);
            const JointDistribution joint =
                make_joint(g.probabilities, cond, g.spectrum.eigenvalues, out.eigenvalues);
            const DeltaHistogram hist = delta_histogram(joint, DeltaSign::b_minus_a);
            REQUIRE(std::abs(hist.total_mass() - 1.0) <= 1e-10);
            for (std::size_t k = 1; k < hist.bins.size(); ++k)
                REQUIRE(hist.bins[k].delta - hist.bins[k - 1].delta >
                        hist.cluster_tolerance);
        }
    }
}

TEST_CASE("degenerate blocks leave event statistics invariant", "[twopoint][property]") {
    // Per-label conditionals are basis-dependent inside a degenerate block,
    // but clustered difference masses and exponential averages are not.
    Rng rng(4321);
    const ComplexMatrix frame = haar_unitary(3, rng);
    RealVector eigs(3);
    eigs << -0.5, -0.5, 1.25;  // two-fold degenerate pair
    const HermitianOperator a(
        (frame * eigs.asDiagonal() * frame.adjoint()).eval());
    const Spectrum base = spectral_decompose(a);

    // A second valid decomposition: rotate inside the degenerate block.
    Spectrum rotated = base;
    ComplexMatrix block = ComplexMatrix::Identity(3, 3);
    block.topLeftCorner(2, 2) = haar_unitary(2, rng);
    rotated.eigenvectors = base.eigenvectors * block;

    const KrausChannel c = mixture_of_unitaries_channel(3, 3, rng);
    const Spectrum out = spectral_decompose(random_hermitian(3, rng));
    const double alpha = 0.8, beta = -0.6;

    auto averaged = [&](const Spectrum& in_spec) {
        const GibbsState g = gibbs(a, alpha);
        const ConditionalMatrix cond = conditional_probs(c, in_spec, out);
        // Gibbs probabilities per label are equal on the degenerate pair,
        // so the joint is well-defined for either basis choice.
        const JointDistribution joint = make_joint(
            g.probabilities, cond, in_spec.eigenvalues, out.eigenvalues);
        const double avg = joint_average(joint, [&](double ai, double bj) {
            return std::exp(alpha * ai - beta * bj);
        });
        return std::make_pair(avg, delta_histogram(joint, DeltaSign::b_minus_a));
    };
    const auto [avg1, hist1] = averaged(base);
    const auto [avg2, hist2] = averaged(rotated);
    REQUIRE(avg1 == Catch::Approx(avg2).epsilon(1e-11));
    REQUIRE(hist1.bins.size() == hist2.bins.size());
    for (std::size_t k = 0; k < hist1.bins.size(); ++k) {
        REQUIRE(hist1.bins[k].delta ==
                Catch::Approx(hist2.bins[k].delta).margin(1e-10));
        REQUIRE(hist1.bins[k].probability ==
                Catch::Approx(hist2.bins[k].probability).margin(1e-10));
    }
}

TEST_CASE("trajectory sampling", "[twopoint]") {
    Rng rng(6021);
    const KrausChannel c = depolarizing_channel(0.5);
    const GibbsState g = gibbs(diag_operator({0.0, 1.0}), 1.0);
    const Spectrum out = spectral_decompose(diag_operator({0.0, 1.0}));

    SECTION("converges to the exact joint at the binomial scale") {
        const ConditionalMatrix cond = conditional_probs(c, g.spectrum, out);
        const JointDistribution exact =
            make_joint(g.probabilities, cond, g.spectrum.eigenvalues, out.eigenvalues);
        const std::int64_t n = 100000;
        const JointDistribution sampled =
            sample_trajectories(g.density, c, g.spectrum, out, n, 4242);
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 2; ++j) {
                const double p = exact.joint(j, i);
                const double band =
                    4.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
                REQUIRE(std::abs(sampled.joint(j, i) - p) <= band);
            }
    }
    SECTION("single draw concentrates on one cell") {
        const JointDistribution one =
            sample_trajectories(g.density, c, g.spectrum, out, 1, 7);
        REQUIRE(one.total_mass() == Catch::Approx(1.0).margin(1e-15));
        REQUIRE(one.joint.maxCoeff() == 1.0);
    }
    SECTION("same seed reproduces the table bit for bit") {
        const JointDistribution s1 =
            sample_trajectories(g.density, c, g.spectrum, out, 5000, 99);
        const JointDistribution s2 =
            sample_trajectories(g.density, c, g.spectrum, out, 5000, 99);
        REQUIRE(max_abs((s1.joint - s2.joint).eval()) == 0.0);
    }
}

TEST_CASE("csv rendering", "[twopoint][io]") {
    const RealVector probs = RealVector::Constant(2, 0.5);
    RealMatrix cond(2, 2);
    cond << 1.0, 0.0, 0.0, 1.0;
    RealVector a(2), b(2);
    a << 0.0, 1.0 / 3.0;
    b << 0.0, 2.0;
    const JointDistribution joint = make_joint(probs, ConditionalMatrix(cond), a, b);

    const std::string csv = joint_to_csv(joint);
    REQUIRE(csv.rfind("i,j,a_i,b_j,p\n", 0) == 0);
    REQUIRE(csv.find("0.33333333333333331") != std::string::npos);  // 17 digits
    REQUIRE(csv.find('\r') == std::string::npos);

    const DeltaHistogram hist = delta_histogram(joint, DeltaSign::b_minus_a);
    const std::string hcsv = histogram_to_csv(hist);
    REQUIRE(hcsv.rfind("delta,probability\n", 0) == 0);
    REQUIRE(std::count(hcsv.begin(), hcsv.end(), '\n') ==
            static_cast<std::ptrdiff_t>(hist.bins.size()) + 1);
}
