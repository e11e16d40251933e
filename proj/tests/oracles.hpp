#ifndef FLUCTLAB_TESTS_ORACLES_HPP
#define FLUCTLAB_TESTS_ORACLES_HPP

// Brute-force reference evaluations.  Everything here recomputes its target
// through explicit operator algebra and naive sums, deliberately avoiding
// the factored transition machinery in the library, so agreement between
// the two routes is evidence rather than tautology.

#include <cmath>
#include <vector>

#include "fluctlab/channels.hpp"
#include "fluctlab/feedback.hpp"
#include "fluctlab/linalg.hpp"

namespace oracle {

using fluctlab::Complex;
using fluctlab::ComplexMatrix;
using fluctlab::Index;
using fluctlab::RealMatrix;
using fluctlab::RealVector;

// Raw operator-sum action.
inline ComplexMatrix channel_action(const fluctlab::KrausChannel& c, const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(c.dim_out(), c.dim_out());
    for (const auto& k : c.kraus()) out += k * x * k.adjoint();
    return out;
}

// p(out_j | in_i) by building each output state explicitly.
inline RealMatrix conditional(const fluctlab::KrausChannel& c, const ComplexMatrix& in_basis,
                              const ComplexMatrix& out_basis) {
    RealMatrix probs(out_basis.cols(), in_basis.cols());
    for (Index i = 0; i < in_basis.cols(); ++i) {
        const ComplexMatrix proj = in_basis.col(i) * in_basis.col(i).adjoint();
        const ComplexMatrix evolved = channel_action(c, proj);
        for (Index j = 0; j < out_basis.cols(); ++j)
            probs(j, i) = (out_basis.col(j).adjoint() * evolved * out_basis.col(j))(0, 0).real();
    }
    return probs;
}

inline RealVector gibbs_probs(const RealVector& eigenvalues, double param) {
    RealVector w(eigenvalues.size());
    double total = 0.0;
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        w(i) = std::exp(-param * eigenvalues(i));
        total += w(i);
    }
    return w / total;
}

inline double partition(const RealVector& eigenvalues, double param) {
    double total = 0.0;
    for (Index i = 0; i < eigenvalues.size(); ++i) total += std::exp(-param * eigenvalues(i));
    return total;
}

// <exp(alpha a - beta b)> by the naive double sum.
inline double generalized_jarzynski_lhs(const fluctlab::KrausChannel& c,
                                        const fluctlab::Spectrum& spec_a,
                                        const fluctlab::Spectrum& spec_b, double alpha,
                                        double beta) {
    const RealVector probs = gibbs_probs(spec_a.eigenvalues, alpha);
    const RealMatrix cond = conditional(c, spec_a.eigenvectors, spec_b.eigenvectors);
    double acc = 0.0;
    for (Index i = 0; i < spec_a.dim(); ++i)
        for (Index j = 0; j < spec_b.dim(); ++j)
            acc += probs(i) * cond(j, i) *
                   std::exp(alpha * spec_a.eigenvalues(i) - beta * spec_b.eigenvalues(j));
    return acc;
}

// P(difference == delta within tol) by exhaustive pair collection.
inline double delta_probability(const RealVector& input_probs, const RealMatrix& cond,
                                const RealVector& in_eigs, const RealVector& out_eigs,
                                double delta, double tol) {
    double acc = 0.0;
    for (Index i = 0; i < in_eigs.size(); ++i)
        for (Index j = 0; j < out_eigs.size(); ++j)
            if (std::abs((out_eigs(j) - in_eigs(i)) - delta) <= tol)
                acc += input_probs(i) * cond(j, i);
    return acc;
}

// Left side of the feedback relation by full (i, mu, nu, j) enumeration,
// chaining the stages as explicit matrices.
inline double protocol_lhs(const fluctlab::FeedbackProtocol& p) {
    const fluctlab::Spectrum spec_a = fluctlab::spectral_decompose(p.input_generator);
    const RealVector probs = gibbs_probs(spec_a.eigenvalues, p.param);
    const double za = partition(spec_a.eigenvalues, p.param);
    const Index m = p.measurement.outcomes();
    const Index d = spec_a.dim();

    double acc = 0.0;
    for (Index i = 0; i < d; ++i) {
        const ComplexMatrix proj = spec_a.eigenvectors.col(i) * spec_a.eigenvectors.col(i).adjoint();
        const ComplexMatrix evolved = channel_action(p.first_channel, proj);
        for (Index mu = 0; mu < m; ++mu) {
            const ComplexMatrix& n_mu = p.measurement.operators()[static_cast<std::size_t>(mu)];
            const ComplexMatrix selected = n_mu * evolved * n_mu.adjoint();
            for (Index nu = 0; nu < m; ++nu) {
                const double r = p.error_model ? (*p.error_model)(mu, nu)
                                               : (mu == nu ? 1.0 : 0.0);
                if (r == 0.0) continue;
                const fluctlab::Spectrum spec_b = fluctlab::spectral_decompose(
                    p.per_outcome_observables[static_cast<std::size_t>(nu)]);
                const double zb = partition(spec_b.eigenvalues, p.param);
                const ComplexMatrix final_state = channel_action(
                    p.per_outcome_channels[static_cast<std::size_t>(nu)], selected);
                for (Index j = 0; j < d; ++j) {
                    const double pj = (spec_b.eigenvectors.col(j).adjoint() * final_state *
                                       spec_b.eigenvectors.col(j))(0, 0)
                                          .real();
                    acc += probs(i) * r * pj * (za / zb) *
                           std::exp(p.param * (spec_a.eigenvalues(i) - spec_b.eigenvalues(j)));
                }
            }
        }
    }
    return acc;
}

// Efficacy by the closed trace form, evaluated with raw loops.
inline double protocol_efficacy(const fluctlab::FeedbackProtocol& p) {
    const Index m = p.measurement.outcomes();
    double acc = 0.0;
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu) {
            const double r =
                p.error_model ? (*p.error_model)(mu, nu) : (mu == nu ? 1.0 : 0.0);
            if (r == 0.0) continue;
            const fluctlab::GibbsState state = fluctlab::gibbs(
                p.per_outcome_observables[static_cast<std::size_t>(nu)], p.param);
            const ComplexMatrix& n_mu = p.measurement.operators()[static_cast<std::size_t>(mu)];
            const ComplexMatrix moved = channel_action(
                p.per_outcome_channels[static_cast<std::size_t>(nu)],
                (n_mu * n_mu.adjoint()).eval());
            acc += r * (state.density.matrix() * moved).trace().real();
        }
    return acc;
}

}  // namespace oracle

#endif
