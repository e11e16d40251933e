#ifndef FLUCTLAB_FEEDBACK_HPP
#define FLUCTLAB_FEEDBACK_HPP

#include <optional>
#include <vector>

#include <json.hpp>

#include "fluctlab/twopoint.hpp"

namespace fluctlab {

//=========================================================================
// Measurement
//=========================================================================

// A generalized quantum measurement {N_mu}.  The completeness relation
// sum N^dagger N = I is required at construction; the dual condition
// sum N N^dagger = I is recorded but not required (projective measurements
// and Hermitian operator sets satisfy both).  The outcome count may exceed
// the Hilbert-space dimension.
class Measurement {
public:
    explicit Measurement(std::vector<ComplexMatrix> ops, double tol = kDefaultTol);

    Index dim() const { return dim_; }
    Index outcomes() const { return static_cast<Index>(ops_.size()); }
    const std::vector<ComplexMatrix>& operators() const { return ops_; }
    double completeness_defect() const { return completeness_defect_; }
    double pclr_defect() const { return pclr_defect_; }
    bool pclr_satisfied() const { return pclr_satisfied_; }

private:
    Index dim_;
    std::vector<ComplexMatrix> ops_;
    double completeness_defect_;
    double pclr_defect_;
    bool pclr_satisfied_;
};

struct MeasurementFlags {
    bool complete;
    bool pclr_satisfied;
    double completeness_defect;
    double pclr_defect;
};

MeasurementFlags validate_measurement(const std::vector<ComplexMatrix>& ops, double tol);
MeasurementFlags validate_measurement(const Measurement& m, double tol);

// Random generators (deterministic per Rng state).
Measurement random_complete_measurement(Index dim, Index outcomes, Rng& rng);
Measurement random_projective_measurement(Index dim, Rng& rng);
// outcomes scaled Haar unitaries U_k / sqrt(outcomes); satisfies both
// operator-sum conditions for any outcome count.
Measurement random_scaled_unitary_measurement(Index dim, Index outcomes, Rng& rng);

//=========================================================================
// ErrorModel
//=========================================================================

// Classical readout confusion: entry (mu, nu) is the probability r(nu|mu)
// of registering outcome nu when the actual outcome was mu.  Rows are
// stochastic to 1e-12.
class ErrorModel {
public:
    explicit ErrorModel(RealMatrix r);

    Index actual_outcomes() const { return r_.rows(); }
    Index registered_outcomes() const { return r_.cols(); }
    double operator()(Index mu, Index nu) const { return r_(mu, nu); }
    const RealMatrix& matrix() const { return r_; }
    bool full_support() const { return r_.minCoeff() > 0.0; }

private:
    RealMatrix r_;
};

//=========================================================================
// FeedbackProtocol
//=========================================================================

// The four-stage procedure: (i) apply first_channel to the exponential
// input state, (ii) measure, (iii) apply the channel selected by the
// (possibly mis-registered) outcome, (iv) read the eigenbasis of the
// observable selected by the same outcome.  All stages share one space.
struct FeedbackProtocol {
    KrausChannel first_channel;
    Measurement measurement;
    std::vector<KrausChannel> per_outcome_channels;
    std::vector<HermitianOperator> per_outcome_observables;
    HermitianOperator input_generator;
    double param;
    std::optional<ErrorModel> error_model;
};

void validate_protocol(const FeedbackProtocol& p);

//=========================================================================
// ProtocolResult
//=========================================================================

struct ProtocolResult {
    Index outcomes;
    // joint[mu * outcomes + nu](j, i) = p(a_i, mu, b_j^{(nu)}); without an
    // error model only the nu == mu slices carry mass.
    std::vector<RealMatrix> joint;
    double normalization;        // total joint mass
    double generalized_average;  // < (Z_A / Z_{B_nu}) exp(alpha a_i - alpha b_j) >
    double gamma;                // feedback efficacy, closed trace form
    double gamma_tilde;          // efficacy with readout errors folded in
    RealVector outcome_probs;    // p(mu) after stage (ii)
    RealVector registered_probs; // p(nu) = sum_mu r(nu|mu) p(mu)
    RealMatrix pointwise_mi;     // I at (mu, nu); zero-mass cells hold 0
    double mutual_info_average;
    double mi_equality_value;    // mutual-information-corrected average
    std::optional<bool> generalized_holds;
    std::optional<bool> mi_equality_holds;
};

// Evaluates the exact joint table and every derived quantity.  gamma and
// gamma_tilde come from their closed trace forms, independent of the joint
// table, so agreement between generalized_average and the efficacy is a
// genuine cross-check rather than a tautology.
ProtocolResult run_protocol(const FeedbackProtocol& p);

// Error-free relation: the generalized average must equal gamma.  Requires
// a unital first channel (the hypothesis of the relation) and no error
// model; the third-stage channels may be arbitrary TP maps.
ProtocolResult jsu_check(const FeedbackProtocol& p, double tol = kDefaultTol);

// Noisy-readout relations.  generalized_holds is set when the first channel
// is unital (average vs gamma_tilde); mi_equality_holds additionally needs
// all third-stage channels unital, the dual measurement condition, and a
// strictly positive error matrix.  Unmet hypotheses leave the flag absent.
ProtocolResult jsu_error_check(const FeedbackProtocol& p, double tol = kDefaultTol);

//=========================================================================
// Mutual information
//=========================================================================

struct MutualInformation {
    RealMatrix pointwise;  // ln p(mu,nu)/(p(mu)p(nu)) on the support, else 0
    double average;
};

// joint(mu, nu) must be non-negative and sum to 1 within 1e-10.
MutualInformation mutual_information(const RealMatrix& joint);

//=========================================================================
// Thermodynamic work form
//=========================================================================

struct WorkFormResult {
    double average;       // < exp(-beta w + beta (F_nu - F_0)) >
    double efficacy;      // gamma (error-free) or gamma_tilde (noisy)
    double reparam_gap;   // |average - abstract generalized average|
    std::optional<double> mi_corrected_average;
    std::optional<bool> mi_identity_holds;
    double tolerance;
};

// Re-reads the protocol thermodynamically: generator = initial Hamiltonian,
// observables = final Hamiltonians, parameter = inverse temperature beta.
// The rewrite is a pure reparameterization of the abstract average.
WorkFormResult work_form_feedback(const FeedbackProtocol& p, double beta,
                                  double tol = kDefaultTol);

//=========================================================================
// Serialization
//=========================================================================

nlohmann::json protocol_to_json(const FeedbackProtocol& p);
FeedbackProtocol protocol_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProtocolResult& r);

}  // namespace fluctlab

#endif
