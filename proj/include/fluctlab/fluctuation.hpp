#ifndef FLUCTLAB_FLUCTUATION_HPP
#define FLUCTLAB_FLUCTUATION_HPP

#include <optional>
#include <vector>

#include <json.hpp>

#include "fluctlab/twopoint.hpp"

namespace fluctlab {

//=========================================================================
// Generalized Jarzynski identity
//=========================================================================

// <exp(alpha a - beta b)> against (d_in/d_out) Tr e^{-beta B} / Tr e^{-alpha A}.
// The average is an exact double sum over the two-point joint distribution;
// exponents are evaluated after shifting both spectra, with the compensating
// factor applied to both sides, so the relative gap is unaffected.
struct JarzynskiReport {
    double lhs;
    double rhs;
    double relative_gap;  // |lhs - rhs| / max(|rhs|, 1e-300)
    bool holds;           // relative_gap <= tolerance
    double tolerance;
    ChannelReport channel_report;
};

JarzynskiReport jarzynski_check(const KrausChannel& c, const HermitianOperator& a,
                                const HermitianOperator& b, double alpha, double beta,
                                double tol = kDefaultTol);

// Two-temperature specialization on a square channel: A = H0, B = H1,
// alpha = beta0, beta = beta1, rhs = Z1(beta1)/Z0(beta0).
JarzynskiReport tasaki_two_temperature(const KrausChannel& c, const HermitianOperator& h0,
                                       const HermitianOperator& h1, double beta0, double beta1,
                                       double tol = kDefaultTol);

//=========================================================================
// Work statistics at fixed inverse temperature
//=========================================================================

struct WorkStatistics {
    double mean_work;          // <w>, w = final minus initial eigenvalue
    double delta_F;            // F1 - F0
    double jarzynski_average;  // <e^{-beta w}>
    double second_law_gap;     // <w> - delta_F
    ChannelReport channel_report;
};

// beta = 0 leaves the free energies undefined and raises DomainError.
WorkStatistics work_statistics(const KrausChannel& c, const HermitianOperator& h0,
                               const HermitianOperator& h1, double beta);

//=========================================================================
// Detailed fluctuation relation (forward map vs adjoint map)
//=========================================================================

// Per matched bin Delta:
//   residual = | e^{-alpha Delta} Tr(e^{-alpha A}) P_fwd(Delta)
//               - Tr(e^{-alpha B}) P_bwd(-Delta) |
// Bins are matched by negated centers within the cluster tolerance; a bin
// with no partner contributes its one-sided value as residual and its mass
// to unmatched_mass.
struct CrooksReport {
    DeltaHistogram forward;   // b - a under the channel from the A-side state
    DeltaHistogram backward;  // a - b under the adjoint from the B-side state
    std::vector<double> per_bin_residuals;
    double max_residual;
    double unmatched_mass;
    bool holds;  // max_residual <= tolerance
    double tolerance;
    ChannelReport channel_report;
};

// Requires a bistochastic (unital + trace-preserving) square channel, since
// only then is the adjoint again a channel.
CrooksReport crooks_check(const KrausChannel& c, const HermitianOperator& a,
                          const HermitianOperator& b, double alpha, double tol = kDefaultTol);

// Work-form rows P_fwd(w)/P_bwd(-w) against e^{beta(w - delta_F)}, reported
// only where both probabilities exceed 1e-12; one-sided bins are excluded
// and counted.
struct CrooksWorkRow {
    double w;
    double p_forward;
    double p_backward;
    double ratio;     // p_forward / p_backward
    double expected;  // e^{beta (w - delta_F)}
};

struct CrooksWorkForm {
    std::vector<CrooksWorkRow> rows;
    int excluded_bins;
    double max_relative_gap;  // max |ratio - expected| / expected
    bool holds;
    double tolerance;
    double delta_F;
    ChannelReport channel_report;
};

CrooksWorkForm crooks_work_form(const KrausChannel& c, const HermitianOperator& h0,
                                const HermitianOperator& h1, double beta, double tol = 1e-8);

//=========================================================================
// Heat exchange between two systems
//=========================================================================

// Composite process: Gibbs(A, alpha) (x) Gibbs(B, beta) evolves under a
// channel on the product space; both point measurements read the product
// eigenbasis.  For a unital composite channel,
//   <exp(alpha (a - a') + beta (b - b'))> = 1,
// and the entropy estimate delta_S (primed minus unprimed, weighted by the
// inverse temperatures) is non-negative.
struct HeatExchangeReport {
    double identity_average;
    double delta_S;
    double mean_change_a;  // <a' - a>
    double mean_change_b;  // <b' - b>
    bool unital;
    std::optional<bool> identity_holds;  // absent when the channel is not unital
    double tolerance;
    ChannelReport channel_report;
};

HeatExchangeReport heat_exchange_check(const KrausChannel& psi, const HermitianOperator& a,
                                       const HermitianOperator& b, double alpha, double beta,
                                       double tol = kDefaultTol);

// Returns delta_S after checking the Jensen bound exp(-delta_S) <= 1 + 1e-9.
// Requires a report produced with a unital channel.
double entropy_production(const HeatExchangeReport& report);

//=========================================================================
// Serialization
//=========================================================================

nlohmann::json to_json(const ChannelReport& r);
nlohmann::json to_json(const JarzynskiReport& r);
nlohmann::json to_json(const WorkStatistics& r);
nlohmann::json to_json(const CrooksReport& r);
nlohmann::json to_json(const CrooksWorkForm& r);
nlohmann::json to_json(const HeatExchangeReport& r);

}  // namespace fluctlab

#endif
