#ifndef FLUCTLAB_TWOPOINT_HPP
#define FLUCTLAB_TWOPOINT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluctlab/channels.hpp"
#include "fluctlab/linalg.hpp"

namespace fluctlab {

// Default absolute tolerance for clustering eigenvalue differences that are
// analytically equal but differ by solver noise.
inline constexpr double kDeltaClusterTol = 1e-8;

//=========================================================================
// GibbsState
//=========================================================================

// The exponential-family state e^{-param A} / Z.  Exponentials are taken
// after shifting the spectrum so the largest weight is exactly 1; the shift
// cancels from the state and is restored analytically in Z, so extreme
// spectra do not overflow the state itself.  param = 0 yields the completely
// mixed state and leaves free_energy absent.
struct GibbsState {
    HermitianOperator generator;
    double param;
    Spectrum spectrum;           // of the generator
    RealVector probabilities;    // p(a_i) = e^{-param a_i} / Z, per eigenlabel
    double partition_function;   // Z = Tr e^{-param A}
    double log_partition;        // ln Z, the overflow-safe form
    std::optional<double> free_energy;  // -ln(Z)/param when param != 0
    DensityMatrix density;
};

GibbsState gibbs(const HermitianOperator& a, double param);

//=========================================================================
// ConditionalMatrix
//=========================================================================

// p(b_j | a_i) at entry (j, i): rows run over output labels, columns over
// input labels.  Every column of a trace-preserving channel's conditional
// matrix sums to 1; that is enforced at construction.
class ConditionalMatrix {
public:
    explicit ConditionalMatrix(RealMatrix probs);

    Index outputs() const { return probs_.rows(); }
    Index inputs() const { return probs_.cols(); }
    const RealMatrix& probs() const { return probs_; }
    double operator()(Index j, Index i) const { return probs_(j, i); }

private:
    RealMatrix probs_;
};

// Transition weights sum_mu |<out_basis_j| K_mu |in_basis_i>|^2 for an
// arbitrary channel; columns need not be normalized unless the channel is
// trace-preserving.  Basis matrices hold orthonormal columns.
RealMatrix transition_matrix(const KrausChannel& c, const ComplexMatrix& in_basis,
                             const ComplexMatrix& out_basis);

// p(b_j|a_i) = <b_j| C(|a_i><a_i|) |b_j>.  Requires a trace-preserving
// channel whose dimensions match the spectra.
ConditionalMatrix conditional_probs(const KrausChannel& c, const Spectrum& in_spec,
                                    const Spectrum& out_spec);

//=========================================================================
// JointDistribution
//=========================================================================

struct JointDistribution {
    RealVector input_probs;        // p(a_i)
    ConditionalMatrix conditional; // p(b_j|a_i) at (j, i)
    RealMatrix joint;              // p(a_i, b_j) at (j, i)
    RealVector input_eigenvalues;  // a_i
    RealVector output_eigenvalues; // b_j

    double total_mass() const { return joint.sum(); }
};

// Assembles the joint from explicitly given input probabilities.
JointDistribution make_joint(RealVector input_probs, const ConditionalMatrix& cond,
                             RealVector input_eigenvalues, RealVector output_eigenvalues);

// Extracts p(a_i) = <a_i| rho |a_i> from a state that commutes with the
// input eigenbasis projectors; a non-commuting input (off-diagonal part
// above 1e-10 in that basis) is a contract violation, not silently dephased.
JointDistribution make_joint(const DensityMatrix& input, const Spectrum& in_spec,
                             const ConditionalMatrix& cond, const Spectrum& out_spec);

// sum_ij p(a_i, b_j) f(a_i, b_j).
double joint_average(const JointDistribution& joint,
                     const std::function<double(double, double)>& f);

// Convenience form returning the average together with the assembled joint.
std::pair<double, JointDistribution> joint_average(
    const DensityMatrix& input, const Spectrum& in_spec, const ConditionalMatrix& cond,
    const Spectrum& out_spec, const std::function<double(double, double)>& f);

//=========================================================================
// DeltaHistogram
//=========================================================================

enum class DeltaSign { b_minus_a, a_minus_b };

struct DeltaBin {
    double delta;        // mass-weighted cluster center
    double probability;  // summed joint mass
};

struct DeltaHistogram {
    std::vector<DeltaBin> bins;  // centers strictly ascending, gaps > tolerance
    double cluster_tolerance;

    double total_mass() const;
    // Probability of the bin whose center lies within cluster_tolerance of
    // delta; absent when no bin matches.
    std::optional<double> probability_at(double delta) const;
};

// All d_in * d_out eigenvalue differences, sorted and single-linkage
// clustered: a gap wider than the tolerance starts a new bin.
DeltaHistogram delta_histogram(const JointDistribution& joint, DeltaSign sign,
                               double cluster_tolerance = kDeltaClusterTol);

//=========================================================================
// Monte-Carlo sampler
//=========================================================================

// Draws n trajectories (a_i from the input distribution, then b_j from the
// channel conditionals) and returns the empirical joint.  Columns that were
// never sampled reuse the exact conditionals so the invariants of the type
// still hold.  Deterministic per seed.
JointDistribution sample_trajectories(const DensityMatrix& input, const KrausChannel& c,
                                      const Spectrum& in_spec, const Spectrum& out_spec,
                                      std::int64_t n, std::uint64_t seed);

//=========================================================================
// Serialization
//=========================================================================

// CSV columns: i, j, a_i, b_j, p with 17-significant-digit rendering.
std::string joint_to_csv(const JointDistribution& joint);

// CSV columns: delta, probability.
std::string histogram_to_csv(const DeltaHistogram& hist);

}  // namespace fluctlab

#endif
