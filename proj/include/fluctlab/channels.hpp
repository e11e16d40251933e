#ifndef FLUCTLAB_CHANNELS_HPP
#define FLUCTLAB_CHANNELS_HPP

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "fluctlab/linalg.hpp"
#include "fluctlab/rng.hpp"

namespace fluctlab {

//=========================================================================
// KrausChannel
//=========================================================================

// A completely positive map in operator-sum form X -> sum_mu K_mu X K_mu^dagger.
// Each Kraus operator maps the input space (dim_in) to the output space
// (dim_out), i.e. has shape dim_out x dim_in.  Complete positivity is
// automatic from the representation; trace preservation and unitality are
// checked separately by validate().
class KrausChannel {
public:
    KrausChannel(Index dim_in, Index dim_out, std::vector<ComplexMatrix> ops);

    Index dim_in() const { return dim_in_; }
    Index dim_out() const { return dim_out_; }
    const std::vector<ComplexMatrix>& kraus() const { return ops_; }

private:
    Index dim_in_;
    Index dim_out_;
    std::vector<ComplexMatrix> ops_;
};

struct ChannelReport {
    double tp_defect;      // max entry of |sum K^dagger K - I_in|
    double unital_defect;  // max entry of |sum K K^dagger - (d_in/d_out) I_out|
    bool is_tp;
    bool is_unital;
};

// Defects are exact max entrywise moduli of the stated operator sums.  The
// unitality test uses the rectangular form sum K K^dagger = (d_in/d_out) I,
// which reduces to fixing the identity when d_in = d_out.
ChannelReport validate(const KrausChannel& c, double tol = kDefaultTol);

// The dual map under the Hilbert-Schmidt inner product: Kraus list
// {K_mu^dagger} with input and output dimensions swapped.
KrausChannel adjoint(const KrausChannel& c);

// Linear action on an arbitrary operator (no trace-preservation contract).
ComplexMatrix apply_operator(const KrausChannel& c, const ComplexMatrix& op);

// Action on a state; requires a trace-preserving channel.
DensityMatrix apply(const KrausChannel& c, const DensityMatrix& rho);

// outer after inner; Kraus list is all pairwise products.
KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner);

// Product channel on the tensor space, Kraus list {K_mu (x) L_nu}.
KrausChannel tensor(const KrausChannel& c1, const KrausChannel& c2);

//=========================================================================
// Standard channels
//=========================================================================

KrausChannel identity_channel(Index d);
KrausChannel unitary_channel(const ComplexMatrix& u);

// rho -> (1-p) rho + p I/2 on a qubit, p in [0,1].
KrausChannel depolarizing_channel(double p);

// Qubit phase damping with parameter lambda in [0,1]; unital.
KrausChannel phase_damping_channel(double lambda);

// Qubit amplitude damping with decay gamma in [0,1]; non-unital for gamma > 0.
KrausChannel amplitude_damping_channel(double gamma);

// Unitary swap on H_d (x) H_d.
KrausChannel swap_channel(Index d);

// Isometry V: the first dim_in columns of the dim_out-point discrete Fourier
// matrix, so every output basis vector is unbiased with respect to every
// image column: |<j|V|i>|^2 = 1/dim_out.  Requires dim_in <= dim_out.
KrausChannel mub_isometry_channel(Index dim_in, Index dim_out);

//=========================================================================
// Random channels (deterministic per Rng state)
//=========================================================================

// Haar-distributed unitary: QR of a complex Gaussian matrix with the
// diagonal phases of R absorbed into Q.
ComplexMatrix haar_unitary(Index d, Rng& rng);

// Gaussian Hermitian matrix (G + G^dagger)/2.
HermitianOperator random_hermitian(Index d, Rng& rng);

KrausChannel haar_unitary_channel(Index d, Rng& rng);

// Convex mixture of n Haar unitaries with uniform-simplex weights; always
// bistochastic.  For d > 2 this samples a strict subclass of the unital
// channels, which is sufficient for identity testing.
KrausChannel mixture_of_unitaries_channel(Index d, int n, Rng& rng);

// Generic CPTP map dim_in -> dim_out obtained from a random isometry into
// dim_out x env, traced over the environment; env Kraus operators.
KrausChannel stinespring_channel(Index dim_in, Index dim_out, Index env, Rng& rng);

//=========================================================================
// Interchange format
//=========================================================================

// { "dim_in": int, "dim_out": int,
//   "kraus": [ [ [ [re, im], ... ] per row, ... ] per operator ] }
nlohmann::json channel_to_json(const KrausChannel& c);

// Ingest re-validates and rejects tp_defect > 1e-6, reporting the exact
// defect in the error message.
KrausChannel channel_from_json(const nlohmann::json& j);

void save_channel(const KrausChannel& c, const std::filesystem::path& path);
KrausChannel load_channel(const std::filesystem::path& path);

// Shared by channel, measurement, and observable serialization: a complex
// matrix as an array of rows of [re, im] pairs.
nlohmann::json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j, const char* what);

}  // namespace fluctlab

#endif
