#include "fluctlab/twopoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluctlab/util.hpp"

namespace fluctlab {

namespace {

// log(Z) and the per-label probabilities via the usual max-shift, so the
// weights live in (0, 1].
struct ShiftedWeights {
    RealVector probs;
    double log_partition;
};

ShiftedWeights gibbs_weights(const RealVector& eigenvalues, double param) {
    const Index d = eigenvalues.size();
    double shift = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d; ++i) shift = std::min(shift, param * eigenvalues(i));
    RealVector w(d);
    double total = 0.0;
    for (Index i = 0; i < d; ++i) {
        w(i) = std::exp(-(param * eigenvalues(i) - shift));
        total += w(i);
    }
    ShiftedWeights out;
    out.probs = w / total;
    out.log_partition = -shift + std::log(total);
    return out;
}

}  // namespace

GibbsState gibbs(const HermitianOperator& a, double param) {
    if (!std::isfinite(param)) throw DomainError("gibbs: parameter must be finite");
    Spectrum spec = spectral_decompose(a);
    ShiftedWeights w = gibbs_weights(spec.eigenvalues, param);

    if (w.log_partition > 700.0)
        throw RangeError(
            "gibbs: partition function overflows (ln Z = " + format_g17(w.log_partition) +
            "); shift the generator spectrum toward zero -- subtracting c*I rescales Z by "
            "e^{-param*c} and leaves the state unchanged");
    const double z = std::exp(w.log_partition);

    ComplexMatrix density_mat =
        spec.eigenvectors * w.probs.asDiagonal() * spec.eigenvectors.adjoint();
    GibbsState state{a,
                     param,
                     std::move(spec),
                     w.probs,
                     z,
                     w.log_partition,
                     std::nullopt,
                     DensityMatrix(0.5 * (density_mat + density_mat.adjoint().eval()))};
    if (param != 0.0) state.free_energy = -w.log_partition / param;
    return state;
}

ConditionalMatrix::ConditionalMatrix(RealMatrix probs) : probs_(std::move(probs)) {
    if (probs_.rows() < 1 || probs_.cols() < 1)
        throw StructuralError("ConditionalMatrix: empty table");
    const double lo = probs_.minCoeff();
    const double hi = probs_.maxCoeff();
    if (lo < -1e-12 || hi > 1.0 + 1e-12)
        throw StructuralError("ConditionalMatrix: entry outside [0,1], range [" +
                              format_g17(lo) + ", " + format_g17(hi) + "]");
    for (Index i = 0; i < probs_.cols(); ++i) {
        const double s = probs_.col(i).sum();
        if (std::abs(s - 1.0) > 1e-10)
            throw StructuralError("ConditionalMatrix: column " + std::to_string(i) +
                                  " sums to " + format_g17(s));
    }
}

RealMatrix transition_matrix(const KrausChannel& c, const ComplexMatrix& in_basis,
                             const ComplexMatrix& out_basis) {
    if (in_basis.rows() != c.dim_in() || out_basis.rows() != c.dim_out())
        throw ShapeError("transition_matrix: basis dimensions do not match the channel");
    RealMatrix probs = RealMatrix::Zero(out_basis.cols(), in_basis.cols());
    for (const auto& k : c.kraus()) {
        const ComplexMatrix w = out_basis.adjoint() * k * in_basis;
        probs += w.cwiseAbs2();
    }
    return probs;
}

ConditionalMatrix conditional_probs(const KrausChannel& c, const Spectrum& in_spec,
                                    const Spectrum& out_spec) {
    if (in_spec.dim() != c.dim_in() || out_spec.dim() != c.dim_out())
        throw ShapeError("conditional_probs: spectra do not match channel dimensions");
    const ChannelReport report = validate(c);
    if (!report.is_tp)
        throw ContractError("conditional_probs: channel is not trace-preserving (tp_defect = " +
                            format_g17(report.tp_defect) + ")");
    return ConditionalMatrix(transition_matrix(c, in_spec.eigenvectors, out_spec.eigenvectors));
}

JointDistribution make_joint(RealVector input_probs, const ConditionalMatrix& cond,
                             RealVector input_eigenvalues, RealVector output_eigenvalues) {
    if (input_probs.size() != cond.inputs() ||
        input_eigenvalues.size() != cond.inputs() ||
        output_eigenvalues.size() != cond.outputs())
        throw ShapeError("make_joint: inconsistent sizes");
    RealMatrix joint = cond.probs() * input_probs.asDiagonal();
    JointDistribution out{std::move(input_probs), cond, std::move(joint),
                          std::move(input_eigenvalues), std::move(output_eigenvalues)};
    const double mass = out.total_mass();
    if (std::abs(mass - 1.0) > 1e-10)
        throw StructuralError("make_joint: total mass " + format_g17(mass));
    return out;
}

JointDistribution make_joint(const DensityMatrix& input, const Spectrum& in_spec,
                             const ConditionalMatrix& cond, const Spectrum& out_spec) {
    if (input.dim() != in_spec.dim())
        throw ShapeError("make_joint: input state does not match the input spectrum");
    const ComplexMatrix in_diag =
        in_spec.eigenvectors.adjoint() * input.matrix() * in_spec.eigenvectors;
    double off = 0.0;
    for (Index i = 0; i < in_diag.rows(); ++i)
        for (Index j = 0; j < in_diag.cols(); ++j)
            if (i != j) off = std::max(off, std::abs(in_diag(i, j)));
    if (off > 1e-10)
        throw ContractError(
            "make_joint: input state is not diagonal in the input eigenbasis "
            "(max off-diagonal = " + format_g17(off) + ")");
    RealVector probs(in_diag.rows());
    for (Index i = 0; i < in_diag.rows(); ++i) probs(i) = in_diag(i, i).real();
    return make_joint(std::move(probs), cond, in_spec.eigenvalues, out_spec.eigenvalues);
}

double joint_average(const JointDistribution& joint,
                     const std::function<double(double, double)>& f) {
    double acc = 0.0;
    for (Index i = 0; i < joint.joint.cols(); ++i)
        for (Index j = 0; j < joint.joint.rows(); ++j)
            acc += joint.joint(j, i) * f(joint.input_eigenvalues(i), joint.output_eigenvalues(j));
    return acc;
}

std::pair<double, JointDistribution> joint_average(
    const DensityMatrix& input, const Spectrum& in_spec, const ConditionalMatrix& cond,
    const Spectrum& out_spec, const std::function<double(double, double)>& f) {
    JointDistribution joint = make_joint(input, in_spec, cond, out_spec);
    const double value = joint_average(joint, f);
    return {value, std::move(joint)};
}

double DeltaHistogram::total_mass() const {
    double acc = 0.0;
    for (const auto& bin : bins) acc += bin.probability;
    return acc;
}

std::optional<double> DeltaHistogram::probability_at(double delta) const {
    for (const auto& bin : bins)
        if (std::abs(bin.delta - delta) <= cluster_tolerance) return bin.probability;
    return std::nullopt;
}

DeltaHistogram delta_histogram(const JointDistribution& joint, DeltaSign sign,
                               double cluster_tolerance) {
    if (cluster_tolerance <= 0.0)
        throw DomainError("delta_histogram: cluster tolerance must be positive");
    struct Entry {
        double delta;
        double mass;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(joint.joint.size()));
    for (Index i = 0; i < joint.joint.cols(); ++i)
        for (Index j = 0; j < joint.joint.rows(); ++j) {
            const double d = joint.output_eigenvalues(j) - joint.input_eigenvalues(i);
            entries.push_back({sign == DeltaSign::b_minus_a ? d : -d, joint.joint(j, i)});
        }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.delta < b.delta; });

    DeltaHistogram hist{{}, cluster_tolerance};
    std::size_t start = 0;
    while (start < entries.size()) {
        std::size_t end = start + 1;
        while (end < entries.size() &&
               entries[end].delta - entries[end - 1].delta <= cluster_tolerance)
            ++end;
        double mass = 0.0, weighted = 0.0;
        for (std::size_t k = start; k < end; ++k) {
            mass += entries[k].mass;
            weighted += entries[k].mass * entries[k].delta;
        }
        // Mass-weighted centers; clusters with no contributing mass are not
        // events and produce no bin.
        if (mass > 0.0) hist.bins.push_back({weighted / mass, mass});
        start = end;
    }
    for (std::size_t k = 1; k < hist.bins.size(); ++k)
        if (hist.bins[k].delta - hist.bins[k - 1].delta <= cluster_tolerance)
            throw StructuralError("delta_histogram: cluster centers closer than the tolerance");
    return hist;
}

JointDistribution sample_trajectories(const DensityMatrix& input, const KrausChannel& c,
                                      const Spectrum& in_spec, const Spectrum& out_spec,
                                      std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("sample_trajectories: need n >= 1");
    const ConditionalMatrix cond = conditional_probs(c, in_spec, out_spec);
    const JointDistribution exact = make_joint(input, in_spec, cond, out_spec);

    const Index di = exact.input_probs.size();
    const Index dj = exact.output_eigenvalues.size();
    Eigen::MatrixX<std::int64_t> counts = Eigen::MatrixX<std::int64_t>::Zero(dj, di);
    Rng rng(seed);
    auto draw = [&](const auto& weights, double total) {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        Index last = weights.size() - 1;
        for (Index k = 0; k < weights.size(); ++k) {
            acc += weights(k);
            if (u < acc) return k;
        }
        return last;
    };
    for (std::int64_t t = 0; t < n; ++t) {
        const Index i = draw(exact.input_probs, 1.0);
        const Index j = draw(exact.conditional.probs().col(i),
                             exact.conditional.probs().col(i).sum());
        ++counts(j, i);
    }

    RealVector marginal = RealVector::Zero(di);
    RealMatrix empirical_cond(dj, di);
    const double dn = static_cast<double>(n);
    for (Index i = 0; i < di; ++i) {
        const std::int64_t col = counts.col(i).sum();
        marginal(i) = static_cast<double>(col) / dn;
        if (col > 0)
            empirical_cond.col(i) =
                counts.col(i).cast<double>() / static_cast<double>(col);
        else  // unsampled input label: keep the exact conditionals
            empirical_cond.col(i) = exact.conditional.probs().col(i);
    }
    return make_joint(std::move(marginal), ConditionalMatrix(std::move(empirical_cond)),
                      exact.input_eigenvalues, exact.output_eigenvalues);
}

std::string joint_to_csv(const JointDistribution& joint) {
    std::string out = "i,j,a_i,b_j,p\n";
    for (Index i = 0; i < joint.joint.cols(); ++i)
        for (Index j = 0; j < joint.joint.rows(); ++j) {
            out += std::to_string(i) + "," + std::to_string(j) + "," +
                   format_g17(joint.input_eigenvalues(i)) + "," +
                   format_g17(joint.output_eigenvalues(j)) + "," +
                   format_g17(joint.joint(j, i)) + "\n";
        }
    return out;
}

std::string histogram_to_csv(const DeltaHistogram& hist) {
    std::string out = "delta,probability\n";
    for (const auto& bin : hist.bins)
        out += format_g17(bin.delta) + "," + format_g17(bin.probability) + "\n";
    return out;
}

}  // namespace fluctlab
