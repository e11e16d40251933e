#include "fluctlab/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluctlab/util.hpp"

namespace fluctlab {

namespace {

double relative_gap_of(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

void require_tp(const ChannelReport& report, const char* who) {
    if (!report.is_tp)
        throw ContractError(std::string(who) + ": channel is not trace-preserving (tp_defect = " +
                            format_g17(report.tp_defect) + ")");
}

void require_bistochastic(const ChannelReport& report, const char* who) {
    require_tp(report, who);
    if (!report.is_unital)
        throw ContractError(std::string(who) +
                            ": channel is not bistochastic (unital_defect = " +
                            format_g17(report.unital_defect) +
                            "); the adjoint map is a channel only in that case");
}

}  // namespace

JarzynskiReport jarzynski_check(const KrausChannel& c, const HermitianOperator& a,
                                const HermitianOperator& b, double alpha, double beta,
                                double tol) {
    if (tol <= 0.0) throw DomainError("jarzynski_check: tolerance must be positive");
    const ChannelReport report = validate(c);
    require_tp(report, "jarzynski_check");
    if (a.dim() != c.dim_in() || b.dim() != c.dim_out())
        throw ShapeError("jarzynski_check: observable dimensions do not match the channel");

    const GibbsState in = gibbs(a, alpha);
    const Spectrum out_spec = spectral_decompose(b);
    const ConditionalMatrix cond = conditional_probs(c, in.spectrum, out_spec);

    // Common spectral shifts; the compensating factor multiplies both sides,
    // so the relative gap is computed on the shifted pair.
    double shift_a = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < in.spectrum.dim(); ++i)
        shift_a = std::min(shift_a, alpha * in.spectrum.eigenvalues(i));
    double shift_b = std::numeric_limits<double>::infinity();
    double sum_b = 0.0;
    for (Index j = 0; j < out_spec.dim(); ++j)
        shift_b = std::min(shift_b, beta * out_spec.eigenvalues(j));
    for (Index j = 0; j < out_spec.dim(); ++j)
        sum_b += std::exp(-(beta * out_spec.eigenvalues(j) - shift_b));
    double sum_a = 0.0;
    for (Index i = 0; i < in.spectrum.dim(); ++i)
        sum_a += std::exp(-(alpha * in.spectrum.eigenvalues(i) - shift_a));

    const JointDistribution joint =
        make_joint(in.probabilities, cond, in.spectrum.eigenvalues, out_spec.eigenvalues);
    const double lhs_shifted = joint_average(joint, [&](double ai, double bj) {
        return std::exp((alpha * ai - shift_a) - (beta * bj - shift_b));
    });
    const double ratio = static_cast<double>(c.dim_in()) / static_cast<double>(c.dim_out());
    const double rhs_shifted = ratio * sum_b / sum_a;

    const double factor = std::exp(shift_a - shift_b);
    JarzynskiReport out{};
    out.lhs = lhs_shifted * factor;
    out.rhs = rhs_shifted * factor;
    out.relative_gap = relative_gap_of(lhs_shifted, rhs_shifted);
    out.tolerance = tol;
    out.holds = out.relative_gap <= tol;
    out.channel_report = report;
    return out;
}

JarzynskiReport tasaki_two_temperature(const KrausChannel& c, const HermitianOperator& h0,
                                       const HermitianOperator& h1, double beta0, double beta1,
                                       double tol) {
    if (c.dim_in() != c.dim_out())
        throw ShapeError("tasaki_two_temperature: channel must be square");
    return jarzynski_check(c, h0, h1, beta0, beta1, tol);
}

WorkStatistics work_statistics(const KrausChannel& c, const HermitianOperator& h0,
                               const HermitianOperator& h1, double beta) {
    if (beta == 0.0)
        throw DomainError("work_statistics: free energies are undefined at beta = 0");
    const ChannelReport report = validate(c);
    require_tp(report, "work_statistics");
    if (c.dim_in() != c.dim_out())
        throw ShapeError("work_statistics: channel must be square");
    if (h0.dim() != c.dim_in() || h1.dim() != c.dim_out())
        throw ShapeError("work_statistics: Hamiltonian dimensions do not match the channel");

    const GibbsState g0 = gibbs(h0, beta);
    const GibbsState g1 = gibbs(h1, beta);
    const ConditionalMatrix cond = conditional_probs(c, g0.spectrum, g1.spectrum);
    const JointDistribution joint =
        make_joint(g0.probabilities, cond, g0.spectrum.eigenvalues, g1.spectrum.eigenvalues);

    WorkStatistics out{};
    out.mean_work = joint_average(joint, [](double a, double b) { return b - a; });
    out.jarzynski_average =
        joint_average(joint, [&](double a, double b) { return std::exp(-beta * (b - a)); });
    out.delta_F = (g0.log_partition - g1.log_partition) / beta;
    out.second_law_gap = out.mean_work - out.delta_F;
    out.channel_report = report;
    return out;
}

namespace {

struct MatchedBins {
    // Pairs (forward bin index or -1, backward bin index or -1).
    std::vector<std::pair<int, int>> pairs;
};

// Pair forward bins at Delta with backward bins at -Delta, nearest center
// within the matching tolerance.
MatchedBins match_histograms(const DeltaHistogram& fwd, const DeltaHistogram& bwd,
                             double match_tol) {
    MatchedBins out;
    std::vector<bool> bwd_used(bwd.bins.size(), false);
    for (std::size_t f = 0; f < fwd.bins.size(); ++f) {
        const double target = -fwd.bins[f].delta;
        int best = -1;
        double best_dist = match_tol;
        for (std::size_t g = 0; g < bwd.bins.size(); ++g) {
            if (bwd_used[g]) continue;
            const double dist = std::abs(bwd.bins[g].delta - target);
            if (dist <= best_dist) {
                best_dist = dist;
                best = static_cast<int>(g);
            }
        }
        if (best >= 0) bwd_used[static_cast<std::size_t>(best)] = true;
        out.pairs.emplace_back(static_cast<int>(f), best);
    }
    for (std::size_t g = 0; g < bwd.bins.size(); ++g)
        if (!bwd_used[g]) out.pairs.emplace_back(-1, static_cast<int>(g));
    return out;
}

}  // namespace

CrooksReport crooks_check(const KrausChannel& c, const HermitianOperator& a,
                          const HermitianOperator& b, double alpha, double tol) {
    if (tol <= 0.0) throw DomainError("crooks_check: tolerance must be positive");
    const ChannelReport report = validate(c);
    require_bistochastic(report, "crooks_check");
    if (c.dim_in() != c.dim_out()) throw ShapeError("crooks_check: channel must be square");
    if (a.dim() != c.dim_in() || b.dim() != c.dim_in())
        throw ShapeError("crooks_check: observable dimensions do not match the channel");

    const GibbsState ga = gibbs(a, alpha);
    const GibbsState gb = gibbs(b, alpha);
    const KrausChannel adj = adjoint(c);

    const ConditionalMatrix cond_f = conditional_probs(c, ga.spectrum, gb.spectrum);
    const JointDistribution joint_f =
        make_joint(ga.probabilities, cond_f, ga.spectrum.eigenvalues, gb.spectrum.eigenvalues);
    const ConditionalMatrix cond_b = conditional_probs(adj, gb.spectrum, ga.spectrum);
    const JointDistribution joint_b =
        make_joint(gb.probabilities, cond_b, gb.spectrum.eigenvalues, ga.spectrum.eigenvalues);

    CrooksReport out{delta_histogram(joint_f, DeltaSign::b_minus_a),
                     delta_histogram(joint_b, DeltaSign::b_minus_a),
                     {},
                     0.0,
                     0.0,
                     false,
                     tol,
                     report};

    const double za = ga.partition_function;
    const double zb = gb.partition_function;
    const MatchedBins matched =
        match_histograms(out.forward, out.backward, out.forward.cluster_tolerance);
    for (const auto& [f, g] : matched.pairs) {
        double lhs = 0.0, rhs = 0.0;
        if (f >= 0) {
            const auto& bin = out.forward.bins[static_cast<std::size_t>(f)];
            lhs = std::exp(-alpha * bin.delta) * za * bin.probability;
            if (g < 0) out.unmatched_mass += bin.probability;
        }
        if (g >= 0) {
            const auto& bin = out.backward.bins[static_cast<std::size_t>(g)];
            rhs = zb * bin.probability;
            if (f < 0) out.unmatched_mass += bin.probability;
        }
        out.per_bin_residuals.push_back(std::abs(lhs - rhs));
    }
    for (const double r : out.per_bin_residuals) out.max_residual = std::max(out.max_residual, r);
    out.holds = out.max_residual <= tol;
    return out;
}

CrooksWorkForm crooks_work_form(const KrausChannel& c, const HermitianOperator& h0,
                                const HermitianOperator& h1, double beta, double tol) {
    if (beta == 0.0)
        throw DomainError("crooks_work_form: free energies are undefined at beta = 0");
    const CrooksReport detail = crooks_check(c, h0, h1, beta, kDefaultTol);

    const GibbsState g0 = gibbs(h0, beta);
    const GibbsState g1 = gibbs(h1, beta);
    CrooksWorkForm out{};
    out.tolerance = tol;
    out.delta_F = (g0.log_partition - g1.log_partition) / beta;
    out.channel_report = detail.channel_report;

    constexpr double support_floor = 1e-12;
    const MatchedBins matched =
        match_histograms(detail.forward, detail.backward, detail.forward.cluster_tolerance);
    for (const auto& [f, g] : matched.pairs) {
        const double pf =
            f >= 0 ? detail.forward.bins[static_cast<std::size_t>(f)].probability : 0.0;
        const double pb =
            g >= 0 ? detail.backward.bins[static_cast<std::size_t>(g)].probability : 0.0;
        if (pf <= support_floor && pb <= support_floor) continue;
        if (pf <= support_floor || pb <= support_floor) {
            ++out.excluded_bins;
            continue;
        }
        const double w = detail.forward.bins[static_cast<std::size_t>(f)].delta;
        CrooksWorkRow row{w, pf, pb, pf / pb, std::exp(beta * (w - out.delta_F))};
        out.max_relative_gap =
            std::max(out.max_relative_gap, std::abs(row.ratio - row.expected) / row.expected);
        out.rows.push_back(row);
    }
    out.holds = out.max_relative_gap <= tol;
    return out;
}

HeatExchangeReport heat_exchange_check(const KrausChannel& psi, const HermitianOperator& a,
                                       const HermitianOperator& b, double alpha, double beta,
                                       double tol) {
    if (tol <= 0.0) throw DomainError("heat_exchange_check: tolerance must be positive");
    const Index da = a.dim();
    const Index db = b.dim();
    if (psi.dim_in() != da * db || psi.dim_out() != da * db)
        throw ShapeError("heat_exchange_check: channel must act on the " + std::to_string(da) +
                         "x" + std::to_string(db) + " product space");
    const ChannelReport report = validate(psi);
    require_tp(report, "heat_exchange_check");

    const GibbsState ga = gibbs(a, alpha);
    const GibbsState gb = gibbs(b, beta);
    const ComplexMatrix basis = tensor_product(ga.spectrum.eigenvectors, gb.spectrum.eigenvectors);
    const RealMatrix trans = transition_matrix(psi, basis, basis);

    HeatExchangeReport out{};
    out.tolerance = tol;
    out.unital = report.is_unital;
    out.channel_report = report;
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < db; ++j) {
            const double p_in = ga.probabilities(i) * gb.probabilities(j);
            const Index col = i * db + j;
            for (Index k = 0; k < da; ++k)
                for (Index l = 0; l < db; ++l) {
                    const double mass = p_in * trans(k * db + l, col);
                    const double da_change =
                        ga.spectrum.eigenvalues(k) - ga.spectrum.eigenvalues(i);
                    const double db_change =
                        gb.spectrum.eigenvalues(l) - gb.spectrum.eigenvalues(j);
                    out.identity_average +=
                        mass * std::exp(-alpha * da_change - beta * db_change);
                    out.delta_S += mass * (alpha * da_change + beta * db_change);
                    out.mean_change_a += mass * da_change;
                    out.mean_change_b += mass * db_change;
                }
        }
    if (out.unital) out.identity_holds = std::abs(out.identity_average - 1.0) <= tol;
    return out;
}

double entropy_production(const HeatExchangeReport& report) {
    if (!report.unital)
        throw ContractError(
            "entropy_production: report was produced with a non-unital channel");
    const double jensen = std::exp(-report.delta_S);
    if (jensen > 1.0 + 1e-9)
        throw ContractError("entropy_production: exp(-delta_S) = " + format_g17(jensen) +
                            " violates the Jensen bound");
    return report.delta_S;
}

//=========================================================================
// Serialization
//=========================================================================

nlohmann::json to_json(const ChannelReport& r) {
    return {{"tp_defect", r.tp_defect},
            {"unital_defect", r.unital_defect},
            {"is_tp", r.is_tp},
            {"is_unital", r.is_unital}};
}

nlohmann::json to_json(const JarzynskiReport& r) {
    return {{"lhs", r.lhs},
            {"rhs", r.rhs},
            {"relative_gap", r.relative_gap},
            {"holds", r.holds},
            {"tolerance", r.tolerance},
            {"channel", to_json(r.channel_report)}};
}

nlohmann::json to_json(const WorkStatistics& r) {
    return {{"mean_work", r.mean_work},
            {"delta_F", r.delta_F},
            {"jarzynski_average", r.jarzynski_average},
            {"second_law_gap", r.second_law_gap},
            {"channel", to_json(r.channel_report)}};
}

namespace {

nlohmann::json histogram_to_json(const DeltaHistogram& h) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& bin : h.bins) bins.push_back({{"delta", bin.delta}, {"p", bin.probability}});
    return {{"bins", std::move(bins)}, {"cluster_tolerance", h.cluster_tolerance}};
}

}  // namespace

nlohmann::json to_json(const CrooksReport& r) {
    return {{"forward", histogram_to_json(r.forward)},
            {"backward", histogram_to_json(r.backward)},
            {"per_bin_residuals", r.per_bin_residuals},
            {"max_residual", r.max_residual},
            {"unmatched_mass", r.unmatched_mass},
            {"holds", r.holds},
            {"tolerance", r.tolerance},
            {"channel", to_json(r.channel_report)}};
}

nlohmann::json to_json(const CrooksWorkForm& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"w", row.w},
                        {"p_forward", row.p_forward},
                        {"p_backward", row.p_backward},
                        {"ratio", row.ratio},
                        {"expected", row.expected}});
    return {{"rows", std::move(rows)},
            {"excluded_bins", r.excluded_bins},
            {"max_relative_gap", r.max_relative_gap},
            {"holds", r.holds},
            {"tolerance", r.tolerance},
            {"delta_F", r.delta_F},
            {"channel", to_json(r.channel_report)}};
}

nlohmann::json to_json(const HeatExchangeReport& r) {
    nlohmann::json j{{"identity_average", r.identity_average},
                     {"delta_S", r.delta_S},
                     {"mean_change_a", r.mean_change_a},
                     {"mean_change_b", r.mean_change_b},
                     {"unital", r.unital},
                     {"tolerance", r.tolerance},
                     {"channel", to_json(r.channel_report)}};
    if (r.identity_holds) j["identity_holds"] = *r.identity_holds;
    return j;
}

}  // namespace fluctlab
