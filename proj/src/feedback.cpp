#include "fluctlab/feedback.hpp"

#include <cmath>

#include "fluctlab/util.hpp"

namespace fluctlab {

MeasurementFlags validate_measurement(const std::vector<ComplexMatrix>& ops, double tol) {
    if (tol <= 0.0) throw DomainError("validate_measurement: tolerance must be positive");
    if (ops.empty()) throw StructuralError("validate_measurement: empty operator list");
    const Index d = ops.front().rows();
    ComplexMatrix completeness = ComplexMatrix::Zero(d, d);
    ComplexMatrix dual = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].rows() != d || ops[i].cols() != d)
            throw StructuralError("validate_measurement: operator " + std::to_string(i) +
                                  " is not " + std::to_string(d) + "x" + std::to_string(d));
        require_finite(ops[i], "validate_measurement");
        completeness += ops[i].adjoint() * ops[i];
        dual += ops[i] * ops[i].adjoint();
    }
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    MeasurementFlags flags{};
    flags.completeness_defect = max_abs((completeness - id).eval());
    flags.pclr_defect = max_abs((dual - id).eval());
    flags.complete = flags.completeness_defect <= tol;
    flags.pclr_satisfied = flags.pclr_defect <= tol;
    return flags;
}

MeasurementFlags validate_measurement(const Measurement& m, double tol) {
    return validate_measurement(m.operators(), tol);
}

Measurement::Measurement(std::vector<ComplexMatrix> ops, double tol) : ops_(std::move(ops)) {
    const MeasurementFlags flags = validate_measurement(ops_, tol);
    if (!flags.complete)
        throw StructuralError("Measurement: completeness defect " +
                              format_g17(flags.completeness_defect) + " exceeds " +
                              format_g17(tol));
    dim_ = ops_.front().rows();
    completeness_defect_ = flags.completeness_defect;
    pclr_defect_ = flags.pclr_defect;
    pclr_satisfied_ = flags.pclr_satisfied;
}

Measurement random_complete_measurement(Index dim, Index outcomes, Rng& rng) {
    if (outcomes < 1) throw DomainError("random_complete_measurement: need outcomes >= 1");
    // Normalize raw Gaussian blocks by S^{-1/2}, S = sum G^dagger G.
    std::vector<ComplexMatrix> raw;
    raw.reserve(static_cast<std::size_t>(outcomes));
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (Index m = 0; m < outcomes; ++m) {
        ComplexMatrix g(dim, dim);
        for (Index j = 0; j < dim; ++j)
            for (Index i = 0; i < dim; ++i) g(i, j) = rng.normal_complex();
        s += g.adjoint() * g;
        raw.push_back(std::move(g));
    }
    const HermitianOperator s_op(0.5 * (s + s.adjoint().eval()));
    const ComplexMatrix s_inv_sqrt =
        operator_function(s_op, [](double x) { return 1.0 / std::sqrt(x); }).matrix();
    std::vector<ComplexMatrix> ops;
    ops.reserve(raw.size());
    for (auto& g : raw) ops.push_back(g * s_inv_sqrt);
    return Measurement(std::move(ops));
}

Measurement random_projective_measurement(Index dim, Rng& rng) {
    const ComplexMatrix u = haar_unitary(dim, rng);
    std::vector<ComplexMatrix> ops;
    ops.reserve(static_cast<std::size_t>(dim));
    for (Index k = 0; k < dim; ++k)
        ops.push_back(u.col(k) * u.col(k).adjoint());
    return Measurement(std::move(ops));
}

Measurement random_scaled_unitary_measurement(Index dim, Index outcomes, Rng& rng) {
    if (outcomes < 1) throw DomainError("random_scaled_unitary_measurement: need outcomes >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(outcomes));
    std::vector<ComplexMatrix> ops;
    ops.reserve(static_cast<std::size_t>(outcomes));
    for (Index k = 0; k < outcomes; ++k) ops.push_back(scale * haar_unitary(dim, rng));
    return Measurement(std::move(ops));
}

ErrorModel::ErrorModel(RealMatrix r) : r_(std::move(r)) {
    if (r_.rows() < 1 || r_.cols() < 1) throw StructuralError("ErrorModel: empty matrix");
    if (r_.minCoeff() < 0.0 || r_.maxCoeff() > 1.0)
        throw StructuralError("ErrorModel: entries must lie in [0,1]");
    for (Index mu = 0; mu < r_.rows(); ++mu) {
        const double s = r_.row(mu).sum();
        if (std::abs(s - 1.0) > 1e-12)
            throw StructuralError("ErrorModel: row " + std::to_string(mu) + " sums to " +
                                  format_g17(s));
    }
}

void validate_protocol(const FeedbackProtocol& p) {
    const Index m = p.measurement.outcomes();
    if (static_cast<Index>(p.per_outcome_channels.size()) != m)
        throw StructuralError("FeedbackProtocol: " +
                              std::to_string(p.per_outcome_channels.size()) +
                              " channels for " + std::to_string(m) + " outcomes");
    if (static_cast<Index>(p.per_outcome_observables.size()) != m)
        throw StructuralError("FeedbackProtocol: " +
                              std::to_string(p.per_outcome_observables.size()) +
                              " observables for " + std::to_string(m) + " outcomes");
    const Index d = p.first_channel.dim_in();
    if (p.first_channel.dim_out() != d)
        throw StructuralError("FeedbackProtocol: first channel must be square");
    if (p.measurement.dim() != d || p.input_generator.dim() != d)
        throw StructuralError("FeedbackProtocol: all stages must share one dimension");
    for (const auto& c : p.per_outcome_channels)
        if (c.dim_in() != d || c.dim_out() != d)
            throw StructuralError("FeedbackProtocol: per-outcome channel dimension mismatch");
    for (const auto& obs : p.per_outcome_observables)
        if (obs.dim() != d)
            throw StructuralError("FeedbackProtocol: per-outcome observable dimension mismatch");
    if (p.error_model &&
        (p.error_model->actual_outcomes() != m || p.error_model->registered_outcomes() != m))
        throw StructuralError("FeedbackProtocol: error model must be " + std::to_string(m) +
                              "x" + std::to_string(m));
    if (!std::isfinite(p.param)) throw StructuralError("FeedbackProtocol: parameter not finite");
}

MutualInformation mutual_information(const RealMatrix& joint) {
    if (joint.minCoeff() < -1e-15)
        throw ContractError("mutual_information: negative joint entry " +
                            format_g17(joint.minCoeff()));
    const double mass = joint.sum();
    if (std::abs(mass - 1.0) > 1e-10)
        throw ContractError("mutual_information: joint mass " + format_g17(mass));
    const RealVector row = joint.rowwise().sum();
    const RealVector col = joint.colwise().sum();
    MutualInformation out{RealMatrix::Zero(joint.rows(), joint.cols()), 0.0};
    for (Index mu = 0; mu < joint.rows(); ++mu)
        for (Index nu = 0; nu < joint.cols(); ++nu) {
            const double p = joint(mu, nu);
            if (p <= 0.0) continue;  // zero-mass cells carry no weight
            out.pointwise(mu, nu) = std::log(p / (row(mu) * col(nu)));
            out.average += p * out.pointwise(mu, nu);
        }
    if (out.average < -1e-12)
        throw StructuralError("mutual_information: average " + format_g17(out.average) +
                              " below -1e-12");
    return out;
}

ProtocolResult run_protocol(const FeedbackProtocol& p) {
    validate_protocol(p);
    const ChannelReport first_report = validate(p.first_channel);
    if (!first_report.is_tp)
        throw ContractError("run_protocol: first channel is not trace-preserving (tp_defect = " +
                            format_g17(first_report.tp_defect) + ")");
    for (std::size_t n = 0; n < p.per_outcome_channels.size(); ++n) {
        const ChannelReport r = validate(p.per_outcome_channels[n]);
        if (!r.is_tp)
            throw ContractError("run_protocol: per-outcome channel " + std::to_string(n) +
                                " is not trace-preserving (tp_defect = " +
                                format_g17(r.tp_defect) + ")");
    }

    const Index m = p.measurement.outcomes();
    const Index d = p.first_channel.dim_in();
    const GibbsState in = gibbs(p.input_generator, p.param);

    std::vector<GibbsState> out_states;
    out_states.reserve(static_cast<std::size_t>(m));
    for (const auto& obs : p.per_outcome_observables) out_states.push_back(gibbs(obs, p.param));

    auto r_entry = [&](Index mu, Index nu) -> double {
        if (p.error_model) return (*p.error_model)(mu, nu);
        return mu == nu ? 1.0 : 0.0;
    };

    // Conditionals p(b_j^{(nu)} | a_i, mu) factored over the Kraus lists:
    // sum over |( V_nu^dagger L N_mu K V_A )_{ji}|^2.
    std::vector<ComplexMatrix> first_cols;  // K V_A per first-stage Kraus op
    first_cols.reserve(p.first_channel.kraus().size());
    for (const auto& k : p.first_channel.kraus()) first_cols.push_back(k * in.spectrum.eigenvectors);

    std::vector<RealMatrix> cond(static_cast<std::size_t>(m * m));
    for (Index nu = 0; nu < m; ++nu) {
        const ComplexMatrix& v_nu = out_states[static_cast<std::size_t>(nu)].spectrum.eigenvectors;
        for (Index mu = 0; mu < m; ++mu) {
            if (r_entry(mu, nu) == 0.0 && p.error_model) {
                // zero readout probability: the slice carries no mass
                cond[static_cast<std::size_t>(mu * m + nu)] = RealMatrix::Zero(d, d);
                continue;
            }
            if (!p.error_model && mu != nu) {
                cond[static_cast<std::size_t>(mu * m + nu)] = RealMatrix::Zero(d, d);
                continue;
            }
            RealMatrix table = RealMatrix::Zero(d, d);
            for (const auto& l :
                 p.per_outcome_channels[static_cast<std::size_t>(nu)].kraus()) {
                const ComplexMatrix left =
                    v_nu.adjoint() * l * p.measurement.operators()[static_cast<std::size_t>(mu)];
                for (const auto& kv : first_cols) table += (left * kv).cwiseAbs2();
            }
            cond[static_cast<std::size_t>(mu * m + nu)] = std::move(table);
        }
    }

    ProtocolResult res{};
    res.outcomes = m;
    res.joint.resize(static_cast<std::size_t>(m * m));
    res.normalization = 0.0;
    res.generalized_average = 0.0;
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu) {
            const double r = r_entry(mu, nu);
            RealMatrix slice = RealMatrix::Zero(d, d);
            if (r > 0.0) {
                const RealMatrix& table = cond[static_cast<std::size_t>(mu * m + nu)];
                for (Index i = 0; i < d; ++i)
                    slice.col(i) = in.probabilities(i) * r * table.col(i);
            }
            res.normalization += slice.sum();
            const GibbsState& out_state = out_states[static_cast<std::size_t>(nu)];
            const double z_ratio = std::exp(in.log_partition - out_state.log_partition);
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j)
                    res.generalized_average +=
                        slice(j, i) * z_ratio *
                        std::exp(p.param * (in.spectrum.eigenvalues(i) -
                                            out_state.spectrum.eigenvalues(j)));
            res.joint[static_cast<std::size_t>(mu * m + nu)] = std::move(slice);
        }

    // Efficacy from the closed trace forms (independent of the joint table).
    std::vector<std::vector<ComplexMatrix>> applied(static_cast<std::size_t>(m));
    for (Index nu = 0; nu < m; ++nu) {
        applied[static_cast<std::size_t>(nu)].reserve(static_cast<std::size_t>(m));
        for (Index mu = 0; mu < m; ++mu) {
            const ComplexMatrix& n_mu = p.measurement.operators()[static_cast<std::size_t>(mu)];
            applied[static_cast<std::size_t>(nu)].push_back(
                apply_operator(p.per_outcome_channels[static_cast<std::size_t>(nu)],
                      (n_mu * n_mu.adjoint()).eval()));
        }
    }
    res.gamma = 0.0;
    for (Index mu = 0; mu < m; ++mu)
        res.gamma += (out_states[static_cast<std::size_t>(mu)].density.matrix() *
                      applied[static_cast<std::size_t>(mu)][static_cast<std::size_t>(mu)])
                         .trace()
                         .real();
    res.gamma_tilde = 0.0;
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu) {
            const double r = r_entry(mu, nu);
            if (r == 0.0) continue;
            res.gamma_tilde += r * (out_states[static_cast<std::size_t>(nu)].density.matrix() *
                                    applied[static_cast<std::size_t>(nu)][static_cast<std::size_t>(mu)])
                                       .trace()
                                       .real();
        }

    // Outcome statistics after stage (ii).
    const ComplexMatrix evolved = apply_operator(p.first_channel, in.density.matrix());
    res.outcome_probs.resize(m);
    for (Index mu = 0; mu < m; ++mu) {
        const ComplexMatrix& n_mu = p.measurement.operators()[static_cast<std::size_t>(mu)];
        res.outcome_probs(mu) = (n_mu.adjoint() * n_mu * evolved).trace().real();
    }
    res.registered_probs = RealVector::Zero(m);
    for (Index nu = 0; nu < m; ++nu)
        for (Index mu = 0; mu < m; ++mu)
            res.registered_probs(nu) += r_entry(mu, nu) * res.outcome_probs(mu);

    RealMatrix mi_joint(m, m);
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu)
            mi_joint(mu, nu) = res.outcome_probs(mu) * r_entry(mu, nu);
    const MutualInformation mi = mutual_information(mi_joint);
    res.pointwise_mi = mi.pointwise;
    res.mutual_info_average = mi.average;

    // Mutual-information-corrected average.  On the support,
    // exp(-I_{nu mu}) = p(nu)/r(nu|mu); off-support terms carry zero joint
    // mass and are skipped.
    res.mi_equality_value = 0.0;
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu) {
            const double r = r_entry(mu, nu);
            if (r <= 0.0) continue;
            const RealMatrix& slice = res.joint[static_cast<std::size_t>(mu * m + nu)];
            const GibbsState& out_state = out_states[static_cast<std::size_t>(nu)];
            const double z_ratio = std::exp(in.log_partition - out_state.log_partition);
            const double mi_factor = res.registered_probs(nu) / r;
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j)
                    res.mi_equality_value +=
                        slice(j, i) * z_ratio * mi_factor *
                        std::exp(p.param * (in.spectrum.eigenvalues(i) -
                                            out_state.spectrum.eigenvalues(j)));
        }

    if (std::abs(res.normalization - 1.0) > 1e-10)
        throw StructuralError("run_protocol: joint table mass " +
                              format_g17(res.normalization));
    return res;
}

ProtocolResult jsu_check(const FeedbackProtocol& p, double tol) {
    if (tol <= 0.0) throw DomainError("jsu_check: tolerance must be positive");
    if (p.error_model)
        throw ContractError("jsu_check: protocol carries an error model; use jsu_error_check");
    const ChannelReport first = validate(p.first_channel);
    if (!first.is_unital)
        throw ContractError("jsu_check: first channel must be unital (unital_defect = " +
                            format_g17(first.unital_defect) + ")");
    ProtocolResult res = run_protocol(p);
    res.generalized_holds = std::abs(res.generalized_average - res.gamma) <= tol;
    return res;
}

ProtocolResult jsu_error_check(const FeedbackProtocol& p, double tol) {
    if (tol <= 0.0) throw DomainError("jsu_error_check: tolerance must be positive");
    if (!p.error_model)
        throw ContractError("jsu_error_check: protocol has no error model; use jsu_check");
    ProtocolResult res = run_protocol(p);

    const bool first_unital = validate(p.first_channel).is_unital;
    if (first_unital)
        res.generalized_holds = std::abs(res.generalized_average - res.gamma_tilde) <= tol;

    bool all_unital = first_unital;
    for (const auto& c : p.per_outcome_channels) all_unital = all_unital && validate(c).is_unital;
    // The information equality also needs the readout matrix strictly
    // positive: its derivation divides by r(nu|mu), and with zero entries
    // the operator sum over actual outcomes is no longer complete.
    if (all_unital && p.measurement.pclr_satisfied() && p.error_model->full_support())
        res.mi_equality_holds = std::abs(res.mi_equality_value - 1.0) <= tol;
    return res;
}

WorkFormResult work_form_feedback(const FeedbackProtocol& p, double beta, double tol) {
    if (beta == 0.0)
        throw DomainError("work_form_feedback: free energies are undefined at beta = 0");
    FeedbackProtocol thermal = p;
    thermal.param = beta;
    const ProtocolResult res = run_protocol(thermal);

    const GibbsState g0 = gibbs(thermal.input_generator, beta);
    std::vector<GibbsState> finals;
    finals.reserve(thermal.per_outcome_observables.size());
    for (const auto& obs : thermal.per_outcome_observables) finals.push_back(gibbs(obs, beta));

    const Index m = res.outcomes;
    const Index d = thermal.first_channel.dim_in();
    WorkFormResult out{};
    out.tolerance = tol;
    out.efficacy = thermal.error_model ? res.gamma_tilde : res.gamma;

    double mi_corrected = 0.0;
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu) {
            const RealMatrix& slice = res.joint[static_cast<std::size_t>(mu * m + nu)];
            const GibbsState& fin = finals[static_cast<std::size_t>(nu)];
            const double delta_f = *fin.free_energy - *g0.free_energy;
            const double r = thermal.error_model ? (*thermal.error_model)(mu, nu)
                                                 : (mu == nu ? 1.0 : 0.0);
            const double mi_factor = r > 0.0 ? res.registered_probs(nu) / r : 0.0;
            for (Index i = 0; i < d; ++i)
                for (Index j = 0; j < d; ++j) {
                    const double w =
                        fin.spectrum.eigenvalues(j) - g0.spectrum.eigenvalues(i);
                    const double term = slice(j, i) * std::exp(-beta * w + beta * delta_f);
                    out.average += term;
                    if (r > 0.0) mi_corrected += term * mi_factor;
                }
        }
    out.reparam_gap = std::abs(out.average - res.generalized_average);
    if (thermal.error_model) {
        out.mi_corrected_average = mi_corrected;
        bool all_unital = validate(thermal.first_channel).is_unital;
        for (const auto& c : thermal.per_outcome_channels)
            all_unital = all_unital && validate(c).is_unital;
        if (all_unital && thermal.measurement.pclr_satisfied() &&
            thermal.error_model->full_support())
            out.mi_identity_holds = std::abs(mi_corrected - 1.0) <= tol;
    }
    return out;
}

//=========================================================================
// Serialization
//=========================================================================

nlohmann::json protocol_to_json(const FeedbackProtocol& p) {
    nlohmann::json j;
    j["input_generator"] = complex_matrix_to_json(p.input_generator.matrix());
    j["alpha"] = p.param;
    j["first_channel"] = channel_to_json(p.first_channel);
    nlohmann::json meas = nlohmann::json::array();
    for (const auto& op : p.measurement.operators()) meas.push_back(complex_matrix_to_json(op));
    j["measurement"] = std::move(meas);
    nlohmann::json chans = nlohmann::json::array();
    for (const auto& c : p.per_outcome_channels) chans.push_back(channel_to_json(c));
    j["per_outcome_channels"] = std::move(chans);
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& o : p.per_outcome_observables)
        obs.push_back(complex_matrix_to_json(o.matrix()));
    j["per_outcome_observables"] = std::move(obs);
    if (p.error_model) {
        nlohmann::json rows = nlohmann::json::array();
        for (Index mu = 0; mu < p.error_model->actual_outcomes(); ++mu) {
            nlohmann::json row = nlohmann::json::array();
            for (Index nu = 0; nu < p.error_model->registered_outcomes(); ++nu)
                row.push_back(p.error_model->matrix()(mu, nu));
            rows.push_back(std::move(row));
        }
        j["error_model"] = std::move(rows);
    }
    return j;
}

namespace {

RealMatrix real_matrix_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ParseError(std::string(what) + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    RealMatrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.empty())
            throw ParseError(std::string(what) + ": row " + std::to_string(i) +
                             " is not a non-empty array");
        if (i == 0) {
            cols = row.size();
            m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
        } else if (row.size() != cols) {
            throw ParseError(std::string(what) + ": row " + std::to_string(i) + " has ragged length");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            if (!row[k].is_number())
                throw ParseError(std::string(what) + ": entry (" + std::to_string(i) + "," +
                                 std::to_string(k) + ") is not a number");
            m(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
        }
    }
    return m;
}

}  // namespace

FeedbackProtocol protocol_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("protocol: expected a JSON object");
    for (const char* key :
         {"input_generator", "first_channel", "measurement", "per_outcome_channels",
          "per_outcome_observables"})
        if (!j.contains(key))
            throw ParseError(std::string("protocol: missing field '") + key + "'");
    double param = 0.0;
    if (j.contains("alpha")) param = j["alpha"].get<double>();
    else if (j.contains("beta")) param = j["beta"].get<double>();
    else throw ParseError("protocol: missing parameter field 'alpha' (or 'beta')");

    std::vector<ComplexMatrix> meas_ops;
    for (std::size_t i = 0; i < j["measurement"].size(); ++i)
        meas_ops.push_back(complex_matrix_from_json(
            j["measurement"][i], ("protocol measurement[" + std::to_string(i) + "]").c_str()));

    std::vector<KrausChannel> channels;
    for (const auto& cj : j["per_outcome_channels"]) channels.push_back(channel_from_json(cj));

    std::vector<HermitianOperator> observables;
    for (std::size_t i = 0; i < j["per_outcome_observables"].size(); ++i)
        observables.emplace_back(complex_matrix_from_json(
            j["per_outcome_observables"][i],
            ("protocol per_outcome_observables[" + std::to_string(i) + "]").c_str()));

    std::optional<ErrorModel> error_model;
    if (j.contains("error_model"))
        error_model = ErrorModel(real_matrix_from_json(j["error_model"], "protocol error_model"));

    FeedbackProtocol p{channel_from_json(j["first_channel"]),
                       Measurement(std::move(meas_ops)),
                       std::move(channels),
                       std::move(observables),
                       HermitianOperator(
                           complex_matrix_from_json(j["input_generator"], "protocol input_generator")),
                       param,
                       std::move(error_model)};
    validate_protocol(p);
    return p;
}

nlohmann::json to_json(const ProtocolResult& r) {
    nlohmann::json joint = nlohmann::json::array();
    const Index m = r.outcomes;
    for (Index mu = 0; mu < m; ++mu)
        for (Index nu = 0; nu < m; ++nu) {
            const RealMatrix& slice = r.joint[static_cast<std::size_t>(mu * m + nu)];
            if (slice.sum() == 0.0 && mu != nu) continue;
            nlohmann::json rows = nlohmann::json::array();
            for (Index jj = 0; jj < slice.rows(); ++jj) {
                nlohmann::json row = nlohmann::json::array();
                for (Index ii = 0; ii < slice.cols(); ++ii) row.push_back(slice(jj, ii));
                rows.push_back(std::move(row));
            }
            joint.push_back({{"actual", mu}, {"registered", nu}, {"p", std::move(rows)}});
        }
    nlohmann::json pointwise = nlohmann::json::array();
    for (Index mu = 0; mu < r.pointwise_mi.rows(); ++mu) {
        nlohmann::json row = nlohmann::json::array();
        for (Index nu = 0; nu < r.pointwise_mi.cols(); ++nu)
            row.push_back(r.pointwise_mi(mu, nu));
        pointwise.push_back(std::move(row));
    }
    nlohmann::json j{{"outcomes", r.outcomes},
                     {"joint", std::move(joint)},
                     {"normalization", r.normalization},
                     {"generalized_average", r.generalized_average},
                     {"gamma", r.gamma},
                     {"gamma_tilde", r.gamma_tilde},
                     {"outcome_probs", std::vector<double>(r.outcome_probs.begin(),
                                                           r.outcome_probs.end())},
                     {"registered_probs", std::vector<double>(r.registered_probs.begin(),
                                                              r.registered_probs.end())},
                     {"pointwise_mi", std::move(pointwise)},
                     {"mutual_info_average", r.mutual_info_average},
                     {"mi_equality_value", r.mi_equality_value}};
    if (r.generalized_holds) j["generalized_holds"] = *r.generalized_holds;
    if (r.mi_equality_holds) j["mi_equality_holds"] = *r.mi_equality_holds;
    return j;
}

}  // namespace fluctlab
