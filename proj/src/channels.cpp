#include "fluctlab/channels.hpp"

#include <cmath>
#include <numbers>

#include "fluctlab/util.hpp"

namespace fluctlab {

KrausChannel::KrausChannel(Index dim_in, Index dim_out, std::vector<ComplexMatrix> ops)
    : dim_in_(dim_in), dim_out_(dim_out), ops_(std::move(ops)) {
    if (dim_in_ < 1 || dim_out_ < 1)
        throw StructuralError("KrausChannel: dimensions must be positive");
    if (ops_.empty()) throw StructuralError("KrausChannel: empty Kraus list");
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i].rows() != dim_out_ || ops_[i].cols() != dim_in_)
            throw StructuralError("KrausChannel: operator " + std::to_string(i) + " is " +
                                  std::to_string(ops_[i].rows()) + "x" +
                                  std::to_string(ops_[i].cols()) + ", expected " +
                                  std::to_string(dim_out_) + "x" + std::to_string(dim_in_));
        require_finite(ops_[i], "KrausChannel");
    }
}

ChannelReport validate(const KrausChannel& c, double tol) {
    if (tol <= 0.0) throw DomainError("validate: tolerance must be positive");
    ComplexMatrix tp_sum = ComplexMatrix::Zero(c.dim_in(), c.dim_in());
    ComplexMatrix un_sum = ComplexMatrix::Zero(c.dim_out(), c.dim_out());
    for (const auto& k : c.kraus()) {
        tp_sum += k.adjoint() * k;
        un_sum += k * k.adjoint();
    }
    const double ratio = static_cast<double>(c.dim_in()) / static_cast<double>(c.dim_out());
    ChannelReport r{};
    r.tp_defect = max_abs((tp_sum - ComplexMatrix::Identity(c.dim_in(), c.dim_in())).eval());
    r.unital_defect =
        max_abs((un_sum - ratio * ComplexMatrix::Identity(c.dim_out(), c.dim_out())).eval());
    r.is_tp = r.tp_defect <= tol;
    r.is_unital = r.unital_defect <= tol;
    return r;
}

KrausChannel adjoint(const KrausChannel& c) {
    std::vector<ComplexMatrix> ops;
    ops.reserve(c.kraus().size());
    for (const auto& k : c.kraus()) ops.push_back(k.adjoint());
    return KrausChannel(c.dim_out(), c.dim_in(), std::move(ops));
}

ComplexMatrix apply_operator(const KrausChannel& c, const ComplexMatrix& op) {
    if (op.rows() != c.dim_in() || op.cols() != c.dim_in())
        throw ShapeError("apply: operator dim " + std::to_string(op.rows()) +
                         " does not match channel input dim " + std::to_string(c.dim_in()));
    ComplexMatrix out = ComplexMatrix::Zero(c.dim_out(), c.dim_out());
    for (const auto& k : c.kraus()) out += k * op * k.adjoint();
    return out;
}

DensityMatrix apply(const KrausChannel& c, const DensityMatrix& rho) {
    const ChannelReport report = validate(c);
    if (!report.is_tp)
        throw ContractError("apply: channel is not trace-preserving (tp_defect = " +
                            format_g17(report.tp_defect) + ")");
    return DensityMatrix(apply_operator(c, rho.matrix()));
}

KrausChannel compose(const KrausChannel& outer, const KrausChannel& inner) {
    if (inner.dim_out() != outer.dim_in())
        throw ShapeError("compose: inner output dim " + std::to_string(inner.dim_out()) +
                         " does not match outer input dim " + std::to_string(outer.dim_in()));
    std::vector<ComplexMatrix> ops;
    ops.reserve(outer.kraus().size() * inner.kraus().size());
    for (const auto& a : outer.kraus())
        for (const auto& b : inner.kraus()) ops.push_back(a * b);
    return KrausChannel(inner.dim_in(), outer.dim_out(), std::move(ops));
}

KrausChannel tensor(const KrausChannel& c1, const KrausChannel& c2) {
    std::vector<ComplexMatrix> ops;
    ops.reserve(c1.kraus().size() * c2.kraus().size());
    for (const auto& a : c1.kraus())
        for (const auto& b : c2.kraus()) ops.push_back(tensor_product(a, b));
    return KrausChannel(c1.dim_in() * c2.dim_in(), c1.dim_out() * c2.dim_out(), std::move(ops));
}

//=========================================================================
// Standard channels
//=========================================================================

KrausChannel identity_channel(Index d) {
    return KrausChannel(d, d, {ComplexMatrix::Identity(d, d)});
}

KrausChannel unitary_channel(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) throw ShapeError("unitary_channel: matrix is not square");
    const double defect =
        max_abs((u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols())).eval());
    if (defect > kDefaultTol)
        throw DomainError("unitary_channel: max|U^dagger U - I| = " + format_g17(defect));
    return KrausChannel(u.cols(), u.rows(), {u});
}

namespace {

void require_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw DomainError(std::string(name) + " must lie in [0,1], got " + format_g17(v));
}

}  // namespace

KrausChannel depolarizing_channel(double p) {
    require_unit_interval(p, "depolarizing p");
    ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;
    const double w = std::sqrt(p / 4.0);
    return KrausChannel(2, 2,
                        {std::sqrt(1.0 - 0.75 * p) * id, w * sx, w * sy, w * sz});
}

KrausChannel phase_damping_channel(double lambda) {
    require_unit_interval(lambda, "phase damping lambda");
    ComplexMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - lambda);
    k1 << 0, 0, 0, std::sqrt(lambda);
    return KrausChannel(2, 2, {k0, k1});
}

KrausChannel amplitude_damping_channel(double gamma) {
    require_unit_interval(gamma, "amplitude damping gamma");
    ComplexMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    return KrausChannel(2, 2, {k0, k1});
}

KrausChannel swap_channel(Index d) {
    if (d < 1) throw DomainError("swap_channel: dimension must be positive");
    const Index dd = d * d;
    if (dd > kMaxCompositeDim) throw SizeError("swap_channel: composite dimension too large");
    ComplexMatrix u = ComplexMatrix::Zero(dd, dd);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) u(j * d + i, i * d + j) = 1.0;
    return unitary_channel(u);
}

KrausChannel mub_isometry_channel(Index dim_in, Index dim_out) {
    if (dim_in < 1 || dim_out < dim_in)
        throw DomainError("mub_isometry_channel: need 1 <= dim_in <= dim_out");
    ComplexMatrix v(dim_out, dim_in);
    const double norm = 1.0 / std::sqrt(static_cast<double>(dim_out));
    for (Index j = 0; j < dim_out; ++j)
        for (Index k = 0; k < dim_in; ++k) {
            const double angle =
                2.0 * std::numbers::pi * static_cast<double>(j) * static_cast<double>(k) /
                static_cast<double>(dim_out);
            v(j, k) = norm * Complex(std::cos(angle), std::sin(angle));
        }
    return KrausChannel(dim_in, dim_out, {v});
}

//=========================================================================
// Random channels
//=========================================================================

ComplexMatrix haar_unitary(Index d, Rng& rng) {
    ComplexMatrix g(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) g(i, j) = rng.normal_complex();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase convention so the distribution is exactly Haar.
    for (Index j = 0; j < d; ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        q.col(j) *= (mag > 0.0) ? rjj / mag : Complex(1.0, 0.0);
    }
    return q;
}

HermitianOperator random_hermitian(Index d, Rng& rng) {
    ComplexMatrix g(d, d);
    for (Index j = 0; j < d; ++j)
        for (Index i = 0; i < d; ++i) g(i, j) = rng.normal_complex();
    return HermitianOperator(0.5 * (g + g.adjoint().eval()));
}

KrausChannel haar_unitary_channel(Index d, Rng& rng) {
    return unitary_channel(haar_unitary(d, rng));
}

KrausChannel mixture_of_unitaries_channel(Index d, int n, Rng& rng) {
    if (n < 1) throw DomainError("mixture_of_unitaries_channel: need n >= 1");
    // Uniform-simplex weights from normalized exponentials.
    std::vector<double> w(static_cast<std::size_t>(n));
    double total = 0.0;
    for (auto& wi : w) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        wi = -std::log(u);
        total += wi;
    }
    std::vector<ComplexMatrix> ops;
    ops.reserve(w.size());
    for (const double wi : w) ops.push_back(std::sqrt(wi / total) * haar_unitary(d, rng));
    return KrausChannel(d, d, std::move(ops));
}

KrausChannel stinespring_channel(Index dim_in, Index dim_out, Index env, Rng& rng) {
    if (env < 1) throw DomainError("stinespring_channel: need env >= 1");
    const Index total = dim_out * env;
    if (total < dim_in)
        throw DomainError("stinespring_channel: dim_out * env must be >= dim_in");
    if (total > kMaxCompositeDim)
        throw SizeError("stinespring_channel: dilation dimension too large");
    // Random isometry: the first dim_in columns of a Haar unitary on the
    // dilated space, split along the environment index.
    const ComplexMatrix u = haar_unitary(total, rng);
    std::vector<ComplexMatrix> ops(static_cast<std::size_t>(env),
                                   ComplexMatrix(dim_out, dim_in));
    for (Index e = 0; e < env; ++e)
        for (Index i = 0; i < dim_out; ++i)
            for (Index j = 0; j < dim_in; ++j)
                ops[static_cast<std::size_t>(e)](i, j) = u(i * env + e, j);
    return KrausChannel(dim_in, dim_out, std::move(ops));
}

//=========================================================================
// Interchange format
//=========================================================================

nlohmann::json complex_matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix complex_matrix_from_json(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw ParseError(std::string(what) + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    ComplexMatrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.empty())
            throw ParseError(std::string(what) + ": row " + std::to_string(i) +
                             " is not a non-empty array");
        if (i == 0) {
            cols = row.size();
            m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
        } else if (row.size() != cols) {
            throw ParseError(std::string(what) + ": row " + std::to_string(i) +
                             " has ragged length");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            const auto& entry = row[k];
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                !entry[1].is_number())
                throw ParseError(std::string(what) + ": entry (" + std::to_string(i) + "," +
                                 std::to_string(k) + ") is not an [re, im] pair");
            m(static_cast<Index>(i), static_cast<Index>(k)) =
                Complex(entry[0].get<double>(), entry[1].get<double>());
        }
    }
    return m;
}

nlohmann::json channel_to_json(const KrausChannel& c) {
    nlohmann::json j;
    j["dim_in"] = c.dim_in();
    j["dim_out"] = c.dim_out();
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& k : c.kraus()) ops.push_back(complex_matrix_to_json(k));
    j["kraus"] = std::move(ops);
    return j;
}

KrausChannel channel_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("channel: expected a JSON object");
    for (const char* key : {"dim_in", "dim_out", "kraus"})
        if (!j.contains(key)) throw ParseError(std::string("channel: missing field '") + key + "'");
    if (!j["dim_in"].is_number_integer() || !j["dim_out"].is_number_integer())
        throw ParseError("channel: dim_in/dim_out must be integers");
    const Index dim_in = j["dim_in"].get<Index>();
    const Index dim_out = j["dim_out"].get<Index>();
    if (!j["kraus"].is_array() || j["kraus"].empty())
        throw ParseError("channel: 'kraus' must be a non-empty array");
    std::vector<ComplexMatrix> ops;
    ops.reserve(j["kraus"].size());
    for (std::size_t i = 0; i < j["kraus"].size(); ++i)
        ops.push_back(complex_matrix_from_json(j["kraus"][i],
                                               ("channel kraus[" + std::to_string(i) + "]").c_str()));
    KrausChannel c(dim_in, dim_out, std::move(ops));
    const ChannelReport report = validate(c, 1e-6);  // looser ingest tolerance
    if (!report.is_tp)
        throw ParseError("channel: not trace-preserving on ingest, tp_defect = " +
                         format_g17(report.tp_defect));
    return c;
}

void save_channel(const KrausChannel& c, const std::filesystem::path& path) {
    write_file(path, channel_to_json(c).dump(2) + "\n");
}

KrausChannel load_channel(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("channel file " + path.string() + ": " + e.what());
    }
    return channel_from_json(j);
}

}  // namespace fluctlab
