#include "interlace/dcmm.hpp"

#include "interlace/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace interlace {

namespace {

// Stream ids for the independent random draws of make_case. Every draw is
// keyed by (seed, purpose, row), so the same seed reproduces the same
// model regardless of evaluation order or of the mixing parameter b.
namespace stream_id {
constexpr std::uint64_t theta_u = 1;
constexpr std::uint64_t theta_alt = 2;
constexpr std::uint64_t zeta_u = 3;
constexpr std::uint64_t zeta_alt = 4;
constexpr std::uint64_t pi_rows = 5;
constexpr std::uint64_t gamma_rows = 6;
constexpr std::uint64_t pi_alt_rows = 7;
constexpr std::uint64_t gamma_alt_rows = 8;
} // namespace stream_id

constexpr double kRowSumTol = 1e-12;

Vector dirichlet_row(SplitStream& s, const Vector& alpha) {
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] > 0.0)) {
            throw_invalid("Dirichlet concentration parameters must be positive");
        }
    }
    if (alpha.size() == 1) {
        return Vector::Ones(1);
    }
    Vector g(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        g[i] = gamma_draw(s, alpha[i]);
    }
    double total = g.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw_numeric("Dirichlet draw degenerated to a zero or non-finite sum");
    }
    return g / total;
}

// theta_i = beta * u_i / ||u||
Vector scale_to_beta(const Vector& u, double beta) {
    return u * (beta / u.norm());
}

Vector uniform_23(SplitStream s, int n) {
    Vector u(n);
    for (int i = 0; i < n; ++i) {
        u[i] = s.next_range(2.0, 3.0);
    }
    return u;
}

// Two-point degree law: 1 with probability 0.95, else 3.
Vector spiked_mixture(SplitStream s, int n) {
    Vector u(n);
    for (int i = 0; i < n; ++i) {
        u[i] = s.next_unit() < 0.95 ? 1.0 : 3.0;
    }
    return u;
}

Matrix dirichlet_rows(SplitStream parent, int n, const Vector& alpha) {
    Matrix m(n, alpha.size());
    for (int i = 0; i < n; ++i) {
        SplitStream row = parent.child(static_cast<std::uint64_t>(i));
        m.row(i) = dirichlet_row(row, alpha).transpose();
    }
    return m;
}

// (1-b) I + b 11'
Matrix mixing_matrix(int k, double b) {
    Matrix p = Matrix::Constant(k, k, b);
    p.diagonal().array() = 1.0;
    return p;
}

// Pairwise column merge: column k of the result is columns 2k and 2k+1
// of the input summed, halving the community count exactly.
Matrix merge_pairs(const Matrix& wide) {
    Matrix narrow(wide.rows(), wide.cols() / 2);
    for (Eigen::Index k = 0; k < narrow.cols(); ++k) {
        narrow.col(k) = wide.col(2 * k) + wide.col(2 * k + 1);
    }
    return narrow;
}

// Largest singular value by power iteration on M'M, relative tolerance
// 1e-8. The start vector is all-ones with a small fixed dither so it
// cannot sit exactly orthogonal to the leading singular subspace.
double largest_sv(const Matrix& m) {
    const Eigen::Index n = m.cols();
    if (n == 0 || m.rows() == 0) {
        return 0.0;
    }
    Vector v(n);
    SplitStream dither(0x5eedc0ffee);
    for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.01 * (dither.next_unit() - 0.5);
    }
    v.normalize();

    double prev = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
        Vector w = m.transpose() * (m * v);
        double norm = w.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            return 0.0; // v landed in the null space: the matrix is (near) zero
        }
        v = w / norm;
        if (std::abs(norm - prev) <= 1e-8 * norm) {
            return std::sqrt(norm);
        }
        prev = norm;
    }
    throw_numeric("power iteration for the largest singular value did not converge");
}

// The scalar SNR only; calibration scans call this many times and can
// skip the three singular-value iterations of the full report.
double snr_value(const BernoulliMatrix& omega, const BernoulliMatrix& omegatilde, bool directed) {
    Matrix delta = omegatilde.omega - omega.omega;
    auto quartic = [directed](const Matrix& m) {
        Matrix g = directed ? Matrix(m * m.transpose()) : Matrix(m * m);
        return g.squaredNorm();
    };
    double d4 = quartic(delta);
    double o4 = quartic(omega.omega);
    double t4 = quartic(omegatilde.omega);
    if (o4 + t4 <= 0.0) {
        return 0.0;
    }
    double scale = directed ? 1.0 / (4.0 * std::sqrt(2.0)) : 1.0 / 8.0;
    return scale * d4 / std::sqrt(o4 + t4);
}

void check_probabilities(const Matrix& omega) {
    double hi = omega.maxCoeff();
    if (hi >= 1.0) {
        throw_invalid("edge probability reaches " + std::to_string(hi) +
                      "; the parameters do not define a valid Bernoulli model");
    }
}

} // namespace

void validate_params(const DcmmParams& params) {
    if (params.n < 1 || params.k < 1) {
        throw_invalid("model needs n >= 1 nodes and k >= 1 communities");
    }
    if (params.theta.size() != params.n || params.pi.rows() != params.n ||
        params.pi.cols() != params.k || params.p.rows() != params.k ||
        params.p.cols() != params.k) {
        throw_invalid("parameter shapes are inconsistent with (n, k)");
    }
    if ((params.theta.array() <= 0.0).any()) {
        throw_invalid("theta must be strictly positive");
    }
    if (params.pi.minCoeff() < 0.0 || params.p.minCoeff() < 0.0) {
        throw_invalid("membership and mixing matrices must be nonnegative");
    }
    if ((params.pi.rowwise().sum().array() - 1.0).abs().maxCoeff() > kRowSumTol) {
        throw_invalid("membership rows must sum to 1");
    }
    if (params.directed) {
        if (params.zeta.size() != params.n || params.gamma.rows() != params.n ||
            params.gamma.cols() != params.k) {
            throw_invalid("directed model needs zeta and gamma of matching shape");
        }
        if ((params.zeta.array() <= 0.0).any()) {
            throw_invalid("zeta must be strictly positive");
        }
        if (params.gamma.minCoeff() < 0.0) {
            throw_invalid("membership and mixing matrices must be nonnegative");
        }
        if ((params.gamma.rowwise().sum().array() - 1.0).abs().maxCoeff() > kRowSumTol) {
            throw_invalid("membership rows must sum to 1");
        }
    } else {
        if (params.zeta.size() != 0 || params.gamma.size() != 0) {
            throw_invalid("undirected model must not carry zeta or gamma");
        }
        if ((params.p - params.p.transpose()).cwiseAbs().maxCoeff() > kRowSumTol) {
            throw_invalid("undirected model needs a symmetric mixing matrix");
        }
    }
}

nlohmann::ordered_json to_json(const DcmmParams& params) {
    auto vec = [](const Vector& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    auto mat = [](const Matrix& m) {
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<std::size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            rows.emplace_back(m.row(i).begin(), m.row(i).end());
        }
        return rows;
    };
    nlohmann::ordered_json j;
    j["n"] = params.n;
    j["k"] = params.k;
    j["directed"] = params.directed;
    j["theta"] = vec(params.theta);
    j["pi"] = mat(params.pi);
    j["p"] = mat(params.p);
    if (params.directed) {
        j["zeta"] = vec(params.zeta);
        j["gamma"] = mat(params.gamma);
    }
    return j;
}

BernoulliMatrix build_omega(const DcmmParams& params) {
    validate_params(params);
    Matrix core = params.theta.asDiagonal() * (params.pi * params.p);
    Matrix omega;
    if (params.directed) {
        omega = core * params.gamma.transpose() * params.zeta.asDiagonal();
    } else {
        omega = core * params.pi.transpose() * params.theta.asDiagonal();
    }
    check_probabilities(omega);
    return BernoulliMatrix{params.n, std::move(omega)};
}

Network sample_network(const BernoulliMatrix& omega, bool directed, std::uint64_t seed) {
    const int n = omega.n;
    Network g(n, directed);
    SplitStream s(seed);
    if (directed) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                if (s.next_unit() < omega.omega(i, j)) {
                    g.add_edge(i, j);
                }
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (s.next_unit() < omega.omega(i, j)) {
                    g.add_edge(i, j);
                }
            }
        }
    }
    return g;
}

Vector sample_dirichlet(const Vector& alpha, std::uint64_t seed) {
    SplitStream s(seed);
    return dirichlet_row(s, alpha);
}

std::pair<DcmmParams, DcmmParams> make_case(int case_id, int n, int k, double beta, double b,
                                            std::uint64_t seed) {
    if (case_id < 1 || case_id > 6) {
        throw_invalid("case id must be between 1 and 6, got " + std::to_string(case_id));
    }
    if (n < 2 || k < 1) {
        throw_invalid("benchmark cases need n >= 2 and k >= 1");
    }
    if ((case_id == 3 || case_id == 6) && k != 2) {
        throw_invalid("cases 3 and 6 use a two-dimensional membership law; k must be 2");
    }
    if (!(beta > 0.0)) {
        throw_invalid("beta must be positive");
    }
    if (!(b > 0.0) || !(b < 1.0)) {
        throw_invalid("b must lie strictly inside (0, 1)");
    }

    const bool directed = case_id >= 4;
    SplitStream root(seed);
    Vector theta = scale_to_beta(uniform_23(root.child(stream_id::theta_u), n), beta);
    Matrix p = mixing_matrix(k, b);

    DcmmParams a;
    a.n = n;
    a.k = k;
    a.directed = directed;
    a.theta = theta;
    a.p = p;
    DcmmParams bb = a;

    switch (case_id) {
    case 1: {
        a.pi = dirichlet_rows(root.child(stream_id::pi_rows), n, Vector::Ones(k));
        bb.pi = a.pi;
        bb.theta = scale_to_beta(spiked_mixture(root.child(stream_id::theta_alt), n), beta);
        break;
    }
    case 2: {
        Matrix wide = dirichlet_rows(root.child(stream_id::pi_alt_rows), n, Vector::Ones(2 * k));
        a.pi = merge_pairs(wide);
        bb.k = 2 * k;
        bb.pi = wide;
        bb.p = mixing_matrix(2 * k, b);
        break;
    }
    case 3: {
        Vector skew(2);
        skew << 1.6, 0.4;
        a.pi = dirichlet_rows(root.child(stream_id::pi_rows), n, skew);
        bb.pi = dirichlet_rows(root.child(stream_id::pi_alt_rows), n, Vector::Ones(2));
        break;
    }
    case 4: {
        a.pi = dirichlet_rows(root.child(stream_id::pi_rows), n, Vector::Ones(k));
        a.gamma = dirichlet_rows(root.child(stream_id::gamma_rows), n, Vector::Ones(k));
        a.zeta = scale_to_beta(uniform_23(root.child(stream_id::zeta_u), n), beta);
        bb.pi = a.pi;
        bb.gamma = a.gamma;
        bb.theta = scale_to_beta(spiked_mixture(root.child(stream_id::theta_alt), n), beta);
        bb.zeta = scale_to_beta(spiked_mixture(root.child(stream_id::zeta_alt), n), beta);
        break;
    }
    case 5: {
        a.zeta = scale_to_beta(uniform_23(root.child(stream_id::zeta_u), n), beta);
        bb.zeta = a.zeta;
        Matrix wide_pi = dirichlet_rows(root.child(stream_id::pi_alt_rows), n, Vector::Ones(2 * k));
        Matrix wide_gamma =
            dirichlet_rows(root.child(stream_id::gamma_alt_rows), n, Vector::Ones(2 * k));
        a.pi = merge_pairs(wide_pi);
        a.gamma = merge_pairs(wide_gamma);
        bb.k = 2 * k;
        bb.pi = wide_pi;
        bb.gamma = wide_gamma;
        bb.p = mixing_matrix(2 * k, b);
        break;
    }
    case 6: {
        a.zeta = scale_to_beta(uniform_23(root.child(stream_id::zeta_u), n), beta);
        bb.zeta = a.zeta;
        Vector skew(2);
        skew << 1.6, 0.4;
        a.pi = dirichlet_rows(root.child(stream_id::pi_rows), n, skew);
        a.gamma = dirichlet_rows(root.child(stream_id::gamma_rows), n, skew);
        bb.pi = dirichlet_rows(root.child(stream_id::pi_alt_rows), n, Vector::Ones(2));
        bb.gamma = dirichlet_rows(root.child(stream_id::gamma_alt_rows), n, Vector::Ones(2));
        break;
    }
    default:
        break;
    }

    // Surfaces invalid-probability errors (entries >= 1) at construction.
    (void)build_omega(a);
    (void)build_omega(bb);
    return {std::move(a), std::move(bb)};
}

SnrReport snr(const BernoulliMatrix& omega, const BernoulliMatrix& omegatilde, bool directed) {
    if (omega.n != omegatilde.n) {
        throw_invalid("SNR needs matrices of equal size, got " + std::to_string(omega.n) +
                      " and " + std::to_string(omegatilde.n));
    }
    Matrix delta = omegatilde.omega - omega.omega;
    auto quartic = [directed](const Matrix& m) {
        Matrix g = directed ? Matrix(m * m.transpose()) : Matrix(m * m);
        return g.squaredNorm();
    };
    SnrReport r;
    r.trace_delta = delta.squaredNorm();
    r.trace_delta_4 = quartic(delta);
    r.trace_omega_4 = quartic(omega.omega);
    r.trace_omegatilde_4 = quartic(omegatilde.omega);
    double denom = r.trace_omega_4 + r.trace_omegatilde_4;
    if (denom > 0.0) {
        double scale = directed ? 1.0 / (4.0 * std::sqrt(2.0)) : 1.0 / 8.0;
        r.snr = scale * r.trace_delta_4 / std::sqrt(denom);
    }
    double d1 = largest_sv(delta);
    double l1 = largest_sv(omega.omega);
    double l2 = largest_sv(omegatilde.omega);
    r.phase_ratio = (l1 + l2 > 0.0) ? d1 * d1 / (l1 + l2) : 0.0;
    return r;
}

double calibrate_b(int case_id, int n, int k, double beta, double target_snr, std::uint64_t seed,
                   double tol) {
    if (!(tol > 0.0)) {
        throw_invalid("calibration tolerance must be positive");
    }
    if (!(target_snr > 0.0)) {
        throw_invalid("target SNR must be positive");
    }
    const bool directed = case_id >= 4;
    auto snr_at = [&](double b) {
        auto [pa, pb] = make_case(case_id, n, k, beta, b, seed);
        return snr_value(build_omega(pa), build_omega(pb), directed);
    };
    auto close_enough = [&](double value) {
        return std::abs(value - target_snr) / target_snr <= tol;
    };

    constexpr int kBracketPoints = 32;
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    bool have_bracket = false;
    double seen_min = std::numeric_limits<double>::infinity();
    double seen_max = -std::numeric_limits<double>::infinity();
    double prev_b = 0.0;
    double prev_f = 0.0;
    for (int i = 1; i <= kBracketPoints; ++i) {
        double b = static_cast<double>(i) / (kBracketPoints + 1);
        double s = snr_at(b);
        if (close_enough(s)) {
            return b;
        }
        seen_min = std::min(seen_min, s);
        seen_max = std::max(seen_max, s);
        double f = s - target_snr;
        if (i > 1 && prev_f * f <= 0.0) {
            lo = prev_b;
            hi = b;
            f_lo = prev_f;
            have_bracket = true;
            break;
        }
        prev_b = b;
        prev_f = f;
    }
    if (!have_bracket) {
        throw_invalid("target SNR " + std::to_string(target_snr) +
                      " is not bracketed for b in (0, 1); the scan reached [" +
                      std::to_string(seen_min) + ", " + std::to_string(seen_max) + "]");
    }

    for (int step = 0; step < 40; ++step) {
        double mid = 0.5 * (lo + hi);
        double s = snr_at(mid);
        if (close_enough(s)) {
            return mid;
        }
        double f = s - target_snr;
        if (f_lo * f <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f;
        }
    }
    throw_numeric("bisection for the target SNR did not reach the requested tolerance");
}

DcmmParams sinkhorn_normalize(const DcmmParams& params) {
    validate_params(params);
    if (!params.directed) {
        throw_invalid("the doubly-stochastic re-parametrization applies to directed models");
    }
    const int k = params.k;
    Matrix pt = params.p;
    if ((pt.rowwise().sum().array() <= 0.0).any() || (pt.colwise().sum().array() <= 0.0).any()) {
        throw_invalid("mixing matrix has a zero row or column; it cannot be scaled");
    }

    Vector d1 = Vector::Ones(k);
    Vector d2 = Vector::Ones(k);
    bool converged = false;
    for (int iter = 0; iter < 10000; ++iter) {
        Vector r = pt.rowwise().sum();
        pt.array().colwise() /= r.array();
        d1.array() *= r.array();
        Vector c = pt.colwise().sum().transpose();
        pt.array().rowwise() /= c.transpose().array();
        d2.array() *= c.array();
        // Columns now sum to exactly 1; only the rows can still deviate.
        if ((pt.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw_numeric("doubly-stochastic scaling did not converge within 10000 iterations");
    }

    Vector g = params.pi * d1;
    Vector h = params.gamma * d2;
    DcmmParams out;
    out.n = params.n;
    out.k = k;
    out.directed = true;
    out.p = pt;
    out.pi = g.cwiseInverse().asDiagonal() * params.pi * d1.asDiagonal();
    out.gamma = h.cwiseInverse().asDiagonal() * params.gamma * d2.asDiagonal();
    Vector theta_t = params.theta.cwiseProduct(g);
    Vector zeta_t = params.zeta.cwiseProduct(h);
    double rho = std::sqrt(zeta_t.norm() / theta_t.norm());
    out.theta = rho * theta_t;
    out.zeta = zeta_t / rho;
    return out;
}

DcmmParams least_favorable(const LeastFavorableSpec& spec) {
    validate_params(spec.base);
    const DcmmParams& base = spec.base;
    const int n = base.n;
    const int k = base.k;
    if (spec.epsilon < 0.0) {
        throw_invalid("perturbation size must be nonnegative");
    }
    if (static_cast<int>(spec.sigma.size()) != n) {
        throw_invalid("sign vector length must equal the node count");
    }
    for (int s : spec.sigma) {
        if (s != 1 && s != -1) {
            throw_invalid("sign vector entries must be +1 or -1");
        }
    }
    const double corner = base.p(k - 1, k - 1);
    if (spec.epsilon > corner) {
        throw_invalid("perturbation exceeds the last mixing weight; the split matrix "
                      "would have negative entries");
    }
    const double s = corner + spec.epsilon;
    if (!(s > 0.0)) {
        throw_invalid("last mixing weight and perturbation are both zero; nothing to split");
    }
    const double root_s = std::sqrt(s);

    // Split membership: the last community's weight moves to column k-1 or
    // k according to the node's sign.
    auto split_membership = [&](const Matrix& m) {
        Matrix out = Matrix::Zero(n, k + 1);
        out.leftCols(k - 1) = m.leftCols(k - 1);
        for (int i = 0; i < n; ++i) {
            if (spec.sigma[static_cast<std::size_t>(i)] > 0) {
                out(i, k - 1) = m(i, k - 1);
            } else {
                out(i, k) = m(i, k - 1);
            }
        }
        return out;
    };
    // Split mixing matrix, with the corner replaced by the +/- epsilon block.
    Matrix p_check = Matrix::Zero(k + 1, k + 1);
    p_check.topLeftCorner(k - 1, k - 1) = base.p.topLeftCorner(k - 1, k - 1);
    p_check.block(0, k - 1, k - 1, 1) = base.p.block(0, k - 1, k - 1, 1);
    p_check.block(0, k, k - 1, 1) = base.p.block(0, k - 1, k - 1, 1);
    p_check.block(k - 1, 0, 1, k - 1) = base.p.block(k - 1, 0, 1, k - 1);
    p_check.block(k, 0, 1, k - 1) = base.p.block(k - 1, 0, 1, k - 1);
    p_check(k - 1, k - 1) = corner + spec.epsilon;
    p_check(k, k) = corner + spec.epsilon;
    p_check(k - 1, k) = corner - spec.epsilon;
    p_check(k, k - 1) = corner - spec.epsilon;

    // Canonical form: scale the two split columns by sqrt(s) so the new
    // mixing matrix has unit diagonal there, then renormalize rows.
    auto canonical_membership = [&](const Matrix& split, Vector& row_scale) {
        Matrix scaled = split;
        scaled.col(k - 1) *= root_s;
        scaled.col(k) *= root_s;
        row_scale = scaled.rowwise().sum();
        return Matrix(row_scale.cwiseInverse().asDiagonal() * scaled);
    };

    DcmmParams out;
    out.n = n;
    out.k = k + 1;
    out.directed = base.directed;
    out.p = p_check;
    out.p.row(k - 1) /= root_s;
    out.p.row(k) /= root_s;
    out.p.col(k - 1) /= root_s;
    out.p.col(k) /= root_s;

    Vector g;
    out.pi = canonical_membership(split_membership(base.pi), g);
    out.theta = base.theta.cwiseProduct(g);
    if (base.directed) {
        Vector h;
        out.gamma = canonical_membership(split_membership(base.gamma), h);
        out.zeta = base.zeta.cwiseProduct(h);
    }

    // Surfaces probabilities pushed out of [0, 1) by the perturbation.
    (void)build_omega(out);
    return out;
}

} // namespace interlace
