#pragma once

#include "interlace/graph.hpp"
#include "interlace/rng.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace interlace {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameters of a (possibly directed) degree-corrected mixed-membership
/// model. Undirected models use theta/pi twice and leave zeta/gamma empty;
/// directed models carry separate citer (theta, pi) and citee (zeta, gamma)
/// parameters.
struct DcmmParams {
    int n = 0;
    int k = 0;
    bool directed = false;
    Vector theta;  ///< length n, strictly positive degree parameters
    Matrix pi;     ///< n x k, nonnegative rows summing to 1
    Matrix p;      ///< k x k nonnegative community mixing matrix
    Vector zeta;   ///< directed only: length n, strictly positive
    Matrix gamma;  ///< directed only: n x k row-stochastic
};

/// Checks every structural invariant of DcmmParams (shapes, positivity,
/// row sums within 1e-12, symmetry of p for undirected models); throws an
/// invalid-input error naming the first violation.
void validate_params(const DcmmParams& params);

/// JSON form of the parameters, for provenance logging.
nlohmann::ordered_json to_json(const DcmmParams& params);

/// Dense matrix of independent edge probabilities.
struct BernoulliMatrix {
    int n = 0;
    Matrix omega; ///< n x n, entries in [0, 1)
};

struct SnrReport {
    double trace_delta = 0.0;      ///< tr(D'D) for the difference D
    double trace_delta_4 = 0.0;    ///< tr([DD']^2)
    double trace_omega_4 = 0.0;    ///< tr([WW']^2) for the first matrix
    double trace_omegatilde_4 = 0.0;
    double snr = 0.0;
    double phase_ratio = 0.0;      ///< delta_1^2 / (lambda_1 + lambda~_1)
};

/// Rank-one least-favorable perturbation request: the base model's last
/// community is split in two, coupled through a Rademacher sign vector.
struct LeastFavorableSpec {
    double epsilon = 0.0;
    std::vector<int> sigma; ///< length n, entries in {-1, +1}
    DcmmParams base;
};

/// Computes the edge-probability matrix of the model. Errors if any entry
/// reaches 1 (the parameters do not describe a valid Bernoulli model).
BernoulliMatrix build_omega(const DcmmParams& params);

/// Draws one network: every off-diagonal entry is an independent
/// Bernoulli(omega_ij); undirected sampling draws the upper triangle and
/// mirrors it. Deterministic in (omega, seed). The caller guarantees a
/// valid omega (entries in [0, 1)).
Network sample_network(const BernoulliMatrix& omega, bool directed, std::uint64_t seed);

/// One draw from the Dirichlet distribution with the given positive
/// concentration parameters, via normalized gamma draws.
Vector sample_dirichlet(const Vector& alpha, std::uint64_t seed);

/// Builds the (null, alternative) model pair of one of the six benchmark
/// recipes. Cases 1-3 are undirected, 4-6 directed; cases 3 and 6 require
/// k = 2 (their membership law is two-dimensional). All random draws
/// depend only on (seed, case structure), never on b, so scanning over b
/// reuses identical randomness.
std::pair<DcmmParams, DcmmParams> make_case(int case_id, int n, int k, double beta, double b,
                                            std::uint64_t seed);

/// Signal-to-noise report for a pair of edge-probability matrices.
SnrReport snr(const BernoulliMatrix& omega, const BernoulliMatrix& omegatilde, bool directed);

/// Finds b in (0,1) such that the SNR of the case's (omega, omega~) pair
/// hits the target within relative tolerance: 32-point bracket scan, then
/// bisection (at most 40 steps). Errors with the achievable range when no
/// bracket contains the target.
double calibrate_b(int case_id, int n, int k, double beta, double target_snr, std::uint64_t seed,
                   double tol);

/// Re-parametrizes a directed model so the mixing matrix is doubly
/// stochastic and the citer/citee degree vectors have equal norms, leaving
/// the edge-probability matrix unchanged.
DcmmParams sinkhorn_normalize(const DcmmParams& params);

/// Builds the (k+1)-community model whose edge probabilities equal the
/// base model's plus the rank-one signed perturbation
/// epsilon * sigma_i sigma_j theta_i theta_j pi_iK pi_jK (directed: theta
/// zeta and pi gamma mixed). Errors if the perturbed matrix leaves [0, 1).
DcmmParams least_favorable(const LeastFavorableSpec& spec);

} // namespace interlace
