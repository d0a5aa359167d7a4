#pragma once

#include "bsc/ibc.h"
#include "bsc/subspace.h"
#include "bsc/types.h"

#include <cstdint>
#include <vector>

namespace bsc {

/// Centering/normalization statistics recorded by preprocess(). norms[i] == 0
/// flags an item that was the zero matrix after centering (left as zero).
struct CenterScale {
    Matrix mean;
    std::vector<double> norms;
};

/// Subtract the mean matrix from every item and scale each result to unit
/// Frobenius norm; zero matrices stay zero.
std::vector<Matrix> preprocess(const std::vector<Matrix>& mats, CenterScale* stats = nullptr);

/// sgn(r1^T x r2) with sgn(0) = +1; a c1 x c2 matrix of +-1 entries.
Matrix bilinear_encode(const Matrix& r1, const Matrix& r2, const Matrix& x);

/// Column-major flattening of a +-1 code matrix; matches the ordering of
/// sgn((R2 kron R1)^T vec(X)).
SignCode flatten_code(const Matrix& code);

/// Training data for bilinear binary coding: preprocessed video projectors
/// and image outer products, and the n x k category indicator delta.
struct BbcTrainingSet {
    std::vector<Matrix> video_mats;  // k matrices, d x d
    std::vector<Matrix> image_mats;  // n matrices, d x d
    Eigen::MatrixXi delta;           // n x k, entries in {0,1}
    CenterScale video_stats;
    CenterScale image_stats;
};

BbcTrainingSet make_bbc_training(const std::vector<SubspaceEntry>& subspaces,
                                 const std::vector<Vector>& images,
                                 const Eigen::MatrixXi& delta);

/// Orthonormal bilinear rotations: (P1, P2) hash videos, (Q1, Q2) hash
/// images; codes have c = c1 * c2 bits. Centering statistics are carried for
/// out-of-sample encoding.
struct BbcModel {
    Matrix P1, P2;  // d x c1, d x c2
    Matrix Q1, Q2;
    Matrix center_V, center_U;
    double mu = 1.0;
    std::uint64_t seed = 0;
    int d = 0;
    int c1 = 0;
    int c2 = 0;

    int bits() const { return c1 * c2; }
};

struct ObjectiveTerms {
    double image = 0.0;
    double video = 0.0;
    double cross = 0.0;
    double total() const { return image + video + cross; }
};

ObjectiveTerms bbc_objective_terms(const BbcModel& model, const BbcTrainingSet& train,
                                   const std::vector<Matrix>& codes_U,
                                   const std::vector<Matrix>& codes_V);

/// sum_i Tr(B_i^U Q2^T U_i^T Q1) + sum_j Tr(B_j^V P2^T V_j^T P1)
///   + (mu/sqrt(c)) sum_ij delta_ij Tr(B_j^V (B_i^U)^T)
double bbc_objective(const BbcModel& model, const BbcTrainingSet& train,
                     const std::vector<Matrix>& codes_U, const std::vector<Matrix>& codes_V);

/// argmax_{P^T P = I} Tr(d_mat * P) for d_mat of shape c x d: the polar
/// factor from the SVD of d_mat.
Matrix polar_max_trace(const Matrix& d_mat);

Matrix update_p1(const std::vector<Matrix>& data_mats, const Matrix& p2,
                 const std::vector<Matrix>& codes);
Matrix update_p2(const std::vector<Matrix>& data_mats, const Matrix& p1,
                 const std::vector<Matrix>& codes);

/// Exact sign-matrix maximizer of Tr(B * D3) with
/// D3 = r2^T x^T r1 + (mu/sqrt(c)) * neighbor_code_sum^T; neighbor_code_sum
/// is the delta-weighted sum of opposite-side codes for this item.
Matrix update_code(const Matrix& r1, const Matrix& r2, const Matrix& x,
                   const Matrix& neighbor_code_sum, double mu_over_sqrt_c);

struct BbcTrainOptions {
    int c1 = 8;
    int c2 = 8;
    double mu = 1.0;
    int iters = 10;
    std::uint64_t seed = 0;
    Execution exec = Execution::Parallel;
};

struct BbcTrainResult {
    BbcModel model;
    std::vector<Matrix> codes_V;
    std::vector<Matrix> codes_U;
    // Objective value at initialization and after every block update
    // (6 blocks per sweep).
    std::vector<double> objective_trace;
    // Max orthonormality residual over the four rotations after each sweep.
    std::vector<double> orthonormality_residuals;
    int sweeps = 0;
    bool converged = false;
};

/// Block coordinate ascent over (P1, P2, {B_j^V}, Q1, Q2, {B_i^U}); runs for
/// opts.iters sweeps or until no variable changes. Deterministic per seed;
/// the per-item code updates may run in parallel with identical results.
BbcTrainResult train_bbc(const BbcTrainingSet& train, const BbcTrainOptions& opts);

/// Center/normalize with the stored statistics, then apply the bilinear hash.
Matrix encode_video_bbc(const BbcModel& model, const SubspaceEntry& subspace);
Matrix encode_image_bbc(const BbcModel& model, const Vector& q);

}  // namespace bsc
