#pragma once

#include "bsc/subspace.h"
#include "bsc/types.h"

#include <cstdint>
#include <vector>

namespace bsc {

/// A +-1 hash code of length r.
using SignCode = std::vector<std::int8_t>;

/// Training data for inner-product binary coding. Columns of U are lifted
/// images vec(x x^T), columns of V are vectorized projectors vec(S~), A is
/// the n x k image-video correlation matrix.
struct IbcTrainingSet {
    Matrix U;  // d^2 x n
    Matrix V;  // d^2 x k
    Matrix A;  // n x k
};

/// Linear sign hashes: videos map through sgn(P^T vec(S~)), images through
/// sgn(Q^T vec(q q^T)). P and Q are d^2 x r.
struct IbcModel {
    Matrix P;
    Matrix Q;
    int d = 0;
    double lambda = 100.0;
    std::uint64_t seed = 0;

    int bits() const { return static_cast<int>(P.cols()); }
};

enum class CorrelationMode { Raw, TopM };

/// Assemble U and V from subspaces and raw image vectors. A is left empty;
/// compose with correlation().
IbcTrainingSet build_training(const std::vector<SubspaceEntry>& subspaces,
                              const std::vector<Vector>& images);

/// Raw mode: A = U^T V. TopM mode: per column of U^T V, the top_m largest
/// entries become 1 and the rest 0; ties at the cutoff break by ascending
/// row index.
Matrix correlation(const Matrix& u, const Matrix& v, CorrelationMode mode, int top_m = 0);

/// Exact maximizer of Tr(B * corr * opposite_codes^T) - lambda*||B - proj^T data||_F^2
/// over sign matrices: B = sgn(opposite_codes * corr^T + 2*lambda*proj^T*data).
/// Entries are +-1, sgn(0) = +1.
Matrix update_codes(const Matrix& opposite_codes, const Matrix& corr,
                    const Matrix& proj, const Matrix& data, double lambda);

/// Least-squares projection fitting codes: minimizes ||codes - P^T data||_F^2
/// via the normal equations; falls back to a ridge-regularized solve when the
/// Gram matrix is numerically singular.
Matrix solve_projection(const Matrix& data, const Matrix& codes);

struct IbcTrainOptions {
    int bits = 64;
    double lambda = 100.0;
    int outer_iters = 2;
    int inner_passes = 2;
    std::uint64_t seed = 0;
};

struct IbcTrainResult {
    IbcModel model;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    // One sequence per (outer iteration, side): surrogate objective sampled
    // before the first inner step and after every code/projection update.
    std::vector<std::vector<double>> surrogate_trace;
};

/// Alternating maximization of Tr(g(U) A f(V)^T), image side first, with
/// inner code/projection passes on each side. Deterministic per seed.
IbcTrainResult train_ibc(const IbcTrainingSet& train, const IbcTrainOptions& opts);

/// Tr(sgn(Q^T U) * A * sgn(P^T V)^T).
double ibc_objective(const IbcModel& model, const IbcTrainingSet& train);

SignCode encode_video_ibc(const IbcModel& model, const SubspaceEntry& subspace);
SignCode encode_image_ibc(const IbcModel& model, const Vector& q);

}  // namespace bsc
