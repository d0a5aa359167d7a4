#pragma once

#include "bsc/types.h"

#include <string>
#include <vector>

namespace bsc {

/// Keyframe features of one video, one column per frame (d x m).
struct FrameMatrix {
    std::string video_id;
    Matrix data;
};

/// A video as the span of its keyframes: orthonormal basis B (d x rho) and
/// the orthogonal projector B*B^T (d x d), symmetric and idempotent.
struct SubspaceEntry {
    std::string video_id;
    Matrix basis;
    Matrix projector;

    Eigen::Index dim() const { return basis.rows(); }
    Eigen::Index rank() const { return basis.cols(); }
};

/// An image query q together with its lifting vec(q q^T), the d^2-vector the
/// inner-product search runs against.
struct QueryLift {
    std::string query_id;
    Vector raw;
    Vector lifted;
};

struct ScoredId {
    std::string video_id;
    double score;
};

/// Descending score order; equal scores break by ascending video id.
using RankedResult = std::vector<ScoredId>;

/// Orthonormal basis of the column span of `frames`, keeping singular
/// directions with sigma_i > rel_tol * sigma_max. `max_rank` > 0 additionally
/// caps the rank. Throws numeric_error on an all-zero frame matrix.
Matrix orthonormal_basis(const FrameMatrix& frames, double rel_tol = 1e-6,
                         Eigen::Index max_rank = 0);

/// B * B^T for an orthonormal basis B; equals S (S^T S)^-1 S^T for any basis
/// S of the same span.
Matrix projector(const Matrix& basis);

SubspaceEntry make_subspace(const FrameMatrix& frames, double rel_tol = 1e-6,
                            Eigen::Index max_rank = 0);

/// Squared point-to-subspace distance q^T q - Tr(S~ q q^T). Negative values
/// within 1e-9 of zero are clamped to 0.
double distance_sq(const Vector& q, const Matrix& proj);

/// Column-major lifting: lifted[i + d*j] = q_i * q_j.
QueryLift lift_query(const Vector& q, std::string query_id = {});

/// <vec(S~), vec(q q^T)>; equals Tr(S~ q q^T).
double vec_score(const SubspaceEntry& subspace, const QueryLift& lift);

/// Top-k subspaces by vec_score, ties by ascending video id. The ordering is
/// identical to ascending distance_sq. Exhaustive scan.
RankedResult exact_search(const QueryLift& lift,
                          const std::vector<SubspaceEntry>& database,
                          std::size_t k, Execution exec = Execution::Parallel);

}  // namespace bsc
