#include "bsc/subspace.h"

#include "topk.h"

#include <Eigen/SVD>

#include <cmath>
#include <cstddef>

namespace bsc {

Matrix orthonormal_basis(const FrameMatrix& frames, double rel_tol, Eigen::Index max_rank) {
    const Matrix& f = frames.data;
    if (f.rows() < 1 || f.cols() < 1) {
        throw std::invalid_argument("orthonormal_basis: empty frame matrix");
    }
    if (!f.allFinite()) {
        throw std::invalid_argument("orthonormal_basis: non-finite frame entries");
    }
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
        throw std::invalid_argument("orthonormal_basis: rel_tol must be in (0,1)");
    }

    Eigen::BDCSVD<Matrix> svd(f, Eigen::ComputeThinU);
    const Vector& sigma = svd.singularValues();
    double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    if (sigma_max <= 0.0) {
        throw numeric_error("degenerate subspace: all-zero frame matrix for video '" +
                            frames.video_id + "'");
    }

    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > rel_tol * sigma_max) ++rank;
    if (max_rank > 0 && rank > max_rank) rank = max_rank;

    return svd.matrixU().leftCols(rank);
}

Matrix projector(const Matrix& basis) {
    Eigen::Index rho = basis.cols();
    double residual = (basis.transpose() * basis - Matrix::Identity(rho, rho)).norm();
    if (residual > 1e-6) {
        throw std::invalid_argument("projector: basis columns are not orthonormal");
    }
    return basis * basis.transpose();
}

SubspaceEntry make_subspace(const FrameMatrix& frames, double rel_tol, Eigen::Index max_rank) {
    SubspaceEntry entry;
    entry.video_id = frames.video_id;
    entry.basis = orthonormal_basis(frames, rel_tol, max_rank);
    entry.projector = entry.basis * entry.basis.transpose();
    return entry;
}

double distance_sq(const Vector& q, const Matrix& proj) {
    if (proj.rows() != proj.cols() || q.size() != proj.rows()) {
        throw std::invalid_argument("distance_sq: dimension mismatch");
    }
    double value = q.dot(q) - q.dot(proj * q);
    if (value < 0.0 && value >= -1e-9) value = 0.0;
    return value;
}

QueryLift lift_query(const Vector& q, std::string query_id) {
    if (!q.allFinite()) {
        throw std::invalid_argument("lift_query: non-finite query entries");
    }
    QueryLift lift;
    lift.query_id = std::move(query_id);
    lift.raw = q;
    const Eigen::Index d = q.size();
    lift.lifted.resize(d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            lift.lifted(i + d * j) = q(i) * q(j);
        }
    }
    return lift;
}

double vec_score(const SubspaceEntry& subspace, const QueryLift& lift) {
    const Matrix& proj = subspace.projector;
    if (proj.size() != lift.lifted.size()) {
        throw std::invalid_argument("vec_score: dimension mismatch");
    }
    // Eigen stores column-major, so proj.data() is vec(S~) directly.
    Eigen::Map<const Vector> vec_proj(proj.data(), proj.size());
    return vec_proj.dot(lift.lifted);
}

RankedResult exact_search(const QueryLift& lift, const std::vector<SubspaceEntry>& database,
                          std::size_t k, Execution exec) {
    if (database.empty()) {
        throw std::invalid_argument("exact_search: empty database");
    }
    if (k > database.size()) {
        throw std::invalid_argument("exact_search: k exceeds database size");
    }

    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(database.size());
    std::vector<double> scores(database.size());
    std::vector<std::string> ids(database.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) ids[i] = database[i].video_id;

    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            scores[i] = vec_score(database[i], lift);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            scores[i] = vec_score(database[i], lift);
        }
    }

    RankedResult out;
    out.reserve(k);
    for (std::size_t idx : detail::top_k_by_score(scores, ids, k)) {
        out.push_back({ids[idx], scores[idx]});
    }
    return out;
}

}  // namespace bsc
