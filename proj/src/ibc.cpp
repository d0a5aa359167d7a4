#include "bsc/ibc.h"

#include "bsc/rand.h"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace bsc {

namespace {

// Normal-equation solver for min ||codes - P^T data||_F^2 with the Gram
// matrix factored once and reused across solves. The plain LDLT answer is
// accepted when it actually satisfies the normal equations; otherwise the
// Gram matrix is numerically singular and a ridge-regularized factorization
// takes over.
class GramSolver {
public:
    explicit GramSolver(const Matrix& data) : gram_(data * data.transpose()) {
        plain_.compute(gram_);
    }

    Matrix solve(const Matrix& rhs) const {
        Matrix x = plain_.solve(rhs);
        if (x.allFinite() && (gram_ * x - rhs).norm() <= 1e-8 * (1.0 + rhs.norm())) {
            return x;
        }
        if (!ridge_) {
            double eps = 1e-8 * gram_.trace() / static_cast<double>(gram_.rows());
            if (!(eps > 0.0)) eps = 1e-12;
            ridge_.emplace();
            ridge_->compute(gram_ + eps * Matrix::Identity(gram_.rows(), gram_.cols()));
        }
        return ridge_->solve(rhs);
    }

private:
    Matrix gram_;
    Eigen::LDLT<Matrix> plain_;
    mutable std::optional<Eigen::LDLT<Matrix>> ridge_;
};

double surrogate_objective(const Matrix& codes, const Matrix& opposite_codes,
                           const Matrix& corr, const Matrix& proj, const Matrix& data,
                           double lambda) {
    double fit = (codes * corr * opposite_codes.transpose()).trace();
    double penalty = (codes - proj.transpose() * data).squaredNorm();
    return fit - lambda * penalty;
}

}  // namespace

IbcTrainingSet build_training(const std::vector<SubspaceEntry>& subspaces,
                              const std::vector<Vector>& images) {
    if (images.empty()) throw std::invalid_argument("build_training: no images");
    if (subspaces.empty()) throw std::invalid_argument("build_training: no subspaces");

    const Eigen::Index d = subspaces.front().dim();
    const Eigen::Index d2 = d * d;

    IbcTrainingSet train;
    train.U.resize(d2, static_cast<Eigen::Index>(images.size()));
    for (std::size_t i = 0; i < images.size(); ++i) {
        if (images[i].size() != d) {
            throw std::invalid_argument("build_training: image dimension mismatch");
        }
        train.U.col(static_cast<Eigen::Index>(i)) = lift_query(images[i]).lifted;
    }

    train.V.resize(d2, static_cast<Eigen::Index>(subspaces.size()));
    for (std::size_t j = 0; j < subspaces.size(); ++j) {
        const Matrix& proj = subspaces[j].projector;
        if (proj.size() != d2) {
            throw std::invalid_argument("build_training: subspace dimension mismatch");
        }
        train.V.col(static_cast<Eigen::Index>(j)) =
            Eigen::Map<const Vector>(proj.data(), proj.size());
    }
    return train;
}

Matrix correlation(const Matrix& u, const Matrix& v, CorrelationMode mode, int top_m) {
    if (u.rows() != v.rows()) {
        throw std::invalid_argument("correlation: U and V row counts differ");
    }
    Matrix a = u.transpose() * v;
    if (mode == CorrelationMode::Raw) return a;

    const Eigen::Index n = a.rows();
    if (top_m < 1 || top_m > n) {
        throw std::invalid_argument("correlation: top_m out of range [1, n]");
    }
    Matrix binarized = Matrix::Zero(n, a.cols());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(), [&](Eigen::Index r1, Eigen::Index r2) {
            if (a(r1, j) != a(r2, j)) return a(r1, j) > a(r2, j);
            return r1 < r2;
        });
        for (int t = 0; t < top_m; ++t) binarized(order[static_cast<std::size_t>(t)], j) = 1.0;
    }
    return binarized;
}

Matrix update_codes(const Matrix& opposite_codes, const Matrix& corr, const Matrix& proj,
                    const Matrix& data, double lambda) {
    if (opposite_codes.cols() != corr.cols() || corr.rows() != data.cols() ||
        proj.rows() != data.rows() || proj.cols() != opposite_codes.rows()) {
        throw std::invalid_argument("update_codes: shape mismatch");
    }
    return sign_of(opposite_codes * corr.transpose() + 2.0 * lambda * proj.transpose() * data);
}

Matrix solve_projection(const Matrix& data, const Matrix& codes) {
    if (codes.cols() != data.cols()) {
        throw std::invalid_argument("solve_projection: sample counts differ");
    }
    return GramSolver(data).solve(data * codes.transpose());
}

IbcTrainResult train_ibc(const IbcTrainingSet& train, const IbcTrainOptions& opts) {
    const Matrix& u = train.U;
    const Matrix& v = train.V;
    const Matrix& a = train.A;
    if (u.rows() != v.rows()) throw std::invalid_argument("train_ibc: U/V row counts differ");
    if (a.rows() != u.cols() || a.cols() != v.cols()) {
        throw std::invalid_argument("train_ibc: A must be n x k");
    }
    if (!u.allFinite() || !v.allFinite() || !a.allFinite()) {
        throw std::invalid_argument("train_ibc: non-finite training data");
    }
    if (opts.bits < 1) throw std::invalid_argument("train_ibc: bits must be >= 1");
    if (!(opts.lambda > 0.0)) throw std::invalid_argument("train_ibc: lambda must be > 0");
    if (opts.outer_iters < 1 || opts.inner_passes < 1) {
        throw std::invalid_argument("train_ibc: iteration counts must be >= 1");
    }

    const Eigen::Index d2 = u.rows();
    const Eigen::Index r = opts.bits;
    const double lambda = opts.lambda;

    Rng rng(opts.seed);
    Matrix q = rng.gaussian_matrix(d2, r);  // image side
    Matrix p = rng.gaussian_matrix(d2, r);  // video side

    Matrix f_v = sign_of(p.transpose() * v);  // r x k
    Matrix g_u = sign_of(q.transpose() * u);  // r x n

    IbcTrainResult result;
    result.initial_objective = (g_u * a * f_v.transpose()).trace();

    GramSolver image_solver(u);
    GramSolver video_solver(v);
    const Matrix a_t = a.transpose();

    for (int outer = 0; outer < opts.outer_iters; ++outer) {
        // Image side: fit g to the fixed video codes f(V).
        {
            std::vector<double> seq;
            Matrix b = g_u;
            seq.push_back(surrogate_objective(b, f_v, a, q, u, lambda));
            for (int t = 0; t < opts.inner_passes; ++t) {
                b = update_codes(f_v, a, q, u, lambda);
                seq.push_back(surrogate_objective(b, f_v, a, q, u, lambda));
                q = image_solver.solve(u * b.transpose());
                seq.push_back(surrogate_objective(b, f_v, a, q, u, lambda));
            }
            g_u = sign_of(q.transpose() * u);
            result.surrogate_trace.push_back(std::move(seq));
        }
        // Video side: the same sub-problem with A transposed.
        {
            std::vector<double> seq;
            Matrix b = f_v;
            seq.push_back(surrogate_objective(b, g_u, a_t, p, v, lambda));
            for (int t = 0; t < opts.inner_passes; ++t) {
                b = update_codes(g_u, a_t, p, v, lambda);
                seq.push_back(surrogate_objective(b, g_u, a_t, p, v, lambda));
                p = video_solver.solve(v * b.transpose());
                seq.push_back(surrogate_objective(b, g_u, a_t, p, v, lambda));
            }
            f_v = sign_of(p.transpose() * v);
            result.surrogate_trace.push_back(std::move(seq));
        }
    }

    result.final_objective = (g_u * a * f_v.transpose()).trace();

    IbcModel& model = result.model;
    model.P = std::move(p);
    model.Q = std::move(q);
    model.lambda = lambda;
    model.seed = opts.seed;
    Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
    model.d = (d * d == d2) ? static_cast<int>(d) : 0;
    return result;
}

double ibc_objective(const IbcModel& model, const IbcTrainingSet& train) {
    Matrix g_u = sign_of(model.Q.transpose() * train.U);
    Matrix f_v = sign_of(model.P.transpose() * train.V);
    return (g_u * train.A * f_v.transpose()).trace();
}

namespace {

SignCode sign_code_of(const Vector& values) {
    SignCode code(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        code[static_cast<std::size_t>(i)] = values(i) >= 0.0 ? 1 : -1;
    }
    return code;
}

}  // namespace

SignCode encode_video_ibc(const IbcModel& model, const SubspaceEntry& subspace) {
    const Matrix& proj = subspace.projector;
    if (proj.size() != model.P.rows()) {
        throw std::invalid_argument("encode_video_ibc: dimension mismatch");
    }
    Eigen::Map<const Vector> vec_proj(proj.data(), proj.size());
    return sign_code_of(model.P.transpose() * vec_proj);
}

SignCode encode_image_ibc(const IbcModel& model, const Vector& q) {
    QueryLift lift = lift_query(q);
    if (lift.lifted.size() != model.Q.rows()) {
        throw std::invalid_argument("encode_image_ibc: dimension mismatch");
    }
    return sign_code_of(model.Q.transpose() * lift.lifted);
}

}  // namespace bsc
