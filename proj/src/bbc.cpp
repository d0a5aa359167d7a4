#include "bsc/bbc.h"

#include "bsc/rand.h"

#include <Eigen/SVD>

#include <cmath>
#include <cstddef>

namespace bsc {

std::vector<Matrix> preprocess(const std::vector<Matrix>& mats, CenterScale* stats) {
    if (mats.empty()) throw std::invalid_argument("preprocess: empty list");

    Matrix mean = Matrix::Zero(mats.front().rows(), mats.front().cols());
    for (const Matrix& m : mats) {
        if (m.rows() != mean.rows() || m.cols() != mean.cols()) {
            throw std::invalid_argument("preprocess: inconsistent matrix shapes");
        }
        mean += m;
    }
    mean /= static_cast<double>(mats.size());

    std::vector<Matrix> out;
    out.reserve(mats.size());
    std::vector<double> norms;
    norms.reserve(mats.size());
    for (const Matrix& m : mats) {
        Matrix centered = m - mean;
        double norm = centered.norm();
        if (norm > 0.0) centered /= norm;
        out.push_back(std::move(centered));
        norms.push_back(norm);
    }
    if (stats) {
        stats->mean = std::move(mean);
        stats->norms = std::move(norms);
    }
    return out;
}

Matrix bilinear_encode(const Matrix& r1, const Matrix& r2, const Matrix& x) {
    if (r1.rows() != x.rows() || r2.rows() != x.cols()) {
        throw std::invalid_argument("bilinear_encode: shape mismatch");
    }
    return sign_of(r1.transpose() * x * r2);
}

SignCode flatten_code(const Matrix& code) {
    SignCode flat(static_cast<std::size_t>(code.size()));
    // Column-major walk matches vec().
    Eigen::Map<const Vector> view(code.data(), code.size());
    for (Eigen::Index i = 0; i < view.size(); ++i) {
        flat[static_cast<std::size_t>(i)] = view(i) >= 0.0 ? 1 : -1;
    }
    return flat;
}

BbcTrainingSet make_bbc_training(const std::vector<SubspaceEntry>& subspaces,
                                 const std::vector<Vector>& images,
                                 const Eigen::MatrixXi& delta) {
    if (subspaces.empty() || images.empty()) {
        throw std::invalid_argument("make_bbc_training: empty inputs");
    }
    if (delta.rows() != static_cast<Eigen::Index>(images.size()) ||
        delta.cols() != static_cast<Eigen::Index>(subspaces.size())) {
        throw std::invalid_argument("make_bbc_training: delta must be n x k");
    }
    if (((delta.array() != 0) && (delta.array() != 1)).any()) {
        throw std::invalid_argument("make_bbc_training: delta entries must be 0 or 1");
    }
    const Eigen::Index d = subspaces.front().dim();

    BbcTrainingSet train;
    std::vector<Matrix> raw_videos;
    raw_videos.reserve(subspaces.size());
    for (const SubspaceEntry& s : subspaces) {
        if (s.dim() != d) throw std::invalid_argument("make_bbc_training: mixed dimensions");
        raw_videos.push_back(s.projector);
    }
    std::vector<Matrix> raw_images;
    raw_images.reserve(images.size());
    for (const Vector& q : images) {
        if (q.size() != d) throw std::invalid_argument("make_bbc_training: mixed dimensions");
        raw_images.push_back(q * q.transpose());
    }

    train.video_mats = preprocess(raw_videos, &train.video_stats);
    train.image_mats = preprocess(raw_images, &train.image_stats);
    train.delta = delta;
    return train;
}

ObjectiveTerms bbc_objective_terms(const BbcModel& model, const BbcTrainingSet& train,
                                   const std::vector<Matrix>& codes_U,
                                   const std::vector<Matrix>& codes_V) {
    const std::size_t n = train.image_mats.size();
    const std::size_t k = train.video_mats.size();
    if (codes_U.size() != n || codes_V.size() != k) {
        throw std::invalid_argument("bbc_objective: code counts do not match training set");
    }

    ObjectiveTerms terms;
    for (std::size_t i = 0; i < n; ++i) {
        terms.image +=
            (codes_U[i] * model.Q2.transpose() * train.image_mats[i].transpose() * model.Q1)
                .trace();
    }
    for (std::size_t j = 0; j < k; ++j) {
        terms.video +=
            (codes_V[j] * model.P2.transpose() * train.video_mats[j].transpose() * model.P1)
                .trace();
    }
    const double scale = model.mu / std::sqrt(static_cast<double>(model.bits()));
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (train.delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0) {
                cross += (codes_V[j] * codes_U[i].transpose()).trace();
            }
        }
    }
    terms.cross = scale * cross;
    return terms;
}

double bbc_objective(const BbcModel& model, const BbcTrainingSet& train,
                     const std::vector<Matrix>& codes_U, const std::vector<Matrix>& codes_V) {
    return bbc_objective_terms(model, train, codes_U, codes_V).total();
}

Matrix polar_max_trace(const Matrix& d_mat) {
    // Tr(D P) = Tr(L S R^T P) is maximized over P^T P = I by P = R L^T,
    // where D = L S R^T is the thin SVD.
    Eigen::JacobiSVD<Matrix> svd(d_mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixV() * svd.matrixU().transpose();
}

Matrix update_p1(const std::vector<Matrix>& data_mats, const Matrix& p2,
                 const std::vector<Matrix>& codes) {
    if (data_mats.empty() || codes.size() != data_mats.size()) {
        throw std::invalid_argument("update_p1: shape mismatch");
    }
    const Eigen::Index c1 = codes.front().rows();
    const Eigen::Index d = data_mats.front().rows();
    Matrix accum = Matrix::Zero(c1, d);
    for (std::size_t j = 0; j < data_mats.size(); ++j) {
        accum += codes[j] * p2.transpose() * data_mats[j].transpose();
    }
    return polar_max_trace(accum);
}

Matrix update_p2(const std::vector<Matrix>& data_mats, const Matrix& p1,
                 const std::vector<Matrix>& codes) {
    if (data_mats.empty() || codes.size() != data_mats.size()) {
        throw std::invalid_argument("update_p2: shape mismatch");
    }
    const Eigen::Index c2 = codes.front().cols();
    const Eigen::Index d = data_mats.front().rows();
    Matrix accum = Matrix::Zero(d, c2);
    for (std::size_t j = 0; j < data_mats.size(); ++j) {
        accum += data_mats[j].transpose() * p1 * codes[j];
    }
    // Tr(P2^T D2) = Tr(D2^T P2), so the same polar step applies to D2^T.
    return polar_max_trace(accum.transpose());
}

Matrix update_code(const Matrix& r1, const Matrix& r2, const Matrix& x,
                   const Matrix& neighbor_code_sum, double mu_over_sqrt_c) {
    if (r1.rows() != x.rows() || r2.rows() != x.cols()) {
        throw std::invalid_argument("update_code: shape mismatch");
    }
    if (neighbor_code_sum.rows() != r1.cols() || neighbor_code_sum.cols() != r2.cols()) {
        throw std::invalid_argument("update_code: neighbor code shape mismatch");
    }
    // D3^T = r1^T x r2 + scale * neighbor_code_sum; B = sgn(D3^T).
    return sign_of(r1.transpose() * x * r2 + mu_over_sqrt_c * neighbor_code_sum);
}

namespace {

double orthonormality_residual(const Matrix& r) {
    return (r.transpose() * r - Matrix::Identity(r.cols(), r.cols())).norm();
}

// Delta-weighted sums of opposite-side codes; column j of delta selects the
// image codes feeding video j, row i selects the video codes feeding image i.
Matrix neighbor_sum_for_video(const Eigen::MatrixXi& delta, const std::vector<Matrix>& codes_U,
                              std::size_t j, Eigen::Index c1, Eigen::Index c2) {
    Matrix sum = Matrix::Zero(c1, c2);
    for (std::size_t i = 0; i < codes_U.size(); ++i) {
        if (delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0) {
            sum += codes_U[i];
        }
    }
    return sum;
}

Matrix neighbor_sum_for_image(const Eigen::MatrixXi& delta, const std::vector<Matrix>& codes_V,
                              std::size_t i, Eigen::Index c1, Eigen::Index c2) {
    Matrix sum = Matrix::Zero(c1, c2);
    for (std::size_t j = 0; j < codes_V.size(); ++j) {
        if (delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0) {
            sum += codes_V[j];
        }
    }
    return sum;
}

}  // namespace

BbcTrainResult train_bbc(const BbcTrainingSet& train, const BbcTrainOptions& opts) {
    if (train.video_mats.empty() || train.image_mats.empty()) {
        throw std::invalid_argument("train_bbc: empty training set");
    }
    const Eigen::Index d = train.video_mats.front().rows();
    if (opts.c1 < 1 || opts.c2 < 1 || opts.c1 > d || opts.c2 > d) {
        throw std::invalid_argument("train_bbc: c1 and c2 must lie in [1, d]");
    }
    if (!(opts.mu >= 0.0)) throw std::invalid_argument("train_bbc: mu must be >= 0");
    if (opts.iters < 1) throw std::invalid_argument("train_bbc: iters must be >= 1");
    if (train.delta.rows() != static_cast<Eigen::Index>(train.image_mats.size()) ||
        train.delta.cols() != static_cast<Eigen::Index>(train.video_mats.size())) {
        throw std::invalid_argument("train_bbc: delta must be n x k");
    }

    const std::size_t k = train.video_mats.size();
    const std::size_t n = train.image_mats.size();
    const Eigen::Index c1 = opts.c1;
    const Eigen::Index c2 = opts.c2;
    const double scale = opts.mu / std::sqrt(static_cast<double>(opts.c1 * opts.c2));

    BbcTrainResult result;
    BbcModel& model = result.model;
    model.mu = opts.mu;
    model.seed = opts.seed;
    model.d = static_cast<int>(d);
    model.c1 = opts.c1;
    model.c2 = opts.c2;
    model.center_V = train.video_stats.mean;
    model.center_U = train.image_stats.mean;

    Rng rng(opts.seed);
    model.Q1 = random_orthonormal(d, c1, rng);
    model.Q2 = random_orthonormal(d, c2, rng);
    model.P2 = random_orthonormal(d, c2, rng);
    model.P1 = random_orthonormal(d, c1, rng);

    // Start from codes consistent with the initial rotations.
    result.codes_V.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        result.codes_V[j] = bilinear_encode(model.P1, model.P2, train.video_mats[j]);
    }
    result.codes_U.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.codes_U[i] = bilinear_encode(model.Q1, model.Q2, train.image_mats[i]);
    }

    result.objective_trace.push_back(
        bbc_objective(model, train, result.codes_U, result.codes_V));

    auto record = [&] {
        result.objective_trace.push_back(
            bbc_objective(model, train, result.codes_U, result.codes_V));
    };

    for (int sweep = 0; sweep < opts.iters; ++sweep) {
        const Matrix p1_prev = model.P1;
        const Matrix p2_prev = model.P2;
        const Matrix q1_prev = model.Q1;
        const Matrix q2_prev = model.Q2;
        long long flips = 0;

        // One item's code update; items within a side do not interact, so the
        // parallel sweep is bitwise identical to the sequential one.
        auto sweep_codes = [&](std::vector<Matrix>& codes, auto&& one_item) {
            const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(codes.size());
            if (opts.exec == Execution::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : flips)
                for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
                    Matrix updated = one_item(static_cast<std::size_t>(idx));
                    if ((updated.array() != codes[idx].array()).any()) ++flips;
                    codes[idx] = std::move(updated);
                }
            } else {
                for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
                    Matrix updated = one_item(static_cast<std::size_t>(idx));
                    if ((updated.array() != codes[idx].array()).any()) ++flips;
                    codes[idx] = std::move(updated);
                }
            }
        };

        // Video side.
        model.P1 = update_p1(train.video_mats, model.P2, result.codes_V);
        record();
        model.P2 = update_p2(train.video_mats, model.P1, result.codes_V);
        record();
        sweep_codes(result.codes_V, [&](std::size_t j) {
            return update_code(model.P1, model.P2, train.video_mats[j],
                               neighbor_sum_for_video(train.delta, result.codes_U, j, c1, c2),
                               scale);
        });
        record();

        // Image side.
        model.Q1 = update_p1(train.image_mats, model.Q2, result.codes_U);
        record();
        model.Q2 = update_p2(train.image_mats, model.Q1, result.codes_U);
        record();
        sweep_codes(result.codes_U, [&](std::size_t i) {
            return update_code(model.Q1, model.Q2, train.image_mats[i],
                               neighbor_sum_for_image(train.delta, result.codes_V, i, c1, c2),
                               scale);
        });
        record();

        result.orthonormality_residuals.push_back(
            std::max({orthonormality_residual(model.P1), orthonormality_residual(model.P2),
                      orthonormality_residual(model.Q1), orthonormality_residual(model.Q2)}));
        result.sweeps = sweep + 1;

        double rotation_delta =
            std::max({(model.P1 - p1_prev).norm(), (model.P2 - p2_prev).norm(),
                      (model.Q1 - q1_prev).norm(), (model.Q2 - q2_prev).norm()});
        if (flips == 0 && rotation_delta <= 1e-10) {
            result.converged = true;
            break;
        }
    }

    return result;
}

namespace {

Matrix center_and_normalize(const Matrix& x, const Matrix& mean) {
    Matrix centered = x - mean;
    double norm = centered.norm();
    if (norm > 0.0) centered /= norm;
    return centered;
}

}  // namespace

Matrix encode_video_bbc(const BbcModel& model, const SubspaceEntry& subspace) {
    if (subspace.dim() != model.d) {
        throw std::invalid_argument("encode_video_bbc: dimension mismatch");
    }
    return bilinear_encode(model.P1, model.P2,
                           center_and_normalize(subspace.projector, model.center_V));
}

Matrix encode_image_bbc(const BbcModel& model, const Vector& q) {
    if (q.size() != model.d) {
        throw std::invalid_argument("encode_image_bbc: dimension mismatch");
    }
    Matrix outer = q * q.transpose();
    return bilinear_encode(model.Q1, model.Q2, center_and_normalize(outer, model.center_U));
}

}  // namespace bsc
