#include "bsc/synth.h"

#include "bsc/rand.h"

#include <Eigen/SVD>

#include <cstdio>

namespace fs = std::filesystem;

namespace bsc {

namespace {

std::string padded(const char* prefix, int cluster, int video) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%02dv%03d", prefix, cluster, video);
    return buf;
}

}  // namespace

io::Manifest synthesize(const SynthParams& params, const fs::path& out_dir) {
    if (params.clusters < 1 || params.videos_per_cluster < 1 || params.frames_per_video < 1) {
        throw std::invalid_argument("synthesize: counts must be >= 1");
    }
    if (params.dim < 2 || params.subspace_dim < 1 || params.subspace_dim >= params.dim) {
        throw std::invalid_argument("synthesize: need 1 <= subspace_dim < dim");
    }
    if (!(params.noise >= 0.0)) {
        throw std::invalid_argument("synthesize: noise must be >= 0");
    }
    if (params.clusters > 99 || params.videos_per_cluster > 999) {
        throw std::invalid_argument("synthesize: id scheme caps at 99 clusters x 999 videos");
    }

    fs::create_directories(out_dir / "frames");
    fs::create_directories(out_dir / "images");

    Rng rng(params.seed);
    const Eigen::Index d = params.dim;
    const Eigen::Index sd = params.subspace_dim;

    io::Manifest manifest;
    manifest.dir = out_dir;

    auto draw_point = [&](const Matrix& basis) {
        Vector coeffs(sd);
        for (Eigen::Index t = 0; t < sd; ++t) coeffs(t) = rng.gaussian();
        Vector point = basis * coeffs;
        if (params.noise > 0.0) {
            for (Eigen::Index t = 0; t < d; ++t) point(t) += params.noise * rng.gaussian();
        }
        return point;
    };

    for (int c = 0; c < params.clusters; ++c) {
        Matrix cluster_basis = random_orthonormal(d, sd, rng);
        char category[16];
        std::snprintf(category, sizeof(category), "cat%02d", c);
        for (int v = 0; v < params.videos_per_cluster; ++v) {
            std::string video_id = padded("c", c, v);
            std::string image_id = padded("q", c, v);

            Matrix frames(d, params.frames_per_video);
            for (int f = 0; f < params.frames_per_video; ++f) {
                frames.col(f) = draw_point(cluster_basis);
            }
            Vector held_out = draw_point(cluster_basis);  // the image query

            std::string frame_rel = "frames/" + video_id + ".bscm";
            std::string image_rel = "images/" + image_id + ".bscm";
            io::write_matrix(out_dir / frame_rel, frames);
            io::write_matrix(out_dir / image_rel, held_out);

            manifest.videos.push_back({video_id, frame_rel, category});
            manifest.images.push_back({image_id, image_rel, category, video_id});
        }
    }

    io::write_manifest(out_dir / "manifest.txt", manifest);
    return manifest;
}

Matrix PcaTransform::apply(const Matrix& vectors) const {
    if (vectors.rows() != mean.size()) {
        throw std::invalid_argument("PcaTransform: dimension mismatch");
    }
    return components.transpose() * (vectors.colwise() - mean);
}

std::pair<Matrix, PcaTransform> pca_reduce(const Matrix& vectors, Eigen::Index target_dim) {
    if (vectors.cols() < 1) throw std::invalid_argument("pca_reduce: no samples");
    if (target_dim < 1 || target_dim > vectors.rows()) {
        throw std::invalid_argument("pca_reduce: target_dim out of range");
    }
    PcaTransform transform;
    transform.mean = vectors.rowwise().mean();
    Matrix centered = vectors.colwise() - transform.mean;
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
    transform.components = svd.matrixU().leftCols(std::min(target_dim, svd.matrixU().cols()));
    if (transform.components.cols() < target_dim) {
        // Fewer samples than target_dim: pad with zero directions so the
        // output dimension honors the request.
        Matrix padded = Matrix::Zero(vectors.rows(), target_dim);
        padded.leftCols(transform.components.cols()) = transform.components;
        transform.components = padded;
    }
    return {transform.apply(vectors), transform};
}

}  // namespace bsc
