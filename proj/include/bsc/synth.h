#pragma once

#include "bsc/io.h"
#include "bsc/types.h"

#include <cstdint>
#include <filesystem>
#include <utility>

namespace bsc {

/// Clustered dataset: every cluster gets one random subspace_dim-dimensional
/// subspace; each video's frames are points of that subspace plus Gaussian
/// noise, and each video contributes one held-out frame as an image query.
struct SynthParams {
    int clusters = 2;
    int videos_per_cluster = 5;
    int frames_per_video = 12;
    int dim = 16;
    int subspace_dim = 2;
    double noise = 0.0;
    std::uint64_t seed = 1;
};

/// Writes frame/image matrix files plus manifest.txt under out_dir and
/// returns the manifest. Deterministic per seed.
io::Manifest synthesize(const SynthParams& params, const std::filesystem::path& out_dir);

struct PcaTransform {
    Vector mean;
    Matrix components;  // d x target_dim, orthonormal columns

    Matrix apply(const Matrix& vectors) const;  // columns are samples
};

/// Centered PCA via SVD; input columns are samples. Returns the projected
/// data (target_dim x n) and the fitted transform.
std::pair<Matrix, PcaTransform> pca_reduce(const Matrix& vectors, Eigen::Index target_dim);

}  // namespace bsc
