#include "bsc/rand.h"

#include <cmath>

namespace bsc {

double Rng::uniform() {
    // 53-bit mantissa from the top bits of one 64-bit draw.
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on (0,1] uniforms; 1-u keeps the log argument away from 0.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

Matrix Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = gaussian();
        }
    }
    return m;
}

Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    if (cols > rows) {
        throw std::invalid_argument("random_orthonormal: cols must not exceed rows");
    }
    Matrix g = rng.gaussian_matrix(rows, cols);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    return q;
}

}  // namespace bsc
