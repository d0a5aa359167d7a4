#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Selects the OpenMP kernel or the serial reference path.
enum class Execution { Serial, Parallel };

// Error taxonomy; the CLI maps format/data -> exit 2, numeric -> exit 3.
class format_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class data_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class numeric_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sign with the fixed convention sgn(0) = +1.
inline double sign(double x) {
    return x >= 0.0 ? 1.0 : -1.0;
}

/// Entrywise sign, sgn(0) = +1.
inline Matrix sign_of(const Matrix& m) {
    return m.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
}

}  // namespace bsc
