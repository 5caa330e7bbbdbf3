#pragma once

#include "fracrd/grid.hpp"
#include "fracrd/spatial_operators.hpp"

#include <iosfwd>
#include <string>

namespace fracrd {

struct EigenPair {
    double lambda1 = 0.0;
    /// Rescaled so that the grid quadrature of e1 is 1.
    Field e1;
    /// Integral of the iterate before the final rescaling.
    double raw_integral = 0.0;
    std::string method;
    int iterations = 0;
    /// |A e1 - lambda1 e1|_2 / |e1|_2 for the linear path; last quotient
    /// decrease over the convergence window for the variational path.
    double residual = 0.0;

    /// lambda1 header line, then the field as x[,y],value.
    void write_csv(std::ostream& os) const;
};

/// Operator settings used by the eigen solvers for a grid: numeric tail in
/// 2D, skip_diagonal.
OperatorParams eigen_operator_params(const Grid& grid, double s, double p);

/// Smallest eigenpair of the p = 2 operator matrix by inverse power iteration.
EigenPair first_eigenpair_linear(const Grid& grid, double s);

/// Minimizes (1/2)[u]^p / |u|_p^p over nonnegative fields by projected
/// gradient descent with backtracking, starting from `initial_level`.
/// step_size <= 0 picks one from the operator diagonal.
EigenPair first_eigenpair_plap(const Grid& grid, double s, double p, int max_iters = 200000,
                               double step_size = 0.0, double initial_level = 1.0);

}  // namespace fracrd
