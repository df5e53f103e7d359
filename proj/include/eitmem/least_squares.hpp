#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "eitmem/errors.hpp"

namespace eitmem {

/// Residual vector r(p); the solver minimises |r|^2.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
    int max_iterations = 200;
    double initial_damping = 1e-3;
    double step_tolerance = 1e-10;   // relative parameter change
    double cost_tolerance = 1e-14;   // relative cost decrease
    double fd_step = 1e-6;           // relative central-difference step
};

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd jacobian;
    double cost = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;

    /// Parameter covariance s^2 (J^T J)^-1 with s^2 = cost / (m - n).
    Eigen::MatrixXd covariance() const;
};

/// Fit failure; carries the best parameters reached.
class fit_error : public numerical_error {
public:
    fit_error(const std::string& what, LeastSquaresResult best) : numerical_error(what), best_(std::move(best)) {}
    const LeastSquaresResult& best() const { return best_; }

private:
    LeastSquaresResult best_;
};

/// Central-difference Jacobian of r at p.
Eigen::MatrixXd numeric_jacobian(const ResidualFn& r, const Eigen::VectorXd& p, double rel_step);

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal scaling).
/// Throws fit_error when max_iterations is reached without convergence.
LeastSquaresResult levenberg_marquardt(const ResidualFn& r, Eigen::VectorXd p0, const LeastSquaresOptions& opt = {});

}  // namespace eitmem
