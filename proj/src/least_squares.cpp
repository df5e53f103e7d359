#include "eitmem/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace eitmem {

Eigen::MatrixXd LeastSquaresResult::covariance() const {
    const auto m = residuals.size();
    const auto n = params.size();
    const double s2 = m > n ? cost / static_cast<double>(m - n) : 0.0;
    Eigen::MatrixXd jtj = jacobian.transpose() * jacobian;
    return s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
}

Eigen::MatrixXd numeric_jacobian(const ResidualFn& r, const Eigen::VectorXd& p, double rel_step) {
    Eigen::VectorXd r0 = r(p);
    Eigen::MatrixXd J(r0.size(), p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double h = rel_step * std::max(1.0, std::abs(p[i]));
        Eigen::VectorXd a = p, b = p;
        a[i] += h;
        b[i] -= h;
        J.col(i) = (r(a) - r(b)) / (2.0 * h);
    }
    return J;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& r, Eigen::VectorXd p0, const LeastSquaresOptions& opt) {
    LeastSquaresResult best;
    best.params = std::move(p0);
    best.residuals = r(best.params);
    best.cost = best.residuals.squaredNorm();
    if (!std::isfinite(best.cost)) throw numerical_error("least squares: non-finite residuals at the initial guess");
    double lambda = opt.initial_damping;

    for (int it = 0; it < opt.max_iterations; ++it) {
        best.iterations = it + 1;
        best.jacobian = numeric_jacobian(r, best.params, opt.fd_step);
        const Eigen::MatrixXd jtj = best.jacobian.transpose() * best.jacobian;
        const Eigen::VectorXd g = best.jacobian.transpose() * best.residuals;
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-30);

        bool improved = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            Eigen::VectorXd step = a.ldlt().solve(-g);
            Eigen::VectorXd trial = best.params + step;
            Eigen::VectorXd res = r(trial);
            const double cost = res.squaredNorm();
            if (std::isfinite(cost) && cost < best.cost) {
                const double rel_cost = (best.cost - cost) / std::max(best.cost, 1e-300);
                const double rel_step = step.norm() / std::max(best.params.norm(), 1e-300);
                best.params = trial;
                best.residuals = res;
                best.cost = cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                if (rel_step < opt.step_tolerance || rel_cost < opt.cost_tolerance) {
                    best.jacobian = numeric_jacobian(r, best.params, opt.fd_step);
                    best.converged = true;
                    return best;
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) {
            // No descent direction left: the current point is a minimum to
            // within the damping range explored.
            best.converged = true;
            return best;
        }
    }
    throw fit_error("least squares did not converge within the iteration limit", best);
}

}  // namespace eitmem
