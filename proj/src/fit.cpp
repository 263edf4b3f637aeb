#include "qwsim/fit.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace qwsim {

namespace {

Vector residuals(const FitModel& model, const std::vector<double>& x, const std::vector<double>& y,
                 const std::vector<double>& sigma, const Vector& p) {
    Vector r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        r(static_cast<Index>(i)) = (y[i] - model(x[i], p)) / sigma[i];
    return r;
}

RealMatrix numeric_jacobian(const FitModel& model, const std::vector<double>& x,
                            const std::vector<double>& sigma, const Vector& p) {
    const Index np = p.size();
    RealMatrix jac(static_cast<Index>(x.size()), np);
    for (Index k = 0; k < np; ++k) {
        const double h = std::max(1e-7, 1e-7 * std::abs(p(k)));
        Vector lo = p, hi = p;
        lo(k) -= h;
        hi(k) += h;
        for (std::size_t i = 0; i < x.size(); ++i)
            jac(static_cast<Index>(i), k) = (model(x[i], hi) - model(x[i], lo)) / (2.0 * h * sigma[i]);
    }
    return jac;
}

}  // namespace

FitResult fit_curve(const FitModel& model, const std::vector<double>& x,
                    const std::vector<double>& y, const std::vector<double>& sigma,
                    Vector initial, int max_iterations) {
    if (x.size() != y.size() || x.size() != sigma.size())
        throw std::domain_error("fit_curve: x, y, sigma must have equal length");
    if (static_cast<Index>(x.size()) < initial.size())
        throw FitError("fit_curve: fewer points than parameters");
    for (double s : sigma)
        if (!(s > 0.0)) throw std::domain_error("fit_curve: sigmas must be positive");

    Vector p = std::move(initial);
    double lambda = 1e-3;
    Vector r = residuals(model, x, y, sigma, p);
    double chi2 = r.squaredNorm();

    FitResult result;
    int it = 0;
    for (; it < max_iterations; ++it) {
        const RealMatrix jac = numeric_jacobian(model, x, sigma, p);
        const RealMatrix jtj = jac.transpose() * jac;
        const Vector g = jac.transpose() * r;  // residual r = (y - f)/s, step solves (JtJ + l D) d = J^T r

        bool stepped = false;
        for (int tries = 0; tries < 12; ++tries) {
            RealMatrix damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Vector step = damped.ldlt().solve(g);
            const Vector candidate = p + step;
            const Vector rc = residuals(model, x, y, sigma, candidate);
            const double chi2c = rc.squaredNorm();
            if (std::isfinite(chi2c) && chi2c <= chi2) {
                const double improvement = chi2 - chi2c;
                p = candidate;
                r = rc;
                chi2 = chi2c;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (improvement < 1e-10 * (1.0 + chi2)) {
                    result.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (result.converged) break;
        if (!stepped) {
            // flat within damping range: accept current point as converged if
            // the gradient is tiny, otherwise report failure
            if (g.cwiseAbs().maxCoeff() < 1e-8 * (1.0 + std::sqrt(chi2))) {
                result.converged = true;
                break;
            }
            throw FitError("fit_curve: no descent step found (chi2 " + std::to_string(chi2) + ")");
        }
    }
    if (!result.converged && it == max_iterations)
        throw FitError("fit_curve: did not converge in " + std::to_string(max_iterations) + " iterations");

    const RealMatrix jac = numeric_jacobian(model, x, sigma, p);
    const RealMatrix jtj = jac.transpose() * jac;
    const RealMatrix cov = jtj.ldlt().solve(RealMatrix::Identity(p.size(), p.size()));
    result.params = p;
    result.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    result.chi2 = chi2;
    result.iterations = it;
    return result;
}

double dip_model(double x, const Vector& p) {
    const double z = (x - p(2)) / p(3);
    return p(0) * (1.0 - p(1) * std::exp(-z * z));
}

FitModel fringe_model(double k) {
    return [k](double x, const Vector& p) { return p(0) * (1.0 + p(1) * std::cos(k * x + p(2))); };
}

double fringe_model_free(double x, const Vector& p) {
    return p(0) * (1.0 + p(1) * std::cos(p(2) * x + p(3)));
}

}  // namespace qwsim
