#pragma once

#include <functional>
#include <vector>

#include "qwsim/types.hpp"

namespace qwsim {

struct FitResult {
    Vector params;
    Vector standard_errors;  // sqrt of diag of (J^T W J)^-1
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// model(x, params) -> predicted y
using FitModel = std::function<double(double, const Vector&)>;

/// Weighted least squares via Levenberg-Marquardt with a numeric Jacobian.
/// Weights are 1/sigma^2; sigmas of zero-count rows should be floored to 1 by
/// the caller. Throws FitError if no descent step is found.
FitResult fit_curve(const FitModel& model, const std::vector<double>& x,
                    const std::vector<double>& y, const std::vector<double>& sigma,
                    Vector initial, int max_iterations = 200);

/// B * (1 - V * exp(-((x - t0)/w)^2)); params (B, V, t0, w).
double dip_model(double x, const Vector& p);

/// B * (1 + C * cos(k x + phi0)); params (B, C, phi0) with k fixed.
FitModel fringe_model(double k);

/// B * (1 + C * cos(k x + phi0)) with k free; params (B, C, k, phi0).
double fringe_model_free(double x, const Vector& p);

}  // namespace qwsim
