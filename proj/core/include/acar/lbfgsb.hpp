#pragma once

// Limited-memory BFGS with simple bounds: generalized Cauchy point along the
// projected gradient path, direct primal subspace minimisation over the free
// variables, and a backtracking Armijo line search inside the box.

#include "acar/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace acar {

struct LbfgsbOptions {
    int memory = 10;
    int max_iterations = 500;
    double pg_tolerance = 1e-6;    ///< sup-norm of the projected gradient
    double rel_tolerance = 1e-9;   ///< relative objective reduction per iteration
    int max_line_search = 40;
    double armijo = 1e-4;
};

struct LbfgsbResult {
    Vector x;
    Vector gradient;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    double projected_gradient = 0.0;
    bool converged = false;
    std::string status;
    std::vector<double> history;  ///< objective at every accepted iterate, starting point first
};

/// f(x) returning the value and writing the gradient. Non-finite values or
/// exceptions are treated as +infinity by the line search.
using ObjectiveFunction = std::function<double(const Vector& x, Vector& gradient)>;

LbfgsbResult minimize_box(const ObjectiveFunction& objective, const Vector& x0, const Vector& lower,
                          const Vector& upper, const LbfgsbOptions& options = {});

/// max_i |clamp(x_i - g_i, l_i, u_i) - x_i|
double projected_gradient_norm(const Vector& x, const Vector& gradient, const Vector& lower, const Vector& upper);

}  // namespace acar
