#include "acar/lbfgsb.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace acar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compact form of the limited-memory matrix B = theta*I - W M W^T.
struct CompactHessian {
    std::deque<Vector> s;
    std::deque<Vector> y;
    double theta = 1.0;
    Matrix W;  // n x 2m, columns [Y, theta*S]
    Matrix M;  // 2m x 2m

    [[nodiscard]] Index pairs() const { return static_cast<Index>(s.size()); }

    void clear() {
        s.clear();
        y.clear();
        theta = 1.0;
        W.resize(0, 0);
        M.resize(0, 0);
    }

    void push(Vector sk, Vector yk, int memory) {
        const double sy = sk.dot(yk);
        const double yy = yk.squaredNorm();
        if (!(sy > std::numeric_limits<double>::epsilon() * yy)) return;
        s.push_back(std::move(sk));
        y.push_back(std::move(yk));
        if (static_cast<int>(s.size()) > memory) {
            s.pop_front();
            y.pop_front();
        }
        theta = yy / sy;
        rebuild();
    }

    void rebuild() {
        const Index m = pairs();
        const Index n = s.front().size();
        Matrix S(n, m), Y(n, m);
        for (Index i = 0; i < m; ++i) {
            S.col(i) = s[static_cast<std::size_t>(i)];
            Y.col(i) = y[static_cast<std::size_t>(i)];
        }
        W.resize(n, 2 * m);
        W << Y, theta * S;
        const Matrix SY = S.transpose() * Y;
        Matrix middle = Matrix::Zero(2 * m, 2 * m);
        for (Index i = 0; i < m; ++i) {
            middle(i, i) = -SY(i, i);
            for (Index j = 0; j < i; ++j) {
                middle(m + i, j) = SY(i, j);  // L
                middle(j, m + i) = SY(i, j);  // L^T
            }
        }
        middle.bottomRightCorner(m, m) = theta * (S.transpose() * S);
        M = middle.fullPivLu().inverse();
    }
};

Vector project(const Vector& x, const Vector& lower, const Vector& upper) {
    return x.cwiseMax(lower).cwiseMin(upper);
}

// Generalized Cauchy point. Returns x_cp and sets c = W^T (x_cp - x).
Vector cauchy_point(const Vector& x, const Vector& g, const Vector& lower, const Vector& upper,
                    const CompactHessian& B, Vector& c) {
    const Index n = x.size();
    const Index m2 = B.W.cols();
    Vector breakpoint(n);
    Vector d(n);
    for (Index i = 0; i < n; ++i) {
        if (g[i] < 0.0) {
            breakpoint[i] = (x[i] - upper[i]) / g[i];
        } else if (g[i] > 0.0) {
            breakpoint[i] = (x[i] - lower[i]) / g[i];
        } else {
            breakpoint[i] = kInf;
        }
        d[i] = breakpoint[i] <= 0.0 ? 0.0 : -g[i];
    }
    std::vector<Index> order;
    for (Index i = 0; i < n; ++i) {
        if (breakpoint[i] > 0.0 && std::isfinite(breakpoint[i])) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return breakpoint[a] < breakpoint[b]; });

    Vector xc = x;
    Vector p = m2 > 0 ? Vector(B.W.transpose() * d) : Vector();
    c = Vector::Zero(m2);
    double f1 = -d.squaredNorm();
    double f2 = -B.theta * f1;
    if (m2 > 0) f2 -= p.dot(B.M * p);
    double dt_min = f2 > 0.0 ? -f1 / f2 : kInf;
    double t_old = 0.0;

    std::size_t next = 0;
    while (next < order.size()) {
        const Index b = order[next];
        const double dt = breakpoint[b] - t_old;
        if (dt_min < dt) break;
        xc[b] = d[b] > 0.0 ? upper[b] : lower[b];
        const double zb = xc[b] - x[b];
        const double gb = g[b];
        if (m2 > 0) {
            c += dt * p;
            const Vector wb = B.W.row(b).transpose();
            const Vector Mc = B.M * c;
            const Vector Mp = B.M * p;
            f1 += dt * f2 + gb * gb + B.theta * gb * zb - gb * wb.dot(Mc);
            f2 += -B.theta * gb * gb - 2.0 * gb * wb.dot(Mp) - gb * gb * wb.dot(B.M * wb);
            p += gb * wb;
        } else {
            f1 += dt * f2 + gb * gb + B.theta * gb * zb;
            f2 += -B.theta * gb * gb;
        }
        d[b] = 0.0;
        dt_min = f2 > 0.0 ? -f1 / f2 : kInf;
        t_old = breakpoint[b];
        ++next;
    }
    if (!std::isfinite(dt_min)) {
        // Unbounded model along the remaining path; stay at the last breakpoint.
        dt_min = 0.0;
    }
    dt_min = std::max(dt_min, 0.0);
    t_old += dt_min;
    for (Index i = 0; i < n; ++i) {
        if (d[i] != 0.0) xc[i] = x[i] + t_old * d[i];
    }
    xc = project(xc, lower, upper);
    if (m2 > 0) c += dt_min * p;
    return xc;
}

// Direct primal minimisation of the quadratic model over the variables free at x_cp.
Vector subspace_minimum(const Vector& x, const Vector& g, const Vector& lower, const Vector& upper,
                        const CompactHessian& B, const Vector& xc, const Vector& c) {
    const Index n = x.size();
    std::vector<Index> free;
    for (Index i = 0; i < n; ++i) {
        if (xc[i] > lower[i] && xc[i] < upper[i]) free.push_back(i);
    }
    if (free.empty()) return xc;

    const Index nf = static_cast<Index>(free.size());
    const Index m2 = B.W.cols();
    Vector rc(nf);
    Vector wmc = m2 > 0 ? Vector(B.W * (B.M * c)) : Vector::Zero(n);
    for (Index j = 0; j < nf; ++j) {
        const Index i = free[static_cast<std::size_t>(j)];
        rc[j] = g[i] + B.theta * (xc[i] - x[i]) - wmc[i];
    }

    Vector du;
    if (m2 > 0) {
        Matrix WZ(nf, m2);
        for (Index j = 0; j < nf; ++j) WZ.row(j) = B.W.row(free[static_cast<std::size_t>(j)]);
        Vector v = B.M * (WZ.transpose() * rc);
        const Matrix N = Matrix::Identity(m2, m2) - (B.M * (WZ.transpose() * WZ)) / B.theta;
        v = N.fullPivLu().solve(v);
        du = -rc / B.theta - WZ * v / (B.theta * B.theta);
    } else {
        du = -rc / B.theta;
    }

    double step = 1.0;
    for (Index j = 0; j < nf; ++j) {
        const Index i = free[static_cast<std::size_t>(j)];
        if (du[j] > 0.0) {
            step = std::min(step, (upper[i] - xc[i]) / du[j]);
        } else if (du[j] < 0.0) {
            step = std::min(step, (lower[i] - xc[i]) / du[j]);
        }
    }
    Vector xbar = xc;
    for (Index j = 0; j < nf; ++j) xbar[free[static_cast<std::size_t>(j)]] += step * du[j];
    return project(xbar, lower, upper);
}

double safe_eval(const ObjectiveFunction& objective, const Vector& x, Vector& grad) {
    try {
        const double f = objective(x, grad);
        if (!std::isfinite(f) || !grad.allFinite()) return kInf;
        return f;
    } catch (const std::exception&) {
        return kInf;
    }
}

}  // namespace

double projected_gradient_norm(const Vector& x, const Vector& gradient, const Vector& lower, const Vector& upper) {
    return (project(x - gradient, lower, upper) - x).cwiseAbs().maxCoeff();
}

LbfgsbResult minimize_box(const ObjectiveFunction& objective, const Vector& x0, const Vector& lower,
                          const Vector& upper, const LbfgsbOptions& options) {
    const Index n = x0.size();
    if (lower.size() != n || upper.size() != n) throw InputError("bounds do not match the starting point");
    if ((lower.array() > upper.array()).any()) throw InputError("lower bound exceeds upper bound");

    LbfgsbResult result;
    Vector x = project(x0, lower, upper);
    Vector g(n);
    double f = safe_eval(objective, x, g);
    result.evaluations = 1;
    if (!std::isfinite(f)) {
        result.x = x;
        result.f = f;
        result.gradient = g;
        result.status = "objective not finite at the starting point";
        return result;
    }
    result.history.push_back(f);

    CompactHessian B;
    Vector c;
    Vector trial_g(n);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.projected_gradient = projected_gradient_norm(x, g, lower, upper);
        if (result.projected_gradient <= options.pg_tolerance) {
            result.converged = true;
            result.status = "projected gradient below tolerance";
            break;
        }

        const Vector xc = cauchy_point(x, g, lower, upper, B, c);
        Vector d = subspace_minimum(x, g, lower, upper, B, xc, c) - x;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            if (B.pairs() > 0) {
                B.clear();
                continue;
            }
            d = project(x - g, lower, upper) - x;
            slope = g.dot(d);
            if (!(slope < 0.0)) {
                result.status = "no descent direction";
                break;
            }
        }

        // x + step*d stays feasible for step in [0, 1].
        double step = B.pairs() == 0 ? std::min(1.0, 1.0 / d.norm()) : 1.0;
        bool accepted = false;
        double trial_f = kInf;
        Vector trial_x;
        for (int ls = 0; ls < options.max_line_search; ++ls) {
            trial_x = project(x + step * d, lower, upper);
            trial_f = safe_eval(objective, trial_x, trial_g);
            ++result.evaluations;
            if (trial_f <= f + options.armijo * step * slope) {
                accepted = true;
                break;
            }
            double next = 0.1 * step;
            if (std::isfinite(trial_f)) {
                const double curvature = trial_f - f - slope * step;
                if (curvature > 0.0) next = -slope * step * step / (2.0 * curvature);
                next = std::clamp(next, 0.1 * step, 0.5 * step);
            }
            step = next;
        }
        if (!accepted) {
            if (B.pairs() > 0) {
                B.clear();
                continue;
            }
            result.status = "line search failed";
            break;
        }

        const double f_old = f;
        B.push(trial_x - x, trial_g - g, options.memory);
        x = std::move(trial_x);
        f = trial_f;
        g = trial_g;
        result.iterations = iter + 1;
        result.history.push_back(f);

        if (f_old - f <= options.rel_tolerance * std::max({std::abs(f_old), std::abs(f), 1.0})) {
            result.converged = true;
            result.status = "relative reduction below tolerance";
            break;
        }
    }
    if (result.status.empty()) result.status = "iteration limit reached";
    result.projected_gradient = projected_gradient_norm(x, g, lower, upper);
    result.x = std::move(x);
    result.f = f;
    result.gradient = std::move(g);
    return result;
}

}  // namespace acar
