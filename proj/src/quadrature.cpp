#include "bdcat/quadrature.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bdcat/errors.hpp"

namespace bdcat {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1], stored as the positive half of
// the symmetric node set.
constexpr std::array<double, 8> kNodes = {
    0.0950125098376374401853, 0.2816035507792589132305, 0.4580167776572273863424,
    0.6178762444026437484467, 0.7554044083550030338951, 0.8656312023878317438805,
    0.9445750230732325760780, 0.9894009349916499325962};
constexpr std::array<double, 8> kWeights = {
    0.1894506104550684962854, 0.1826034150449235888667, 0.1691565193950025381893,
    0.1495959888165767320815, 0.1246289712555338720525, 0.0951585116824927848099,
    0.0622535239386478928628, 0.0271524594117540948518};

using VectorFn = std::function<std::vector<double>(double)>;

std::vector<double> evaluate(const VectorFn& f, double x, std::size_t& dim, bool& dim_known) {
    std::vector<double> value = f(x);
    if (!dim_known) {
        dim = value.size();
        dim_known = true;
    } else if (value.size() != dim) {
        throw std::invalid_argument("integrand returned vectors of different lengths");
    }
    for (double v : value) {
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "integrand produced a non-finite value at x = " << x;
            throw QuadratureError(msg.str());
        }
    }
    return value;
}

std::vector<double> panel_rule(const VectorFn& f, double a, double b, std::size_t& dim,
                               bool& dim_known) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> sum;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
        const std::vector<double> lo = evaluate(f, center - half * kNodes[i], dim, dim_known);
        const std::vector<double> hi = evaluate(f, center + half * kNodes[i], dim, dim_known);
        if (sum.empty()) {
            sum.assign(dim, 0.0);
        }
        for (std::size_t j = 0; j < dim; ++j) {
            sum[j] += kWeights[i] * (lo[j] + hi[j]);
        }
    }
    for (double& v : sum) {
        v *= half;
    }
    return sum;
}

}  // namespace

void QuadratureSettings::validate() const {
    if (!std::isfinite(abs_tol) || abs_tol <= 0.0) {
        throw ConfigError("quadrature tolerance must be positive and finite");
    }
    if (max_depth < 1 || max_depth > 60) {
        throw ConfigError("quadrature bisection depth must lie in [1, 60]");
    }
}

std::vector<double> integrate_adaptive(const VectorFn& f, double a, double b,
                                       const QuadratureSettings& settings) {
    settings.validate();
    if (!std::isfinite(a) || !std::isfinite(b) || b < a) {
        throw std::invalid_argument("integration interval must be finite with b >= a");
    }
    std::size_t dim = 0;
    bool dim_known = false;
    if (b == a) {
        evaluate(f, a, dim, dim_known);
        return std::vector<double>(dim, 0.0);
    }

    struct Panel {
        double a, b;
        int depth;
    };
    std::vector<Panel> todo{{a, b, 0}};
    std::vector<double> total;
    const double full_width = b - a;
    while (!todo.empty()) {
        const Panel panel = todo.back();
        todo.pop_back();
        const double mid = 0.5 * (panel.a + panel.b);
        const std::vector<double> whole = panel_rule(f, panel.a, panel.b, dim, dim_known);
        std::vector<double> halves = panel_rule(f, panel.a, mid, dim, dim_known);
        const std::vector<double> right = panel_rule(f, mid, panel.b, dim, dim_known);
        double gap = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            halves[j] += right[j];
            gap = std::max(gap, std::abs(halves[j] - whole[j]));
        }
        const double share = settings.abs_tol * (panel.b - panel.a) / full_width;
        if (gap <= share) {
            if (total.empty()) {
                total.assign(dim, 0.0);
            }
            for (std::size_t j = 0; j < dim; ++j) {
                total[j] += halves[j];
            }
            continue;
        }
        if (panel.depth >= settings.max_depth) {
            std::ostringstream msg;
            msg << "adaptive integration stalled on [" << panel.a << ", " << panel.b
                << "] after " << panel.depth << " bisections (panel error " << gap
                << ", allowed " << share << ")";
            throw QuadratureError(msg.str());
        }
        todo.push_back({panel.a, mid, panel.depth + 1});
        todo.push_back({mid, panel.b, panel.depth + 1});
    }
    if (total.empty()) {
        total.assign(dim, 0.0);
    }
    return total;
}

double integrate_adaptive_scalar(const std::function<double(double)>& f, double a, double b,
                                 const QuadratureSettings& settings) {
    const std::vector<double> value = integrate_adaptive(
        [&f](double x) { return std::vector<double>{f(x)}; }, a, b, settings);
    return value.at(0);
}

}  // namespace bdcat
