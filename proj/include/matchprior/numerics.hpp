#pragma once

#include <functional>
#include <vector>

#include "matchprior/errors.hpp"

namespace matchprior {

constexpr double default_ode_rtol = 1e-8;
constexpr double default_ode_atol = 1e-10;
constexpr int default_quad_panels = 128;

// Solution of a scalar first-order ODE on a grid, with dense output.
//
// The grid is strictly monotone in the direction of integration and the
// stored derivative at each node allows cubic-Hermite evaluation anywhere
// inside the span.
class OdeTrajectory {
public:
    OdeTrajectory() = default;
    OdeTrajectory(std::vector<double> grid, std::vector<double> states,
                  std::vector<double> derivs);

    // Interpolated state at s; s must lie within [span_lo(), span_hi()]
    // up to a small rounding slack.
    double operator()(double s) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& states() const { return states_; }

    double span_lo() const;
    double span_hi() const;
    double front_state() const { return states_.front(); }
    double back_state() const { return states_.back(); }
    std::size_t size() const { return grid_.size(); }

private:
    std::vector<double> grid_;
    std::vector<double> states_;
    std::vector<double> derivs_;
    bool increasing_ = true;
};

// Integrates dy/ds = rhs(s, y) from (s0, y0) to s_end with an embedded
// Dormand-Prince 5(4) pair. Local error is kept below rtol*|y| + atol per
// step. s_end < s0 integrates backward (internally the independent
// variable is negated; there is no separate backward code path).
//
// Throws StepSizeUnderflow if the required step falls below
// 1e-14*|s_end - s0|, and NonFiniteRhs if rhs returns a non-finite value.
OdeTrajectory integrate_ode(const std::function<double(double, double)>& rhs,
                            double s0, double y0, double s_end,
                            double rtol = default_ode_rtol,
                            double atol = default_ode_atol);

// Composite Simpson rule with n_panels subintervals (even, >= 2).
// Exact for polynomials of degree <= 3.
double simpson(const std::function<double(double)>& f, double a, double b,
               int n_panels);

// Bracketing root finder: bisection with secant acceleration. Requires
// f(lo)*f(hi) <= 0 and returns a point of a bracket of width <= xtol.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double xtol);

// Central difference f'(x) with the default step h = cbrt(eps)*max(1,|x|).
double central_diff(const std::function<double(double)>& f, double x);

// Central difference with an explicit step, for callers whose function
// values carry more noise than rounding error.
double central_diff(const std::function<double(double)>& f, double x,
                    double h);

// Standard normal distribution function and density. Absolute accuracy of
// the CDF is ~1e-15 over |x| <= 8, with full relative accuracy in the
// tails (erfc-based).
double std_normal_cdf(double x);
double std_normal_pdf(double x);

}  // namespace matchprior
