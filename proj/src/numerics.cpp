#include "matchprior/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace matchprior {

namespace {

constexpr double machine_eps = std::numeric_limits<double>::epsilon();

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0;
constexpr double c3 = 3.0 / 10.0;
constexpr double c4 = 4.0 / 5.0;
constexpr double c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;

// 5th-order solution weights (row 7 of the tableau; FSAL).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;

// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                 e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

double checked_rhs(const std::function<double(double, double)>& rhs, double s,
                   double y) {
    const double v = rhs(s, y);
    if (!std::isfinite(v)) {
        throw NonFiniteRhs("ode rhs returned a non-finite value at s=" +
                           std::to_string(s));
    }
    return v;
}

}  // namespace

OdeTrajectory::OdeTrajectory(std::vector<double> grid,
                             std::vector<double> states,
                             std::vector<double> derivs)
    : grid_(std::move(grid)),
      states_(std::move(states)),
      derivs_(std::move(derivs)) {
    increasing_ = grid_.size() < 2 || grid_.back() >= grid_.front();
}

double OdeTrajectory::span_lo() const {
    return increasing_ ? grid_.front() : grid_.back();
}

double OdeTrajectory::span_hi() const {
    return increasing_ ? grid_.back() : grid_.front();
}

double OdeTrajectory::operator()(double s) const {
    if (grid_.size() == 1) return states_.front();

    const double lo = span_lo(), hi = span_hi();
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (s < lo - slack || s > hi + slack) {
        throw NumericError("trajectory evaluated outside its span");
    }
    s = std::clamp(s, lo, hi);

    // Locate the bracketing interval in the (possibly decreasing) grid.
    std::size_t i;
    if (increasing_) {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
        i = static_cast<std::size_t>(std::distance(grid_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, grid_.size() - 1) - 1;
    } else {
        auto it = std::upper_bound(grid_.begin(), grid_.end(), s,
                                   [](double a, double b) { return a > b; });
        i = static_cast<std::size_t>(std::distance(grid_.begin(), it));
        i = std::clamp<std::size_t>(i, 1, grid_.size() - 1) - 1;
    }

    const double h = grid_[i + 1] - grid_[i];
    if (h == 0.0) return states_[i];
    const double t = (s - grid_[i]) / h;

    // Cubic Hermite in the interval.
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * states_[i] + h10 * h * derivs_[i] + h01 * states_[i + 1] +
           h11 * h * derivs_[i + 1];
}

OdeTrajectory integrate_ode(const std::function<double(double, double)>& rhs,
                            double s0, double y0, double s_end, double rtol,
                            double atol) {
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw NumericError("integrate_ode requires rtol, atol > 0");
    }
    if (!std::isfinite(s0) || !std::isfinite(y0) || !std::isfinite(s_end)) {
        throw NumericError("integrate_ode requires finite s0, y0, s_end");
    }

    if (s0 == s_end) {
        const double f0 = checked_rhs(rhs, s0, y0);
        return OdeTrajectory({s0}, {y0}, {f0});
    }

    // Backward runs integrate u = -s forward with a negated rhs.
    const bool backward = s_end < s0;
    const double dir = backward ? -1.0 : 1.0;
    auto f = [&](double u, double y) {
        return dir * checked_rhs(rhs, dir * u, y);
    };

    const double u0 = dir * s0, u_end = dir * s_end;
    const double span = u_end - u0;
    const double h_min = std::max(
        1e-14 * span,
        4.0 * machine_eps * std::max(std::abs(u0), std::abs(u_end)));

    std::vector<double> grid{u0}, states{y0}, derivs;
    double u = u0, y = y0;
    double k1 = f(u, y);
    derivs.push_back(k1);

    // Initial step: conservative fraction of the span, adjusted by the
    // first derivative scale.
    double h = span / 100.0;
    {
        const double scale = atol + rtol * std::abs(y0);
        if (std::abs(k1) > machine_eps) {
            h = std::min(h, 0.1 * scale / std::abs(k1));
        }
        h = std::max(h, h_min);
    }

    const std::size_t max_steps = 1000000;
    for (std::size_t step = 0; step < max_steps; ++step) {
        const double remaining = u_end - u;
        if (remaining <= h_min) {
            // Within rounding slack of the end: snap the last node there.
            grid.back() = u = u_end;
            break;
        }
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        // A controller-shrunk step below h_min signals a genuine
        // singularity; an end-clamped one is just the final stretch.
        if (!last && h < h_min) {
            throw StepSizeUnderflow(
                "ode step size underflow near s=" + std::to_string(dir * u) +
                " (singular right-hand side?)");
        }

        const double k2 = f(u + c2 * h, y + h * (a21 * k1));
        const double k3 = f(u + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const double k4 = f(u + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 =
            f(u + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 = f(u + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                            a64 * k4 + a65 * k5));
        const double y5 =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = f(u + h, y5);  // FSAL stage

        const double err_raw = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 +
                                    e6 * k6 + e7 * k7);
        const double scale =
            atol + rtol * std::max(std::abs(y), std::abs(y5));
        const double err = std::abs(err_raw) / scale;

        if (err <= 1.0) {
            u = last ? u_end : u + h;
            y = y5;
            k1 = k7;
            grid.push_back(u);
            states.push_back(y);
            derivs.push_back(k1);
        }

        const double factor =
            err > 0.0 ? 0.9 * std::pow(err, -0.2)
                      : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    if (u < u_end) {
        throw NumericError("integrate_ode exceeded the step limit");
    }

    if (backward) {
        for (auto& g : grid) g = -g;
        for (auto& d : derivs) d = -d;
    }
    return OdeTrajectory(std::move(grid), std::move(states), std::move(derivs));
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_panels) {
    if (n_panels < 2 || n_panels % 2 != 0) {
        throw NumericError("simpson requires an even panel count >= 2");
    }
    const double h = (b - a) / n_panels;
    auto sample = [&](int i) {
        const double x = (i == n_panels) ? b : a + i * h;
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw NonFiniteIntegrand("non-finite integrand at x=" +
                                     std::to_string(x));
        }
        return v;
    };

    double sum = sample(0) + sample(n_panels);
    for (int i = 1; i < n_panels; ++i) {
        sum += sample(i) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double xtol) {
    if (!(lo < hi)) throw NumericError("find_root requires lo < hi");
    if (!(xtol > 0.0)) throw NumericError("find_root requires xtol > 0");

    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        throw NoSignChange("find_root: f has the same sign at both ends");
    }

    // Bisection with a secant trial each iteration; the bracket always
    // shrinks, so the secant can only help.
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && (hi - lo) > xtol; ++it) {
        double x = mid;
        if (fhi != flo) {
            const double xs = lo - flo * (hi - lo) / (fhi - flo);
            const double margin = 0.01 * (hi - lo);
            if (xs > lo + margin && xs < hi - margin) x = xs;
        }
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (flo * fx < 0.0) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        mid = 0.5 * (lo + hi);

        // Force a true bisection whenever the bracket stops halving fast
        // enough; protects against one-sided secant stagnation.
        if (it % 2 == 1) {
            const double fm = f(mid);
            if (fm == 0.0) return mid;
            if (flo * fm < 0.0) {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
            mid = 0.5 * (lo + hi);
        }
    }
    return mid;
}

double central_diff(const std::function<double(double)>& f, double x) {
    const double h = std::cbrt(machine_eps) * std::max(1.0, std::abs(x));
    return central_diff(f, x, h);
}

double central_diff(const std::function<double(double)>& f, double x,
                    double h) {
    const double fp = f(x + h), fm = f(x - h);
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw NonFiniteValue("central_diff: non-finite function value near x=" +
                             std::to_string(x));
    }
    return (fp - fm) / (2.0 * h);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double std_normal_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace matchprior
