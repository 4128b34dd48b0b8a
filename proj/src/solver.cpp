#include "hilfer/solver.hpp"

#include <algorithm>
#include <cmath>

#include "hilfer/special.hpp"

namespace hilfer::solver {

using fraccalc::HilferOrder;
using special::gamma_fn;
using special::reciprocal_gamma;

PicardError::PicardError(std::size_t interval_, int iterations_)
    : std::runtime_error("Picard iteration did not converge on active interval " +
                         std::to_string(interval_) + " after " + std::to_string(iterations_) +
                         " iterations"),
      interval(interval_),
      iterations(iterations_) {}

ImpulseSolveError::ImpulseSolveError(std::size_t interval_, double t_, int iterations_)
    : std::runtime_error("impulse equation x = phi(t,x,y) not solved on window " +
                         std::to_string(interval_) + " at t = " + std::to_string(t_) + " after " +
                         std::to_string(iterations_) + " iterations"),
      interval(interval_),
      t(t_),
      iterations(iterations_) {}

void ImpulsiveSchedule::validate(Mode mode) const {
    if (t_points.empty()) throw ScheduleError("schedule: need at least the initial point t0");
    if (!(horizon > t_points.front()))
        throw ScheduleError("schedule: horizon must exceed the initial time");
    for (std::size_t i = 1; i < t_points.size(); ++i)
        if (!(t_points[i] > t_points[i - 1]))
            throw ScheduleError("schedule ordering: t_points must be strictly increasing");
    if (mode == Mode::Instantaneous) {
        if (!p_points.empty())
            throw ScheduleError("schedule: p_points are not used in instantaneous mode");
        return;
    }
    if (p_points.size() != t_points.size())
        throw ScheduleError("schedule: non-instantaneous mode needs one p per t");
    for (std::size_t i = 0; i < t_points.size(); ++i) {
        if (!(p_points[i] > t_points[i]))
            throw ScheduleError("schedule ordering: p_" + std::to_string(i) +
                                " must exceed t_" + std::to_string(i));
        if (i + 1 < t_points.size() && !(t_points[i + 1] > p_points[i]))
            throw ScheduleError("schedule ordering: t_" + std::to_string(i + 1) +
                                " must exceed p_" + std::to_string(i));
    }
}

double Segment::unweighted(std::size_t j) const {
    if (weight == 1.0) return weighted_values[j];
    return std::pow(grid[j] - lower, weight - 1.0) * weighted_values[j];
}

double PiecewiseTrajectory::value_at(double t) const {
    for (const Segment& s : segments) {
        if (s.grid.size() == 1) {
            if (t == s.grid[0]) return s.weighted_values[0];
            continue;
        }
        if (t < s.grid.front() || t > s.grid.back()) continue;
        std::size_t lo = 0, hi = s.grid.size() - 1;
        while (lo + 1 < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (s.grid[mid] <= t)
                lo = mid;
            else
                hi = mid;
        }
        double y = s.weighted_values[lo] +
                   (s.weighted_values[lo + 1] - s.weighted_values[lo]) * (t - s.grid[lo]) /
                       (s.grid[lo + 1] - s.grid[lo]);
        if (s.weight == 1.0) return y;
        return std::pow(t - s.lower, s.weight - 1.0) * y;
    }
    throw std::domain_error("PiecewiseTrajectory: t outside every segment");
}

WeightedInitialCondition convert_initial(const WeightedInitialCondition& ic, double lam) {
    if (!(lam > 0.0) || !(lam <= 1.0))
        throw std::invalid_argument("convert_initial: lam must lie in (0,1]");
    double g = gamma_fn(lam);
    if (ic.form == WeightedInitialCondition::Form::Weighted)
        return {WeightedInitialCondition::Form::Integral, ic.value * g};  // B = C Gamma(lam)
    return {WeightedInitialCondition::Form::Weighted, ic.value / g};
}

namespace {

// g(t,x) with solver context wrapped around expression failures
double eval_g(const expr::Expr& g, double t, double x, std::size_t interval) {
    try {
        return g.eval({{"t", t}, {"x", x}});
    } catch (const expr::DomainError& e) {
        throw RhsError("g(t,x) failed on interval " + std::to_string(interval) + " at t = " +
                       std::to_string(t) + ": " + e.what());
    }
}

// weighted right-hand side w(s) = (s-a)^{1-lam} g(s, (s-a)^{lam-1} y)
double eval_weighted_g(const expr::Expr& g, double s, double a, double lam, double y,
                       std::size_t interval) {
    if (lam == 1.0) return eval_g(g, s, y, interval);
    double p = std::pow(s - a, lam - 1.0);
    return eval_g(g, s, p * y, interval) / p;
}

struct ActiveResult {
    std::vector<double> grid;
    std::vector<double> y;
};

// Solve the weighted Volterra equation
//   y(t) = c + (t-a)^{1-lam}/Gamma(mu) * int_a^t (t-s)^{mu-1} g(s, x(s)) ds
// node by node on a graded mesh. The integrand is written as the doubly singular
// kernel (t-s)^{mu-1}(s-a)^{lam-1} times the bounded weighted right-hand side.
ActiveResult solve_active(const expr::Expr& g, const HilferOrder& order, double a, double b,
                          double c, int n, double grading, std::size_t interval) {
    const double mu = order.mu, lam = order.lam;
    ActiveResult out;
    out.grid = fraccalc::graded_grid(a, b, n, grading);
    out.y.assign(n + 1, 0.0);
    out.y[0] = c;
    const auto& grid = out.grid;
    auto& y = out.y;

    for (int m = 1; m <= n; ++m) {
        const double t = grid[m];
        // history cells [s_j, s_{j+1}], j < m-1, do not involve y[m]
        double hist = 0.0;
        for (int j = 0; j + 1 < m; ++j) {
            auto w = [&](double s) {
                std::size_t jj = j;
                double y0 = y[jj], y1 = y[jj + 1];
                double yv = y0 + (y1 - y0) * (s - grid[jj]) / (grid[jj + 1] - grid[jj]);
                return eval_weighted_g(g, s, a, lam, yv, interval);
            };
            hist += fraccalc::detail::cell_integral(t, a, mu, lam, grid[j], grid[j + 1], w,
                                                    j == 0, false);
        }
        const double pref = std::pow(t - a, 1.0 - lam) * reciprocal_gamma(mu);
        double ym = y[m - 1];
        bool converged = false;
        int it = 0;
        for (; it < 100; ++it) {
            auto w = [&](double s) {
                double y0 = y[m - 1];
                double yv = y0 + (ym - y0) * (s - grid[m - 1]) / (grid[m] - grid[m - 1]);
                return eval_weighted_g(g, s, a, lam, yv, interval);
            };
            double last = fraccalc::detail::cell_integral(t, a, mu, lam, grid[m - 1], grid[m], w,
                                                          m == 1, true);
            double ynew = c + pref * (hist + last);
            if (!std::isfinite(ynew))
                throw RhsError("active interval " + std::to_string(interval) +
                               ": non-finite state at t = " + std::to_string(t));
            if (std::fabs(ynew - ym) <= 1e-10 * (1.0 + std::fabs(ynew))) {
                ym = ynew;
                converged = true;
                break;
            }
            ym = ynew;
        }
        if (!converged) throw PicardError(interval, it);
        y[m] = ym;
    }
    return out;
}

// damped fixed point for x = phi(t, x, y_left), secant fallback after 50 steps
double solve_impulse_point(const expr::Expr& phi, double t, double y_left, double x_init,
                           std::size_t interval) {
    auto F = [&](double x) {
        try {
            return phi.eval({{"t", t}, {"x", x}, {"y", y_left}});
        } catch (const expr::DomainError& e) {
            throw RhsError("phi(t,x,y) failed on window " + std::to_string(interval) +
                           " at t = " + std::to_string(t) + ": " + e.what());
        }
    };
    const double omega = 0.5, tol = 1e-12;
    double x = x_init;
    double prev_x = x, prev_r = 0.0;
    bool have_prev = false;
    for (int it = 0; it < 200; ++it) {
        double fx = F(x);
        double r = x - fx;
        if (std::fabs(r) <= tol * (1.0 + std::fabs(x))) return x;
        double xn;
        if (it < 50) {
            xn = (1.0 - omega) * x + omega * fx;
        } else {
            // secant on the residual r(x) = x - phi(t, x, y)
            if (have_prev && r != prev_r) {
                xn = x - r * (x - prev_x) / (r - prev_r);
            } else {
                xn = (1.0 - omega) * x + omega * fx;
            }
        }
        if (!std::isfinite(xn)) throw ImpulseSolveError(interval, t, it);
        prev_x = x;
        prev_r = r;
        have_prev = true;
        x = xn;
    }
    throw ImpulseSolveError(interval, t, 200);
}

}  // namespace

PiecewiseTrajectory solve(const ImpulsiveSystem& system, const MeshSpec& mesh) {
    system.schedule.validate(system.mode);
    if (mesh.points_per_interval < 8)
        throw std::invalid_argument("solve: need mesh.points_per_interval >= 8");
    const auto& sched = system.schedule;
    const double T = sched.horizon;
    const HilferOrder& order = system.order;
    const int n = mesh.points_per_interval;
    const double grading =
        mesh.grading > 0.0 ? mesh.grading : std::max(1.0, 1.0 / order.lam);

    PiecewiseTrajectory traj;
    double c = system.x0;  // weighted restart value

    if (system.mode == Mode::NonInstantaneous) {
        for (std::size_t i = 0; i < sched.t_points.size(); ++i) {
            double ta = sched.t_points[i];
            if (ta >= T) break;
            double pa = std::min(sched.p_points[i], T);
            ActiveResult act = solve_active(system.g, order, ta, pa, c, n, grading, i);
            traj.segments.push_back(
                {SegmentKind::Active, ta, order.lam, act.grid, act.y, c});
            if (sched.p_points[i] >= T) break;

            // impulse window (p_i, t_{i+1}] governed by phi_i
            double wa = sched.p_points[i];
            double wb = i + 1 < sched.t_points.size() ? std::min(sched.t_points[i + 1], T) : T;
            if (i >= system.impulse_maps.size())
                throw ScheduleError("impulse map phi_" + std::to_string(i) +
                                    " required by the schedule but not provided");
            const expr::Expr& phi = system.impulse_maps[i];
            double x_left = order.lam == 1.0
                                ? act.y.back()
                                : std::pow(pa - ta, order.lam - 1.0) * act.y.back();
            std::vector<double> wgrid(n + 1), wvals(n + 1);
            double x_cur = x_left;
            for (int j = 0; j <= n; ++j) {
                wgrid[j] = wa + (wb - wa) * j / n;
                x_cur = solve_impulse_point(phi, wgrid[j], x_left, x_cur, i);
                wvals[j] = x_cur;
            }
            traj.segments.push_back(
                {SegmentKind::ImpulseWindow, wa, 1.0, wgrid, wvals, x_left});
            c = wvals.back();  // weighted restart at t_{i+1} = phi_i(t_{i+1}, ., .)
            if (wb >= T) break;
        }
    } else {
        for (std::size_t i = 0; i < sched.t_points.size(); ++i) {
            double ta = sched.t_points[i];
            if (ta >= T) break;
            double tb = i + 1 < sched.t_points.size() ? std::min(sched.t_points[i + 1], T) : T;
            ActiveResult act = solve_active(system.g, order, ta, tb, c, n, grading, i);
            traj.segments.push_back(
                {SegmentKind::Active, ta, order.lam, act.grid, act.y, c});
            if (tb >= T || i + 1 >= sched.t_points.size()) break;

            // instantaneous impulse at t_{i+1}: psi_{i+1}(t, x(t_{i+1}-0))
            if (i >= system.impulse_maps.size())
                throw ScheduleError("impulse map psi_" + std::to_string(i + 1) +
                                    " required by the schedule but not provided");
            const expr::Expr& psi = system.impulse_maps[i];
            double x_left = order.lam == 1.0
                                ? act.y.back()
                                : std::pow(tb - ta, order.lam - 1.0) * act.y.back();
            double x_jump;
            try {
                x_jump = psi.eval({{"t", tb}, {"y", x_left}});
            } catch (const expr::DomainError& e) {
                throw RhsError("psi failed at t = " + std::to_string(tb) + ": " + e.what());
            }
            traj.segments.push_back(
                {SegmentKind::PointImpulse, tb, 1.0, {tb}, {x_jump}, x_left});
            c = x_jump;  // doubles as the weighted restart of the next interval
        }
    }
    return traj;
}

double example_kernel_integral(double t, double a) {
    // int_a^t s (t-s)^{-0.6} ds = t (t-a)^{0.4}/0.4 - (t-a)^{1.4}/1.4
    return t * std::pow(t - a, 0.4) / 0.4 - std::pow(t - a, 1.4) / 1.4;
}

double closed_form_example(double t, const HilferOrder& order, double x0) {
    if (std::fabs(order.mu - 0.4) > 1e-12)
        throw std::domain_error("closed_form_example: defined for mu = 0.4 only");
    if (!(t > 0.0) || t > 2.5)
        throw std::domain_error("closed_form_example: t must lie in (0, 2.5]");
    const double lam = order.lam;
    const double g04 = gamma_fn(0.4);
    auto G = [&](double tt, double aa) { return example_kernel_integral(tt, aa); };

    if (t <= 0.5) return x0 * std::pow(t, lam - 1.0) + G(t, 0.0) / g04;
    double xp0 = x0 * std::pow(0.5, lam - 1.0) + G(0.5, 0.0) / g04;  // x(0.5-0)
    if (t <= 1.0) return t + xp0;                                    // x = t - 0 x + y
    double r1 = 1.0 + xp0;                                           // restart at t = 1
    if (t <= 1.5) return r1 * std::pow(t - 1.0, lam - 1.0) + G(t, 1.0) / g04;
    double xp1 = r1 * std::pow(0.5, lam - 1.0) + G(1.5, 1.0) / g04;  // x(1.5-0)
    if (t <= 2.0) return (t + xp1) / 2.0;                            // x = t - x + y
    double r2 = (2.0 + xp1) / 2.0;                                   // restart at t = 2
    return r2 * std::pow(t - 2.0, lam - 1.0) + G(t, 2.0) / g04;
}

ContractionReport contraction_constant(double L, const std::vector<double>& I_list,
                                       const HilferOrder& order,
                                       const ImpulsiveSchedule& schedule,
                                       std::optional<double> p) {
    if (L < 0.0) throw std::invalid_argument("contraction_constant: L must be >= 0");
    for (double I : I_list)
        if (I < 0.0) throw std::invalid_argument("contraction_constant: I_i must be >= 0");
    const double mu = order.mu, lam = order.lam;
    const double eps = 1e-6;
    const double plo = 1.0 - mu + eps, phi_ = lam - eps;
    if (!(plo < phi_))
        throw special::ParameterError(
            "contraction_constant: empty Holder range (requires lam + mu > 1)");
    if (p && (!(*p > 1.0 - mu) || !(*p < lam)))
        throw special::ParameterError("contraction_constant: p must lie in (1-mu, lam)");

    schedule.validate(Mode::NonInstantaneous);
    const auto& tp = schedule.t_points;
    const auto& pp = schedule.p_points;

    double term1 = 0.0;
    for (double I : I_list) term1 = std::max(term1, I);

    const double rg_mu = reciprocal_gamma(mu);
    auto holder_factor = [&](double q) {
        return std::pow((1.0 - q) / (lam - q), 1.0 - q) * std::pow(q / (q + mu - 1.0), q);
    };
    auto K_of = [&](double q) {
        double F = holder_factor(q);
        double t2 = L * std::pow(pp[0] - tp[0], mu) * rg_mu * F;
        double t3 = 0.0;
        for (std::size_t w = 0; w + 1 < tp.size() && w < I_list.size(); ++w) {
            double Iw = I_list[w];
            double prev = std::pow(pp[w] - tp[w], 1.0 - lam);
            double len = pp[w + 1] - tp[w + 1];
            t3 = std::max(t3, Iw + Iw / prev + L * std::pow(len, mu) * rg_mu * F);
        }
        return std::max({term1, t2, t3});
    };

    double p_used;
    if (p) {
        p_used = *p;
    } else {
        // coarse scan, then golden-section inside the best bracket
        const int scan = 33;
        int best = 0;
        double bestv = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= scan; ++i) {
            double q = plo + (phi_ - plo) * i / scan;
            double v = K_of(q);
            if (v < bestv) {
                bestv = v;
                best = i;
            }
        }
        double lo = plo + (phi_ - plo) * std::max(0, best - 1) / scan;
        double hi = plo + (phi_ - plo) * std::min(scan, best + 1) / scan;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
        double f1 = K_of(c1), f2 = K_of(c2);
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            if (f1 < f2) {
                hi = c2;
                c2 = c1;
                f2 = f1;
                c1 = hi - gr * (hi - lo);
                f1 = K_of(c1);
            } else {
                lo = c1;
                c1 = c2;
                f1 = f2;
                c2 = lo + gr * (hi - lo);
                f2 = K_of(c2);
            }
        }
        p_used = 0.5 * (lo + hi);
    }

    ContractionReport rep;
    rep.p_used = p_used;
    double F = holder_factor(p_used);
    rep.terms[0] = term1;
    rep.terms[1] = L * std::pow(pp[0] - tp[0], mu) * rg_mu * F;
    rep.terms[2] = 0.0;
    for (std::size_t w = 0; w + 1 < tp.size() && w < I_list.size(); ++w) {
        double Iw = I_list[w];
        double prev = std::pow(pp[w] - tp[w], 1.0 - lam);
        double len = pp[w + 1] - tp[w + 1];
        rep.terms[2] = std::max(rep.terms[2], Iw + Iw / prev + L * std::pow(len, mu) * rg_mu * F);
    }
    rep.K = std::max({rep.terms[0], rep.terms[1], rep.terms[2]});
    rep.contraction = rep.K < 1.0;
    return rep;
}

}  // namespace hilfer::solver
