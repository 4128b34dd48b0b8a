#include "hilfer/stability.hpp"

#include <algorithm>
#include <cmath>

#include "hilfer/special.hpp"

namespace hilfer::stability {

using fraccalc::HilferOrder;
using fraccalc::SampledFn;
using solver::Mode;
using solver::PiecewiseTrajectory;
using solver::Segment;
using solver::SegmentKind;
using special::gamma_fn;
using special::mittag_leffler;

void LyapunovSpec::validate() const {
    if (!(alpha1 > 0) || !(alpha2 > 0) || !(alpha3 > 0) || !(alpha4 > 0) || !(a > 0) || !(b > 0))
        throw std::invalid_argument("LyapunovSpec: alpha1..alpha4, a, b must be positive");
    if (!(alpha2 <= 1.0)) throw std::invalid_argument("LyapunovSpec: requires alpha2 <= 1");
    if (!(alpha4 <= alpha1)) throw std::invalid_argument("LyapunovSpec: requires alpha4 <= alpha1");
    if (V.empty()) throw std::invalid_argument("LyapunovSpec: V is required");
}

double derive_h(const LyapunovSpec& lyap, const HilferOrder& order, int deepest_interval) {
    double g = gamma_fn(order.lam);
    return std::pow(lyap.alpha2 / (std::pow(g, deepest_interval + 1) * lyap.alpha1),
                    1.0 / lyap.a);
}

double envelope_generalized(const GeneralizedEnvelopeSpec& spec, const HilferOrder& order,
                            double t, double t0) {
    if (!(t > t0)) throw std::domain_error("envelope_generalized: t must exceed t0");
    double mval = spec.m.eval({{"x", spec.integral_ic}});
    if (mval < 0.0)
        throw std::domain_error("envelope_generalized: m evaluated negative, violating m >= 0");
    double E = mittag_leffler({order.mu, order.lam}, -spec.gamma * std::pow(t - t0, order.mu));
    double bracket = mval * std::pow(t - t0, order.lam - 1.0) * E;
    if (bracket < 0.0)
        throw std::domain_error("envelope_generalized: negative envelope base");
    return std::pow(bracket, spec.c);
}

namespace {

double ml_factor(const StabilityCertificate& cert, EnvelopeParam param, double dt) {
    double second = param == EnvelopeParam::Lambda ? cert.order.lam : cert.order.nu;
    // E_{mu,nu} with nu = 0 is outside the definition of E; clamp to lam form
    if (second <= 0.0) second = cert.order.lam;
    double E = mittag_leffler({cert.order.mu, second}, -cert.gamma * std::pow(dt, cert.order.mu));
    return std::pow(dt, cert.order.lam - 1.0) * E;
}

}  // namespace

double envelope_piecewise(const StabilityCertificate& cert,
                          const solver::ImpulsiveSchedule& schedule, double x0_norm, double t,
                          Mode mode, EnvelopeParam param) {
    if (t < schedule.t_points.front())
        throw std::domain_error("envelope_piecewise: t precedes t0");
    if (x0_norm == 0.0) return 0.0;
    double h = cert.h;
    if (!(h > 0.0)) throw std::invalid_argument("envelope_piecewise: certificate h not set");
    const auto& tp = schedule.t_points;
    const auto& pp = schedule.p_points;
    const double inv_a = 1.0 / cert.lyap.a;
    const double xb = std::pow(x0_norm, cert.lyap.b);

    // locate the interval index i with t_i <= t
    std::size_t i = 0;
    while (i + 1 < tp.size() && t >= tp[i + 1]) ++i;

    double prod = 1.0;
    if (mode == Mode::NonInstantaneous) {
        bool in_window = i < pp.size() && t > pp[i];
        for (std::size_t l = 0; l < i; ++l) prod *= ml_factor(cert, param, pp[l] - tp[l]);
        if (in_window)
            prod *= ml_factor(cert, param, pp[i] - tp[i]);  // held factor on [p_i, t_{i+1}]
        else
            prod *= ml_factor(cert, param, t - tp[i]);
    } else {
        for (std::size_t l = 0; l < i; ++l) prod *= ml_factor(cert, param, tp[l + 1] - tp[l]);
        prod *= ml_factor(cert, param, t - tp[i]);
    }
    return h * xb * std::pow(prod, inv_a);
}

namespace {

double eval_V(const expr::Expr& V, double t, double x) {
    return V.eval({{"t", t}, {"x", x}});
}

void add_check(LyapunovReport& rep, std::string name, double margin, double loc, double tol) {
    bool pass = margin >= -tol;
    rep.checks.push_back({std::move(name), margin, loc, pass});
    rep.pass = rep.pass && pass;
}

// weighted representation of the composite s -> V(s, x(s)) on an active
// segment; the weight exponent is fitted from the first interior samples
SampledFn composite_V(const expr::Expr& V, const Segment& seg) {
    std::size_t n = seg.grid.size() - 1;
    std::vector<double> vals(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j) vals[j] = eval_V(V, seg.grid[j], seg.unweighted(j));
    double w = 1.0;
    if (seg.weight != 1.0) {
        double s1 = seg.grid[1] - seg.lower, s2 = seg.grid[2] - seg.lower;
        if (std::fabs(vals[1]) > 1e-290 && std::fabs(vals[2]) > 1e-290 && vals[1] * vals[2] > 0) {
            double rho = std::log(std::fabs(vals[2]) / std::fabs(vals[1])) / std::log(s2 / s1);
            w = std::clamp(1.0 + rho, 0.05, 1.0);
        }
    }
    std::vector<double> wvals(n + 1);
    for (std::size_t j = 1; j <= n; ++j)
        wvals[j] = w == 1.0 ? vals[j] : vals[j] * std::pow(seg.grid[j] - seg.lower, 1.0 - w);
    wvals[0] = w == 1.0 ? eval_V(V, seg.lower, seg.weight == 1.0 ? seg.restart_value
                                                                 : seg.unweighted(1))
                        : wvals[1];
    return SampledFn(seg.lower, w, seg.grid, std::move(wvals));
}

}  // namespace

LyapunovReport verify_lyapunov(const solver::ImpulsiveSystem& system,
                               const PiecewiseTrajectory& traj, const LyapunovSpec& lyap,
                               int grid_stride) {
    lyap.validate();
    if (grid_stride < 1) throw std::invalid_argument("verify_lyapunov: grid_stride >= 1");
    LyapunovReport rep;
    const auto& V = lyap.V;

    // V(t, 0) = 0 on a sample of times across the horizon
    {
        double worst = 0.0, loc = traj.segments.front().lower;
        for (const Segment& seg : traj.segments)
            for (std::size_t j = 0; j < seg.grid.size(); j += grid_stride) {
                double v = std::fabs(eval_V(V, seg.grid[j], 0.0));
                if (v > worst) {
                    worst = v;
                    loc = seg.grid[j];
                }
            }
        add_check(rep, "V(t,0) = 0", -worst, loc, kAlgebraicTol);
    }

    // sandwich alpha1 |x|^a <= V(t,x) <= alpha2 |x|^{ab} along the trajectory
    {
        double worst_lo = std::numeric_limits<double>::infinity(), loc_lo = 0.0;
        double worst_hi = worst_lo, loc_hi = 0.0;
        for (const Segment& seg : traj.segments) {
            std::size_t start = seg.weight != 1.0 ? 1 : 0;  // x singular at weighted lower bounds
            for (std::size_t j = start; j < seg.grid.size(); j += grid_stride) {
                double x = seg.unweighted(j);
                double v = eval_V(V, seg.grid[j], x);
                double lo = v - lyap.alpha1 * std::pow(std::fabs(x), lyap.a);
                double hi = lyap.alpha2 * std::pow(std::fabs(x), lyap.a * lyap.b) - v;
                if (lo < worst_lo) {
                    worst_lo = lo;
                    loc_lo = seg.grid[j];
                }
                if (hi < worst_hi) {
                    worst_hi = hi;
                    loc_hi = seg.grid[j];
                }
            }
        }
        add_check(rep, "alpha1 |x|^a <= V", worst_lo, loc_lo, kAlgebraicTol);
        add_check(rep, "V <= alpha2 |x|^{ab}", worst_hi, loc_hi, kAlgebraicTol);
    }

    // fractional decay D^{mu,nu} V(t, x(t)) <= -alpha3 |x|^{ab} on active segments
    {
        double worst = std::numeric_limits<double>::infinity(), loc = 0.0;
        bool any = false;
        for (const Segment& seg : traj.segments) {
            if (seg.kind != SegmentKind::Active) continue;
            std::size_t n = seg.grid.size() - 1;
            if (n + 1 < 8) continue;
            SampledFn comp = composite_V(V, seg);
            std::size_t first = std::max<std::size_t>(4, n / 16);
            for (std::size_t j = first; j <= n; j += grid_stride) {
                double dv = fraccalc::hilfer_deriv_quad(system.order, comp, seg.grid[j]);
                double x = seg.unweighted(j);
                double m = -lyap.alpha3 * std::pow(std::fabs(x), lyap.a * lyap.b) - dv;
                any = true;
                if (m < worst) {
                    worst = m;
                    loc = seg.grid[j];
                }
            }
        }
        if (any) add_check(rep, "D^{mu,nu} V <= -alpha3 |x|^{ab}", worst, loc, kQuadratureTol);
    }

    // impulse windows: V(t, zeta_i(t, x)) <= alpha4 |x|^a with x the
    // pre-impulse value x(p_i - 0)
    {
        double worst = std::numeric_limits<double>::infinity(), loc = 0.0;
        bool any = false;
        for (const Segment& seg : traj.segments) {
            if (seg.kind != SegmentKind::ImpulseWindow) continue;
            double xp = seg.restart_value;  // x(p_i - 0)
            double bound = lyap.alpha4 * std::pow(std::fabs(xp), lyap.a);
            for (std::size_t j = 0; j < seg.grid.size(); j += grid_stride) {
                double v = eval_V(V, seg.grid[j], seg.weighted_values[j]);
                double m = bound - v;
                any = true;
                if (m < worst) {
                    worst = m;
                    loc = seg.grid[j];
                }
            }
        }
        if (any) add_check(rep, "V(t, zeta_i(t,x)) <= alpha4 |x|^a", worst, loc, kAlgebraicTol);
    }
    return rep;
}

StabilityCertificate check_envelope_dominance(const PiecewiseTrajectory& traj,
                                              StabilityCertificate cert,
                                              const solver::ImpulsiveSchedule& schedule,
                                              Mode mode, double x0_norm, EnvelopeParam param) {
    int deepest = -1;
    for (const Segment& seg : traj.segments)
        if (seg.kind == SegmentKind::Active) ++deepest;
    cert.interval_count_checked = deepest + 1;
    if (!(cert.h > 0.0)) cert.h = derive_h(cert.lyap, cert.order, std::max(deepest, 0));
    if (!(cert.gamma > 0.0)) cert.gamma = cert.lyap.alpha3;

    double margin = std::numeric_limits<double>::infinity();
    const double lam = cert.order.lam;
    for (const Segment& seg : traj.segments) {
        bool weighted = seg.kind == SegmentKind::Active && seg.weight != 1.0;
        std::size_t start = weighted ? 1 : 0;
        for (std::size_t j = start; j < seg.grid.size(); ++j) {
            double t = seg.grid[j];
            if (t == schedule.t_points.front()) continue;  // envelope undefined at t0 itself
            double env = envelope_piecewise(cert, schedule, x0_norm, t, mode, param);
            double m;
            if (weighted) {
                double wfac = std::pow(t - seg.lower, 1.0 - lam);
                m = env * wfac - std::fabs(seg.weighted_values[j]);
            } else {
                m = env - std::fabs(seg.unweighted(j));
            }
            if (m < margin) margin = m;
        }
    }
    if (x0_norm == 0.0 && !std::isfinite(margin)) margin = 0.0;
    cert.margin = margin;
    cert.verdict = margin >= -kQuadratureTol;
    return cert;
}

}  // namespace hilfer::stability
