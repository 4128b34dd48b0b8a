#ifndef HILFER_STABILITY_HPP
#define HILFER_STABILITY_HPP

#include <string>
#include <vector>

#include "hilfer/expr.hpp"
#include "hilfer/fraccalc.hpp"
#include "hilfer/solver.hpp"

namespace hilfer::stability {

/// Which Mittag-Leffler second parameter the piecewise envelope uses. The
/// stability definitions print E_{mu,nu} while the proof chain uses
/// E_{mu,lam}; lambda is the default.
enum class EnvelopeParam { Lambda, Nu };

/// Lyapunov candidate V(t,x) with the sandwich constants alpha1..alpha4 and
/// the norm exponents a, b.
struct LyapunovSpec {
    expr::Expr V;
    double alpha1 = 1.0, alpha2 = 1.0, alpha3 = 1.0, alpha4 = 1.0;
    double a = 1.0, b = 1.0;

    void validate() const;  // positivity, alpha2 <= 1, alpha4 <= alpha1
};

struct StabilityCertificate {
    LyapunovSpec lyap;
    fraccalc::HilferOrder order{0.5, 1.0};
    double h = 0.0;      // 0 = derive from lyap at the deepest checked interval
    double gamma = 0.0;  // decay rate; the theorem sets gamma = alpha3
    int interval_count_checked = 0;
    bool verdict = false;
    double margin = 0.0;  // min over the grid of envelope - |x|
};

/// h = (alpha2 / (Gamma(lam)^{i+1} alpha1))^{1/a} for interval index i.
double derive_h(const LyapunovSpec& lyap, const fraccalc::HilferOrder& order, int deepest_interval);

/// Generalized Mittag-Leffler envelope of the first stability definition:
/// [ m(I^{1-lam}x(t0)) (t-t0)^{lam-1} E_{mu,lam}(-gamma (t-t0)^mu) ]^c.
struct GeneralizedEnvelopeSpec {
    expr::Expr m;          // comparison function m(x), m(0) = 0, m >= 0
    double m0 = 1.0;       // its Lipschitz constant (reported, not used numerically)
    double c = 1.0;
    double gamma = 0.0;
    double integral_ic = 0.0;  // I^{1-lam} x(t0)
};

double envelope_generalized(const GeneralizedEnvelopeSpec& spec,
                            const fraccalc::HilferOrder& order, double t, double t0);

/// Piecewise envelope of the impulsive stability definitions: accumulated
/// product of (Delta_l)^{lam-1} E(-gamma Delta_l^mu) factors over completed
/// intervals, the live factor (t-t_i)^{lam-1} E(-gamma (t-t_i)^mu) inside an
/// active interval, and the product held constant across impulse windows.
double envelope_piecewise(const StabilityCertificate& cert,
                          const solver::ImpulsiveSchedule& schedule, double x0_norm, double t,
                          solver::Mode mode, EnvelopeParam param = EnvelopeParam::Lambda);

struct CheckResult {
    std::string name;
    double margin;    // >= 0 means satisfied
    double location;  // time of the worst margin
    bool pass;
};

struct LyapunovReport {
    std::vector<CheckResult> checks;
    bool pass = true;
};

/// Verifies the Lyapunov hypotheses along a computed trajectory: V(t,0) = 0,
/// the algebraic sandwich alpha1|x|^a <= V <= alpha2|x|^{ab} (tolerance 1e-9),
/// the fractional decay D^{mu,nu} V(t,x(t)) <= -alpha3 |x|^{ab} on active
/// intervals (tolerance 5e-3, dominated by the derivative quadrature), and
/// V(t, zeta_i(t,x)) <= alpha4 |x|^a on impulse windows.
LyapunovReport verify_lyapunov(const solver::ImpulsiveSystem& system,
                               const solver::PiecewiseTrajectory& traj, const LyapunovSpec& lyap,
                               int grid_stride = 1);

/// Fills cert.margin with min over the trajectory grid of envelope - |x|
/// (compared in weighted form near the singular lower bounds) and sets the
/// verdict. h is derived from lyap when not supplied.
StabilityCertificate check_envelope_dominance(const solver::PiecewiseTrajectory& traj,
                                              StabilityCertificate cert,
                                              const solver::ImpulsiveSchedule& schedule,
                                              solver::Mode mode, double x0_norm,
                                              EnvelopeParam param = EnvelopeParam::Lambda);

inline constexpr double kAlgebraicTol = 1e-9;
inline constexpr double kQuadratureTol = 5e-3;

}  // namespace hilfer::stability

#endif
