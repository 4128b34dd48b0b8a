#ifndef HILFER_SPECIAL_HPP
#define HILFER_SPECIAL_HPP

#include <stdexcept>
#include <string>

namespace hilfer::special {

struct PoleError : std::domain_error {
    using std::domain_error::domain_error;
};

struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// sin(pi*x) with argument reduction, exact at integers and half-integers.
double sin_pi(double x);

/// Gamma function on the real line (Lanczos rational approximation,
/// reflection for x < 0.5). Throws PoleError at non-positive integers.
double gamma_fn(double x);

/// 1/Gamma(x); returns exactly 0 at the poles of Gamma. Entire, never throws.
double reciprocal_gamma(double x);

/// log|Gamma(x)| valid on the whole real line away from poles; sign of
/// Gamma(x) is written to *sign when non-null.
double log_abs_gamma(double x, int* sign = nullptr);

/// Parameters of the two-parameter Mittag-Leffler function E_{mu,lam}.
/// Requires mu > 0 and lam > 0; the solver side only ever uses mu in (0,1),
/// but mu up to 2 is supported for the classical identities.
struct MLParams {
    double mu;
    double lam;
};

/// One evaluation of E with its certified error estimate. Used by the
/// internal regimes and exposed for cross-checking them against each other.
struct MlEval {
    double value = 0.0;
    double err_est = 0.0;  // conservative absolute error bound
    bool usable = false;   // false when the regime cannot represent the result
    int terms = 0;
};

namespace detail {
/// Power series sum_k z^k / Gamma(mu k + lam), accumulated in binary128.
/// err_est models the cancellation floor sum|t_k| * eps128.
MlEval ml_series(const MLParams& p, double z);

/// Algebraic expansion -sum_{k>=1} z^{-k}/Gamma(lam - mu k) for z << 0 with
/// optimal (smallest-term) truncation. err_est = min term + saddle remainder.
MlEval ml_asymptotic(const MLParams& p, double z);
}  // namespace detail

/// E_{mu,lam}(z) on the real line, absolute accuracy 1e-10 (relative for
/// results above 1 in magnitude). Dual regime: series preferred for
/// |z| <= z_switch, asymptotic for z <= -z_switch, with fallback to the
/// other regime whenever the preferred one cannot certify the tolerance.
/// Throws ParameterError for invalid (mu, lam), AccuracyError when neither
/// regime certifies, and PoleError never (gamma reciprocals vanish benignly).
double mittag_leffler(const MLParams& p, double z);

/// |int_0^T e^{-st} t^{lam-1} E_{mu,lam}(-gamma t^mu) dt - s^{mu-lam}/(s^mu+gamma)|.
/// The weakly singular endpoint is removed by substituting u = t^lam; the
/// smooth integrand is then handled by adaptive Simpson. Self-test oracle for
/// the Laplace-transform pair.
double ml_laplace_residual(const MLParams& p, double gammaCoef, double s, double T);

inline constexpr double kMlTolerance = 1e-10;
inline constexpr double kZSwitch = 10.0;
inline constexpr int kAsymMinTerms = 20;
inline constexpr int kAsymMaxTerms = 150;

}  // namespace hilfer::special

#endif
