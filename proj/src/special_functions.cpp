#include "fracrd/special_functions.hpp"

#include "fracrd/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace fracrd {

namespace {

constexpr double kPi = std::numbers::pi;
// exp() overflows beyond this argument.
constexpr double kMaxExpArg = 709.0;
// Largest acceptable series term magnitude on the negative axis; summation
// error is roughly this times machine epsilon.
constexpr double kSeriesCancellationLimit = 1e3;
constexpr double kAsymptoticTol = 1e-14;

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

std::string describe(double alpha, double beta, double z) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha=" << alpha << ", beta=" << beta << ", z=" << z;
    return os.str();
}

struct SeriesResult {
    double value;
    double max_term;
};

// Power series in double precision; terms built in the log domain so that
// large Gamma arguments never overflow.
SeriesResult ml_series(const MlParams& p, double z) {
    const double log_abs_z = std::log(std::fabs(z));
    double sum = rgamma(p.beta);
    double max_term = std::fabs(sum);
    double previous = max_term;
    for (int k = 1; k < p.max_terms; ++k) {
        const double arg = p.alpha * k + p.beta;
        const double magnitude = std::exp(k * log_abs_z - std::lgamma(arg));
        const double term = (z < 0.0 && (k % 2 == 1)) ? -magnitude : magnitude;
        sum += term;
        max_term = std::max(max_term, magnitude);
        if (!std::isfinite(sum)) {
            throw ParameterError("mittag_leffler: series overflow for " +
                                 describe(p.alpha, p.beta, z));
        }
        const bool decreasing = magnitude < previous;
        previous = magnitude;
        if (decreasing && magnitude <= p.series_tol * std::max(1.0, std::fabs(sum))) {
            return {sum, max_term};
        }
    }
    throw AccuracyError("mittag_leffler: series did not converge within max_terms for " +
                            describe(p.alpha, p.beta, z),
                        sum, previous);
}

// alpha = 1: Gamma(k + beta) = (k - 1 + beta) Gamma(k - 1 + beta), so terms
// follow an exact ratio recurrence. Quad precision absorbs the cancellation
// on the negative axis up to |z| ~ 50.
double ml_series_alpha_one(const MlParams& p, double z) {
    // Sum z^k / (beta)_k exactly in quad precision, scale by 1/Gamma(beta) once.
    const __float128 beta = p.beta;
    const __float128 zq = z;
    __float128 term = 1;
    __float128 sum = 1;
    for (int k = 1; k < p.max_terms; ++k) {
        term *= zq / (static_cast<__float128>(k - 1) + beta);
        sum += term;
        const double mag = std::fabs(static_cast<double>(term));
        if (k > std::fabs(z) && mag <= 1e-34 * std::max(1.0, std::fabs(static_cast<double>(sum)))) {
            return static_cast<double>(sum) * rgamma(p.beta);
        }
    }
    throw AccuracyError("mittag_leffler: alpha=1 series did not converge for " +
                            describe(p.alpha, p.beta, z),
                        static_cast<double>(sum) * rgamma(p.beta),
                        std::fabs(static_cast<double>(term)));
}

struct AsymptoticResult {
    double value;
    double error_estimate;
};

AsymptoticResult ml_asymptotic(const MlParams& p, double z) {
    const double a = p.alpha;
    const double b = p.beta;
    double sum = 0.0;
    double zk = 1.0;
    for (int k = 1; k <= p.asymptotic_terms; ++k) {
        zk /= z;
        sum -= zk * rgamma(b - a * k);
    }
    const double omitted = std::fabs(zk / z * rgamma(b - a * (p.asymptotic_terms + 1)));
    double error = omitted;
    if (z > 0.0) {
        const double power = std::pow(z, 1.0 / a);
        if (power > kMaxExpArg) {
            throw ParameterError("mittag_leffler: result overflows for " + describe(a, b, z));
        }
        sum += std::pow(z, (1.0 - b) / a) * std::exp(power) / a;
    } else {
        // Exponentially small contribution of the saddles nearest the cut;
        // relevant only as alpha approaches 1.
        const double c = std::cos(kPi / a);
        if (a > 0.5 && c < 0.0) {
            const double az = std::fabs(z);
            error += std::pow(az, (1.0 - b) / a) * std::exp(std::pow(az, 1.0 / a) * c) / a;
        } else if (a > 0.5) {
            error = std::numeric_limits<double>::infinity();
        }
    }
    return {sum, error};
}

// Integral representation on the negative real axis, valid for
// 0 < alpha < 1 and beta < 1 + alpha:
//   E(z) = int_0^inf K(chi) dchi,
//   K = chi^{(1-beta)/alpha} exp(-chi^{1/alpha})
//       [chi sin(pi(1-beta)) - z sin(pi(1-beta+alpha))]
//       / (alpha pi (chi^2 - 2 chi z cos(pi alpha) + z^2)).
double ml_integral_core(double a, double b, double z) {
    const double s1 = std::sin(kPi * (1.0 - b));
    const double s2 = std::sin(kPi * (1.0 - b + a));
    const double c = std::cos(kPi * a);
    const double power = (1.0 - b) / a;
    auto kernel = [=](double chi) {
        if (chi <= 0.0) {
            return 0.0;
        }
        const double den = chi * chi - 2.0 * chi * z * c + z * z;
        return std::pow(chi, power) * std::exp(-std::pow(chi, 1.0 / a)) * (chi * s1 - z * s2) /
               (a * kPi * den);
    };

    // exp(-chi^{1/alpha}) is below 1e-320 past this point.
    const double upper = std::pow(740.0, a);
    std::vector<double> cuts{0.0};
    const double az = std::fabs(z);
    const double peak = az * std::max(-c, 0.0);
    for (double cand : {std::min(1.0, 0.5 * upper), peak, az, 2.0 * az}) {
        if (cand > 0.0 && cand < upper) {
            cuts.push_back(cand);
        }
    }
    cuts.push_back(upper);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::fabs(x - y) < 1e-12; }),
               cuts.end());

    // Double-exponential quadrature per piece: it tolerates the integrable
    // endpoint singularity at chi = 0 and converges fast on the smooth rest.
    thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Two-argument form: the abscissa plus its distance to the nearest end.
        auto f = [&](double chi, double) { return kernel(chi); };
        total += rule.integrate(f, cuts[i], cuts[i + 1], 1e-14);
    }
    return total;
}

double ml_integral(const MlParams& p, double z) {
    if (p.alpha >= 1.0 || z >= 0.0) {
        throw ParameterError("mittag_leffler: integral branch needs alpha < 1 and z < 0");
    }
    if (p.beta < 1.0 + p.alpha) {
        return ml_integral_core(p.alpha, p.beta, z);
    }
    // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
    MlParams lower = p;
    lower.beta = p.beta - p.alpha;
    return (ml_integral(lower, z) - rgamma(lower.beta)) / z;
}

double ml_automatic(const MlParams& p, double z) {
    const double a = p.alpha;
    const double az = std::fabs(z);
    if (a == 1.0) {
        if (p.beta == 1.0) {
            if (z > kMaxExpArg) {
                throw ParameterError("mittag_leffler: result overflows for " + describe(a, p.beta, z));
            }
            return std::exp(z);
        }
        if (az <= std::max(50.0, p.asymptotic_switch)) {
            return ml_series_alpha_one(p, z);
        }
        return ml_asymptotic(p, z).value;
    }
    if (z > 0.0) {
        if (std::pow(z, 1.0 / a) > kMaxExpArg) {
            throw ParameterError("mittag_leffler: result overflows for " + describe(a, p.beta, z));
        }
        if (z < p.asymptotic_switch) {
            return ml_series(p, z).value;
        }
        return ml_asymptotic(p, z).value;
    }
    // Negative axis. The largest series term is about exp(|z|^{1/alpha}).
    if (std::pow(az, 1.0 / a) < std::log(kSeriesCancellationLimit)) {
        const auto series = ml_series(p, z);
        if (series.max_term <= kSeriesCancellationLimit) {
            return series.value;
        }
    }
    if (az >= p.asymptotic_switch) {
        const auto asym = ml_asymptotic(p, z);
        if (asym.error_estimate <= kAsymptoticTol) {
            return asym.value;
        }
    }
    return ml_integral(p, z);
}

}  // namespace

void MlParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("mittag_leffler: alpha must lie in (0, 1]");
    }
    if (!(beta > 0.0)) {
        throw ParameterError("mittag_leffler: beta must be positive");
    }
    if (!(series_tol > 0.0)) {
        throw ParameterError("mittag_leffler: series_tol must be positive");
    }
    if (max_terms < 50) {
        throw ParameterError("mittag_leffler: max_terms must be at least 50");
    }
    if (!(asymptotic_switch > 0.0) || asymptotic_terms < 1) {
        throw ParameterError("mittag_leffler: invalid asymptotic controls");
    }
}

double gamma_fn(double x) {
    if (is_nonpositive_integer(x)) {
        throw ParameterError("gamma: pole at non-positive integer");
    }
    return std::tgamma(x);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) {
        return 0.0;
    }
    if (x > 171.0) {
        return std::exp(-std::lgamma(x));
    }
    return 1.0 / std::tgamma(x);
}

double mittag_leffler(double alpha, double z) {
    return mittag_leffler2(alpha, 1.0, z);
}

double mittag_leffler2(double alpha, double beta, double z) {
    MlParams params;
    params.alpha = alpha;
    params.beta = beta;
    return mittag_leffler2(params, z);
}

double mittag_leffler2(const MlParams& params, double z, MlBranch branch) {
    params.validate();
    if (!std::isfinite(z)) {
        throw ParameterError("mittag_leffler: non-finite argument");
    }
    if (z == 0.0) {
        return rgamma(params.beta);
    }
    switch (branch) {
        case MlBranch::series:
            if (params.alpha == 1.0) {
                return ml_series_alpha_one(params, z);
            }
            return ml_series(params, z).value;
        case MlBranch::integral:
            return ml_integral(params, z);
        case MlBranch::asymptotic:
            return ml_asymptotic(params, z).value;
        case MlBranch::automatic:
            break;
    }
    return ml_automatic(params, z);
}

EnvelopeValue ml_exponential_envelope(double alpha, double w, double t) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(w > 0.0) || !(t >= 0.0)) {
        throw ParameterError("ml_exponential_envelope: needs 0 < alpha < 1, w > 0, t >= 0");
    }
    const double arg = std::pow(w, 1.0 / alpha) * t;
    if (arg > kMaxExpArg) {
        return {std::numeric_limits<double>::max(), true};
    }
    return {std::exp(arg), false};
}

double fit_envelope_constant(double alpha, double w, std::span<const double> t_grid) {
    double best = 0.0;
    for (double t : t_grid) {
        const auto env = ml_exponential_envelope(alpha, w, t);
        if (env.saturated) {
            continue;
        }
        const double ratio = mittag_leffler(alpha, w * std::pow(t, alpha)) / env.value;
        best = std::max(best, ratio);
    }
    return best;
}

}  // namespace fracrd
