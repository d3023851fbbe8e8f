#pragma once

// Integer-order Bessel functions of the first kind and the Jacobi-Anger
// machinery used by the drive-harmonic expansions.
//
// J_alpha for moderate arguments comes from Miller's backward recurrence
// normalized with J_0 + 2 sum_k J_{2k} = 1, which is stable for alpha > z.
// For large arguments (z > 600) J_0, J_1 switch to the Hankel asymptotic
// series and higher orders follow by forward recurrence (stable for
// alpha < z).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace scqed {

namespace detail {

constexpr double kBesselAsymptoticSwitch = 600.0;

// Hankel asymptotic expansion for J_0 or J_1, z large.
inline double bessel_j01_asymptotic(int order, double z) {
    const double mu = 4.0 * order * order;
    const double w = 8.0 * z;
    double p = 1.0, q = 0.0, term = 1.0;
    for (int k = 0; k < 8; ++k) {
        int twok = 2 * k;
        term *= (mu - (2.0 * twok + 1.0) * (2.0 * twok + 1.0)) / ((twok + 1.0) * w);
        q += (k % 2 == 0) ? term : -term;
        term *= (mu - (2.0 * twok + 3.0) * (2.0 * twok + 3.0)) / ((twok + 2.0) * w);
        p += (k % 2 == 0) ? -term : term;
    }
    double chi = z - (2.0 * order + 1.0) * M_PI / 4.0;
    return std::sqrt(2.0 / (M_PI * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Backward (Miller) recurrence: all of J_0 .. J_nmax at once, alpha,z >= 0.
inline std::vector<double> bessel_miller(int nmax, double z) {
    std::vector<double> out(nmax + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double top = std::max(double(nmax), z);
    int start = int(top) + 16 + int(2.0 * std::sqrt(top));
    double fp = 0.0, f = 1e-300;
    double sum = 0.0;
    for (int k = start; k >= 0; --k) {
        double fm = (2.0 * (k + 1.0) / z) * f - fp;
        fp = f;
        f = fm;
        if (std::abs(f) > 1e250) {  // rescale to avoid overflow
            double s = 1e-250;
            f *= s;
            fp *= s;
            sum *= s;
            for (auto& v : out) v *= s;
        }
        if (k <= nmax) out[k] = f;
        if (k > 0 && k % 2 == 0) sum += 2.0 * f;
    }
    sum += f;  // J_0 term
    for (auto& v : out) v /= sum;
    return out;
}

}  // namespace detail

/// J_0 .. J_nmax at z >= 0 (one backward pass for moderate z, asymptotic +
/// forward recurrence for large z).
inline std::vector<double> bessel_j_array(int nmax, double z) {
    if (nmax < 0) throw std::invalid_argument("bessel_j_array: nmax must be >= 0");
    if (z < 0) throw std::invalid_argument("bessel_j_array: z must be >= 0");
    if (z <= detail::kBesselAsymptoticSwitch || nmax >= z)
        return detail::bessel_miller(nmax, z);
    std::vector<double> out(nmax + 1);
    out[0] = detail::bessel_j01_asymptotic(0, z);
    if (nmax >= 1) out[1] = detail::bessel_j01_asymptotic(1, z);
    for (int k = 1; k < nmax; ++k) out[k + 1] = (2.0 * k / z) * out[k] - out[k - 1];
    return out;
}

/// Integer-order Bessel function of the first kind, any sign of order and
/// argument; uses J_alpha(-z) = (-1)^alpha J_alpha(z) = J_{-alpha}(z).
inline double bessel_j(int alpha, double z) {
    double sign = 1.0;
    if (alpha < 0) {
        alpha = -alpha;
        if (alpha % 2 != 0) sign = -sign;
    }
    if (z < 0) {
        z = -z;
        if (alpha % 2 != 0) sign = -sign;
    }
    return sign * bessel_j_array(alpha, z)[alpha];
}

/// Coefficient table for the expansion e^{2 i lambda Theta_j(t)} =
/// sum_alpha J_alpha(2 lambda g2 / omega_j) e^{i alpha omega_j t}.
struct BesselSeries {
    double argument = 0.0;  // Gamma_j = 2 g2 / omega_j
    int cutoff = 0;         // |alpha| <= cutoff retained
    std::vector<double> coefficients;  // J_0 .. J_cutoff at |argument|

    static BesselSeries build(double argument, int cutoff) {
        if (cutoff < 1) throw std::invalid_argument("BesselSeries: cutoff must be >= 1");
        BesselSeries s;
        s.argument = argument;
        s.cutoff = cutoff;
        s.coefficients = bessel_j_array(cutoff, std::abs(argument));
        return s;
    }

    double j(int alpha) const {
        int a = std::abs(alpha);
        if (a > cutoff) throw std::out_of_range("BesselSeries: order beyond cutoff");
        double v = coefficients[a];
        int flips = 0;
        if (alpha < 0 && a % 2 != 0) ++flips;       // J_{-a}(x) = (-1)^a J_a(x)
        if (argument < 0 && a % 2 != 0) ++flips;    // J_a(-x) = (-1)^a J_a(x)
        return (flips % 2 == 0) ? v : -v;
    }

    /// Tail bound |J_alpha(z)| <= (z/2)^alpha / alpha!, valid for alpha > z:
    /// true if the first omitted order is below tol.
    bool tail_certified(double tol) const {
        double z = std::abs(argument);
        int a = cutoff + 1;
        if (a <= z) return false;
        double logb = a * std::log(z / 2.0) - std::lgamma(a + 1.0);
        return logb < std::log(tol);
    }
};

/// Smallest cutoff with (z/2)^{A+1}/(A+1)! < tol, at least `floor_cutoff`.
inline int certified_cutoff(double z, double tol = 1e-14, int floor_cutoff = 40) {
    z = std::abs(z);
    int a = std::max(floor_cutoff, int(z) + 1);
    while (a < 1000000) {
        double logb = (a + 1) * std::log(z / 2.0 + 1e-300) - std::lgamma(a + 2.0);
        if (a + 1 > z && logb < std::log(tol)) return a;
        ++a;
    }
    return a;
}

/// Partial Jacobi-Anger sum for e^{2 i lambda Theta_j(t)},
/// Theta_j(t) = g2 sin(omega_j t) / omega_j.
inline std::complex<double> jacobi_anger(int lambda_sign, double g2, double omega_j,
                                         double t, int cutoff) {
    if (lambda_sign != 1 && lambda_sign != -1)
        throw std::invalid_argument("jacobi_anger: lambda_sign must be +-1");
    if (cutoff < 1) throw std::invalid_argument("jacobi_anger: cutoff must be >= 1");
    const double gamma_j = 2.0 * lambda_sign * g2 / omega_j;
    BesselSeries s = BesselSeries::build(gamma_j, cutoff);
    std::complex<double> sum = s.j(0);
    for (int a = 1; a <= cutoff; ++a) {
        std::complex<double> ph(std::cos(a * omega_j * t), std::sin(a * omega_j * t));
        sum += s.j(a) * ph + s.j(-a) * std::conj(ph);
    }
    return sum;
}

}  // namespace scqed
