#include "nullboot/normal.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace nullboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper orthant probability P(X > h, Y > k), after Genz's BVNU (Drezner-Wesolowsky
// Gauss-Legendre quadrature of Plackett's identity, with the asymptotic treatment for
// |rho| >= 0.925).
double bvnu(double h, double k, double r) {
    if (h == kInf || k == kInf) return 0.0;
    if (h == -kInf) return k == -kInf ? 1.0 : norm_cdf(-k);
    if (k == -kInf) return norm_cdf(-h);
    if (r == 0.0) return norm_cdf(-h) * norm_cdf(-k);

    static constexpr std::array<double, 3> w6{0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
    static constexpr std::array<double, 3> x6{0.9324695142031522, 0.6612093864662647, 0.2386191860831970};
    static constexpr std::array<double, 6> w12{0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
                                               0.2031674267230659,  0.2334925365383547, 0.2491470458134029};
    static constexpr std::array<double, 6> x12{0.9815606342467191, 0.9041172563704750, 0.7699026741943050,
                                               0.5873179542866171, 0.3678314989981802, 0.1252334085114692};
    static constexpr std::array<double, 10> w20{0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                                                0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                                                0.1316886384491766,  0.1420961093183821,  0.1491729864726037,
                                                0.1527533871307259};
    static constexpr std::array<double, 10> x20{0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
                                                0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
                                                0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
                                                0.07652652113349733};
    const double* w;
    const double* x;
    std::size_t lg;
    const double ar = std::abs(r);
    if (ar < 0.3) {
        w = w6.data(), x = x6.data(), lg = 3;
    } else if (ar < 0.75) {
        w = w12.data(), x = x12.data(), lg = 6;
    } else {
        w = w20.data(), x = x20.data(), lg = 10;
    }
    constexpr double tp = 2.0 * std::numbers::pi;
    double hk = h * k;
    double bvn = 0.0;
    if (ar < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r) / 2.0;
        for (std::size_t i = 0; i < lg; ++i) {
            for (double sign : {-1.0, 1.0}) {
                const double sn = std::sin(asr * (1.0 + sign * x[i]));
                bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        bvn = bvn * asr / tp + norm_cdf(-h) * norm_cdf(-k);
    } else {
        if (r < 0.0) {
            k = -k;
            hk = -hk;
        }
        if (ar < 1.0) {
            const double as = 1.0 - r * r;
            double a = std::sqrt(as);
            const double bs = (h - k) * (h - k);
            const double c = (4.0 - hk) / 8.0;
            const double d = (12.0 - hk) / 80.0;
            double asr = -(bs / as + hk) / 2.0;
            if (asr > -100.0) bvn = a * std::exp(asr) * (1.0 - c * (bs - as) * (1.0 - d * bs) / 3.0 + c * d * as * as);
            if (hk > -100.0) {
                const double b = std::sqrt(bs);
                const double sp = std::sqrt(tp) * norm_cdf(-b / a);
                bvn -= std::exp(-hk / 2.0) * sp * b * (1.0 - c * bs * (1.0 - d * bs) / 3.0);
            }
            a /= 2.0;
            double sum = 0.0;
            for (std::size_t i = 0; i < lg; ++i) {
                for (double sign : {-1.0, 1.0}) {
                    const double xs = std::pow(a * (1.0 + sign * x[i]), 2);
                    const double asr_i = -(bs / xs + hk) / 2.0;
                    if (asr_i <= -100.0) continue;
                    const double sp = 1.0 + c * xs * (1.0 + 5.0 * d * xs);
                    const double rs = std::sqrt(1.0 - xs);
                    const double ep = std::exp(-(hk / 2.0) * xs / ((1.0 + rs) * (1.0 + rs))) / rs;
                    sum += w[i] * std::exp(asr_i) * (ep - sp);
                }
            }
            bvn = -(bvn + a * sum) / tp;
        }
        if (r > 0.0) {
            bvn += norm_cdf(-std::max(h, k));
        } else if (h >= k) {
            bvn = -bvn;
        } else {
            const double l = h < 0.0 ? norm_cdf(k) - norm_cdf(h) : norm_cdf(-h) - norm_cdf(-k);
            bvn = l - bvn;
        }
    }
    return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double norm_quantile(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bivariate_normal_cdf(double h, double k, double rho) {
    if (h == -kInf || k == -kInf) return 0.0;
    if (h == kInf) return k == kInf ? 1.0 : norm_cdf(k);
    if (k == kInf) return norm_cdf(h);
    if (rho >= 1.0) return norm_cdf(std::min(h, k));
    if (rho <= -1.0) return std::max(0.0, norm_cdf(h) - norm_cdf(-k));
    return bvnu(-h, -k, rho);
}

}  // namespace nullboot
