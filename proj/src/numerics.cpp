#include "oprisk/numerics.hpp"

#include <array>
#include <cmath>
#include <algorithm>
#include <string>
#include <vector>

namespace oprisk {

Probability::Probability(double p) : p_(p) {
    OPRISK_REQUIRE(std::isfinite(p) && p > 0.0 && p < 1.0,
                   "probability must lie in (0, 1), got " + std::to_string(p));
}

FactorQuantile FactorQuantile::at_confidence(Probability q) {
    return FactorQuantile{norm_inv(1.0 - q.value())};
}

void QuadratureSpec::validate() const {
    OPRISK_REQUIRE(abs_tol > 0.0 && rel_tol > 0.0, "quadrature tolerances must be positive");
    OPRISK_REQUIRE(max_subdivisions > 0, "max_subdivisions must be positive");
}

double norm_pdf(double x) {
    OPRISK_REQUIRE(std::isfinite(x), "norm_pdf: non-finite argument");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) {
    OPRISK_REQUIRE(std::isfinite(x), "norm_cdf: non-finite argument");
    return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_sf(double x) {
    OPRISK_REQUIRE(std::isfinite(x), "norm_sf: non-finite argument");
    return 0.5 * std::erfc(x / kSqrt2);
}

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
    double acc = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
    return acc;
}

// Wichura, AS241 (PPND16). Relative accuracy about 1e-16.
double ppnd16(double p) {
    static constexpr std::array<double, 8> a{
        3.3871328727963666080e0,  1.3314166789178437745e+2, 1.9715909503065514427e+3,
        1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
        3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr std::array<double, 8> b{
        1.0,                      4.2313330701600911252e+1, 6.8718700749205790830e+2,
        5.3941960214247511077e+3, 2.1213794301586595867e+4, 3.9307895800092710610e+4,
        2.8729085735721942674e+4, 5.2264952788528545610e+3};
    static constexpr std::array<double, 8> c{
        1.42343711074968357734e0,  4.63033784615654529590e0,  5.76949722146069140550e0,
        3.64784832476320460504e0,  1.27045825245236838258e0,  2.41780725177450611770e-1,
        2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr std::array<double, 8> d{
        1.0,                       2.05319162663775882187e0,  1.67638483018380384940e0,
        6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
        5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static constexpr std::array<double, 8> e{
        6.65790464350110377720e0,  5.46378491116411436990e0,  1.78482653991729133580e0,
        2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
        2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr std::array<double, 8> f{
        1.0,                       5.99832206555887937690e-1, 1.36929880922735805310e-1,
        1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
        1.42151175831644588870e-7, 2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        x = horner(e, r) / horner(f, r);
    }
    return q < 0.0 ? -x : x;
}

} // namespace

double norm_inv(double p) {
    OPRISK_REQUIRE(std::isfinite(p) && p > 0.0 && p < 1.0,
                   "norm_inv: argument must lie in (0, 1), got " + std::to_string(p));
    if (p == 0.5) return 0.0;
    // Refine in the lower tail, where N(x) carries full relative precision.
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;
    double x = ppnd16(tail);
    const double err = norm_cdf(x) - tail;
    const double u = err * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return upper ? -x : x;
}

double log_norm_interval(double a, double b) {
    OPRISK_REQUIRE(std::isfinite(a) && std::isfinite(b) && a < b,
                   "log_norm_interval: need finite a < b");
    const double h = 0.5 * (b - a);
    if (h < 1e-3) {
        // Midpoint expansion of the integral of the density over [c - h, c + h].
        const double c = 0.5 * (a + b);
        const double c2 = c * c;
        const double h2 = h * h;
        const double series =
            1.0 + (c2 - 1.0) * h2 / 6.0 + (c2 * c2 - 6.0 * c2 + 3.0) * h2 * h2 / 120.0;
        return std::log(2.0 * h) - 0.5 * c2 + std::log(kInvSqrt2Pi) + std::log(series);
    }
    if (a >= 0.0) return std::log(norm_sf(a) - norm_sf(b));
    return std::log(norm_cdf(b) - norm_cdf(a));
}

namespace {

constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * sum;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::fabs(kronrod - gauss)};
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec) {
    spec.validate();
    OPRISK_REQUIRE(std::isfinite(a) && std::isfinite(b), "integration bounds must be finite");
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    const double sign = a < b ? 1.0 : -1.0;
    if (sign < 0.0) std::swap(a, b);

    std::vector<Segment> heap;
    const Segment first = gk15(f, a, b);
    heap.push_back(first);
    double total = first.value;
    double error = first.error;
    std::size_t subdivisions = 1;

    auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)); };

    while (error > target() && subdivisions < spec.max_subdivisions) {
        const Segment worst = heap.front();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) break; // interval exhausted at machine precision
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = gk15(f, worst.a, mid);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(gk15(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end());
        ++subdivisions;
        // Re-sum rather than update incrementally so round-off does not accumulate.
        total = 0.0;
        error = 0.0;
        for (const Segment& s : heap) {
            total += s.value;
            error += s.error;
        }
    }

    out.value = sign * total;
    out.error = error;
    out.subdivisions = subdivisions;
    out.converged = error <= target();
    if (!std::isfinite(out.value)) out.converged = false;
    return out;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    const QuadratureResult r = integrate_adaptive(f, a, b, spec);
    if (!r.converged) {
        throw ConvergenceError("adaptive quadrature did not converge after " +
                                   std::to_string(r.subdivisions) + " subdivisions",
                               r.value, r.error);
    }
    return r.value;
}

double integrate_gaussian_weighted(const std::function<double(double)>& g,
                                   const QuadratureSpec& spec) {
    auto weighted = [&g](double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t) * g(t); };
    return integrate(weighted, -kGaussianTruncation, kGaussianTruncation, spec);
}

} // namespace oprisk
