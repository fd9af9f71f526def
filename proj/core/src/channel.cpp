#include "rcs/channel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxPdfDegree = 3;
constexpr double kQuadTol = 1e-8;

double log_nakagami_pdf(double h, double m, double omega) {
    // f(h) = 2 m^m / (Omega^m Gamma(m)) h^(2m-1) exp(-m h^2 / Omega)
    return std::log(2.0) + m * std::log(m / omega) - std::lgamma(m) +
           (2.0 * m - 1.0) * std::log(h) - m * h * h / omega;
}

// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Composite adaptive Simpson: a fixed 32-panel seed keeps narrow peaks of
// the substituted integrand from slipping between the first probe points.
double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    constexpr int kPanels = 32;
    const double width = (b - a) / kPanels;
    const double panel_tol = tol / kPanels;
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const double lo = a + p * width;
        const double hi = p + 1 == kPanels ? b : lo + width;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fmid = f(mid);
        const double fhi = f(hi);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole, panel_tol, 40);
    }
    return total;
}

// Integral of g over (0, inf) via the substitution x = t / (1 - t).
double integrate_half_line(const std::function<double(double)>& g, double tol) {
    auto mapped = [&g](double t) {
        if (t <= 0.0 || t >= 1.0) {
            return 0.0;
        }
        const double one_minus = 1.0 - t;
        const double x = t / one_minus;
        const double jac = 1.0 / (one_minus * one_minus);
        const double v = g(x) * jac;
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(mapped, 0.0, 1.0, tol);
}

// Density of the product of stages [first, last) at h, by recursive
// conditioning on the first stage: f(h) = int f_0(x) f_rest(h/x) / x dx.
double product_pdf(double h, const std::vector<NakagamiStage>& stages, std::size_t first) {
    const std::size_t remaining = stages.size() - first;
    if (remaining == 1) {
        return std::exp(log_nakagami_pdf(h, stages[first].m, stages[first].omega));
    }
    const NakagamiStage& head = stages[first];
    auto integrand = [&](double x) {
        const double fx = std::exp(log_nakagami_pdf(x, head.m, head.omega));
        if (fx <= 0.0) {
            return 0.0;
        }
        return fx * product_pdf(h / x, stages, first + 1) / x;
    };
    return integrate_half_line(integrand, kQuadTol);
}

} // namespace

void NakagamiStage::validate() const {
    if (!(m >= 0.5) || !std::isfinite(m)) {
        std::ostringstream msg;
        msg << "fading parameter m = " << m << " outside [0.5, inf)";
        throw ParameterError(msg.str());
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        std::ostringstream msg;
        msg << "mean square amplitude omega = " << omega << " must be positive";
        throw ParameterError(msg.str());
    }
}

CascadeSpec CascadeSpec::iid(int degree, double m, double omega) {
    if (degree < 1) {
        throw ParameterError("cascade degree must be at least 1");
    }
    CascadeSpec spec;
    spec.stages.assign(static_cast<std::size_t>(degree), NakagamiStage{m, omega});
    spec.validate();
    return spec;
}

void CascadeSpec::validate() const {
    if (stages.empty()) {
        throw ParameterError("cascade must contain at least one stage");
    }
    for (const NakagamiStage& stage : stages) {
        stage.validate();
    }
}

double RelayGeometry::amplitude_gain() const {
    return std::sqrt(gain_sr * gain_rd);
}

double sample_nakagami_amplitude(const NakagamiStage& stage, RngStream& rng) {
    stage.validate();
    return std::sqrt(rng.gamma(stage.m, stage.omega / stage.m));
}

ChannelCoefficient sample_channel(const CascadeSpec& spec, RngStream& rng) {
    spec.validate();
    double amplitude = 1.0;
    for (const NakagamiStage& stage : spec.stages) {
        amplitude *= std::sqrt(rng.gamma(stage.m, stage.omega / stage.m));
    }
    const double phase = rng.uniform(0.0, kTwoPi);
    return std::polar(amplitude, phase);
}

double nakagami_pdf(double h, const NakagamiStage& stage) {
    stage.validate();
    if (h <= 0.0) {
        throw std::domain_error("density argument must be positive");
    }
    return std::exp(log_nakagami_pdf(h, stage.m, stage.omega));
}

double cascaded_pdf_mass(const CascadeSpec& spec) {
    spec.validate();
    if (spec.degree() > kMaxPdfDegree) {
        std::ostringstream msg;
        msg << "product density supports degree <= " << kMaxPdfDegree << ", got "
            << spec.degree();
        throw UnsupportedDepthError(msg.str());
    }
    return integrate_half_line([&spec](double h) { return product_pdf(h, spec.stages, 0); },
                               1e-6);
}

double cascaded_pdf_bin_average(const CascadeSpec& spec, double lo, double hi) {
    if (!(hi > lo) || lo < 0.0) {
        throw std::domain_error("bin bounds must satisfy 0 <= lo < hi");
    }
    // 3-point Gauss-Legendre on the bin.
    constexpr double kNode = 0.7745966692414834; // sqrt(3/5)
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double f1 = cascaded_pdf(mid - half * kNode, spec);
    const double f2 = cascaded_pdf(mid, spec);
    const double f3 = cascaded_pdf(mid + half * kNode, spec);
    return (5.0 * f1 + 8.0 * f2 + 5.0 * f3) / 18.0;
}

double cascaded_pdf(double h, const CascadeSpec& spec) {
    spec.validate();
    if (spec.degree() > kMaxPdfDegree) {
        std::ostringstream msg;
        msg << "product density supports degree <= " << kMaxPdfDegree << ", got "
            << spec.degree();
        throw UnsupportedDepthError(msg.str());
    }
    if (h <= 0.0 || !std::isfinite(h)) {
        throw std::domain_error("density argument must be positive");
    }
    return product_pdf(h, spec.stages, 0);
}

RelayGeometry solve_geometry(double d_sr, double theta, double path_loss_exponent) {
    if (!(d_sr > 0.0)) {
        throw GeometryError("source-relay distance must be positive");
    }
    if (!(theta > 0.0) || !(theta < std::numbers::pi)) {
        throw GeometryError("inter-link angle must lie in (0, pi)");
    }
    if (!(path_loss_exponent > 0.0)) {
        throw GeometryError("path loss exponent must be positive");
    }

    const double cos_theta = std::cos(theta);
    const double discriminant = d_sr * d_sr * (cos_theta * cos_theta - 1.0) + 1.0;
    if (discriminant < 0.0) {
        throw GeometryError("relay placement admits no real solution");
    }
    const double d_rd = d_sr * cos_theta + std::sqrt(discriminant);
    if (!(d_rd > 0.0)) {
        throw GeometryError("relay placement admits no positive relay-destination distance");
    }

    RelayGeometry geom;
    geom.d_sr = d_sr;
    geom.theta = theta;
    geom.path_loss_exponent = path_loss_exponent;
    geom.d_rd = d_rd;
    geom.gain_sr = std::pow(1.0 / d_sr, path_loss_exponent);
    geom.gain_rd = std::pow(1.0 / d_rd, path_loss_exponent);
    return geom;
}

CascadeSampler::CascadeSampler(CascadeSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

double CascadeSampler::amplitude(RngStream& rng) const {
    double amplitude = 1.0;
    for (const NakagamiStage& stage : spec_.stages) {
        amplitude *= std::sqrt(rng.gamma(stage.m, stage.omega / stage.m));
    }
    return amplitude;
}

ChannelCoefficient CascadeSampler::coefficient(RngStream& rng) const {
    const double a = amplitude(rng);
    const double phase = rng.uniform(0.0, kTwoPi);
    return std::polar(a, phase);
}

} // namespace rcs
