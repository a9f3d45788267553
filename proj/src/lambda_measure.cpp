#include "dormcoal/lambda_measure.hpp"

#include <cmath>
#include <stdexcept>

#include "dormcoal/quadrature.hpp"
#include "dormcoal/special.hpp"

namespace dormcoal {

namespace {

// E[Y_kappa^2] = 2 \int_0^inf u (1+u)^{-3} e^{-u/kappa} du  (u = y/(1-y)).
double ey2(double kappa) { return 2.0 * integral_power_ratio_exp(1, 3, 1.0 / kappa); }

double eta_density(const std::vector<EtaAtom>& atoms, double y) {
    const double u = y / (1.0 - y);
    double h = 0.0;
    for (const auto& a : atoms)
        h += a.mass / a.kappa * u * u * std::exp(-u / a.kappa);
    return h;
}

}  // namespace

LambdaMeasure LambdaMeasure::kingman() {
    LambdaMeasure m;
    m.mass_at_zero = 1.0;
    return m;
}

LambdaMeasure LambdaMeasure::star() {
    LambdaMeasure m;
    m.mass_at_one = 1.0;
    return m;
}

LambdaMeasure LambdaMeasure::beta(double a) {
    if (!(a > 0 && a < 2)) throw std::invalid_argument("beta measure: a must be in (0,2)");
    LambdaMeasure m;
    m.interior = BetaInterior{a};
    return m;
}

LambdaMeasure LambdaMeasure::kappa(double k) {
    if (!(k > 0)) throw std::invalid_argument("kappa measure: kappa must be > 0");
    LambdaMeasure m;
    m.interior = EtaInterior{{EtaAtom{k, 1.0}}};
    return m;
}

LambdaMeasure LambdaMeasure::kappa_normalized(double k) {
    if (!(k > 0)) throw std::invalid_argument("kappa measure: kappa must be > 0");
    LambdaMeasure m;
    m.interior = EtaInterior{{EtaAtom{k, 1.0 / ey2(k)}}};
    return m;
}

LambdaMeasure LambdaMeasure::eta_mixture(std::vector<EtaAtom> atoms, double a1, double a2) {
    for (const auto& a : atoms)
        if (!(a.kappa > 0) || !(a.mass >= 0))
            throw std::invalid_argument("eta_mixture: atoms need kappa > 0, mass >= 0");
    if (a1 < 0 || a2 < 0) throw std::invalid_argument("eta_mixture: negative atom mass");
    LambdaMeasure m;
    m.mass_at_zero = a1;
    m.mass_at_one = a2;
    m.interior = EtaInterior{std::move(atoms)};
    return m;
}

LambdaMeasure LambdaMeasure::from_density(std::function<double(double)> h, double a1,
                                          double a2) {
    LambdaMeasure m;
    m.mass_at_zero = a1;
    m.mass_at_one = a2;
    m.interior = DensityInterior{std::move(h)};
    return m;
}

double LambdaMeasure::interior_density(double y) const {
    if (!(y > 0 && y < 1)) throw std::invalid_argument("interior_density: y must be in (0,1)");
    if (const auto* b = std::get_if<BetaInterior>(&interior)) {
        const double a = b->a;
        return std::exp((1.0 - a) * std::log(y) + (a - 1.0) * std::log1p(-y) -
                        log_beta(2.0 - a, a));
    }
    if (const auto* e = std::get_if<EtaInterior>(&interior)) return eta_density(e->atoms, y);
    if (const auto* d = std::get_if<DensityInterior>(&interior)) return d->h(y);
    return 0.0;
}

double LambdaMeasure::interior_mass(double abs_tol) const {
    if (std::holds_alternative<std::monostate>(interior)) return 0.0;
    if (std::holds_alternative<BetaInterior>(interior)) return 1.0;
    if (const auto* e = std::get_if<EtaInterior>(&interior)) {
        double m = 0.0;
        for (const auto& a : e->atoms) m += a.mass * ey2(a.kappa);
        return m;
    }
    const auto* d = std::get_if<DensityInterior>(&interior);
    return integrate([&](double y) { return d->h(y); }, 0.0, 1.0, abs_tol);
}

double LambdaMeasure::total_mass(double abs_tol) const {
    return mass_at_zero + mass_at_one + interior_mass(abs_tol);
}

double LambdaMeasure::integral_inv_y2(double x, double abs_tol) const {
    if (!(x > 0 && x < 1)) throw std::invalid_argument("integral_inv_y2: x must be in (0,1)");
    double v = mass_at_one;  // y = 1 contributes y^{-2} = 1; delta_0 contributes 0
    if (const auto* b = std::get_if<BetaInterior>(&interior)) {
        // \int_x^1 y^{-1-a}(1-y)^{a-1} dy / B(2-a,a) = ((1-x)/x)^a / (a B(2-a,a)).
        const double a = b->a;
        v += std::exp(a * (std::log1p(-x) - std::log(x))) / (a * beta_function(2.0 - a, a));
    } else if (const auto* e = std::get_if<EtaInterior>(&interior)) {
        // y^{-2} h(y) dy = sum_j m_j f_{kappa_j}(y) dy, so the tail integral is
        // sum_j m_j P(Y_{kappa_j} > x).
        for (const auto& a : e->atoms)
            v += a.mass * std::exp(-x / (a.kappa * (1.0 - x)));
    } else if (const auto* d = std::get_if<DensityInterior>(&interior)) {
        v += integrate([&](double y) { return d->h(y) / (y * y); }, x, 1.0, abs_tol);
    }
    return v;
}

}  // namespace dormcoal
