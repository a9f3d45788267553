#ifndef DORMCOAL_LAMBDA_MEASURE_HPP
#define DORMCOAL_LAMBDA_MEASURE_HPP

#include <functional>
#include <variant>
#include <vector>

namespace dormcoal {

// One atom of a discretized eta measure on (0, infinity).
struct EtaAtom {
    double kappa;
    double mass;
};

// Finite measure on [0,1] in the canonical form a1*delta_0 + a2*delta_1 +
// interior part. Interior variants:
//   BetaInterior     Beta(2-a, a) probability measure, 0 < a < 2
//   EtaInterior      density h(y) = sum_j m_j (1/k_j)(y/(1-y))^2 e^{-y/(k_j(1-y))},
//                    total mass sum_j m_j E[Y_{k_j}^2]
//   DensityInterior  arbitrary density on (0,1)
// The paper's Lambda_kappa (probability measure) and its unnormalized companion
// y^2 * law(Y_kappa) (mass E[Y_kappa^2]) are both eta-interiors with a single
// atom; see the kappa factories.
struct LambdaMeasure {
    struct BetaInterior {
        double a;
    };
    struct EtaInterior {
        std::vector<EtaAtom> atoms;
    };
    struct DensityInterior {
        std::function<double(double)> h;
    };

    double mass_at_zero = 0.0;  // a1
    double mass_at_one = 0.0;   // a2
    std::variant<std::monostate, BetaInterior, EtaInterior, DensityInterior> interior;

    static LambdaMeasure kingman();           // delta_0
    static LambdaMeasure star();              // delta_1
    static LambdaMeasure beta(double a);      // Beta(2-a, a), probability measure
    static LambdaMeasure kappa(double k);     // y^2 law(Y_k), mass E[Y_k^2]
    static LambdaMeasure kappa_normalized(double k);  // Lambda_k, probability measure
    static LambdaMeasure eta_mixture(std::vector<EtaAtom> atoms, double a1 = 0,
                                     double a2 = 0);
    static LambdaMeasure from_density(std::function<double(double)> h, double a1 = 0,
                                      double a2 = 0);

    bool has_interior() const { return !std::holds_alternative<std::monostate>(interior); }
    // Interior density at y in (0,1); 0 for the empty interior.
    double interior_density(double y) const;
    double interior_mass(double abs_tol = 1e-10) const;
    double total_mass(double abs_tol = 1e-10) const;
    // \int_x^1 y^{-2} Lambda(dy) for x in (0,1) (the Theorem 2.1 right side).
    // Closed form for Beta and eta interiors, quadrature otherwise.
    double integral_inv_y2(double x, double abs_tol = 1e-10) const;
};

}  // namespace dormcoal

#endif
