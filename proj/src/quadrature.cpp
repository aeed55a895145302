#include "sstokes/quadrature.hpp"

namespace sstokes {

namespace {

QuadratureRule make_degree6_rule()
{
    // Orbits (a, b, b) x3, (a, b, b) x3, (a, b, c) x6. Weights are fractions of
    // the triangle area.
    constexpr double a1 = 0.063089014491502228340331602870819;
    constexpr double w1 = 0.050844906370206816920936809106869;
    constexpr double a2 = 0.24928674517091042129163855310702;
    constexpr double w2 = 0.11678627572637936602528961138558;
    constexpr double b3 = 0.053145049844816947353249671631398;
    constexpr double c3 = 0.31035245103378440541660773395655;
    constexpr double w3 = 0.082851075618373575193553456420442;

    QuadratureRule rule;
    auto add = [&rule](double l0, double l1, double l2, double w) {
        rule.points.push_back({l0, l1, l2});
        rule.weights.push_back(0.5 * w);
    };
    for (double a : {a1, a2}) {
        const double w = (a == a1) ? w1 : w2;
        const double b = 1.0 - 2.0 * a;
        add(b, a, a, w);
        add(a, b, a, w);
        add(a, a, b, w);
    }
    const double d3 = 1.0 - b3 - c3;
    add(b3, c3, d3, w3);
    add(b3, d3, c3, w3);
    add(c3, b3, d3, w3);
    add(c3, d3, b3, w3);
    add(d3, b3, c3, w3);
    add(d3, c3, b3, w3);
    return rule;
}

}  // namespace

const QuadratureRule& quadrature_rule()
{
    static const QuadratureRule rule = make_degree6_rule();
    return rule;
}

}  // namespace sstokes
