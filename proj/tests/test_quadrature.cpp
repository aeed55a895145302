#include <cmath>

#include <gtest/gtest.h>

#include "sstokes/quadrature.hpp"

using namespace sstokes;

namespace {

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) {
        f *= i;
    }
    return f;
}

// Closed form of the monomial integral on the reference triangle with area 1/2.
double monomial_exact(int a, int b, int c)
{
    return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

double monomial_rule(int a, int b, int c)
{
    const QuadratureRule& rule = quadrature_rule();
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.points[q];
        s += rule.weights[q] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
    }
    return s;
}

// Midpoint rule on a regular subdivision of the reference triangle into k^2 pieces.
template <class F>
double subgrid_integral(F f, int k)
{
    const double hh = 1.0 / k;
    const double area = 0.5 * hh * hh;
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; i + j < k; ++j) {
            const double x = i * hh;
            const double y = j * hh;
            s += area * f(x + hh / 3, y + hh / 3);
            if (i + j + 1 < k) {
                s += area * f(x + 2 * hh / 3, y + 2 * hh / 3);
            }
        }
    }
    return s;
}

}  // namespace

TEST(Quadrature, ShapeOfRule)
{
    const QuadratureRule& rule = quadrature_rule();
    ASSERT_EQ(rule.size(), static_cast<std::size_t>(kQuadraturePoints));
    double total = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        EXPECT_GT(rule.weights[q], 0.0);
        for (double l : rule.points[q]) {
            EXPECT_GT(l, 0.0);
        }
        total += rule.weights[q];
    }
    EXPECT_NEAR(total, 0.5, 1e-15);
}

TEST(Quadrature, SimpleIntegrals)
{
    EXPECT_NEAR(monomial_rule(0, 0, 0), 0.5, 1e-15);
    EXPECT_NEAR(monomial_rule(1, 0, 0), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(monomial_rule(1, 1, 1), 1.0 / 120.0, 1e-15);
    EXPECT_NEAR(monomial_rule(2, 2, 2), 1.0 / 5040.0, 1e-15);
}

TEST(Quadrature, FactorialFormulaAgreesWithSubgridIntegration)
{
    // Independent check of the closed form itself.
    const double a = subgrid_integral([](double x, double y) { return (1 - x - y) * x * y; }, 400);
    const double b = subgrid_integral([](double x, double y) { return std::pow((1 - x - y) * x * y, 2); }, 400);
    EXPECT_NEAR(a / monomial_exact(1, 1, 1), 1.0, 1e-4);
    EXPECT_NEAR(b / monomial_exact(2, 2, 2), 1.0, 1e-4);
    EXPECT_DOUBLE_EQ(monomial_exact(1, 1, 1), 1.0 / 120.0);
    EXPECT_DOUBLE_EQ(monomial_exact(2, 2, 2), 1.0 / 5040.0);
}

TEST(Quadrature, ExactOnAllMonomialsUpToDegreeSix)
{
    for (int a = 0; a <= 6; ++a) {
        for (int b = 0; a + b <= 6; ++b) {
            for (int c = 0; a + b + c <= 6; ++c) {
                EXPECT_NEAR(monomial_rule(a, b, c), monomial_exact(a, b, c), 1e-14)
                    << "a=" << a << " b=" << b << " c=" << c;
            }
        }
    }
}
