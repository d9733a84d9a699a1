#pragma once

#include <array>
#include <vector>

#include "phsadapt/types.hpp"

namespace phsadapt::fixtures {

// Shift values for the two single-run reference configurations.
inline const std::vector<Point> kQuad1dShifts{make_point(0.084435845510910), make_point(0.399782649098896)};

inline const std::vector<Point> kQuad2dShifts{
    make_point(0.322471807186779, 0.784739294760742),
    make_point(0.471357153710612, -0.964237266730882),
    make_point(-0.824125584316469, 0.721758033391102),
    make_point(-0.526514007034680, -0.847278799561768),
};

// Integrals of f1 over [-1, 1]^2 and of f1/f2 over the unit triangle
// (0,0),(1,0),(0,1), from tools/f1_2d_oracle.py (30-digit nested quadrature
// with the inner integral in closed form).
struct F1SquareIntegral {
  double a;
  double origin;       // single term, y = (0, 0)
  double quad2d_four;  // the four kQuad2dShifts terms
};

inline constexpr std::array<F1SquareIntegral, 3> kF1SquareIntegrals{{
    {1.0, 2.5580414074812440079, 7.4938407426326081409},
    {10.0, 0.81718767116207090441, 2.1660871646563555258},
    {1000.0, 0.022395232749055276993, 0.07011123919964826706},
}};

// a = 10, y = (0.2, 0.3)
inline constexpr double kF1UnitTriangle = 0.27058630369493500962;
inline constexpr double kF2UnitTriangle = 0.21501103018928232641;

}  // namespace phsadapt::fixtures
