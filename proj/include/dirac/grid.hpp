#pragma once

#include "dirac/types.hpp"

namespace dirac {

// Staggered spinor grid. Node j carries two chain sites ordered by position:
//   site 2j   : psi2 at x_j
//   site 2j+1 : psi1 at x_j + dx/2
// Line nodes are symmetric about 0, half-line nodes sit at (j+1/2)dx so that
// the psi1 ghost site of the boundary lands exactly on x = 0.
struct Grid {
    Geometry geometry = Geometry::Line;
    int n = 0;
    double dx = 0.0;

    int sites() const { return 2 * n; }
    double node(int j) const;
    double site_pos(int m) const;
    static int component(int m) { return (m % 2 == 1) ? 1 : 2; }
    double bond_mid(int m) const { return site_pos(m) + 0.25 * dx; }
    // Position of the hard walls (ghost sites) on either side.
    double left_wall() const;
    double right_wall() const;
    // Distance from the origin to the nearest wall.
    double edge_distance() const;
    void validate() const;
};

Grid make_line_grid(double half_length, double dx);
Grid make_halfline_grid(double length, double dx);

}  // namespace dirac
