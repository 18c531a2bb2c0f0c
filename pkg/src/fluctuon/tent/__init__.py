"""Tent-map thermodynamics: periodic orbits, codings, zeta brackets and the square map."""

from .coding import (INF, CodeWord, gray_decode, gray_encode, induce_T, induce_X,
                     induced_potential, interval_index, periodic_value, psi,
                     psi_periodic_point)
from .orbits import (FixedPointSet, OrbitTable, TentPotential, combined_pressure,
                     critical_coupling, fixed_point_values, fixed_points, is_prime,
                     pressure_approx, pressure_estimate, primitive_orbits, tent, tent_iter)
from .zeta import (D_lower, D_upper, critical_brackets, envelope_sum, grand_canonical_Xi,
                   pressure_brackets, zeta_bounds)
from .square import square_entropic_pressure, square_pressure_grid, square_rate
