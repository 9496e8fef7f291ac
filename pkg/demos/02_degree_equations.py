"""Compiling the relation into per-degree equations.

The relation is pulled back along the map forgetting ``l`` points, each
extra point carrying the point class.  For the assignment (1,1,1) one gets
``-3 H2(d) + 3d P2(d) = ...``; the other three assignments carry no
degree-d unknowns at all and instead pin down lower degrees.
"""
from fractions import Fraction

from strata2rec import Symbol, compile_degree_equation
from strata2rec.series import ASSIGNMENTS, DEGREE_ZERO, extra_points, printed_coefficients

d = 3
for a in ASSIGNMENTS:
    eq = compile_degree_equation(a, d)
    print(f"{a}: l = {extra_points(a, d)}, unknown side {eq.unknown_side}, {len(eq.known_side.terms)} known terms")

# %% Coefficients against the closed-form family p200 at d = 3.
eq = compile_degree_equation((1, 1, 1), d)
coef = eq.known_side.coefficient(Symbol("N2", 1), Symbol("N0", 1), Symbol("N0", 1))
print("\nN2(1) N0(1) N0(1):", coef, "closed form:", printed_coefficients(3)["p200"][(1, 1, 1)])

# %% Substituting the degree-0 constants and c1 leaves only genuine series.
consts = dict(DEGREE_ZERO)
consts[Symbol("C1")] = Fraction(-1, 8)
print("\nd=2 known side:", compile_degree_equation((1, 1, 1), 2).known_side.substitute(consts))
