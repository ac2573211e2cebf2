"""Tune the well coupling so two zeros collide at lambda = -1.

Solves tan(xi) = xi on (pi, 3pi/2) for the critical coupling alpha = 1 + xi^2,
then confirms the collision with the scanner (winding 2) and the second
derivative of the Jost function against its closed form.
"""

from resonwave.jost import (double_zero_coupling, jost_function,
                            jost_function_derivative, well_wpp_at_minus1)
from resonwave.model import PotentialSpec
from resonwave.resonances import ScanRegion, find_resonances, winding_multiplicity

alpha = double_zero_coupling()
V = PotentialSpec.square_well(alpha)
print(f"critical coupling alpha = {alpha:.12f}")
print(f"W(-1)  = {jost_function(-1.0, V).w:.3e}")
print(f"W'(-1) = {jost_function_derivative(-1.0, V, order=1):.3e}")
wpp = jost_function_derivative(-1.0, V, order=2)
ref = well_wpp_at_minus1(alpha)
print(f"W''(-1) = {wpp:.6f}, closed form {ref:.6f}, "
      f"rel gap {abs(wpp - ref) / abs(ref):.2e}")
print(f"small-circle winding at -1: {winding_multiplicity(-1.0, V)}")
for r in find_resonances(ScanRegion(-1.4, -0.6, -0.4, 0.4), V):
    print(f"scanner: lambda0 = {r.lambda0:.8f}, multiplicity {r.multiplicity}")
