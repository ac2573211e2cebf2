"""Map the Jost-function zeros of the square well u_tt = u_xx + alpha*1_[-1,1] u.

Prints bound states (real zeros, Re > 0) and the first resonance strings,
and writes resonances.csv next to this script's working directory.
"""

import numpy as np

from resonwave.model import PotentialSpec
from resonwave.resonances import ScanRegion, find_resonances, save_resonances_csv

alpha = 5.0
V = PotentialSpec.square_well(alpha)
region = ScanRegion(-3.0, np.sqrt(alpha) + 0.5, -40.0, 40.0)
found = find_resonances(region, V)
found.sort(key=lambda r: (-r.lambda0.real, abs(r.lambda0.imag)))

print(f"alpha = {alpha}: {len(found)} zeros in "
      f"[{region.re_min}, {region.re_max}] x [{region.im_min}, {region.im_max}]")
for r in found:
    tag = "bound state" if r.lambda0.real > 0 else "resonance"
    print(f"  {r.lambda0:+.9f}  mult {r.multiplicity}  ({tag})")

save_resonances_csv("resonances.csv", found)
print("wrote resonances.csv")
