"""
Special functions behind the closed forms
=========================================

The exponential-nominal solutions are written in terms of the exponential
integral E1, the two real branches of Lambert W and the Wright omega
function.  This script evaluates each one and checks its defining identity.
"""

# ## Exponential integral
import math

import numpy as np

from robustwpt import exp_integral_e1, lambert_w, wright_omega
from robustwpt.numerics import exp_scaled_e1

x = np.array([1e-6, 0.1, 1.0, 5.0, 50.0, 700.0])
print("x          E1(x)            e^x E1(x)")
for xi, e1, se1 in zip(x, exp_integral_e1(x), exp_scaled_e1(x)):
    print(f"{xi:<10.3g} {e1:<16.10g} {se1:.10g}")

# E1(700) is already at the bottom of the double range and underflows just
# beyond, which is why the solvers work with e^x E1(x) for large arguments.

# ## Lambert W, both real branches
for z in (-math.exp(-1) + 1e-12, -0.2, -1e-3):
    w0 = lambert_w("principal", z)
    wm = lambert_w("minus_one", z)
    print(f"z={z:+.6g}  W0={w0:+.12f}  W-1={wm:+.12f}  "
          f"residuals {w0 * math.exp(w0) - z:+.1e} {wm * math.exp(wm) - z:+.1e}")

# ## Wright omega
# omega(c) solves w + log w = c and never overflows, even where
# W(exp(c)) would need exp(c) first.
c = np.array([-30.0, 0.0, 1.0, 40.0, 800.0])
w = wright_omega(c)
print("omega:", w)
print("max |w + log w - c|:", np.max(np.abs(w + np.log(w) - c)))
