"""
Uncertainty inside the nominal's own family
===========================================

If the true law is known to be exponential, the worst case is the
exponential of largest rate inside the ball.  For uniform laws only the
reverse KL gives a finite answer.
"""

# ## Exponential class: ratio of worst to nominal rate
import math

from robustwpt import (InfiniteDivergenceError, exp_class_forward, exp_class_reverse,
                       exp_class_symmetrized, uniform_class, uniform_class_reverse)

print("d     fwd exact  fwd 1+d  reverse  symmetrized")
for d in (0.0, 0.25, 0.5, 1.0, 2.0):
    row = (exp_class_forward(1.0, d).boundary_parameter,
           exp_class_forward(1.0, d, "paper_formula").boundary_parameter,
           exp_class_reverse(1.0, d).boundary_parameter,
           exp_class_symmetrized(1.0, d).boundary_parameter)
    print(f"{d:<5} " + "  ".join(f"{r:8.4f}" for r in row))

# The linear rule 1 + d understates the exact forward root for d > 0.
print("2 + sqrt(3) =", 2 + math.sqrt(3))

# ## Uniform class
print(uniform_class_reverse(1.0, math.log(2)))
try:
    uniform_class(1.0, 0.5, "forward-kl")
except InfiniteDivergenceError as exc:
    print("forward KL:", exc)
