"""
Which regime does an exponent vector fall in?
=============================================

With p_i = n^(-alpha_i), simple linear sums of the exponents decide whether
cohomology in degree k - 1 vanishes, is dominated by free faces, or is carried
by hollow simplex boundaries.
"""

from sclab.cli import main

# the three-parameter example with all exponents 3/8
main(["classify", "--alpha", "0.375,0.375,0.375", "--k-min", "1"])
print()
main(["classify", "--alpha", "0.2,0.1", "--k-min", "2"])
print()
main(["expect", "--n", "60", "--k", "2", "--probs", "0.2,0.2"])
