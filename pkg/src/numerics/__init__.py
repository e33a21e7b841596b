# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Numerical core: Gaussian calculus, initial data, lattice sums, kinetic operators, expansions, ensembles, NLS oracle
