# Franktorio's Research Division
# Author: Franktorio
# October 17th, 2026
# Command loader

# Local imports
from . import lattice_cmds
from . import continuum_cmds
from . import expansion_cmds
from . import ensemble_cmds
from . import oracle_cmds
