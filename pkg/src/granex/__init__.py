"""Mass-point machinery for granular gases: background fits, balance-law
checks, closure integration and agitation-energy distributions."""

from .pointsys import ParticleCloud, aggregates, affine_fit, rigid_fit, discrepancy
from .special import dilog, solve_alpha, solve_bose_fermi

__all__ = ["ParticleCloud", "aggregates", "affine_fit", "rigid_fit", "discrepancy",
           "dilog", "solve_alpha", "solve_bose_fermi"]
__version__ = "0.1.0"
