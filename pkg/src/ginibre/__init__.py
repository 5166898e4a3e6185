"""Largest real eigenvalue of real Ginibre matrices.

Scattering data, a Riemann-Hilbert solver and a Gelfand-Levitan-Marchenko solver for
the potentials behind the limiting law F(s; gamma), its left-tail asymptotics, the
conserved quantities of the flow and a Monte Carlo comparison.
"""

from ginibre.models import GammaParam

__all__ = ["GammaParam"]
