"""Ergodic capacity of THz wireless fiber-extender links.

Deterministic path gain (Friis spreading and molecular absorption), pointing
error and alpha-mu multipath fading, and residual transceiver impairments,
evaluated by seeded Monte Carlo and by a deterministic quadrature oracle.
"""

__version__ = "0.1.0"
