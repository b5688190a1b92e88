"""Non-equilibrium Casimir self-propulsion of anisotropic particles.

Isolated particles and particles in front of a planar surface in the
near-field regime, with Onsager heating and the resulting extra friction.
"""

__version__ = "0.1.0"
