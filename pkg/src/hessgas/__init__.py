"""Hessian information geometry of an ideal gas rotating in a ball.

Modules: tensor (symmetric covariant tensors), model (generalized temperatures
and charts), partition (partition function and moments), cumulants,
covderiv (D^n z), curvature, rigidbody (reference geometry), poisson,
asymptotics (high-velocity limits), acceptance and cli.
"""

from .model import DomainError, GasParameters, GeneralizedTemperature

__all__ = ["DomainError", "GasParameters", "GeneralizedTemperature"]
