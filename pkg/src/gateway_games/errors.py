"""Exception types shared across the package."""

from __future__ import annotations


class GatewayGameError(Exception):
    """Base class for all errors raised by this package."""


class DisconnectedGraph(GatewayGameError):
    """The input graph is not connected."""


class SelfLoop(GatewayGameError):
    """An edge joins a node to itself."""


class NodeIdOutOfRange(GatewayGameError):
    """An edge endpoint or node id is not in ``range(n)``."""


class StateSpaceTooLarge(GatewayGameError):
    """An exhaustive sweep over all profiles was requested for too many nodes."""


class ParameterOutOfRange(GatewayGameError):
    """A construction was asked for parameters outside its valid range."""


class GirthTooSmall(GatewayGameError):
    """The graph has a cycle shorter than the construction requires."""


class ConstructionNotEquilibrium(GatewayGameError):
    """A constructed profile failed its final equilibrium check."""


class ElementUncovered(GatewayGameError):
    """A set-cover instance leaves some element in no set."""
