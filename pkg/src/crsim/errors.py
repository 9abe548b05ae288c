"""Exception hierarchy.

Every error carries a module-qualified ``code`` so the command line can
report failures in a machine-readable way.
"""


class CRSimError(Exception):
    code = "crsim.Error"


# model
class AmbiguousAssignment(CRSimError):
    code = "model.AmbiguousAssignment"


# pulses
class EmptyGrid(CRSimError, ValueError):
    code = "pulses.EmptyGrid"


class ZeroDragParameter(CRSimError, ValueError):
    code = "pulses.ZeroDragParameter"


# propagator
class StepTooLarge(CRSimError):
    code = "propagator.StepTooLarge"


class ToleranceNotReached(CRSimError):
    code = "propagator.ToleranceNotReached"


class NotAntiHermitian(CRSimError, ValueError):
    code = "propagator.NotAntiHermitian"


# rates
class NearPole(CRSimError):
    """An energy denominator is too close to zero (frequency collision)."""

    code = "rates.NearPole"

    def __init__(self, coefficient, denominator):
        self.coefficient = coefficient
        self.denominator = denominator
        where = (f"{denominator:.4g} rad/ns" if isinstance(denominator, (int, float))
                 else str(denominator))
        super().__init__(
            f"{coefficient}: denominator {where} is within 1 MHz of a frequency collision"
        )


class ZeroCollectiveFrequency(CRSimError, ValueError):
    code = "rates.ZeroCollectiveFrequency"


class NonzeroEndpointAmplitude(CRSimError, ValueError):
    code = "rates.NonzeroEndpointAmplitude"


# offres
class WindowTooNarrow(CRSimError, ValueError):
    code = "offres.WindowTooNarrow"


# calibrate
class NoRootInBracket(CRSimError):
    code = "calibrate.NoRootInBracket"


class DidNotConverge(UserWarning):
    """Issued when numeric refinement stops at its iteration cap."""


# config / cli
class ConfigError(CRSimError, ValueError):
    code = "cli.ConfigError"


class ParseError(ConfigError):
    code = "cli.ParseError"


class UnknownKey(ConfigError):
    code = "cli.UnknownKey"


class MissingTable(ConfigError):
    code = "cli.MissingTable"
