"""Exceptions raised by the spectral computations."""


class SpectralError(Exception):
    """Numerical failure (CLI exit status 3)"""


class AccuracyLoss(SpectralError):
    pass


class NoConvergence(SpectralError):
    pass


class AtPole(SpectralError):
    pass


class OutsideBall(SpectralError):
    pass


class JordanBlockSuspected(SpectralError):
    pass


class TailUncertified(SpectralError):
    pass


class AlphaBracketFailure(SpectralError):
    pass


class EigensolverFailure(SpectralError):
    pass


class MatchingAmbiguous(SpectralError):
    pass


class ConfigError(ValueError):
    """Invalid parameters or configuration file (CLI exit status 2)"""
