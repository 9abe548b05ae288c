"""Unit conversions between linear MHz and angular rad/ns."""

import numpy as np

#: rad/ns per MHz of linear frequency.
MHZ = 2.0 * np.pi * 1e-3


def to_angular(f_mhz):
    """Linear frequency in MHz to angular frequency in rad/ns."""
    return np.multiply(f_mhz, MHZ)


def to_mhz(w):
    """Angular frequency in rad/ns to linear MHz."""
    return np.divide(w, MHZ)
