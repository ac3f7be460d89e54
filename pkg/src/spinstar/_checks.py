"""Input validation helpers shared by the public modules."""

import math
import numbers

import numpy as np

NORM_TOL = 1e-10


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def check_normalized(amps, name="state", tol=NORM_TOL):
    norm2 = float(np.sum(np.abs(amps) ** 2))
    if abs(norm2 - 1.0) > tol:
        raise ValueError(f"{name} is not normalized (norm^2 = {norm2!r})")
    return norm2


def check_coprime(p, q):
    p = check_positive_int(p, "p")
    q = check_positive_int(q, "q")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")
    return p, q


def frozen_array(values, dtype=complex):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr
