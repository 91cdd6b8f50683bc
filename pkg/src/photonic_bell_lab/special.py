"""Modified Bessel I0 and the principal Lambert W branch, dependency-free."""

import math


def bessel_i0(x: float) -> float:
    """I0(x) = sum_m (x/2)^(2m) / (m!)^2, summed until the term drops below 1e-18."""
    q = (x / 2) ** 2
    term = 1.0
    total = 1.0
    m = 0
    while True:
        m += 1
        term *= q / (m * m)
        total += term
        if term < 1e-18 * max(1.0, total):
            return total


def lambert_w(z: float, tol: float = 1e-15, max_iter: int = 100) -> float:
    """Principal branch W0(z) for z >= 0 by Newton iteration on w e^w = z."""
    if z < 0:
        raise ValueError("only z >= 0 is supported")
    if z == 0:
        return 0.0
    if z > math.e:
        lz = math.log(z)
        w = lz - math.log(lz)
    else:
        w = math.log1p(z)
    for _ in range(max_iter):
        ew = math.exp(w)
        step = (w * ew - z) / (ew * (w + 1))
        w -= step
        if abs(step) <= tol * max(1.0, abs(w)):
            return w
    raise RuntimeError(f"Lambert W did not converge for z={z}")
