"""Independent brute-force oracles used by the test suite.

These deliberately re-derive quantities from defining integrals or
finite differences, never through the production code paths they check.
"""

import numpy as np
from scipy.integrate import quad


def complex_quad(f, a, b, points=None, **kw):
    """Adaptive quadrature of a complex-valued integrand."""
    pts = sorted(p for p in (points or []) if a < p < b)
    re = quad(lambda t: np.real(f(t)), a, b, points=pts or None, limit=200, **kw)[0]
    im = quad(lambda t: np.imag(f(t)), a, b, points=pts or None, limit=200, **kw)[0]
    return re + 1j * im


def phase_derivative(tfun, E0=0.0, step=1e-4):
    """d(arg t)/dE by central difference with branch-jump unwrapping."""
    a_plus = np.angle(tfun(E0 + step))
    a_minus = np.angle(tfun(E0 - step))
    diff = (a_plus - a_minus + np.pi) % (2 * np.pi) - np.pi
    return diff / (2 * step)


def bound_norm_const(n, gamma=1.0):
    """C_{n,B} = sqrt(Gamma^{n-1} (n-1)! / (2 pi n))."""
    from scipy.special import gammaln
    return np.exp(0.5 * ((n - 1) * np.log(gamma) + gammaln(n) - np.log(2 * np.pi * n)))


def field_element_bruteforce(n, E, Ep, x, gamma=1.0):
    """<B^{E'}|a(x)|B^E>_n from the defining multi-dimensional integral."""
    pref = np.sqrt(n) * bound_norm_const(n - 1, gamma) * bound_norm_const(n, gamma)
    if n == 2:
        f = lambda y: (np.exp(1j * (E / 2 - Ep) * y)
                       * np.exp(-gamma * abs(y - x) / 2))
        return pref * np.exp(1j * E * x / 2) * complex_quad(f, x - 60, x + 60, points=[x])
    if n == 3:
        q = E / 3 - Ep / 2

        def inner(y2):
            f = lambda y1: (np.exp(1j * q * y1)
                            * np.exp(-gamma * abs(y1 - y2))
                            * np.exp(-gamma * abs(y1 - x) / 2))
            return (np.exp(1j * q * y2) * np.exp(-gamma * abs(y2 - x) / 2)
                    * complex_quad(f, x - 40, x + 40, points=[x, y2]))

        val = complex_quad(inner, x - 40, x + 40, points=[x])
        return pref * np.exp(1j * E * x / 3) * val
    raise ValueError("brute force implemented for n in {2, 3}")


def gm_element_bruteforce(n, m, E, Ep, x, gamma=1.0):
    """<B^{E'}|[a^dag(x)]^m [a(x)]^m|B^E>_n from the defining integral (n - m = 1)."""
    assert n - m == 1, "oracle implemented for one remaining coordinate"
    from scipy.special import gammaln
    pref = np.exp(gammaln(n + 1) - gammaln(n - m + 1)) * bound_norm_const(n, gamma) ** 2
    K = E - Ep
    f = lambda y: np.exp(1j * K * y / n) * np.exp(-m * gamma * abs(y - x))
    return pref * np.exp(1j * K * m * x / n) * complex_quad(f, x - 60, x + 60, points=[x])


def two_photon_bound_projection_bruteforce(E, sigma, gamma=1.0, k0=0.0):
    """<B_E|in_2> for the Gaussian product input, by direct quadrature."""
    com = complex_quad(
        lambda xc: np.exp(-1j * (E - 2 * k0) * xc) * np.exp(-xc ** 2 / sigma ** 2),
        -12 * sigma, 12 * sigma)
    rel = quad(lambda x: np.exp(-x ** 2 / (4 * sigma ** 2)) * np.exp(-gamma * abs(x) / 2),
               -12 * sigma - 40 / gamma, 12 * sigma + 40 / gamma, limit=200)[0]
    return np.sqrt(gamma / (4 * np.pi)) / (sigma * np.sqrt(np.pi)) * com * rel
