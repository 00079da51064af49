"""Numba kernels for Pauli-rotation circuits on little-endian statevectors.

An op is ``exp(-i * coef * theta[slot] * P)`` with ``P`` an X/Z string given by
bitmasks ``(xmask, zmask)``; X and Z supports never overlap.
"""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _sign(a, zmask):
    v = a & zmask
    par = 0
    while v:
        v &= v - 1
        par ^= 1
    return 1.0 - 2.0 * par


@njit(cache=True)
def rotate(psi, xmask, zmask, angle):
    """In-place ``psi <- exp(-i angle P) psi``."""
    c = np.cos(angle)
    s = np.sin(angle)
    dim = psi.shape[0]
    if xmask == 0:
        for a in range(dim):
            psi[a] *= complex(c, -s * _sign(a, zmask))
        return
    # P|a> = sign(a)|a^x>; z and x supports are disjoint so sign(a) = sign(a^x)
    for a in range(dim):
        b = a ^ xmask
        if a < b:
            sg = _sign(a, zmask)
            pa = psi[a]
            pb = psi[b]
            psi[a] = c * pa - 1j * s * sg * pb
            psi[b] = c * pb - 1j * s * sg * pa


@njit(cache=True)
def forward(psi, xs, zs, slots, coefs, theta):
    for k in range(xs.shape[0]):
        rotate(psi, xs[k], zs[k], coefs[k] * theta[slots[k]])


@njit(cache=True)
def _expect_imag(lam, psi, xmask, zmask):
    """Im <lam| P |psi>."""
    acc = 0.0
    dim = psi.shape[0]
    for a in range(dim):
        b = a ^ xmask
        v = lam[a].conjugate() * psi[b] * _sign(b, zmask)
        acc += v.imag
    return acc


@njit(cache=True)
def adjoint_gradient(psi, lam, xs, zs, slots, coefs, theta, grad):
    """Backward sweep. ``psi`` is the final state, ``lam = H psi``.

    Both arrays are consumed (rewound to the circuit input).
    """
    for k in range(xs.shape[0] - 1, -1, -1):
        c = coefs[k]
        grad[slots[k]] += 2.0 * c * _expect_imag(lam, psi, xs[k], zs[k])
        angle = -c * theta[slots[k]]
        rotate(psi, xs[k], zs[k], angle)
        rotate(lam, xs[k], zs[k], angle)


@njit(cache=True)
def forward_angles(psi, xs, zs, angles):
    for k in range(xs.shape[0]):
        rotate(psi, xs[k], zs[k], angles[k])
