"""2x2 operator algebra for a two-level atom.

Basis ordering is (|a>, |b>) with |a> the upper level, so

    SIGMA_PLUS  = |a><b| = [[0, 1], [0, 0]]
    SIGMA_MINUS = |b><a| = [[0, 0], [1, 0]]
    SIGMA_Z     = [SIGMA_PLUS, SIGMA_MINUS] = diag(1, -1)

Note that with these matrices [SIGMA_Z, SIGMA_PLUS] = 2 SIGMA_PLUS. The
inversion is defined through the commutator; SIGMA_PLUS - SIGMA_MINUS is
not a diagonal operator and is never used for it.
"""

import numpy as np

from .errors import InvalidDensityMatrix


def _frozen(a):
    a = np.asarray(a, dtype=complex)
    a.setflags(write=False)
    return a


def commutator(A, B):
    """Return AB - BA."""
    return A @ B - B @ A


def dagger(A):
    """Conjugate transpose."""
    return np.conj(A).T


def expectation(A, rho):
    """Tr(A rho) as a complex number."""
    return complex(np.trace(A @ rho))


SIGMA_PLUS = _frozen([[0, 1], [0, 0]])
SIGMA_MINUS = _frozen(dagger(SIGMA_PLUS))
SIGMA_Z = _frozen(commutator(SIGMA_PLUS, SIGMA_MINUS))
IDENTITY = _frozen(np.eye(2))

# projectors onto the upper and lower level
UPPER = _frozen(SIGMA_PLUS @ SIGMA_MINUS)
LOWER = _frozen(SIGMA_MINUS @ SIGMA_PLUS)


def density_matrix(rho, atol=1e-12, eig_tol=1e-10):
    """Validate and return ``rho`` as a 2x2 complex density matrix.

    Raises InvalidDensityMatrix if ``rho`` is not Hermitian, not unit trace
    or has an eigenvalue below ``-eig_tol``.
    """
    rho = np.array(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidDensityMatrix(f"expected a 2x2 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidDensityMatrix("non-finite entries")
    if np.max(np.abs(rho - dagger(rho))) > atol:
        raise InvalidDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise InvalidDensityMatrix(f"trace is {np.trace(rho).real!r}, not 1")
    if np.min(np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))) < -eig_tol:
        raise InvalidDensityMatrix("matrix has a negative eigenvalue")
    return rho


def diagonal_state(rho_a):
    """Incoherent mixture with upper-level population ``rho_a``."""
    return density_matrix(np.diag([rho_a, 1.0 - rho_a]))


def upper_probability(rho):
    return expectation(UPPER, rho).real


def lower_probability(rho):
    return expectation(LOWER, rho).real
