"""Master equation for a two-level atom in a squeezed-vacuum reservoir.

The generator is

    drho/dt = (g/2)(N+1) D[s-] rho + (g/2) N D[s+] rho
              + g M (s+ rho s+ + s- rho s-)

with D[c] rho = 2 c rho c+ - c+ c rho - rho c+ c. Superoperators act on the
column-stacked density matrix, vec(rho) = (rho_aa, rho_ba, rho_ab, rho_bb).

M is real and non-negative. Flipping its sign is equivalent to rotating the
squeezing phase by pi, so only M >= 0 is accepted.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import IDENTITY, LOWER, SIGMA_MINUS, SIGMA_PLUS, UPPER, density_matrix
from .errors import MOutOfRange, NegativeN, NegativeTime, NonPositiveGamma, ParameterError, SingularSystem


@dataclass(frozen=True)
class ReservoirParams:
    """Decay rate ``gamma`` and squeezed-reservoir numbers ``N``, ``M``.

    Construct through :func:`validate_params` (or ``ReservoirParams.checked``)
    to enforce gamma > 0, N >= 0 and 0 <= M <= sqrt(N(N+1)).
    """

    gamma: float
    N: float
    M: float = 0.0

    @classmethod
    def checked(cls, gamma, N, M=0.0):
        return validate_params(gamma, N, M)

    @property
    def steady_upper(self):
        """Steady-state upper-level population N/(2N+1)."""
        return self.N / (2.0 * self.N + 1.0)


def max_squeeze(N):
    """Largest M allowed for mean photon number ``N``."""
    return math.sqrt(N * (N + 1.0))


def validate_params(gamma, N, M=0.0):
    gamma, N, M = float(gamma), float(N), float(M)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    if not math.isfinite(N) or N < 0.0:
        raise NegativeN(f"N must be non-negative, got {N}")
    # small relative slack so M = sqrt(N(N+1)) computed in floats is accepted
    if not math.isfinite(M) or M < 0.0 or M * M > N * (N + 1.0) * (1.0 + 1e-12):
        raise MOutOfRange(f"M must satisfy 0 <= M <= sqrt(N(N+1)) = {max_squeeze(N):.6g}, got {M}")
    return ReservoirParams(gamma, N, M)


def _dissipator(c, rho):
    cd = c.conj().T
    return 2.0 * c @ rho @ cd - cd @ c @ rho - rho @ cd @ c


def lindblad_rhs(params, rho, literal_squeeze_term=False):
    """Time derivative of ``rho`` under the squeezed-reservoir master equation.

    ``literal_squeeze_term=True`` swaps the squeezing term for
    g M (s- rho s- - s+ rho s+). That variant does not preserve Hermiticity
    and exists only so the difference can be demonstrated.
    """
    g, N, M = params.gamma, params.N, params.M
    sp, sm = SIGMA_PLUS, SIGMA_MINUS
    drho = 0.5 * g * (N + 1.0) * _dissipator(sm, rho) + 0.5 * g * N * _dissipator(sp, rho)
    if literal_squeeze_term:
        drho = drho + g * M * (sm @ rho @ sm - sp @ rho @ sp)
    else:
        drho = drho + g * M * (sp @ rho @ sp + sm @ rho @ sm)
    return drho


def vec(rho):
    """Column-stack a 2x2 matrix (or a stack of them) into length-4 vectors."""
    rho = np.asarray(rho)
    return np.swapaxes(rho, -1, -2).reshape(rho.shape[:-2] + (4,))


def unvec(v):
    v = np.asarray(v)
    return np.swapaxes(v.reshape(v.shape[:-1] + (2, 2)), -1, -2)


def _left_right(A, B):
    """Superoperator of X -> A X B under column stacking."""
    return np.kron(B.T, A)


def build_liouvillian(params):
    """4x4 matrix L with L @ vec(rho) == vec(lindblad_rhs(params, rho))."""
    g, N, M = params.gamma, params.N, params.M
    I = IDENTITY
    L = np.zeros((4, 4), dtype=complex)
    for rate, c in ((0.5 * g * (N + 1.0), SIGMA_MINUS), (0.5 * g * N, SIGMA_PLUS)):
        cd = c.conj().T
        cdc = cd @ c
        L += rate * (2.0 * _left_right(c, cd) - _left_right(cdc, I) - _left_right(I, cdc))
    L += g * M * (_left_right(SIGMA_PLUS, SIGMA_PLUS) + _left_right(SIGMA_MINUS, SIGMA_MINUS))
    return L


def steady_state(L):
    """Unique trace-one null vector of ``L``, returned as a density matrix."""
    A = np.array(L, dtype=complex)
    A[-1, :] = vec(IDENTITY)
    rhs = np.zeros(4, dtype=complex)
    rhs[-1] = 1.0
    try:
        if np.linalg.cond(A) > 1e13:
            raise SingularSystem("steady-state system is numerically singular")
        x = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    rho = unvec(x)
    return 0.5 * (rho + rho.conj().T)


def propagator(L, t):
    """expm(L t) for scalar ``t`` or a batch of times."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise NegativeTime("propagation time must be non-negative")
    return scipy.linalg.expm(np.multiply.outer(t, L))


def evolve(L, rho0, t):
    """Density matrix at time ``t`` (scalar or array) starting from ``rho0``."""
    rho0 = density_matrix(rho0)
    return unvec(propagator(L, t) @ vec(rho0))


def evolve_rk4(params, rho0, t, step=1e-3):
    """Fixed-step RK4 integration of :func:`lindblad_rhs`; an independent check on :func:`evolve`.

    ``step`` is in units of 1/gamma.
    """
    if t < 0:
        raise NegativeTime("propagation time must be non-negative")
    rho = density_matrix(rho0)
    n = max(1, int(round(t * params.gamma / step)))
    h = t / n
    f = lambda r: lindblad_rhs(params, r)
    for _ in range(n):
        k1 = f(rho)
        k2 = f(rho + 0.5 * h * k1)
        k3 = f(rho + 0.5 * h * k2)
        k4 = f(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def upper_population(params, rho_a0, t):
    """Closed-form upper-level population for an initially diagonal state.

    Relaxes towards N/(2N+1) at rate gamma(2N+1); M drops out entirely.
    """
    if not 0.0 <= rho_a0 <= 1.0:
        raise ParameterError(f"initial population must lie in [0, 1], got {rho_a0}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise NegativeTime("time must be non-negative")
    ss = params.steady_upper
    out = ss + (rho_a0 - ss) * np.exp(-params.gamma * (2.0 * params.N + 1.0) * t)
    return float(out) if out.ndim == 0 else out


def populations(rho):
    """(rho_a, rho_b) for a single density matrix or a stack of them."""
    rho = np.asarray(rho)
    a = np.einsum("...ij,ji->...", rho, UPPER).real
    b = np.einsum("...ij,ji->...", rho, LOWER).real
    return a, b
