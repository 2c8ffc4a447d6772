"""Dipole expectation values and the steady-state correlator <s+(0) s-(tau)>.

Three correlators are provided:

``correlator_paper``
    rho_a(inf) exp(-a tau / 2) with a = 2 gamma (N - M + 1/2). This is
    what follows if <s+(t) s+(t+tau)> is assumed to vanish for all tau.
``correlator_exact``
    Regression without that assumption, giving
    rho_a(inf) exp(-gamma (N + 1/2) tau) cosh(gamma M tau).
``correlator_numeric``
    Tr(s- expm(L tau)[rho_ss s+]) from the Liouvillian; used as the
    oracle for both closed forms.

The first two coincide for M = 0.
"""

from typing import NamedTuple

import numpy as np

from .algebra import SIGMA_MINUS, SIGMA_PLUS
from .errors import NegativeTau
from .master import build_liouvillian, propagator, steady_state, unvec, vec


class BlochCoefficients(NamedTuple):
    a: float
    b: float


def bloch_coefficients(params):
    g, N, M = params.gamma, params.N, params.M
    return BlochCoefficients(a=2.0 * g * (N - M + 0.5), b=g * M)


def decay_rates(params):
    """Rates (slow, fast) = gamma (N + 1/2 -/+ M) of the sum and difference modes."""
    g, N, M = params.gamma, params.N, params.M
    return g * (N + 0.5 - M), g * (N + 0.5 + M)


def _check_tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0) or np.any(np.isnan(tau)):
        raise NegativeTau("delay tau must be non-negative")
    return tau


def _out(x):
    return np.asarray(x).item() if np.ndim(x) == 0 else x


def coherence_evolve(params, init, tau):
    """Propagate the pair (u, v) = (<s+>, <s->) over a delay ``tau``.

    Solves du/dtau = -gamma(N+1/2) u + gamma M v and the mirror equation for
    v. The sum u+v decays at the slow rate, the difference at the fast one.
    """
    tau = _check_tau(tau)
    u0, v0 = complex(init[0]), complex(init[1])
    slow, fast = decay_rates(params)
    s = (u0 + v0) * np.exp(-slow * tau)
    d = (u0 - v0) * np.exp(-fast * tau)
    return _out(0.5 * (s + d)), _out(0.5 * (s - d))


def correlator_paper(params, tau):
    tau = _check_tau(tau)
    a = bloch_coefficients(params).a
    return _out(params.steady_upper * np.exp(-0.5 * a * tau))


def correlator_exact(params, tau):
    tau = _check_tau(tau)
    slow, fast = decay_rates(params)
    # cosh written as two decaying exponentials; avoids overflow at large tau
    val = 0.5 * params.steady_upper * (np.exp(-slow * tau) + np.exp(-fast * tau))
    return _out(val)


def correlator_numeric(params, tau):
    """Regression-theorem correlator from the full superoperator (complex)."""
    tau = _check_tau(tau)
    L = build_liouvillian(params)
    rho_ss = steady_state(L)
    x0 = vec(rho_ss @ SIGMA_PLUS)
    flat = tau.reshape(-1)
    vals = np.empty(flat.shape, dtype=complex)
    for i in range(0, len(flat), 100_000):
        x = propagator(L, flat[i:i + 100_000]) @ x0
        vals[i:i + 100_000] = np.einsum("ij,...ji->...", SIGMA_MINUS, unvec(x))
    return _out(vals.reshape(tau.shape))


CORRELATORS = {
    "paper": correlator_paper,
    "exact": correlator_exact,
    "numeric": correlator_numeric,
}
