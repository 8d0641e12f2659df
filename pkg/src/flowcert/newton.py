"""Newton-Raphson load-flow solver used to cross-check the fixed point.

Deliberately independent of the sparse factorization machinery: the
Jacobian is dense and all linear algebra goes through numpy, so an
agreement between this solver and the fixed-point iteration checks two
genuinely different code paths.  Works in rectangular coordinates
(real/imaginary parts of the bus voltages) to avoid angle wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .admittance import AdmittanceSystem
from .errors import ConvergenceError

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True)
class NewtonResult:
    v: np.ndarray
    iterations: int
    mismatch: float


def power_mismatch(
    sys: AdmittanceSystem, v: np.ndarray, s: np.ndarray
) -> np.ndarray:
    """Complex power mismatch m_j = s_j - v_j conj((y_ll v + y_l0 v0)_j)."""
    v = np.asarray(v, dtype=complex)
    current = sys.y_ll @ v + sys.y_l0 * sys.slack_voltage
    return np.asarray(s, dtype=complex) - v * np.conj(current)


def mismatch_jacobian(
    sys: AdmittanceSystem, v: np.ndarray, s: np.ndarray
) -> np.ndarray:
    """Analytic 2n x 2n real Jacobian of [Re m; Im m] wrt [Re v; Im v]."""
    v = np.asarray(v, dtype=complex)
    y = np.asarray(sys.y_ll.todense())
    current = y @ v + sys.y_l0 * sys.slack_voltage
    # m = s - v * conj(I(v)); differentiate wrt alpha_k = Re v_k and
    # beta_k = Im v_k: dI/dalpha_k = Y e_k, dI/dbeta_k = i Y e_k.
    d_alpha = -np.diag(np.conj(current)) - v[:, None] * np.conj(y)
    d_beta = -1j * np.diag(np.conj(current)) + 1j * v[:, None] * np.conj(y)
    return np.block(
        [
            [d_alpha.real, d_beta.real],
            [d_alpha.imag, d_beta.imag],
        ]
    )


def solve_newton(
    sys: AdmittanceSystem,
    s: np.ndarray,
    v0: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> NewtonResult:
    """Newton iteration on the power mismatch.

    Default start is the zero-load profile, computed here by a dense
    solve so the oracle never touches the sparse factorization.  Raises
    ConvergenceError after ``max_iter``; a singular Jacobian surfaces as
    numpy.linalg.LinAlgError.
    """
    n = sys.n
    if v0 is None:
        v0 = np.linalg.solve(
            np.asarray(sys.y_ll.todense()), -sys.y_l0 * sys.slack_voltage
        )
    v = np.asarray(v0, dtype=complex).copy()
    s = np.asarray(s, dtype=complex)
    mis = power_mismatch(sys, v, s)
    norm = float(np.max(np.abs(mis)))
    for iteration in range(max_iter + 1):
        if norm < tol:
            return NewtonResult(v=v, iterations=iteration, mismatch=norm)
        jac = mismatch_jacobian(sys, v, s)
        f = np.concatenate([mis.real, mis.imag])
        dx = np.linalg.solve(jac, -f)
        v = v + dx[:n] + 1j * dx[n:]
        mis = power_mismatch(sys, v, s)
        norm = float(np.max(np.abs(mis)))
    raise ConvergenceError(
        f"Newton iteration did not converge in {max_iter} iterations "
        f"(mismatch {norm:.3e})",
        iterations=max_iter,
        last_step=norm,
        iterate=v,
    )
