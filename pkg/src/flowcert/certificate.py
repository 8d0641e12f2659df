"""Existence/uniqueness certificates for the load-flow solution.

Everything here is driven by one scalar functional of the injection
vector: the loading measure

    xi(s) = max_i  sum_j |K_ij| |s_j|,

where K is the normalized inverse-admittance kernel
diag(1/w) @ y_ll^-1 @ diag(1/conj(w)).  Two certificate families are
evaluated on top of it:

* the state-aware check, which takes a known operating point
  (v_hat, s_hat) and a candidate injection s and requires
  xi(s_hat) < u_min^2 together with a positive discriminant
  delta = (u_min - xi(s_hat)/u_min)^2 - 4 xi(s - s_hat); on success the
  unique solution lies within rho |w_i| of v_hat per coordinate, with
  rho = ((u_min - xi(s_hat)/u_min) - sqrt(delta)) / 2, and the plain
  fixed-point iteration converges to it from anywhere in that ball;

* the state-free check xi(s) < 1/4, the special case v_hat = w,
  s_hat = 0, with rho = (1 - sqrt(1 - 4 xi(s))) / 2.

For comparison, two earlier sufficient conditions are evaluated as
well: the row-norm product test ||K||_p^* ||s||_q < 1/4 over Hoelder
pairs (p, q), and its column-scaled refinement with the diagonal
weights lambda_k = 1 / max_h |K_hk|.  Both imply xi(s) < 1/4, never the
converse, which the sweep module turns into nested feasibility
intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .sparse_lu import LuFactors, solve_many, solve_transpose
from .zero_load import ZeroLoadProfile

KERNEL_SIZE_CAP = 5000  # the kernel is dense; refuse O(n^2) blowups beyond this
CONTAINMENT_SLACK = 1e-9

P_SET_DEFAULT = (1.0, 2.0, math.inf)


@dataclass(frozen=True)
class KernelMatrix:
    """Dense normalized inverse-admittance kernel with |K| precomputed.

    ``abs_k`` is reused by every xi evaluation (one real matvec each),
    ``row_abs`` holds the plain row sums of |K|.
    """

    k: np.ndarray
    abs_k: np.ndarray
    row_abs: np.ndarray

    @property
    def n(self) -> int:
        return self.k.shape[0]


@dataclass(frozen=True)
class PriorConditionEntry:
    """Result of both earlier sufficient conditions at one Hoelder pair."""

    p: float
    product: float
    ok: bool
    weighted_product: float
    weighted_ok: bool


@dataclass(frozen=True)
class CertificateReport:
    """Scalar certificate summary; fields are None when not evaluated.

    ``rho`` is the certified per-unit ball radius of whichever condition
    set was evaluated (the state-aware one when both were), present only
    on a pass.
    """

    xi_s: float
    xi_s_hat: float | None = None
    xi_delta_s: float | None = None
    u_min: float | None = None
    delta: float | None = None
    rho: float | None = None
    theorem_ok: bool | None = None
    corollary_ok: bool | None = None
    bolognani_ok: bool | None = None
    improved_ok: bool | None = None
    bolognani_detail: tuple[PriorConditionEntry, ...] | None = None


@dataclass(frozen=True)
class SolutionBall:
    """Per-coordinate ball |v_i - center_i| <= radii_i around a solution."""

    center: np.ndarray
    radii: np.ndarray
    rho: float

    def contains(self, v: np.ndarray, slack: float = CONTAINMENT_SLACK) -> bool:
        return bool(
            np.all(np.abs(np.asarray(v, dtype=complex) - self.center)
                   <= self.radii + slack)
        )


def build_kernel(
    factors: LuFactors,
    w: ZeroLoadProfile,
    size_cap: int = KERNEL_SIZE_CAP,
) -> KernelMatrix:
    """Materialize K = diag(1/w) y_ll^-1 diag(1/conj(w)).

    Formed by n sparse solves against identity columns; O(n^2) memory,
    so networks above ``size_cap`` are refused outright.
    """
    n = factors.n
    if n > size_cap:
        raise ValueError(
            f"kernel for n={n} exceeds the size cap {size_cap}; "
            f"the dense kernel is quadratic in memory"
        )
    inv = solve_many(factors, np.eye(n, dtype=complex))
    k = inv / w.w[:, None] / np.conj(w.w)[None, :]
    abs_k = np.abs(k)
    return KernelMatrix(k=k, abs_k=abs_k, row_abs=abs_k.sum(axis=1))


def xi(kernel: KernelMatrix, s: np.ndarray) -> float:
    """Loading measure: max over rows of sum_j |K_ij| |s_j|."""
    s = np.asarray(s, dtype=complex)
    if s.shape != (kernel.n,):
        raise ValueError(f"injection has shape {s.shape}, expected ({kernel.n},)")
    return float(np.max(kernel.abs_k @ np.abs(s)))


def kernel_rows(
    factors: LuFactors, w: ZeroLoadProfile, rows: np.ndarray
) -> np.ndarray:
    """Selected rows of K via transpose solves (no dense kernel)."""
    out = np.empty((len(rows), factors.n), dtype=complex)
    for pos, i in enumerate(rows):
        e = np.zeros(factors.n, dtype=complex)
        e[i] = 1.0
        out[pos] = solve_transpose(factors, e) / w.w[i] / np.conj(w.w)
    return out


def xi_radial(
    factors: LuFactors,
    w: ZeroLoadProfile,
    s: np.ndarray,
    leaf_rows: np.ndarray,
) -> float:
    """Fast-path loading measure for trees: only leaf rows are computed.

    Valid only on radial networks, where the row sums of |K| weighted by
    |s| attain their maximum at a leaf; agreement with `xi` on trees is
    property-tested.  Cost is O(n) per leaf instead of O(n^2) total.
    """
    rows = kernel_rows(factors, w, leaf_rows)
    return float(np.max(np.abs(rows) @ np.abs(np.asarray(s, dtype=complex))))


def theorem_conditions(
    xi_s_hat: float, xi_delta_s: float, u_min: float
) -> tuple[bool, float, float | None]:
    """Evaluate the state-aware conditions from their three scalars.

    Returns (ok, delta, rho); both inequalities are strict, and rho is
    None unless both hold.
    """
    delta = (u_min - xi_s_hat / u_min) ** 2 - 4.0 * xi_delta_s
    ok = xi_s_hat < u_min**2 and delta > 0.0
    if not ok:
        return False, delta, None
    rho = ((u_min - xi_s_hat / u_min) - math.sqrt(delta)) / 2.0
    return True, delta, rho


def corollary_condition(xi_s: float) -> tuple[bool, float | None]:
    """State-free condition xi(s) < 1/4 and its ball radius."""
    if xi_s < 0.25:
        return True, (1.0 - math.sqrt(1.0 - 4.0 * xi_s)) / 2.0
    return False, None


def check_theorem(
    kernel: KernelMatrix,
    u_min: float,
    s_hat: np.ndarray,
    s: np.ndarray,
) -> CertificateReport:
    """State-aware certificate for candidate s given operating data.

    The caller is responsible for (v_hat, s_hat) actually solving the
    load-flow equations; `certify` offers a residual check.
    """
    xi_s_hat = xi(kernel, s_hat)
    xi_delta_s = xi(kernel, np.asarray(s) - np.asarray(s_hat))
    ok, delta, rho = theorem_conditions(xi_s_hat, xi_delta_s, u_min)
    return CertificateReport(
        xi_s=xi(kernel, s),
        xi_s_hat=xi_s_hat,
        xi_delta_s=xi_delta_s,
        u_min=u_min,
        delta=delta,
        rho=rho,
        theorem_ok=ok,
    )


def check_corollary(kernel: KernelMatrix, s: np.ndarray) -> CertificateReport:
    """State-free certificate: no operating point required."""
    xi_s = xi(kernel, s)
    ok, rho = corollary_condition(xi_s)
    return CertificateReport(xi_s=xi_s, corollary_ok=ok, rho=rho)


def _conjugate_exponent(p: float) -> float:
    if p == 1.0:
        return math.inf
    if p == math.inf:
        return 1.0
    if p == 2.0:
        return 2.0
    raise ValueError(f"unsupported Hoelder exponent p={p}; use 1, 2 or inf")


def _max_row_norm(a: np.ndarray, p: float) -> float:
    """max over rows of the vector p-norm of the row."""
    return float(np.max(np.linalg.norm(a, ord=p, axis=1)))


@dataclass(frozen=True)
class PriorConditions:
    """Any-p verdicts plus the per-p detail for both earlier conditions."""

    bolognani_ok: bool
    improved_ok: bool
    detail: tuple[PriorConditionEntry, ...]


def check_prior_conditions(
    kernel: KernelMatrix,
    s: np.ndarray,
    p_set=P_SET_DEFAULT,
) -> PriorConditions:
    """Evaluate the two earlier sufficient conditions over ``p_set``.

    The plain test is ||K||_p^* ||s||_q < 1/4 with ||A||_p^* the max row
    p-norm; the refined test additionally allows any real diagonal
    column scaling, checked here at the canonical weights
    lambda_k = 1 / max_h |K_hk|.  Because the refinement is existential
    in the weights, the unscaled test (identity weights) is itself a
    witness: ``improved_ok`` holds when either the weighted or the plain
    product passes for some p, which keeps the refined condition a
    superset of the plain one by construction.
    """
    s = np.asarray(s, dtype=complex)
    lam = 1.0 / kernel.abs_k.max(axis=0)
    entries = []
    for p in p_set:
        q = _conjugate_exponent(p)
        product = _max_row_norm(kernel.k, p) * float(np.linalg.norm(s, ord=q))
        weighted = _max_row_norm(kernel.k * lam[None, :], p) * float(
            np.linalg.norm(s / lam, ord=q)
        )
        entries.append(
            PriorConditionEntry(
                p=float(p),
                product=product,
                ok=product < 0.25,
                weighted_product=weighted,
                weighted_ok=weighted < 0.25,
            )
        )
    bolognani_ok = any(e.ok for e in entries)
    return PriorConditions(
        bolognani_ok=bolognani_ok,
        improved_ok=bolognani_ok or any(e.weighted_ok for e in entries),
        detail=tuple(entries),
    )


def certify(
    kernel: KernelMatrix,
    s: np.ndarray,
    *,
    w: ZeroLoadProfile | None = None,
    v_hat: np.ndarray | None = None,
    s_hat: np.ndarray | None = None,
    p_set=P_SET_DEFAULT,
    system=None,
    residual_tol: float = 1e-6,
) -> CertificateReport:
    """Run every applicable condition set and merge into one report.

    The state-aware conditions are evaluated when (v_hat, s_hat, w) are
    all supplied; passing ``system`` additionally verifies that the
    operating pair solves the load-flow equations to ``residual_tol``
    (debug-mode guard against stale state estimates).  ``rho`` in the
    merged report comes from the state-aware set when evaluated, else
    from the state-free one.
    """
    report = check_corollary(kernel, s)
    priors = check_prior_conditions(kernel, s, p_set)
    report = replace(
        report,
        bolognani_ok=priors.bolognani_ok,
        improved_ok=priors.improved_ok,
        bolognani_detail=priors.detail,
    )
    if v_hat is not None and s_hat is not None and w is not None:
        if system is not None:
            from .newton import power_mismatch

            mismatch = float(np.max(np.abs(power_mismatch(system, v_hat, s_hat))))
            if mismatch > residual_tol:
                raise ValueError(
                    f"operating point does not solve the load-flow equations "
                    f"(mismatch {mismatch:.3e} > {residual_tol:g})"
                )
        from .zero_load import u_min as u_min_of

        thm = check_theorem(kernel, u_min_of(v_hat, w), s_hat, s)
        report = replace(
            report,
            xi_s_hat=thm.xi_s_hat,
            xi_delta_s=thm.xi_delta_s,
            u_min=thm.u_min,
            delta=thm.delta,
            theorem_ok=thm.theorem_ok,
            rho=thm.rho,
        )
    return report


def solution_ball(
    report: CertificateReport, v_hat: np.ndarray, w: ZeroLoadProfile
) -> SolutionBall:
    """Certified containment ball around ``v_hat``.

    Only meaningful for a passing report; raises ValueError otherwise.
    """
    if report.rho is None:
        raise ValueError("solution ball requested for a failed certificate")
    return SolutionBall(
        center=np.asarray(v_hat, dtype=complex).copy(),
        radii=report.rho * np.abs(w.w),
        rho=report.rho,
    )
