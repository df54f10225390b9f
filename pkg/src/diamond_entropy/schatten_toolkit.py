"""Singular values, Schatten (quasi-)norms, and randomized inequality checks.

verify_inequalities exercises, on seeded complex Gaussian matrices, the
singular-value sum bound s_{2k-1}(A+B) <= s_k(A) + s_k(B), the p-triangle
inequality for p < 1, block subadditivity at p = 1/2, the eigenvalue decay
bound s_k <= k^(-1/p) ||A||_p, the Hoelder product inequality, and norm
monotonicity in p. verify_commutator_lemma checks conjugation invariance of
the quasi-norms and the commutator/compression estimates for projections.
Violations are reported relative to the natural scale of each instance;
a report passes when its worst relative violation is below the slack.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import VacuousBoundError
from .renyi_functions import RenyiOrder, eta, probe_condition_f

SLACK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SingularSpectrum:
    """Non-increasing singular values of one matrix."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if np.any(vals < 0) or np.any(np.diff(vals) > 0):
            raise ValueError("singular values must be nonnegative and non-increasing")


@dataclass(frozen=True)
class SchattenReport:
    """Outcome of one randomized inequality check.

    max_violation is the worst (lhs - rhs) over all trials, normalized by
    the per-trial scale of the quantities involved; negative slack means
    the inequality held with margin. Reports flagged informational record
    expected violations (a stated form that fails generically) and are not
    asserted by the suite.
    """

    inequality_name: str
    trials: int
    max_violation: float
    seed: int
    slack_tolerance: float = SLACK_TOLERANCE
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.informational or self.max_violation <= self.slack_tolerance


def singular_values(A: np.ndarray) -> SingularSpectrum:
    """Singular values of A in non-increasing order (LAPACK SVD)."""
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return SingularSpectrum(values=np.linalg.svd(A, compute_uv=False))


def schatten_norm(A: np.ndarray, p: float) -> float:
    """(sum s_k^p)^(1/p); p = inf gives the operator norm, p = 1 the trace norm."""
    if not (p > 0 or p == np.inf):
        raise ValueError(f"p must be positive or inf, got {p}")
    s = singular_values(A).values
    if p == np.inf:
        return float(s[0]) if s.size else 0.0
    total = float(np.sum(s**p))
    return total ** (1.0 / p)


def _qnorms(s: np.ndarray, p: float) -> np.ndarray:
    """Stacked Schatten norms from stacked singular values (last axis)."""
    if p == np.inf:
        return s[..., 0]
    return np.sum(s**p, axis=-1) ** (1.0 / p)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Entries with independent standard complex normal distribution."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_projections(rng: np.random.Generator, trials: int, dim: int, rank: int) -> np.ndarray:
    """Stack of orthogonal projections built from orthonormalized Gaussian columns."""
    M = complex_gaussian(rng, (trials, dim, rank))
    Q, _ = np.linalg.qr(M)
    return Q @ np.conj(np.swapaxes(Q, -1, -2))


def _relative_violation(lhs: np.ndarray, rhs: np.ndarray, scale: np.ndarray) -> float:
    return float(np.max((lhs - rhs) / np.maximum(scale, 1e-300)))


def verify_inequalities(dim: int, trials: int, seed: int) -> list[SchattenReport]:
    """Run the singular-value and Schatten-norm inequality suite."""
    if not (2 <= dim <= 32):
        raise ValueError(f"dim must lie in [2, 32], got {dim}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    A = complex_gaussian(rng, (trials, dim, dim))
    B = complex_gaussian(rng, (trials, dim, dim))
    C = complex_gaussian(rng, (trials, dim, dim))
    D = complex_gaussian(rng, (trials, dim, dim))

    sA = np.linalg.svd(A, compute_uv=False)
    sB = np.linalg.svd(B, compute_uv=False)
    sAB = np.linalg.svd(A + B, compute_uv=False)
    sProd = np.linalg.svd(A @ B, compute_uv=False)
    reports = []

    # s_{2k}(A+B) <= s_{2k-1}(A+B) <= s_k(A) + s_k(B)
    worst = -np.inf
    scale0 = sA[:, 0] + sB[:, 0]
    for k in range(1, dim // 2 + 2):
        if 2 * k - 1 > dim:
            break
        rhs = sA[:, k - 1] + sB[:, k - 1]
        worst = max(worst, _relative_violation(sAB[:, 2 * k - 2], rhs, scale0))
        if 2 * k <= dim:
            worst = max(worst, _relative_violation(sAB[:, 2 * k - 1], rhs, scale0))
    reports.append(SchattenReport("singular_value_sum", trials, worst, seed))

    # ||A + B||_p^p <= ||A||_p^p + ||B||_p^p for p < 1
    worst = -np.inf
    for p in (0.3, 0.5, 0.9):
        lhs = np.sum(sAB**p, axis=-1)
        rhs = np.sum(sA**p, axis=-1) + np.sum(sB**p, axis=-1)
        worst = max(worst, _relative_violation(lhs, rhs, rhs))
    reports.append(SchattenReport("p_triangle", trials, worst, seed))

    # block matrix: ||M||_p^p <= sum of block norms^p at p = 1/2
    M = np.concatenate(
        [np.concatenate([A, B], axis=-1), np.concatenate([C, D], axis=-1)], axis=-2
    )
    sM = np.linalg.svd(M, compute_uv=False)
    p = 0.5
    lhs = np.sum(sM**p, axis=-1)
    rhs = sum(np.sum(s**p, axis=-1) for s in (sA, sB, np.linalg.svd(C, compute_uv=False), np.linalg.svd(D, compute_uv=False)))
    reports.append(
        SchattenReport("block_subadditivity", trials, _relative_violation(lhs, rhs, rhs), seed)
    )

    # s_k(A) <= k^(-1/p) ||A||_p
    worst = -np.inf
    ks = np.arange(1, dim + 1, dtype=float)
    for p in (0.5, 1.0, 2.0):
        norm_p = _qnorms(sA, p)[:, None]
        worst = max(worst, _relative_violation(sA, ks ** (-1.0 / p) * norm_p, norm_p))
    reports.append(SchattenReport("eigenvalue_decay", trials, worst, seed))

    # ||AB||_p <= ||A||_p1 ||B||_p2 with 1/p = 1/p1 + 1/p2
    worst = -np.inf
    for p, p1, p2 in ((1.0, 2.0, 2.0), (0.5, 1.0, 1.0), (2.0 / 3.0, 1.0, 2.0), (1.0, 1.0, np.inf)):
        lhs = _qnorms(sProd, p)
        rhs = _qnorms(sA, p1) * _qnorms(sB, p2)
        worst = max(worst, _relative_violation(lhs, rhs, rhs))
    reports.append(SchattenReport("hoelder_product", trials, worst, seed))

    # ||A||_p2 <= ||A||_p1 for p1 < p2
    worst = -np.inf
    for p1, p2 in ((0.5, 1.0), (1.0, 2.0), (2.0, np.inf), (0.7, 5.0)):
        lhs = _qnorms(sA, p2)
        rhs = _qnorms(sA, p1)
        worst = max(worst, _relative_violation(lhs, rhs, rhs))
    reports.append(SchattenReport("norm_monotonicity", trials, worst, seed))
    return reports


def verify_commutator_lemma(dim: int, trials: int, seed: int) -> list[SchattenReport]:
    """Conjugation invariance and the projection commutator estimates.

    The two-sided commutator bound is tested in the form
    ||[A, B]||_q^q <= 2 ||B A (1 - B)||_q^q with A Hermitian and B an
    orthogonal projection, which is what the triangle-inequality argument
    yields; the stated one-sided form without the factor 2 fails generically
    and is recorded as an informational report rather than asserted.
    """
    if not (2 <= dim <= 32):
        raise ValueError(f"dim must lie in [2, 32], got {dim}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    G = complex_gaussian(rng, (trials, dim, dim))
    A_general = complex_gaussian(rng, (trials, dim, dim))
    A_herm = 0.5 * (G + np.conj(np.swapaxes(G, -1, -2)))
    P = random_projections(rng, trials, dim, max(1, dim // 2))
    one_minus_P = np.eye(dim) - P
    reports = []

    # (i) ||A||_q = ||A*||_q
    sA = np.linalg.svd(A_general, compute_uv=False)
    sAdag = np.linalg.svd(np.conj(np.swapaxes(A_general, -1, -2)), compute_uv=False)
    worst = -np.inf
    for q in (0.7, 1.0, 2.0):
        na, nd = _qnorms(sA, q), _qnorms(sAdag, q)
        worst = max(worst, float(np.max(np.abs(na - nd) / na)))
    reports.append(
        SchattenReport("conjugation_invariance", trials, worst, seed, slack_tolerance=1e-12)
    )

    def cross_norms(A_stack, q):
        comm = A_stack @ P - P @ A_stack
        comp = P @ A_stack @ one_minus_P
        s_comm = np.linalg.svd(comm, compute_uv=False)
        s_comp = np.linalg.svd(comp, compute_uv=False)
        return s_comm, s_comp

    # (ii) ||[A, B]||_q^q <= 2 ||BA(1-B)||_q^q, Hermitian A, projection B
    worst = -np.inf
    worst_display = -np.inf
    for q in (0.4, 0.7, 1.0):
        s_comm, s_comp = cross_norms(A_herm, q)
        lhs = np.sum(s_comm**q, axis=-1)
        rhs = 2.0 * np.sum(s_comp**q, axis=-1)
        worst = max(worst, _relative_violation(lhs, rhs, rhs))
        disp_lhs = _qnorms(s_comm, q)
        disp_rhs = _qnorms(s_comp, q)
        worst_display = max(worst_display, _relative_violation(disp_lhs, disp_rhs, disp_rhs))
    reports.append(SchattenReport("commutator_two_sided", trials, worst, seed))
    reports.append(
        SchattenReport(
            "commutator_one_sided_form", trials, worst_display, seed, informational=True
        )
    )

    # (iii) ||BA(1-B)||_q <= ||[A, B]||_q for any A, projection B
    worst = -np.inf
    for q in (0.5, 1.0, 2.0):
        s_comm, s_comp = cross_norms(A_general, q)
        lhs = _qnorms(s_comp, q)
        rhs = _qnorms(s_comm, q)
        worst = max(worst, _relative_violation(lhs, rhs, rhs))
    reports.append(SchattenReport("projection_compression", trials, worst, seed))
    return reports


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(x > 0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        g = np.where(1.0 - x > 0, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    return f / (f + g)


def localized_eta(order: RenyiOrder, t: np.ndarray, t0: float) -> np.ndarray:
    """eta multiplied by a fixed smooth partition member supported near t0.

    The partition cuts between 0.35 and 0.65, so each member contains exactly
    one endpoint of [0, 1] in its support.
    """
    t = np.asarray(t, dtype=float)
    psi_low = _smooth_step((0.65 - t) / 0.3)
    weight = psi_low if t0 == 0.0 else 1.0 - psi_low
    return eta(order, t) * weight


def _apply_fn(H: np.ndarray, fn) -> np.ndarray:
    vals, vecs = np.linalg.eigh(H)
    return (vecs * fn(vals)) @ np.conj(vecs.T)


def check_szego_bound(
    A: np.ndarray,
    P: np.ndarray,
    order: RenyiOrder,
    q: float,
    sigma: float,
    t0: float = 0.0,
) -> float:
    """Ratio ||P f(PAP) P - P f(A) P||_q / ||P A (1-P)||_{sigma q}^sigma.

    f is eta localized near one endpoint by the fixed smooth partition. The
    ratio realizes the constant in the spectral-compression bound; it is
    meaningful only when the compression PA(1-P) does not vanish, otherwise
    VacuousBoundError is raised.
    """
    if not (0.5 < q <= 1.0):
        raise ValueError(f"q must lie in (1/2, 1], got {q}")
    gamma = probe_condition_f(order, t0, samples=120).gamma
    limit = min(2.0 - 1.0 / q, gamma)
    if not sigma < limit:
        raise ValueError(f"sigma must be below min(2 - 1/q, gamma) = {limit:.4f}, got {sigma}")
    A = np.asarray(A)
    P = np.asarray(P)
    if np.abs(A - A.conj().T).max() > 1e-12:
        raise ValueError("A must be Hermitian")
    if np.abs(P @ P - P).max() > 1e-12 or np.abs(P - P.conj().T).max() > 1e-12:
        raise ValueError("P must be an orthogonal projection")
    evals = np.linalg.eigvalsh(A)
    if evals.min() < -1e-12 or evals.max() > 1.0 + 1e-12:
        raise ValueError("spectrum of A must lie in [0, 1]")

    fn = lambda t: localized_eta(order, t, t0)
    one_minus_P = np.eye(P.shape[0]) - P
    denominator = schatten_norm(P @ A @ one_minus_P, sigma * q) ** sigma
    if denominator < 1e-14:
        raise VacuousBoundError(
            "compression P A (1-P) vanishes; the bound is vacuous for commuting inputs"
        )
    difference = P @ _apply_fn(P @ A @ P, fn) @ P - P @ _apply_fn(A, fn) @ P
    return schatten_norm(difference, q) / denominator
