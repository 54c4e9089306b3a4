"""L1-penalized least squares over a dictionary, solved by coordinate descent.

The problem is  min_x  0.5 * ||A x - b||^2 + lambda * ||x||_1,  solved by
cyclic coordinate descent with per-column soft-threshold updates.  After
each full sweep the true residual is recomputed and a duality gap is
evaluated from the residual-scaled dual feasible point; the solver stops
once the gap falls below the configured tolerance.  Between full sweeps
a few passes over the current active set (nonzero coordinates) speed up
convergence without affecting the certificate.

Columns are always visited in ascending index order, so identical inputs
give bit-identical solutions.  A single solve is single-threaded; many
solves may run in parallel against one shared immutable dictionary.
"""

from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary
from .errors import InvalidInputError, ShapeError, UnsupportedConfigError

DEFAULT_LAMBDA_REL = 0.024
DEFAULT_TOL = 1e-6
DEFAULT_MAX_SWEEPS = 1000

# Active-set refinement between certificate checks.
_MAX_INNER_PASSES = 10
_INNER_EPS = 1e-12


@dataclass(frozen=True)
class LassoConfig:
    """Solve configuration; exactly one of lambda_abs / lambda_rel is set.

    ``lambda_rel`` scales the per-query critical penalty (the smallest
    value at which the solution is identically zero), so the effective
    penalty adapts to each query.  The default 0.024 makes a planted
    self-match against an orthogonal remainder score 1 - 0.024 = 0.976.
    """

    lambda_abs: float | None = None
    lambda_rel: float | None = DEFAULT_LAMBDA_REL
    tol: float = DEFAULT_TOL
    max_sweeps: int = DEFAULT_MAX_SWEEPS
    nonnegative: bool = False

    def __post_init__(self):
        if (self.lambda_abs is None) == (self.lambda_rel is None):
            raise UnsupportedConfigError(
                "exactly one of lambda_abs / lambda_rel must be set"
            )
        if self.lambda_abs is not None and self.lambda_abs < 0:
            raise InvalidInputError("lambda_abs must be nonnegative")
        if self.lambda_rel is not None and self.lambda_rel < 0:
            raise InvalidInputError("lambda_rel must be nonnegative")
        if not self.tol > 0:
            raise InvalidInputError("tol must be positive")
        if self.max_sweeps < 1:
            raise InvalidInputError("max_sweeps must be >= 1")

    @classmethod
    def absolute(cls, lam, **kwargs):
        return cls(lambda_abs=lam, lambda_rel=None, **kwargs)

    @classmethod
    def relative(cls, frac, **kwargs):
        return cls(lambda_abs=None, lambda_rel=frac, **kwargs)

    def resolve_lambda(self, lam_max):
        """Absolute penalty for a query whose critical penalty is ``lam_max``."""
        if self.lambda_abs is not None:
            return float(self.lambda_abs)
        return float(self.lambda_rel) * float(lam_max)


@dataclass(frozen=True)
class SparseSolution:
    """Coefficients plus the convergence certificate that produced them."""

    coefficients: np.ndarray
    duality_gap: float
    sweeps_used: int
    objective: float
    converged: bool
    objective_history: np.ndarray

    def __post_init__(self):
        for name in ("coefficients", "objective_history"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _as_matrix(dict_or_matrix):
    if isinstance(dict_or_matrix, Dictionary):
        return dict_or_matrix.matrix
    a = np.asarray(dict_or_matrix, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"design must be 2-D, got shape {a.shape}")
    return a


def _check_query(a, b):
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 1 or b.shape[0] != a.shape[0]:
        raise ShapeError(
            f"query has shape {b.shape}, expected ({a.shape[0]},) to match the dictionary"
        )
    if not np.all(np.isfinite(b)):
        raise InvalidInputError("query contains non-finite values")
    return b


def soft_threshold(v, t):
    """sign(v) * max(|v| - t, 0), elementwise."""
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def lambda_max(dict_or_matrix, b):
    """Smallest penalty at which the solution is exactly zero: max |A^T b|."""
    a = _as_matrix(dict_or_matrix)
    b = _check_query(a, b)
    return float(np.max(np.abs(a.T @ b)))


def _gap_from_residual(a, b, lam, r, r_norm2, l1):
    """Primal minus dual objective at the residual-scaled dual point."""
    primal = 0.5 * r_norm2 + lam * l1
    dual_norm = float(np.max(np.abs(a.T @ r)))
    const = 1.0 if dual_norm <= lam else lam / dual_norm
    dual = const * float(r @ b) - 0.5 * const * const * r_norm2
    return primal - dual


def duality_gap(dict_or_matrix, b, lam, x):
    """Certificate of near-optimality for a candidate coefficient vector.

    Nonnegative up to rounding; zero exactly at an optimum.  The penalty
    must be positive: the certificate is undefined in this form at
    lambda = 0.
    """
    a = _as_matrix(dict_or_matrix)
    b = _check_query(a, b)
    if lam <= 0:
        raise UnsupportedConfigError("duality gap requires lambda > 0")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.shape[1],):
        raise ShapeError(f"x has shape {x.shape}, expected ({a.shape[1]},)")
    r = b - a @ x
    return _gap_from_residual(a, b, lam, r, float(r @ r), float(np.sum(np.abs(x))))


def _cd_pass(a, r, x, indices, lam, col_norms2, nonnegative, rho_cache=None):
    """One pass of coordinate updates over ``indices``; returns max |delta x|.

    ``rho_cache`` supplies precomputed correlations valid while nothing
    has activated yet (residual equals the query); it is abandoned on
    the first nonzero update.
    """
    max_delta = 0.0
    for j in indices:
        nrm2 = col_norms2[j]
        if nrm2 == 0.0:
            continue
        old = x[j]
        col = a[:, j]
        if old != 0.0:
            r += col * old
        if rho_cache is not None:
            rho = rho_cache[j]
        else:
            rho = float(col @ r)
        if nonnegative:
            new = max(rho - lam, 0.0) / nrm2
        else:
            new = rho - lam if rho > lam else (rho + lam if rho < -lam else 0.0)
            new /= nrm2
        if new != 0.0:
            r -= col * new
            if rho_cache is not None:
                rho_cache = None
        x[j] = new
        delta = abs(new - old)
        if delta > max_delta:
            max_delta = delta
    return max_delta, rho_cache


def lasso_cd(a, b, lam, tol=DEFAULT_TOL, max_sweeps=DEFAULT_MAX_SWEEPS, nonnegative=False):
    """Core coordinate-descent solve on a raw design matrix.

    Returns a SparseSolution.  ``lam`` must be strictly positive; a zero
    penalty is a different problem and is rejected.
    """
    a = _as_matrix(a)
    b = _check_query(a, b)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("design matrix contains non-finite values")
    if lam < 0:
        raise InvalidInputError("lambda must be nonnegative")
    if lam == 0:
        raise UnsupportedConfigError(
            "lambda = 0 is rejected: unpenalized least squares is out of scope"
        )
    n = a.shape[1]
    col_norms2 = np.einsum("ij,ij->j", a, a)
    x = np.zeros(n)
    r = b.copy()
    # Valid until the first coefficient activates (residual == query);
    # also makes "lam >= lambda_max implies x == 0" hold exactly.
    rho_cache = a.T @ b
    all_indices = range(n)

    history = []
    gap = np.inf
    converged = False
    sweeps = 0
    for sweep in range(1, max_sweeps + 1):
        sweeps = sweep
        _, rho_cache = _cd_pass(a, r, x, all_indices, lam, col_norms2, nonnegative, rho_cache)
        # Certificate from the true residual; also resyncs the running one.
        r = b - a @ x
        r_norm2 = float(r @ r)
        l1 = float(np.sum(np.abs(x)))
        history.append(0.5 * r_norm2 + lam * l1)
        gap = _gap_from_residual(a, b, lam, r, r_norm2, l1)
        if gap <= tol:
            converged = True
            break
        active = np.flatnonzero(x)
        if active.size:
            scale = max(1.0, float(np.max(np.abs(x[active]))))
            for _ in range(_MAX_INNER_PASSES):
                max_delta, _ = _cd_pass(a, r, x, active, lam, col_norms2, nonnegative)
                if max_delta <= _INNER_EPS * scale:
                    break

    if converged:
        objective = float(history[-1])
    else:
        # Inner passes may have moved x after the last certificate, so
        # re-evaluate both at the coefficients actually returned.
        r = b - a @ x
        r_norm2 = float(r @ r)
        l1 = float(np.sum(np.abs(x)))
        objective = 0.5 * r_norm2 + lam * l1
        gap = _gap_from_residual(a, b, lam, r, r_norm2, l1)
        converged = gap <= tol
    return SparseSolution(
        coefficients=x,
        duality_gap=float(gap),
        sweeps_used=sweeps,
        objective=objective,
        converged=converged,
        objective_history=np.array(history),
    )


def solve_lasso(d, b, config=None):
    """Solve against a Dictionary, resolving the penalty per the config."""
    if config is None:
        config = LassoConfig()
    a = _as_matrix(d)
    b = _check_query(a, b)
    lam = config.resolve_lambda(lambda_max(a, b))
    return lasso_cd(
        a,
        b,
        lam,
        tol=config.tol,
        max_sweeps=config.max_sweeps,
        nonnegative=config.nonnegative,
    )
