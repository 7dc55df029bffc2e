"""Total-degree polynomial bases and weighted least-squares fits.

Monomials are ordered graded-lexicographically: by total degree first, then
lexicographically with the exponent of ``x1`` descending, e.g. for ``d=2, m=2``
the basis is ``1, x, y, x**2, x*y, y**2``.

Chart coordinates are rescaled by the largest sample radius before the design
matrix is formed; coefficients are mapped back to the caller's units, so the
scaling only affects conditioning.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.linalg

from .errors import ConfigurationError, InsufficientSamples, RankDeficient, ZeroWeight

ORDERING = "graded-lex"
DEFAULT_RCOND = 1e-10


def n_monomials(d: int, m: int) -> int:
    """Number of monomials of total degree <= ``m`` in ``d`` variables."""

    _check_degree(d, m)
    return math.comb(m + d, d)


@lru_cache(maxsize=None)
def _exponents(d: int, m: int) -> Tuple[Tuple[int, ...], ...]:
    rows = []
    for degree in range(m + 1):
        for combo in itertools.combinations_with_replacement(range(d), degree):
            exps = [0] * d
            for var in combo:
                exps[var] += 1
            rows.append(tuple(exps))
    return tuple(rows)


def monomial_exponents(d: int, m: int) -> np.ndarray:
    """``J x d`` integer matrix of exponents in canonical order."""

    _check_degree(d, m)
    return np.array(_exponents(d, m), dtype=int).reshape(-1, d)


def monomial_basis(x: np.ndarray, m: int) -> np.ndarray:
    """Evaluate ``[b_1(x), ..., b_J(x)]`` at a single point ``x``."""

    point = np.atleast_1d(np.asarray(x, dtype=float))
    return design_matrix(point[None, :], m)[0]


def design_matrix(X: np.ndarray, m: int) -> np.ndarray:
    """``N x J`` matrix with entries ``b_j(x_i)``."""

    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("design_matrix expects an N x d array")
    exps = monomial_exponents(X.shape[1], m)
    return np.prod(X[:, None, :] ** exps[None, :, :], axis=2)


def _check_degree(d: int, m: int) -> None:
    if d < 1:
        raise ConfigurationError(f"intrinsic dimension must be >= 1, got {d}")
    if m < 0:
        raise ConfigurationError(f"polynomial degree must be >= 0, got {m}")


@dataclass(frozen=True, slots=True)
class WlsProblem:
    """Chart coordinates ``X`` (N x d), targets ``Y`` (N x ñ) and weights ``w``."""

    X: np.ndarray
    Y: np.ndarray
    w: np.ndarray

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        Y = np.asarray(self.Y, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        w = np.asarray(self.w, dtype=float).ravel()
        if not (X.shape[0] == Y.shape[0] == w.shape[0]):
            raise ValueError(f"row mismatch: X {X.shape}, Y {Y.shape}, w {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "w", w)

    @property
    def dim_domain(self) -> int:
        return self.X.shape[1]

    @property
    def positive(self) -> np.ndarray:
        return self.w > 0


@dataclass(frozen=True, slots=True)
class PolyModel:
    """Coefficients of a vector-valued polynomial of total degree ``degree``."""

    dim_domain: int
    degree: int
    dim_range: int
    coeffs: np.ndarray
    basis_order: str = field(default=ORDERING)

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        expected = n_monomials(self.dim_domain, self.degree)
        if coeffs.shape != (expected, self.dim_range):
            raise ValueError(f"coeffs must have shape {(expected, self.dim_range)}, got {coeffs.shape}")
        if self.basis_order != ORDERING:
            raise ValueError(f"unsupported basis ordering {self.basis_order!r}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def exponents(self) -> np.ndarray:
        return monomial_exponents(self.dim_domain, self.degree)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at one point (returns ñ-vector) or at N points (N x ñ)."""

        x = np.asarray(x, dtype=float)
        if x.ndim <= 1:
            return monomial_basis(x, self.degree) @ self.coeffs
        return design_matrix(x, self.degree) @ self.coeffs

    def value_at_origin(self) -> np.ndarray:
        """``p(0)``: the constant coefficient row."""

        return self.coeffs[0].copy()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ordering": self.basis_order,
            "dim_domain": self.dim_domain,
            "degree": self.degree,
            "dim_range": self.dim_range,
            "exponents": self.exponents.tolist(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "PolyModel":
        model = cls(
            dim_domain=int(payload["dim_domain"]),
            degree=int(payload["degree"]),
            dim_range=int(payload["dim_range"]),
            coeffs=np.asarray(payload["coeffs"], dtype=float),
            basis_order=payload.get("ordering", ORDERING),
        )
        if "exponents" in payload and not np.array_equal(np.asarray(payload["exponents"]), model.exponents):
            raise ValueError("exponent list does not match the graded-lex ordering")
        return model

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.coeffs, columns=[f"c{j + 1}" for j in range(self.dim_range)])
        frame.insert(0, "exponent", ["-".join(str(e) for e in row) for row in self.exponents])
        return frame


# ----------------------------------------------------------------------
def _chart_scale(X: np.ndarray) -> float:
    radius = float(np.max(np.linalg.norm(X, axis=1))) if X.size else 0.0
    return radius if radius > 0 else 1.0


def _pivoted_qr(B: np.ndarray, required: int, rcond: float):
    Q, R, piv = scipy.linalg.qr(B, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    lead = diag[0] if diag.size else 0.0
    estimate = float(diag[-1] / lead) if lead > 0 else 0.0
    if diag.size < required or estimate < rcond:
        rank = int(np.sum(diag > rcond * lead)) if lead > 0 else 0
        raise RankDeficient(rank=rank, required=required, rcond_estimate=estimate)
    return Q, R, piv


def wls_fit(problem: WlsProblem, m: int, *, rcond: float = DEFAULT_RCOND) -> PolyModel:
    """Minimize ``sum_i w_i ||p(x_i) - Y_i||**2`` over polynomials of degree <= m.

    Zero-weight rows are dropped before factoring; a single pivoted QR
    factorization serves every output coordinate.
    """

    d = problem.dim_domain
    required = n_monomials(d, m)
    mask = problem.positive
    available = int(mask.sum())
    if available < required:
        raise InsufficientSamples(required=required, available=available)

    X = problem.X[mask]
    sqrt_w = np.sqrt(problem.w[mask])
    scale = _chart_scale(X)
    B = sqrt_w[:, None] * design_matrix(X / scale, m)
    Q, R, piv = _pivoted_qr(B, required, rcond)
    rhs = Q.T @ (sqrt_w[:, None] * problem.Y[mask])
    solution = scipy.linalg.solve_triangular(R, rhs)

    coeffs = np.empty_like(solution)
    coeffs[piv] = solution
    degrees = monomial_exponents(d, m).sum(axis=1)
    coeffs /= (scale ** degrees)[:, None]
    return PolyModel(dim_domain=d, degree=m, dim_range=problem.Y.shape[1], coeffs=coeffs)


def backus_gilbert_coeffs(
    problem: WlsProblem,
    m: int,
    x0: Optional[np.ndarray] = None,
    *,
    rcond: float = DEFAULT_RCOND,
) -> np.ndarray:
    """Dual coefficients ``a`` with ``sum_i a_i Y_i == wls_fit(problem, m)(x0)``.

    ``a`` minimizes ``sum_i a_i**2 / w_i`` subject to reproducing every basis
    polynomial at ``x0``; closed form ``W E (E^T W E)^{-1} b(x0)``.
    """

    d = problem.dim_domain
    zero = int(np.sum(problem.w == 0))
    if zero:
        raise ZeroWeight(count=zero)
    required = n_monomials(d, m)
    if problem.X.shape[0] < required:
        raise InsufficientSamples(required=required, available=problem.X.shape[0])

    x0 = np.zeros(d) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    scale = _chart_scale(problem.X)
    sqrt_w = np.sqrt(problem.w)
    B = sqrt_w[:, None] * design_matrix(problem.X / scale, m)
    Q, R, piv = _pivoted_qr(B, required, rcond)
    target = monomial_basis(x0 / scale, m)
    y = scipy.linalg.solve_triangular(R, target[piv], trans="T")
    return sqrt_w * (Q @ y)


def kkt_coeffs(
    X: np.ndarray,
    inverse_weights: np.ndarray,
    m: int,
    x0: Optional[np.ndarray] = None,
    *,
    rcond: float = DEFAULT_RCOND,
) -> np.ndarray:
    """Dual coefficients from the dense saddle-point system.

    Solves ``[[D, E], [E^T, 0]] [a; z] = [0; b(x0)]`` with
    ``D = diag(inverse_weights)``. Entries of ``D`` may be zero (a sample at
    the evaluation point); infinite entries mark samples outside the support,
    which receive ``a_i = 0``.
    """

    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    inv_w = np.asarray(inverse_weights, dtype=float).ravel()
    if inv_w.shape[0] != X.shape[0]:
        raise ValueError("inverse_weights must have one entry per sample")
    if np.any(inv_w < 0) or np.any(np.isnan(inv_w)):
        raise ValueError("inverse weights must be nonnegative")

    d = X.shape[1]
    required = n_monomials(d, m)
    inside = np.isfinite(inv_w)
    available = int(inside.sum())
    if available < required:
        raise InsufficientSamples(required=required, available=available)

    Xs = X[inside]
    scale = _chart_scale(Xs)
    E = design_matrix(Xs / scale, m)
    _pivoted_qr(E, required, rcond)
    x0 = np.zeros(d) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))

    system = np.zeros((available + required, available + required))
    system[:available, :available] = np.diag(inv_w[inside])
    system[:available, available:] = E
    system[available:, :available] = E.T
    rhs = np.concatenate([np.zeros(available), monomial_basis(x0 / scale, m)])
    try:
        solution = scipy.linalg.solve(system, rhs, assume_a="sym")
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise RankDeficient(rank=-1, required=required, rcond_estimate=0.0) from exc

    coeffs = np.zeros(X.shape[0])
    coeffs[inside] = solution[:available]
    return coeffs


__all__ = [
    "DEFAULT_RCOND",
    "ORDERING",
    "PolyModel",
    "WlsProblem",
    "backus_gilbert_coeffs",
    "design_matrix",
    "kkt_coeffs",
    "monomial_basis",
    "monomial_exponents",
    "n_monomials",
]
