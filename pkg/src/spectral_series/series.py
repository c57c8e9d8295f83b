"""The spectral series regression estimator.

A response is expanded in the adaptive eigenbasis: f(x) = sum_j beta_j
psi_j(x). Coefficients are weighted empirical projections; prediction
composes them with the out-of-sample extension. Coefficients are always
estimated up to the basis cutoff, so changing the truncation J is free.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .diffusion import EigenBasis, EigenMethod, Mode, fit_basis, smoothness_spectrum
from .errors import InputError, NumericalError
from .kernels import KernelSpec
from .nystrom import extend

__all__ = [
    "SeriesModel",
    "estimate_coefficients",
    "wls_coefficients",
    "predict",
    "fit",
    "fit_ssl",
    "smoothness_functional",
]


@dataclass(frozen=True)
class SeriesModel:
    """Fitted expansion: basis, coefficients up to the cutoff, truncation J.

    Only terms 0..J enter predictions; the remaining coefficients are kept so
    retruncation does not refit anything. ssl records whether unlabeled rows
    entered the basis.
    """

    basis: EigenBasis
    coefficients: np.ndarray
    J: int
    ssl: bool = False

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float).ravel()
        if coef.shape[0] != self.basis.n_components:
            raise InputError(
                f"{coef.shape[0]} coefficients for {self.basis.n_components} components"
            )
        if not np.all(np.isfinite(coef)):
            raise NumericalError("non-finite expansion coefficient")
        if not (0 <= self.J <= self.basis.n_components - 1):
            raise InputError(f"J must be in 0..{self.basis.n_components - 1}, got {self.J}")
        object.__setattr__(self, "coefficients", coef)

    def with_truncation(self, J: int) -> "SeriesModel":
        """Same fit viewed at a different truncation; no recomputation."""
        return replace(self, J=J)


def _coefficient_weights(basis: EigenBasis, labeled: np.ndarray | None) -> np.ndarray:
    """Per-row projection weights c so that beta_j = sum_i c_i y_i psi_j(X_i).

    With every row labeled, c is the orthogonality weight and the projections
    are exact under the basis inner product. With a labeled subset, the
    family's sampling weights are renormalized over the labeled rows, which
    keeps the projection unbiased and reduces to the full formula when the
    subset is everything.
    """
    n = basis.n
    if labeled is None:
        return basis.ortho_weights
    labeled = np.asarray(labeled, dtype=int)
    if labeled.size == 0:
        raise InputError("labeled set is empty")
    if labeled.min() < 0 or labeled.max() >= n:
        raise InputError(f"labeled indices out of range 0..{n - 1}")
    if np.unique(labeled).size != labeled.size:
        raise InputError("labeled indices contain duplicates")
    if basis.mode in (Mode.STOCHASTIC, Mode.BIAS_CORRECTED):
        s_lab = basis.stationary[labeled]
        return s_lab / (n * s_lab.sum())
    return np.full(labeled.size, 1.0 / labeled.size)


def estimate_coefficients(
    basis: EigenBasis, y: np.ndarray, labeled: np.ndarray | None = None
) -> np.ndarray:
    """Project responses onto every basis column.

    y is aligned with the labeled rows (all training rows when labeled is
    None). Returns the full coefficient vector beta_0..beta_Jmax.
    """
    y = np.asarray(y, dtype=float).ravel()
    c = _coefficient_weights(basis, labeled)
    if y.shape[0] != c.shape[0]:
        raise InputError(f"got {y.shape[0]} responses for {c.shape[0]} labeled rows")
    if not np.all(np.isfinite(y)):
        raise InputError("responses contain NaN or Inf")
    Psi = basis.eigenvectors if labeled is None else basis.eigenvectors[labeled]
    return Psi.T @ (c * y)


def wls_coefficients(basis: EigenBasis, y: np.ndarray) -> np.ndarray:
    """Coefficients by explicit weighted least squares on the basis columns.

    Solves (Z^T W Z) beta = Z^T W y with Z the basis columns at the training
    points and W the diagonal sampling-weight matrix (n times the
    orthogonality weights). Because Z^T W Z = n I up to roundoff, this agrees
    with estimate_coefficients; it exists as an independent cross-check.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != basis.n:
        raise InputError(f"got {y.shape[0]} responses for {basis.n} training rows")
    Z = basis.eigenvectors
    w = basis.n * basis.ortho_weights
    ZtWZ = Z.T @ (w[:, None] * Z)
    ZtWy = Z.T @ (w * y)
    try:
        return np.linalg.solve(ZtWZ, ZtWy)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular normal equations: {exc}") from exc


def predict(model: SeriesModel, Xnew: np.ndarray) -> np.ndarray:
    """Evaluate the truncated expansion at query points."""
    Psi_new = extend(model.basis, Xnew, model.J)
    return Psi_new @ model.coefficients[: model.J + 1]


def fit(
    X: np.ndarray,
    y: np.ndarray,
    spec: KernelSpec,
    j_max: int,
    mode: Mode = Mode.STOCHASTIC,
    method: EigenMethod | None = None,
    J: int | None = None,
) -> SeriesModel:
    """Supervised fit: basis on X, coefficients from all rows.

    J defaults to j_max; pass a smaller value to truncate immediately.
    """
    basis = fit_basis(X, spec, j_max, mode, method)
    coef = estimate_coefficients(basis, y)
    return SeriesModel(basis, coef, j_max if J is None else J)


def fit_ssl(
    X_labeled: np.ndarray,
    y: np.ndarray,
    X_unlabeled: np.ndarray | None,
    spec: KernelSpec,
    j_max: int,
    mode: Mode = Mode.STOCHASTIC,
    method: EigenMethod | None = None,
    J: int | None = None,
) -> SeriesModel:
    """Semi-supervised fit: basis on labeled plus unlabeled rows pooled.

    The eigenbasis and its weights see the pooled sample; the coefficient
    projection runs over the labeled rows only. With no unlabeled rows this
    is exactly the supervised fit.
    """
    X_labeled = np.atleast_2d(np.asarray(X_labeled, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X_labeled.shape[0]:
        raise InputError(
            f"got {y.shape[0]} responses for {X_labeled.shape[0]} labeled rows"
        )
    if X_labeled.shape[0] == 0:
        raise InputError("labeled set is empty")
    if X_unlabeled is None or np.size(X_unlabeled) == 0:
        model = fit(X_labeled, y, spec, j_max, mode, method, J)
        return replace(model, ssl=False)
    X_unlabeled = np.atleast_2d(np.asarray(X_unlabeled, dtype=float))
    if X_unlabeled.shape[1] != X_labeled.shape[1]:
        raise InputError(
            f"unlabeled dimension {X_unlabeled.shape[1]} does not match "
            f"labeled dimension {X_labeled.shape[1]}"
        )
    pooled = np.vstack([X_labeled, X_unlabeled])
    basis = fit_basis(pooled, spec, j_max, mode, method)
    coef = estimate_coefficients(basis, y, labeled=np.arange(X_labeled.shape[0]))
    return SeriesModel(basis, coef, j_max if J is None else J, ssl=True)


def smoothness_functional(model: SeriesModel) -> float:
    """Roughness of the fitted function: sum_j nu^2_j beta_j^2 over j <= J.

    Zero for constants; grows as energy moves into higher (rougher)
    components. Gaussian-kernel bases only.
    """
    nu2 = smoothness_spectrum(model.basis)[: model.J + 1]
    beta = model.coefficients[: model.J + 1]
    return float(np.sum(nu2 * beta * beta))
