"""Validation-loss tuning for the series estimator and the baselines.

The series tuner exploits basis orthogonality: for each kernel candidate the
coefficients are estimated once at the basis cutoff, every truncation J is
then scored from one extension of the validation points via cumulative sums.
Truncation never changes results, only cost.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import KNNModel, NWModel, krr_fit
from .dataset import Dataset
from .diffusion import EigenMethod, Mode, fit_basis
from .errors import InputError, NumericalError
from .kernels import KernelSpec, gram_matrix
from .nystrom import EIGENVALUE_FLOOR_REL, extend
from .series import SeriesModel, estimate_coefficients

__all__ = [
    "TuneGrid",
    "FitReport",
    "empirical_loss",
    "loss_se",
    "tune_series",
    "tune_baseline",
    "evaluate_on",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TuneGrid:
    """Candidate kernels and the basis cutoff for the tuning sweep.

    Gaussian candidates come from ``bandwidths``; polynomial candidates from
    ``degrees``. At least one candidate is required.
    """

    bandwidths: tuple[float, ...] = ()
    degrees: tuple[int, ...] = ()
    j_max: int = 60

    def __post_init__(self):
        bw = tuple(float(b) for b in self.bandwidths)
        dg = tuple(int(q) for q in self.degrees)
        if not bw and not dg:
            raise InputError("tuning grid has no kernel candidates")
        if any(b <= 0 for b in bw):
            raise InputError("bandwidth candidates must be positive")
        if any(b2 <= b1 for b1, b2 in zip(bw, bw[1:])):
            raise InputError("bandwidth candidates must be strictly ascending")
        if any(q < 1 for q in dg):
            raise InputError("degree candidates must be >= 1")
        if self.j_max < 0:
            raise InputError("j_max must be >= 0")
        object.__setattr__(self, "bandwidths", bw)
        object.__setattr__(self, "degrees", dg)

    @property
    def kernels(self) -> list[KernelSpec]:
        return [KernelSpec.gaussian(b) for b in self.bandwidths] + [
            KernelSpec.polynomial(q) for q in self.degrees
        ]


@dataclass
class FitReport:
    """Tuning outcome: the loss surface, the winner, and stage timings.

    loss_surface maps (kernel family, parameter, J) to validation loss;
    baseline reports use J = -1. Unusable truncations (eigenvalue at the
    extension floor, or J beyond the basis size) are recorded as inf so the
    surface always enumerates the full grid.
    """

    loss_surface: dict[tuple[str, float, int], float]
    chosen: tuple[str, float, int]
    val_loss: float
    test_loss: float | None = None
    test_se: float | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.chosen not in self.loss_surface:
            raise InputError(f"chosen key {self.chosen} missing from the loss surface")
        best = min(self.loss_surface.values())
        if self.loss_surface[self.chosen] != best:
            raise InputError("chosen entry does not achieve the loss-surface minimum")

    def surface_rows(self) -> list[tuple[str, float, int, float]]:
        """Long-format rows (family, parameter, J, loss), sorted for export."""
        return [(k[0], k[1], k[2], v) for k, v in sorted(self.loss_surface.items())]


def empirical_loss(predictions: np.ndarray, actuals: np.ndarray) -> float:
    """Mean squared error."""
    predictions = np.asarray(predictions, dtype=float).ravel()
    actuals = np.asarray(actuals, dtype=float).ravel()
    if predictions.shape != actuals.shape:
        raise InputError(
            f"length mismatch: {predictions.shape[0]} predictions, "
            f"{actuals.shape[0]} actuals"
        )
    if predictions.size == 0:
        raise InputError("empirical_loss needs at least one point")
    return float(np.mean((actuals - predictions) ** 2))


def loss_se(predictions: np.ndarray, actuals: np.ndarray) -> float:
    """Standard error of the loss estimate: sd of squared residuals over sqrt(n)."""
    predictions = np.asarray(predictions, dtype=float).ravel()
    actuals = np.asarray(actuals, dtype=float).ravel()
    if predictions.shape != actuals.shape:
        raise InputError("length mismatch between predictions and actuals")
    n = predictions.size
    if n < 2:
        raise InputError("loss_se needs at least 2 points")
    sq = (actuals - predictions) ** 2
    return float(np.std(sq, ddof=1) / np.sqrt(n))


def evaluate_on(predict_fn, data: Dataset) -> tuple[float, float]:
    """Loss and its standard error for a predictor on a labeled split."""
    if data.responses is None:
        raise InputError("evaluation split has no responses")
    preds = predict_fn(data.features)
    return empirical_loss(preds, data.responses), loss_se(preds, data.responses)


def _is_smoother(a: KernelSpec, b: KernelSpec) -> bool:
    # tie-break preference: gaussian over poly, then wider bandwidth / lower degree
    if a.family != b.family:
        return a.family == "gaussian"
    if a.family == "gaussian":
        return a.bandwidth > b.bandwidth
    return a.degree < b.degree


def tune_series(
    train: Dataset,
    val: Dataset,
    grid: TuneGrid,
    mode: Mode = Mode.STOCHASTIC,
    method: EigenMethod | None = None,
    unlabeled: np.ndarray | None = None,
) -> tuple[SeriesModel, FitReport]:
    """Select (kernel, J) by validation loss over the full grid.

    Per candidate, one basis fit and one coefficient pass at the cutoff; all
    truncations are scored from a single extension of the validation points.
    Polynomial candidates run in Uniform mode (their Gram entries may be
    negative, which the degree-weighted modes cannot accept). Unlabeled rows,
    when given, enter every candidate basis; coefficients use training rows
    only. Ties prefer smaller J, then the smoother kernel.
    """
    if train.responses is None or val.responses is None:
        raise InputError("tuning needs responses on both the train and validation splits")
    if train.d != val.d:
        raise InputError(f"train has d={train.d} but validation has d={val.d}")
    pooled = train.features
    labeled = None
    if unlabeled is not None and np.size(unlabeled):
        unlabeled = np.atleast_2d(np.asarray(unlabeled, dtype=float))
        if unlabeled.shape[1] != train.d:
            raise InputError(
                f"unlabeled rows have d={unlabeled.shape[1]}, train has d={train.d}"
            )
        pooled = np.vstack([train.features, unlabeled])
        labeled = np.arange(train.n)

    j_cap = min(grid.j_max, pooled.shape[0] - 1)
    surface: dict[tuple[str, float, int], float] = {}
    timings = {"kernel_build": 0.0, "eigendecomposition": 0.0,
               "coefficient": 0.0, "validation": 0.0}
    best = None  # (loss, J, spec, basis, coef)

    for spec in grid.kernels:
        cand_mode = mode if spec.family == "gaussian" else Mode.UNIFORM
        param = spec.bandwidth if spec.family == "gaussian" else float(spec.degree)
        losses = np.full(grid.j_max + 1, np.inf)
        basis = coef = None
        try:
            t0 = time.perf_counter()
            K = gram_matrix(spec, pooled)
            t1 = time.perf_counter()
            basis = fit_basis(pooled, spec, j_cap, cand_mode, method, gram=K)
            t2 = time.perf_counter()
            coef = estimate_coefficients(basis, train.responses, labeled=labeled)
            t3 = time.perf_counter()
            timings["kernel_build"] += t1 - t0
            timings["eigendecomposition"] += t2 - t1
            timings["coefficient"] += t3 - t2

            t4 = time.perf_counter()
            floor = EIGENVALUE_FLOOR_REL * basis.eigenvalues[0]
            usable = int(np.count_nonzero(basis.eigenvalues > floor))
            usable = min(usable, j_cap + 1)
            if usable > 0 and basis.eigenvalues[0] > 0:
                Psi_val = extend(basis, val.features, usable - 1)
                cum = np.cumsum(Psi_val * coef[:usable][None, :], axis=1)
                err = val.responses[:, None] - cum
                losses[:usable] = np.mean(err * err, axis=0)
            timings["validation"] += time.perf_counter() - t4
        except NumericalError as exc:
            logger.warning("candidate %s failed: %s", spec.label(), exc)
            basis = coef = None
        for J in range(grid.j_max + 1):
            surface[(spec.family, param, J)] = float(losses[J])
        if basis is None:
            continue

        finite = np.isfinite(losses)
        if not finite.any():
            continue
        cand_loss = float(losses[finite].min())
        cand_J = int(np.nonzero(losses == cand_loss)[0][0])  # smallest J at the min
        if (
            best is None
            or cand_loss < best[0]
            or (cand_loss == best[0]
                and (cand_J < best[1]
                     or (cand_J == best[1] and _is_smoother(spec, best[2]))))
        ):
            best = (cand_loss, cand_J, spec, basis, coef)

    if best is None:
        raise NumericalError("no kernel candidate produced a usable fit")

    loss, J, spec, basis, coef = best
    param = spec.bandwidth if spec.family == "gaussian" else float(spec.degree)
    model = SeriesModel(basis, coef, J, ssl=labeled is not None)
    report = FitReport(surface, (spec.family, param, J), loss, timings=timings)
    return model, report


def tune_baseline(
    train: Dataset,
    val: Dataset,
    candidates,
    kind: str,
    kernel: KernelSpec | None = None,
) -> tuple[object, FitReport]:
    """Pick a baseline hyperparameter by validation loss.

    kind is "nw" (candidates are bandwidths), "knn" (neighbor counts), or
    "krr" (penalties; needs the kernel). Exact ties go to the larger
    parameter, i.e. the smoother model.
    """
    if train.responses is None or val.responses is None:
        raise InputError("tuning needs responses on both the train and validation splits")
    candidates = sorted(candidates)
    if not candidates:
        raise InputError("no candidates to tune over")
    if kind not in ("nw", "knn", "krr"):
        raise InputError(f"unknown baseline kind {kind!r}")
    if kind == "krr" and kernel is None:
        raise InputError("krr tuning needs a kernel spec")

    surface: dict[tuple[str, float, int], float] = {}
    timings = {"fit": 0.0, "validation": 0.0}
    best = None  # (loss, param, model)
    for param in candidates:
        t0 = time.perf_counter()
        try:
            if kind == "nw":
                model = NWModel(train.features, train.responses, float(param))
            elif kind == "knn":
                model = KNNModel(train.features, train.responses, int(param))
            else:
                model = krr_fit(train.features, train.responses, kernel, float(param))
        except NumericalError as exc:
            logger.warning("%s candidate %s failed: %s", kind, param, exc)
            surface[(kind, float(param), -1)] = float("inf")
            continue
        t1 = time.perf_counter()
        loss = empirical_loss(model.predict(val.features), val.responses)
        timings["fit"] += t1 - t0
        timings["validation"] += time.perf_counter() - t1
        surface[(kind, float(param), -1)] = loss
        if best is None or loss <= best[0]:
            best = (loss, float(param), model)

    if best is None:
        raise NumericalError(f"every {kind} candidate failed to fit")
    loss, param, model = best
    report = FitReport(surface, (kind, param, -1), loss, timings=timings)
    return model, report
