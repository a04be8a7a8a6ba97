"""
Two-stage fitting of the axisymmetric coefficients.

Dataset force-area triples are reduced per link to (alpha, C_D A, C_N A) by
projecting on the drag direction -d and on the in-plane normal direction.
Lasso (cyclic coordinate descent on the Gram matrix) selects the support and
an unregularized least-squares fit on that support gives the weights.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from jetaero.aero.axisym import (
    SIN_GUARD, AxisymCoeffs, drag_basis, link_axes_in_base, normal_basis,
)
from jetaero.dataset.samples import AeroDataset
from jetaero.errors import FitError
from jetaero.model.robot import RobotModel
from jetaero.utils.logger import get_logger, ic

logger = get_logger(__name__)

MIN_SAMPLES = 6
MIN_DISTINCT_ANGLES = 5
POSITIVITY_GRID = np.deg2rad(np.arange(0.0, 181.0, 1.0))


@dataclass
class LinkProjection:
    """Per-link samples reduced to scalar force areas."""
    alpha: np.ndarray
    drag_area: np.ndarray
    normal_alpha: np.ndarray
    normal_area: np.ndarray


@dataclass
class LassoSettings:
    tol: float = 1e-10
    max_sweeps: int = 100000
    cv_folds: int = 5
    cv_grid: int = 20

    @classmethod
    def from_config(cls) -> "LassoSettings":
        from jetaero.config import NUMERICS
        return cls(tol=float(NUMERICS['lasso_tol']), max_sweeps=int(NUMERICS['lasso_max_sweeps']),
                   cv_folds=int(NUMERICS['cv_folds']), cv_grid=int(NUMERICS['cv_grid']))


@dataclass
class FitReport:
    """What happened while fitting each link."""
    lambdas: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    supports: Dict[str, List[int]] = field(default_factory=dict)
    refit_full_basis: List[str] = field(default_factory=list)
    positivity_corrected: List[str] = field(default_factory=list)


def soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def lasso_coordinate_descent(X: np.ndarray, y: np.ndarray, lam: float, penalized: np.ndarray,
                             settings: Optional[LassoSettings] = None,
                             warm_start: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int, bool]:
    """
    Minimize (1/2N)||y - Xw||^2 + lam * sum(|w_j| for penalized j).

    Returns:
        (weights, sweeps, converged)
    """
    settings = settings or LassoSettings()
    n, p = X.shape
    gram = X.T @ X / n
    corr = X.T @ y / n
    w = np.zeros(p) if warm_start is None else np.array(warm_start, dtype=float)
    for sweep in range(1, settings.max_sweeps + 1):
        max_change = 0.0
        for j in range(p):
            g_jj = gram[j, j]
            if g_jj <= 0.0:
                continue
            rho = corr[j] - gram[j] @ w + g_jj * w[j]
            new = (soft_threshold(rho, lam) if penalized[j] else rho) / g_jj
            change = abs(new - w[j])
            if change > max_change:
                max_change = change
            w[j] = new
        if max_change < settings.tol:
            return w, sweep, True
        polished = _active_set_solution(gram, corr, w, lam, penalized)
        if polished is not None:
            w = polished
    logger.warning(f"Lasso did not converge in {settings.max_sweeps} sweeps (lambda={lam:g})")
    return w, settings.max_sweeps, False


def _active_set_solution(gram: np.ndarray, corr: np.ndarray, w: np.ndarray, lam: float,
                         penalized: np.ndarray) -> Optional[np.ndarray]:
    """
    Exact minimizer for the current active set and signs, or None when it
    violates the sign pattern or the optimality condition of an inactive weight.
    """
    active = np.flatnonzero((w != 0.0) | ~penalized)
    if active.size == 0:
        return None
    signs = np.where(penalized[active], np.sign(w[active]), 0.0)
    G = gram[np.ix_(active, active)]
    if np.linalg.matrix_rank(G) < active.size:
        return None
    w_active = np.linalg.solve(G, corr[active] - lam * signs)
    # Without a penalty the least-squares solution is optimal whatever its signs
    if lam > 0.0 and np.any(signs * w_active < 0.0):
        return None
    candidate = np.zeros_like(w)
    candidate[active] = w_active
    inactive = np.setdiff1d(np.arange(w.size), active)
    if inactive.size and np.any(np.abs(corr[inactive] - gram[inactive] @ candidate) > lam * (1.0 + 1e-9)):
        return None
    return candidate


def lambda_max(X: np.ndarray, y: np.ndarray, penalized: np.ndarray) -> float:
    """Smallest lambda for which every penalized weight is zero."""
    n = X.shape[0]
    free = ~penalized
    if np.any(free):
        w_free, *_ = np.linalg.lstsq(X[:, free], y, rcond=None)
        residual = y - X[:, free] @ w_free
    else:
        residual = y
    if not np.any(penalized):
        return 0.0
    return float(np.max(np.abs(X[:, penalized].T @ residual)) / n)


def lasso_then_least_squares(X: np.ndarray, y: np.ndarray, lam: float, penalized: np.ndarray,
                             settings: Optional[LassoSettings] = None,
                             warm_start: Optional[np.ndarray] = None) -> Tuple[np.ndarray, List[int], bool, np.ndarray]:
    """
    Lasso support selection followed by least squares on the support.

    Returns:
        (weights, support, refit_on_full_basis, lasso_weights)
    """
    lasso_w, _, _ = lasso_coordinate_descent(X, y, lam, penalized, settings, warm_start)
    support = [j for j in range(X.shape[1]) if (not penalized[j]) or lasso_w[j] != 0.0]
    weights = np.zeros(X.shape[1])
    if not support:
        return weights, support, False, lasso_w
    Xs = X[:, support]
    if np.linalg.matrix_rank(Xs) < len(support):
        full, *_ = np.linalg.lstsq(X, y, rcond=None)
        return full, list(range(X.shape[1])), True, lasso_w
    weights[support], *_ = np.linalg.lstsq(Xs, y, rcond=None)
    return weights, support, False, lasso_w


def select_lambda(X: np.ndarray, y: np.ndarray, penalized: np.ndarray,
                  settings: Optional[LassoSettings] = None) -> float:
    """K-fold cross-validation over a logarithmic lambda grid below lambda_max."""
    settings = settings or LassoSettings()
    lam_max = lambda_max(X, y, penalized)
    if lam_max <= 0.0:
        return 0.0
    grid = lam_max * np.logspace(0.0, -4.0, settings.cv_grid)
    n = X.shape[0]
    folds = np.array_split(np.random.default_rng(0).permutation(n), min(settings.cv_folds, n))
    errors = np.zeros(grid.shape[0])
    for fold in folds:
        train = np.setdiff1d(np.arange(n), fold)
        warm = None
        for k, lam in enumerate(grid):
            w, _, _, warm = lasso_then_least_squares(X[train], y[train], lam, penalized, settings, warm)
            errors[k] += np.mean((X[fold] @ w - y[fold]) ** 2)
    best = int(np.argmin(errors))
    ic(lam_max, grid[best])
    return float(grid[best])


def enforce_drag_positivity(X: np.ndarray, y: np.ndarray, weights: np.ndarray, support: List[int]) -> np.ndarray:
    """Refit drag weights on `support` with C_D A >= 0 on a 1 degree grid."""
    grid = drag_basis(POSITIVITY_GRID)[:, support]
    Xs = X[:, support]
    start = weights[support].copy()
    # Raising the constant term makes the start feasible
    if 0 in support:
        start[support.index(0)] -= min(0.0, float((grid @ start).min()))

    def objective(w):
        r = Xs @ w - y
        return 0.5 * r @ r, Xs.T @ r

    result = minimize(objective, start, jac=True, method="SLSQP",
                      constraints=[{"type": "ineq", "fun": lambda w: grid @ w, "jac": lambda w: grid}],
                      options={"ftol": 1e-14, "maxiter": 500})
    fitted = np.zeros_like(weights)
    fitted[support] = result.x
    return fitted


def fit_link_coefficients(projection: LinkProjection, lam: Optional[float] = None,
                          settings: Optional[LassoSettings] = None,
                          name: str = "link", report: Optional[FitReport] = None) -> np.ndarray:
    """
    Fit w0..w5 for one link.

    Args:
        projection: Reduced samples of the link
        lam: Lasso penalty; chosen by cross-validation when None

    Returns:
        Weights (6,)

    Raises:
        FitError: If there are too few samples or distinct angles
    """
    settings = settings or LassoSettings()
    alpha = projection.alpha
    if alpha.shape[0] < MIN_SAMPLES:
        raise FitError(f"link '{name}': too few samples ({alpha.shape[0]} < {MIN_SAMPLES})")
    if np.unique(np.round(alpha, 9)).shape[0] < MIN_DISTINCT_ANGLES:
        raise FitError(f"link '{name}': fewer than {MIN_DISTINCT_ANGLES} distinct angles of attack")
    if lam is not None and lam < 0:
        raise FitError(f"lambda must be non-negative, got {lam}")

    X_d = drag_basis(alpha)
    drag_penalized = np.array([False, True, True, True, True])
    lam_d = select_lambda(X_d, projection.drag_area, drag_penalized, settings) if lam is None else lam
    w_drag, support_d, refit_d, _ = lasso_then_least_squares(X_d, projection.drag_area, lam_d,
                                                             drag_penalized, settings)
    if refit_d:
        logger.warning(f"Link '{name}': drag support is rank deficient, refit on the full basis")

    cda_grid = drag_basis(POSITIVITY_GRID) @ w_drag
    if cda_grid.min() < -1e-12:
        logger.warning(f"Link '{name}': fitted drag area negative ({cda_grid.min():.3e}), refitting with constraints")
        w_drag = enforce_drag_positivity(X_d, projection.drag_area, w_drag, support_d)
        if report is not None:
            report.positivity_corrected.append(name)

    w_normal = 0.0
    lam_n = 0.0
    if projection.normal_alpha.shape[0] > 0:
        X_n = normal_basis(projection.normal_alpha)[:, None]
        normal_penalized = np.array([True])
        lam_n = select_lambda(X_n, projection.normal_area, normal_penalized, settings) if lam is None else lam
        w_n, _, _, _ = lasso_then_least_squares(X_n, projection.normal_area, lam_n, normal_penalized, settings)
        w_normal = float(w_n[0])

    if report is not None:
        report.lambdas[name] = (lam_d, lam_n)
        report.supports[name] = list(support_d)
        if refit_d:
            report.refit_full_basis.append(name)
    return np.concatenate([w_drag, [w_normal]])


def project_dataset(model: RobotModel, ds: AeroDataset) -> Dict[str, LinkProjection]:
    """Reduce dataset outputs to per-link (alpha, C_D A, C_N A) samples."""
    directions = ds.directions
    n_links = model.n_aero_links
    alpha = np.empty((len(ds), n_links))
    drag = np.empty((len(ds), n_links))
    normal = np.empty((len(ds), n_links))
    valid_normal = np.zeros((len(ds), n_links), dtype=bool)
    axes_cache: Dict[bytes, np.ndarray] = {}
    for row in range(len(ds)):
        key = ds.joints[row].tobytes()
        if key not in axes_cache:
            axes_cache[key] = link_axes_in_base(model, ds.joints[row])
        axes = axes_cache[key]
        d = directions[row]
        y = ds.outputs[row]
        cos_alpha = np.clip(axes @ d, -1.0, 1.0)
        alpha[row] = np.arccos(cos_alpha)
        drag[row] = -(y @ d)
        cross = np.cross(d[None, :], axes)
        sin_alpha = np.linalg.norm(cross, axis=1)
        ok = sin_alpha >= SIN_GUARD
        n_hat = np.zeros_like(axes)
        n_hat[ok] = np.cross(cross[ok], d[None, :]) / sin_alpha[ok][:, None]
        normal[row] = np.sum(y * n_hat, axis=1)
        valid_normal[row] = ok

    projections = {}
    for i, name in enumerate(model.aero_link_names):
        keep = valid_normal[:, i]
        projections[name] = LinkProjection(
            alpha=alpha[:, i].copy(),
            drag_area=drag[:, i].copy(),
            normal_alpha=alpha[keep, i].copy(),
            normal_area=normal[keep, i].copy(),
        )
    return projections


def fit_coefficients(model: RobotModel, ds: AeroDataset, lam: Optional[float] = None,
                     settings: Optional[LassoSettings] = None) -> Tuple[AxisymCoeffs, FitReport]:
    """
    Fit the axisymmetric model of every aerodynamic link.

    Args:
        model: Robot model the dataset was generated for
        ds: Dataset with base-frame force-area triples
        lam: Lasso penalty; per-link cross-validation when None

    Returns:
        (coefficients, report)
    """
    if len(ds) == 0:
        raise FitError("cannot fit on an empty dataset")
    if ds.n_links != model.n_aero_links or ds.n_joints != model.n_joints:
        raise FitError(f"dataset ({ds.n_joints} joints, {ds.n_links} links) does not match the model "
                       f"({model.n_joints} joints, {model.n_aero_links} aero links)")
    settings = settings or LassoSettings.from_config()
    report = FitReport()
    projections = project_dataset(model, ds)
    weights = {}
    for name, projection in projections.items():
        weights[name] = fit_link_coefficients(projection, lam, settings, name, report)
        logger.debug(f"Link '{name}' weights: {weights[name]}")
    logger.info(f"Fitted axisymmetric coefficients for {len(weights)} links")
    return AxisymCoeffs(weights=weights), report
