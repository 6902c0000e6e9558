"""Experiment drivers behind the command-line tool.

Each driver returns plain rows (tuples of numbers and strings) together with
the column names, so the CLI only has to format them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import MAP_SWITCH, MMSE_SWITCH, bounds_table
from .dictionary import band_layout, make_dictionary, random_orthogonal
from .estimation import BandEstimate, LambdaSchedule, estimate_bands, params_from_estimates
from .exact import _map_pick, enumerate_supports, masks_to_bool
from .model import ModelParams, make_rng, sample_signal
from .risk import map_risk, mmse_risk, oracle_risk, risk_report
from .shrinkage import log_odds, map_shrink, mmse_shrink, oracle_estimate, shrinkage_curve

ESTIMATOR_ORDER = ("oracle", "map", "mmse")


@dataclass(frozen=True)
class ExperimentConfig:
    size: tuple = (64, 64)
    levels: int = 3
    p: float = 0.1
    sigma_x: float = 1.0
    sigmas: tuple = (0.1, 0.25, 0.5, 0.75, 1.0)
    trials: int = 200
    seed: int = 0
    estimators: tuple = ESTIMATOR_ORDER

    def __post_init__(self):
        object.__setattr__(self, "size", tuple(int(v) for v in self.size))
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        if len(self.size) != 2 or min(self.size) <= 0:
            raise ValueError("size must be two positive integers")
        if not self.sigmas or any(not s > 0 for s in self.sigmas):
            raise ValueError("sigma grid values must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.estimators) - set(ESTIMATOR_ORDER)
        if unknown or not self.estimators:
            raise ValueError(f"unknown estimators {sorted(unknown)}")
        step = 2 ** self.levels
        if self.levels < 1 or any(n % step for n in self.size):
            raise ValueError(f"size {self.size} is not divisible by 2**levels = {step}")


def synthetic_columns(estimators) -> list[str]:
    cols = ["sigma"]
    for est in estimators:
        cols += [f"{est}_empirical", f"{est}_theoretical"]
    return cols


def run_synthetic(config: ExperimentConfig) -> list[tuple]:
    """Relative MSE per sigma: empirical errors and conditional risks, averaged over trials.

    Both are divided by the noise energy ``n sigma^2``. Trial ``t`` draws the
    same support and coefficients at every sigma (only the noise scale
    changes), which keeps the curves comparable across the grid.
    """
    D = make_dictionary("db5-2d", shape=config.size, levels=config.levels)
    n = D.length
    rows = []
    for sigma in config.sigmas:
        params = ModelParams.homoscedastic(n, config.p, config.sigma_x, sigma)
        emp = {e: 0.0 for e in config.estimators}
        theo = {e: 0.0 for e in config.estimators}
        for t in range(config.trials):
            support, x, y = sample_signal(D, params, config.seed, t)
            beta = D.analyze(y)
            for est in config.estimators:
                if est == "oracle":
                    xhat = oracle_estimate(beta, support, params).xhat
                    risk = oracle_risk(support, params)
                elif est == "map":
                    xhat = map_shrink(beta, params).xhat
                    risk = map_risk(beta, params)
                else:
                    xhat = mmse_shrink(beta, params).xhat
                    risk = mmse_risk(beta, params)
                emp[est] += float(np.sum((xhat - x) ** 2))
                theo[est] += float(risk)
        norm = config.trials * n * sigma ** 2
        row = [sigma]
        for est in config.estimators:
            row += [emp[est] / norm, theo[est] / norm]
        rows.append(tuple(row))
    return rows


def psnr(estimate, reference, peak: float = 255.0) -> float:
    mse = float(np.mean((np.asarray(estimate, float) - np.asarray(reference, float)) ** 2))
    return float("inf") if mse == 0 else 10.0 * np.log10(peak ** 2 / mse)


def add_noise(image, sigma: float, seed) -> np.ndarray:
    """White Gaussian noise in float; no rounding or clipping."""
    image = np.asarray(image, dtype=float)
    return image + sigma * make_rng(seed, "image-noise").standard_normal(image.shape)


@dataclass
class DenoiseResult:
    output: np.ndarray
    method: str
    estimates: list
    band_rows: list = field(default_factory=list)
    psnr_input: float | None = None
    psnr_output: float | None = None


DENOISE_COLUMNS = ["band", "n", "k_star", "p_hat", "sigma_hat", "risk_map", "risk_mmse",
                   "sq_error"]


def denoise_image(noisy, sigma: float, method: str = "mmse", levels: int = 3,
                  lambda0: float = 2.0, reference=None) -> DenoiseResult:
    """Band-wise parameter estimation followed by MAP or MMSE shrinkage.

    ``reference`` (the clean image, when known) enables PSNR and the
    per-band squared errors of the chosen estimate.
    """
    if method not in ("map", "mmse"):
        raise ValueError("image denoising supports method 'map' or 'mmse'")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    noisy = np.asarray(noisy, dtype=float)
    if noisy.ndim != 2:
        raise ValueError("image must be 2-D")
    D = make_dictionary("db5-2d", shape=noisy.shape, levels=levels)
    layout = band_layout(D)
    beta = D.analyze(noisy)
    estimates = estimate_bands(beta, layout, sigma, LambdaSchedule.default(layout, lambda0))
    params = params_from_estimates(estimates, layout, sigma)
    shrink = map_shrink if method == "map" else mmse_shrink
    xhat = shrink(beta, params).xhat
    output = np.clip(D.synthesize(xhat), 0.0, 255.0)

    report = risk_report(beta, params, layout)
    ref_coeffs = D.analyze(reference) if reference is not None else None
    rows = []
    for band, est in zip(layout, estimates):
        r = report.per_band[band.name]
        err = (float(np.sum((xhat[band.indices] - ref_coeffs[band.indices]) ** 2))
               if ref_coeffs is not None else float("nan"))
        rows.append((band.name, est.n, est.k_star, est.p_hat, est.sigma_hat,
                     r["mse_map"], r["mse_mmse"], err))
    result = DenoiseResult(output, method, estimates, rows)
    if reference is not None:
        result.psnr_input = psnr(noisy, reference)
        result.psnr_output = psnr(output, reference)
    return result


ESTIMATE_COLUMNS = ["band", "n", "k_star", "p_hat", "sigma_hat", "objective"]


def estimate_rows(estimates: list[BandEstimate]) -> list[tuple]:
    return [(e.band, e.n, e.k_star, e.p_hat, e.sigma_hat, e.objective) for e in estimates]


BOUNDS_COLUMNS = ["G_m", "r_star_mmse", "bound_mmse", "regime_mmse", "r_star_map", "bound_map",
                  "regime_map"]


def bounds_grid(g_min: float = 1e-4, g_max: float = 10.0, steps: int = 121) -> np.ndarray:
    """Log-spaced ``G`` grid with both regime switch points inserted."""
    if not 0 < g_min < g_max or steps < 2:
        raise ValueError("need 0 < g_min < g_max and steps >= 2")
    grid = np.geomspace(g_min, g_max, steps)
    extra = [g for g in (MMSE_SWITCH, MAP_SWITCH) if g_min <= g <= g_max]
    return np.unique(np.concatenate([grid, extra]))


def bounds_rows(grid) -> list[tuple]:
    return bounds_table(grid)


CURVE_COLUMNS = ["method", "sigma", "beta", "psi"]


def shrinkage_dump(methods, p: float, sigma_x: float, sigmas, betas) -> list[tuple]:
    rows = []
    for method in methods:
        for sigma in sigmas:
            for beta, psi in shrinkage_curve(method, p, sigma_x, sigma, betas):
                rows.append((method, float(sigma), float(beta), float(psi)))
    return rows


VALIDATE_COLUMNS = ["trial", "dictionary", "m", "err_mmse", "err_map", "err_risk_mmse",
                    "err_risk_map", "map_checked", "passed"]
VALIDATE_TOL = 1e-9
TIE_MARGIN = 1e-8


def _rel(a, b) -> float:
    a, b = np.asarray(a, float), np.asarray(b, float)
    scale = np.linalg.norm(b)
    diff = np.linalg.norm(a - b)
    return float(diff / scale) if scale > 0 else float(diff)


def random_instance(rng, m: int, dictionary: str = "random-orthogonal"):
    """A random unitary dictionary, heteroscedastic parameters and an observation."""
    if dictionary == "hadamard":
        D = make_dictionary("hadamard", n=m)
    else:
        D = make_dictionary("explicit-matrix", matrix=random_orthogonal(m, rng))
    if rng.random() < 0.5:
        params = ModelParams.homoscedastic(m, rng.uniform(0.05, 0.95), rng.uniform(0.3, 3.0),
                                           rng.uniform(0.2, 2.0))
    else:
        params = ModelParams(rng.uniform(0.05, 0.95, m), rng.uniform(0.3, 3.0, m),
                             rng.uniform(0.2, 2.0))
    _, _, y = sample_signal(D, params, int(rng.integers(2 ** 32)))
    return D, params, y


def certify(D, params: ModelParams, y) -> dict:
    """Compare every unitary closed form with full support enumeration."""
    M = D.matrix()
    beta = D.analyze(y)
    e = enumerate_supports(y, M, params)
    prob = e.probabilities
    mmse_exact = prob @ e.xhat
    risk_mmse_exact = float(prob @ (e.trace + np.sum((mmse_exact - e.xhat) ** 2, axis=1)))

    mmse = mmse_shrink(beta, params).xhat
    out = {"err_mmse": _rel(mmse, mmse_exact),
           "err_risk_mmse": _rel(mmse_risk(beta, params), risk_mmse_exact)}

    # Skip the MAP comparison when an atom sits on the decision boundary.
    map_checked = bool(np.all(np.abs(log_odds(beta, params)) >= TIE_MARGIN))
    if map_checked:
        best = _map_pick(e.masks, e.sizes, e.log_t)
        support = masks_to_bool(e.masks[best:best + 1], params.m)[0]
        xmap = e.xhat[best]
        risk_map_exact = float(prob @ (e.trace + np.sum((xmap - e.xhat) ** 2, axis=1)))
        est = map_shrink(beta, params)
        same = bool(np.array_equal(est.support, support))
        out["err_map"] = _rel(est.xhat, xmap) if same else float("inf")
        out["err_risk_map"] = _rel(map_risk(beta, params), risk_map_exact)
    else:
        out["err_map"] = out["err_risk_map"] = float("nan")
    out["map_checked"] = map_checked
    errs = [v for k, v in out.items() if k.startswith("err") and not np.isnan(v)]
    out["passed"] = all(v <= VALIDATE_TOL for v in errs)
    return out


def validate(seed: int, m: int, trials: int) -> list[tuple]:
    """Certify the closed forms on ``trials`` random instances of size ``m``.

    Every fourth trial uses the Hadamard dictionary when ``m`` is a power of two.
    """
    if not 1 <= m <= 12:
        raise ValueError("validate needs 1 <= m <= 12")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rows = []
    pow2 = m & (m - 1) == 0
    for t in range(trials):
        rng = make_rng(seed, t, "validate")
        kind = "hadamard" if pow2 and t % 4 == 3 else "random-orthogonal"
        D, params, y = random_instance(rng, m, kind)
        r = certify(D, params, y)
        rows.append((t, kind, m, r["err_mmse"], r["err_map"], r["err_risk_mmse"],
                     r["err_risk_map"], int(r["map_checked"]), int(r["passed"])))
    return rows
