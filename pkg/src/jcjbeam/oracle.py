"""Brute-force reference optimizer for tiny instances.

Searches directly over the stacked beamforming vector with a penalized
multi-start quasi-Newton descent, then projects each candidate onto the
constraint manifold with Gauss-Newton steps.  Independent of the SDP
pipeline by construction, so agreement between the two is evidence, not
circularity.  Intended for desk-scale dimensions only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channel import Scenario
from .problem import build_problem

MAX_ORACLE_DIM = 8
FEAS_RTOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    best_f: np.ndarray | None
    best_power_mw: float
    starts_tried: int
    feasible_found: bool


def _pack(f: np.ndarray) -> np.ndarray:
    return np.concatenate([f.real, f.imag])


def _unpack(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def _residuals(f: np.ndarray, rows) -> np.ndarray:
    """Relative equality residuals (achieved - target)/|target| per row."""
    return np.array(
        [(float(np.vdot(f, a @ f).real) - g) / abs(g) for a, g in rows]
    )


def project_feasible(f: np.ndarray, rows, iters: int = 60) -> np.ndarray:
    """Damped Gauss-Newton projection onto the equality-constraint manifold.

    Steps are backtracked until the residual norm decreases, so the
    iteration cannot oscillate away from a poor start; it stops early
    when no damping level helps.
    """
    res = _residuals(f, rows)
    norm = float(np.linalg.norm(res))
    for _ in range(iters):
        if np.max(np.abs(res)) < 1e-13:
            break
        # d/df of f^H A f is 2 A f (real parametrization).
        jac = np.stack(
            [_pack(2.0 * (a @ f) / abs(g)) for a, g in rows]
        )
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        scale = 1.0
        for _ in range(30):
            trial = _unpack(_pack(f) + scale * step)
            trial_res = _residuals(trial, rows)
            trial_norm = float(np.linalg.norm(trial_res))
            if trial_norm < norm * (1.0 - 1e-4 * scale):
                break
            scale *= 0.5
        else:
            break
        f, res, norm = trial, trial_res, trial_norm
    return f


def oracle_solve(
    scenario: Scenario,
    n_starts: int = 64,
    budget: int = 8,
    seed: int = 0,
    max_dim: int = MAX_ORACLE_DIM,
) -> OracleResult:
    """Best rank-1 beamforming vector found by multi-start penalty descent.

    ``budget`` counts penalty-doubling rounds per start.  Results are
    deterministic for fixed arguments; ties in power break toward the
    lower start index.  ``feasible_found=False`` is a valid outcome.
    """
    problem = build_problem(scenario, eta=None, reduced=scenario.n_ue >= 1)
    rows = list(problem.a1) + list(problem.a2)
    dim = problem.dim
    if dim > max_dim:
        raise ValueError(f"oracle dimension {dim} exceeds the cap {max_dim}")
    if not rows:
        return OracleResult(
            best_f=np.zeros(dim, dtype=complex),
            best_power_mw=0.0,
            starts_tried=0,
            feasible_found=True,
        )

    # Crude scale so starts begin near the feasible power level.
    scale = np.sqrt(
        max(g / max(np.linalg.norm(a), 1e-300) for a, g in rows) / max(dim, 1)
    )
    best_f = None
    best_power = np.inf
    for start in range(n_starts):
        rng = np.random.Generator(np.random.Philox(key=np.uint64([seed, start])))
        x = scale * rng.normal(size=2 * dim)
        rho = 1e4
        for _ in range(budget):
            def objective(xr, rho=rho):
                f = _unpack(xr)
                power = float(np.vdot(f, f).real)
                grad = f.astype(complex).copy()
                penalty = 0.0
                for a, g in rows:
                    c = (float(np.vdot(f, a @ f).real) - g) / abs(g)
                    penalty += c * c
                    grad += rho * 2.0 * c * (a @ f) / abs(g)
                return power + rho * penalty, 2.0 * _pack(grad)

            x = minimize(
                objective, x, jac=True, method="L-BFGS-B",
                options={"maxiter": 400},
            ).x
            rho *= 2.0
        f = project_feasible(_unpack(x), rows)
        if np.max(np.abs(_residuals(f, rows))) > FEAS_RTOL:
            continue
        power = float(np.vdot(f, f).real)
        if power < best_power:
            best_power = power
            best_f = f
    return OracleResult(
        best_f=best_f,
        best_power_mw=best_power if best_f is not None else np.nan,
        starts_tried=n_starts,
        feasible_found=best_f is not None,
    )
