"""Dense primal-dual interior-point solver for small complex SDPs.

Minimizes Re tr(C X) over Hermitian PSD X subject to linear trace
equality/inequality constraints.  The complex problem is mapped onto its
real symmetric embedding (doubling the dimension), inequalities receive
nonnegative slacks appended as a diagonal block, and the resulting
standard-form problem is solved with a Mehrotra predictor-corrector
path-following iteration (XZ linearization, dense Schur complement).
Problem sizes here are tiny (real dimension <= ~150), so every factor is
dense and the arithmetic order is fixed, which keeps repeated solves
bitwise reproducible.
"""

from __future__ import annotations

import enum
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .channel import Scenario
from .errors import SolverStatusError
from .hermitian import check_hermitian, complex_from_embed, hermitize, real_embed
from .problem import JcjProblem, build_problem

GE = ">="
LE = "<="


class SdpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITER = "MaxIter"
    NUMERICAL_FAILURE = "NumericalFailure"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    step_frac: float = 0.98
    verbose: bool = False
    log_stream: object = None  # file-like; defaults to stderr when verbose


@dataclass(frozen=True)
class SdpSpec:
    """min Re tr(C X) over PSD X with trace equality/inequality rows."""

    dim: int
    objective: np.ndarray
    eq_constraints: tuple = ()
    ineq_constraints: tuple = ()  # entries (A, rhs, sense) with sense ">=" or "<="


@dataclass
class SdpSolution:
    x: np.ndarray
    status: SdpStatus
    primal_obj: float
    dual_obj: float
    residuals: dict
    iterations: int
    iterate_log: list = field(default_factory=list)


def _chol(mat):
    base = max(float(np.trace(mat)) / mat.shape[0], 1e-300)
    for jitter_frac in (0.0, 1e-12, 1e-10, 1e-8):
        try:
            shifted = mat if jitter_frac == 0.0 else mat + (jitter_frac * base) * np.eye(
                mat.shape[0]
            )
            return sla.cholesky(shifted, lower=True, check_finite=False)
        except sla.LinAlgError:
            continue
    raise sla.LinAlgError("matrix not positive definite even with jitter")


def _max_step(chol_l, dmat):
    """Largest alpha with M + alpha*dM PSD, via L^{-1} dM L^{-T}."""
    m1 = sla.solve_triangular(chol_l, dmat, lower=True, check_finite=False)
    m2 = sla.solve_triangular(chol_l, m1.T, lower=True, check_finite=False).T
    lam_min = float(np.linalg.eigvalsh(0.5 * (m2 + m2.T))[0])
    if lam_min >= -1e-300:
        return np.inf
    return 1.0 / (-lam_min)


class _NumericalBreakdown(Exception):
    pass


class _StepBreakdown(Exception):
    """Non-finite search direction; stop at the current iterate."""


def _backtrack_psd(mat, dmat, alpha, tries=8):
    """Shrink alpha until mat + alpha*dmat admits a Cholesky factor."""
    for _ in range(tries):
        try:
            sla.cholesky(mat + alpha * dmat, lower=True, check_finite=False)
            return alpha
        except sla.LinAlgError:
            alpha *= 0.5
    return None


def _solve_standard(c, a_stack, b, opts):
    """Standard-form solve: min <C,X> s.t. <A_i,X>=b_i, X PSD (one dense block).

    Returns (status, X, y, Z, iterations, log) where log is a list of per-
    iterate dicts.
    """
    m = len(b)
    n = c.shape[0]
    eye = np.eye(n)
    xi = max(10.0, np.sqrt(n))
    x = xi * eye.copy()
    z = max(10.0, np.sqrt(n), np.linalg.norm(c)) * eye.copy()
    y = np.zeros(m)
    log = []
    status = SdpStatus.MAX_ITER
    certificate = None
    norm_b = np.linalg.norm(b)
    norm_c = np.linalg.norm(c)
    tau = opts.step_frac
    best_rel_p = np.inf
    stall = 0

    it = 0
    for it in range(1, opts.max_iter + 1):
        ax = np.einsum("jkl,kl->j", a_stack, x, optimize=True)
        rp = b - ax
        aty = np.einsum("j,jkl->kl", y, a_stack, optimize=True)
        rd = c - z - aty
        pobj = float(np.sum(c * x))
        dobj = float(b @ y)
        gap = float(np.sum(x * z))
        mu = gap / n
        rel_gap = gap / (1.0 + abs(pobj) + abs(dobj))
        rel_p = float(np.linalg.norm(rp)) / (1.0 + norm_b)
        rel_d = float(np.linalg.norm(rd)) / (1.0 + norm_c)
        log.append(
            {
                "iter": it,
                "primal": pobj,
                "dual": dobj,
                "gap": gap,
                "rel_gap": rel_gap,
                "rel_p": rel_p,
                "rel_d": rel_d,
            }
        )
        if rel_gap <= opts.gap_tol and rel_p <= opts.feas_tol and rel_d <= opts.feas_tol:
            status = SdpStatus.OPTIMAL
            break
        # Stall detection: condition of the Schur system can floor the
        # attainable feasibility above feas_tol; accept the iterate at a
        # looser bar instead of burning the remaining iterations.
        if rel_p < best_rel_p * 0.9:
            best_rel_p = rel_p
            stall = 0
        else:
            stall += 1
        if stall >= 15 and rel_gap <= 100.0 * opts.gap_tol and rel_p <= 1e-5:
            status = SdpStatus.OPTIMAL
            break

        # Divergent dual: test for a primal-infeasibility certificate
        # (an improving ray y with A*(y) <= 0 and b'y > 0).
        # A nearly primal-feasible PSD iterate rules infeasibility out, so
        # the certificate is only consulted while the primal residual is
        # still substantial; this guards against spurious rays on feasible
        # but ill-conditioned instances.
        y_norm = float(np.linalg.norm(y))
        if y_norm > 1e4 and dobj > 0.0 and rel_p > 1e-6:
            y_hat = y / y_norm
            s_ray = -np.einsum("j,jkl->kl", y_hat, a_stack, optimize=True)
            lam = float(np.linalg.eigvalsh(0.5 * (s_ray + s_ray.T))[0])
            obj_ray = float(b @ y_hat)
            # The ray matrix is built from unit-norm data, so a genuine
            # certificate has min eigenvalue nonnegative up to roundoff;
            # anything merely "small" can be vacuous once the primal scale
            # is large, and must not be accepted.
            if lam >= -1e-12 and obj_ray >= 1e-6:
                status = SdpStatus.INFEASIBLE
                certificate = {"ray_min_eig": lam, "ray_obj": obj_ray}
                break

        try:
            lx = _chol(x)
            lz = _chol(z)
            zinv = sla.cho_solve((lz, True), eye, check_finite=False)
            zinv = 0.5 * (zinv + zinv.T)
            u = np.einsum("kl,jlm,mn->jkn", x, a_stack, zinv, optimize=True)
            schur = np.einsum("ikl,jlk->ij", a_stack, u, optimize=True)
            # The Schur complement loses rank as X approaches a low-rank
            # optimum; a small diagonal shift keeps the factorization usable.
            reg = 1e-13 * max(float(np.max(np.abs(np.diagonal(schur)))), 1e-300)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sla.LinAlgWarning)
                lu = sla.lu_factor(schur + reg * np.eye(m), check_finite=False)
        except (sla.LinAlgError, ValueError) as exc:
            raise _NumericalBreakdown(str(exc)) from exc

        def direction(rc):
            g = (rc - x @ rd) @ zinv
            rhs = rp - np.einsum("ikl,lk->i", a_stack, g, optimize=True)
            dy = sla.lu_solve(lu, rhs, check_finite=False)
            # One round of iterative refinement; the Schur matrix is nearly
            # singular close to a low-rank optimum and raw LU error in dy
            # caps the achievable primal feasibility.
            resid = rhs - schur @ dy
            dy = dy + sla.lu_solve(lu, resid, check_finite=False)
            dz = rd - np.einsum("j,jkl->kl", dy, a_stack, optimize=True)
            dx = (rc - x @ dz) @ zinv
            if not np.all(np.isfinite(dx)) or not np.all(np.isfinite(dy)):
                raise _StepBreakdown()
            return 0.5 * (dx + dx.T), dy, dz

        try:
            xz = x @ z
            dxa, dya, dza = direction(-xz)
            ap = min(1.0, tau * _max_step(lx, dxa))
            ad = min(1.0, tau * _max_step(lz, dza))
            mu_aff = float(np.sum((x + ap * dxa) * (z + ad * dza))) / n
            sigma = min(1.0, max(1e-12, (max(mu_aff, 0.0) / mu) ** 3))

            dx, dy, dz = direction(sigma * mu * eye - xz - dxa @ dza)
            ap = min(1.0, tau * _max_step(lx, dx))
            ad = min(1.0, tau * _max_step(lz, dz))
        except (_StepBreakdown, np.linalg.LinAlgError):
            break
        if ap < 1e-12 and ad < 1e-12:
            break
        # Eigenvalue-based step lengths can overshoot on ill-conditioned
        # iterates; back off until both updates factor.
        ap = _backtrack_psd(x, dx, ap)
        ad = _backtrack_psd(z, dz, ad)
        if ap is None or ad is None:
            break
        x = x + ap * dx
        y = y + ad * dy
        z = z + ad * dz

    if status is SdpStatus.MAX_ITER and log:
        last = log[-1]
        if last["rel_gap"] <= 100.0 * opts.gap_tol and last["rel_p"] <= 1e-5:
            status = SdpStatus.OPTIMAL
    return status, x, y, z, it, log, certificate


def solve(spec: SdpSpec, opts: SolverOptions | None = None) -> SdpSolution:
    """Solve a complex SDP spec; see module docstring for the method."""
    opts = opts or SolverOptions()
    c = check_hermitian(spec.objective)
    if c.shape[0] != spec.dim:
        raise ValueError("objective dimension mismatch")
    if spec.dim < 1:
        raise ValueError("dim must be >= 1")
    n_con = len(spec.eq_constraints) + len(spec.ineq_constraints)
    if n_con == 0:
        raise ValueError("at least one constraint is required")

    rows = []  # (embedded A without slack, embedded rhs, slack sign or 0)
    for a, rhs in spec.eq_constraints:
        a = check_hermitian(a)
        if a.shape[0] != spec.dim:
            raise ValueError("constraint dimension mismatch")
        rows.append((real_embed(a), 2.0 * float(rhs), 0))
    for a, rhs, sense in spec.ineq_constraints:
        a = check_hermitian(a)
        if a.shape[0] != spec.dim:
            raise ValueError("constraint dimension mismatch")
        if sense == LE:
            a, rhs = -a, -rhs
        elif sense != GE:
            raise ValueError(f"unknown sense {sense!r}")
        rows.append((real_embed(a), 2.0 * float(rhs), 1))

    ns = 2 * spec.dim
    nl = sum(1 for _, _, s in rows if s)
    n = ns + nl
    m = len(rows)

    a_stack = np.zeros((m, n, n))
    b_std = np.zeros(m)
    slack_idx = 0
    for j, (ae, be, has_slack) in enumerate(rows):
        nf = np.linalg.norm(ae)
        if nf == 0.0:
            raise ValueError(f"constraint {j} has a zero matrix")
        a_stack[j, :ns, :ns] = ae / nf
        b_std[j] = be / nf
        if has_slack:
            pos = ns + slack_idx
            a_stack[j, pos, pos] = -1.0 / nf
            slack_idx += 1

    beta = float(np.max(np.abs(b_std)))
    if beta <= 0.0:
        beta = 1.0
    b_std = b_std / beta

    c_std = np.zeros((n, n))
    c_std[:ns, :ns] = real_embed(c)

    try:
        status, x_std, y, z_std, iters, log, cert = _solve_standard(
            c_std, a_stack, b_std, opts
        )
    except _NumericalBreakdown as exc:
        return SdpSolution(
            x=np.zeros((spec.dim, spec.dim), dtype=complex),
            status=SdpStatus.NUMERICAL_FAILURE,
            primal_obj=np.nan,
            dual_obj=np.nan,
            residuals={"error": str(exc)},
            iterations=0,
            iterate_log=[],
        )

    x_c = beta * complex_from_embed(x_std[:ns, :ns])
    primal_obj = float(np.sum(c * x_c.T).real)
    dual_obj = 0.5 * beta * float(b_std @ y) * 1.0
    # Undo the rhs scaling in the logged objective values as well.
    scaled_log = [
        {
            **entry,
            "primal": 0.5 * beta * entry["primal"],
            "dual": 0.5 * beta * entry["dual"],
            "gap": 0.5 * beta * entry["gap"],
        }
        for entry in log
    ]

    res = _complex_residuals(spec, x_c)
    if cert is not None:
        res.update(cert)
    sol = SdpSolution(
        x=x_c,
        status=status,
        primal_obj=primal_obj,
        dual_obj=dual_obj,
        residuals=res,
        iterations=iters,
        iterate_log=scaled_log,
    )
    if opts.verbose:
        stream = opts.log_stream or sys.stderr
        for entry in scaled_log:
            stream.write(
                "iter {iter:3d}  primal {primal: .9e}  dual {dual: .9e}  "
                "gap {gap:.3e}  rp {rel_p:.3e}  rd {rel_d:.3e}\n".format(**entry)
            )
        stream.write(f"status {status}\n")
    return sol


def _complex_residuals(spec: SdpSpec, x_c: np.ndarray) -> dict:
    """Worst relative violation of the original complex constraints."""
    eq_res = 0.0
    for a, rhs in spec.eq_constraints:
        v = float(np.sum(np.asarray(a) * x_c.T).real)
        eq_res = max(eq_res, abs(v - rhs) / (1.0 + abs(rhs)))
    ineq_res = 0.0
    for a, rhs, sense in spec.ineq_constraints:
        v = float(np.sum(np.asarray(a) * x_c.T).real)
        viol = (rhs - v) if sense == GE else (v - rhs)
        ineq_res = max(ineq_res, max(0.0, viol) / (1.0 + abs(rhs)))
    lam_min = float(np.linalg.eigvalsh(x_c)[0])
    return {"eq": eq_res, "ineq": ineq_res, "psd_min_eig": lam_min}


def spec_from_problem(
    problem: JcjProblem,
    equality: bool = True,
) -> SdpSpec:
    """Translate assembled constraint data into a solver spec.

    ``equality=True`` pins the rate and jamming rows to their thresholds
    (the mode used by the full scheme, which keeps the leading eigenvector
    of the solution on the constraint surface); ``False`` keeps the plain
    relaxation inequalities.
    """
    objective = np.eye(problem.dim, dtype=complex)
    eq, ineq = [], []
    target = eq if equality else ineq
    for a, g in list(problem.a1) + list(problem.a2):
        target.append((a, g) if equality else (a, g, GE))
    for a, g in problem.a3:
        ineq.append((a, g, GE))
    return SdpSpec(
        dim=problem.dim,
        objective=objective,
        eq_constraints=tuple(eq),
        ineq_constraints=tuple(ineq),
    )


def solve_relaxation(
    scenario: Scenario,
    opts: SolverOptions | None = None,
    reduced: bool | None = None,
    equality: bool = True,
):
    """Solve the plain relaxation (no cyclic-diagonal rows).

    Returns (problem, solution).  The default equality sense matches the
    problem the full scheme actually relaxes, so the optimal value is
    the reference power in the error metrics: it lower-bounds every
    rank-1 design with the thresholds met exactly.  ``equality=False``
    gives the looser original-inequality bound instead.
    """
    if reduced is None:
        reduced = scenario.n_ue >= 1
    problem = build_problem(scenario, eta=None, reduced=reduced)
    if not problem.a1 and not problem.a2:
        dim = problem.dim if problem.dim else 1
        sol = SdpSolution(
            x=np.zeros((dim, dim), dtype=complex),
            status=SdpStatus.OPTIMAL,
            primal_obj=0.0,
            dual_obj=0.0,
            residuals={"eq": 0.0, "ineq": 0.0, "psd_min_eig": 0.0},
            iterations=0,
        )
        return problem, sol
    sol = solve(spec_from_problem(problem, equality=equality), opts)
    return problem, sol


def lower_bound_power(
    scenario: Scenario,
    opts: SolverOptions | None = None,
    equality: bool = True,
) -> float:
    """Optimal transmit power (mW) of the plain relaxation."""
    _, sol = solve_relaxation(scenario, opts, equality=equality)
    if sol.status is not SdpStatus.OPTIMAL:
        raise SolverStatusError(sol.status, f"relaxation solve failed: {sol.status}")
    return sol.primal_obj
