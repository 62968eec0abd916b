"""Joint communication-and-jamming beamformer via an eta sweep.

For each eta in a fixed grid, the lifted power-minimization problem is
solved with the cyclic-diagonal constraints attached, the scaled leading
eigenvector of the solution is taken as a candidate stacked beamformer,
and the first candidate whose achieved constraint values sit within
tolerance of the thresholds wins (smallest eta first, plain relaxation
before that).  The cyclic-diagonal rows concentrate the solution mass
on one eigenvector; candidates that still miss the tolerance get a
damped Gauss-Newton projection onto the threshold manifold, which in
particular turns the plain relaxation's stream-wise eigenvector
composite into an essentially optimal rank-1 design whenever the
thresholds bind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Scenario
from .errors import AllEtaInfeasibleError, DegenerateSolutionError, SolverStatusError
from .hermitian import eig_hermitian
from .oracle import project_feasible
from .problem import JcjProblem, build_problem
from .sdp import SdpSolution, SdpStatus, SolverOptions, solve, spec_from_problem

# Default eta grid: fine near zero where feasibility is easy, then coarse.
DEFAULT_PHI = (0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


@dataclass(frozen=True)
class EtaSweep:
    """The eta grid searched by :func:`run_jcj`."""

    phi: tuple = DEFAULT_PHI

    def __post_init__(self):
        phi = tuple(float(v) for v in self.phi)
        if not phi:
            raise ValueError("phi must be nonempty")
        if any(not 0.0 < v < 1.0 for v in phi):
            raise ValueError(f"phi values must lie in (0, 1): {phi}")
        if any(b <= a for a, b in zip(phi, phi[1:])):
            raise ValueError("phi must be strictly increasing")
        object.__setattr__(self, "phi", phi)


@dataclass
class CandidateSolution:
    """One extracted rank-1 candidate from a solved eta instance."""

    eta: float | None
    f_hat: np.ndarray  # stacked vector, length dim of the solved problem
    f_mat: np.ndarray  # n_tx x n_s, jamming columns zero-padded under reduction
    rank1_ratio: float  # lambda_max / sum(lambda_i) of the SDP solution
    sdr_power_mw: float  # trace of the SDP solution
    error: float | None = None


@dataclass
class Beamformer:
    """Final beamformer with per-eta diagnostics."""

    f: np.ndarray  # n_tx x n_s
    power_mw: float
    chosen_eta: float | None
    per_eta_errors: list = field(default_factory=list)  # (eta, error or None, status)
    candidate: CandidateSolution | None = None
    equality_mode: bool | None = None  # which constraint sense produced f


def _phase_fix(vec: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the largest-magnitude entry is real positive."""
    idx = int(np.argmax(np.abs(vec)))
    pivot = vec[idx]
    if pivot == 0:
        return vec
    return vec * (np.abs(pivot) / pivot)


def extract_candidate(
    solution: SdpSolution,
    n_tx: int,
    n_ue: int,
    n_uav: int,
    reduced: bool = True,
    eta: float | None = None,
) -> CandidateSolution:
    """Scaled leading eigenvector of an optimal SDP solution, reshaped.

    The stacked vector is cut into length-n_tx chunks, one per stream;
    under the reduced build only the UE streams are present and the
    jamming columns come back as zeros.
    """
    if solution.status is not SdpStatus.OPTIMAL:
        raise SolverStatusError(solution.status, "cannot extract from a non-optimal solve")
    eig = eig_hermitian(solution.x)
    lam_max = float(eig.values[0])
    if lam_max <= 0.0:
        raise DegenerateSolutionError(
            f"leading eigenvalue {lam_max:.3e} is not positive"
        )
    f_hat = _phase_fix(np.sqrt(lam_max) * eig.vectors[:, 0])
    n_streams = n_ue if reduced else n_ue + n_uav
    if f_hat.size != n_streams * n_tx:
        raise ValueError(
            f"solution dimension {f_hat.size} != {n_streams} streams x {n_tx} antennas"
        )
    f_mat = np.zeros((n_tx, n_ue + n_uav), dtype=complex)
    for i in range(n_streams):
        f_mat[:, i] = f_hat[i * n_tx : (i + 1) * n_tx]
    total = float(np.sum(np.clip(eig.values, 0.0, None)))
    return CandidateSolution(
        eta=eta,
        f_hat=f_hat,
        f_mat=f_mat,
        rank1_ratio=lam_max / total if total > 0 else 0.0,
        sdr_power_mw=float(np.trace(solution.x).real),
    )


def score_candidate(
    cand: CandidateSolution,
    problem: JcjProblem,
    relative: bool = True,
    equality: bool = True,
) -> float:
    """Worst deviation of achieved constraint values from their thresholds.

    Achieved value for row (A, gamma) is Re(f^H A f).  Deviations are
    measured relative to |gamma| by default: the rate and jamming
    right-hand sides differ by orders of magnitude in mW, and an absolute
    max would let the larger one dominate the selection.  With
    ``equality=False`` the rows are lower bounds, so only the shortfall
    gamma - achieved counts; exceeding a threshold is not an error.
    """
    f = cand.f_hat
    if f.size != problem.dim:
        raise ValueError(f"candidate dim {f.size} != problem dim {problem.dim}")
    worst = 0.0
    for a, gamma in list(problem.a1) + list(problem.a2):
        achieved = float(np.vdot(f, a @ f).real)
        dev = abs(gamma - achieved) if equality else max(gamma - achieved, 0.0)
        if relative:
            dev /= abs(gamma)
        worst = max(worst, dev)
    return worst


def composite_candidate(
    solution: SdpSolution,
    n_tx: int,
    n_ue: int,
    n_uav: int,
    reduced: bool = True,
    eta: float | None = None,
) -> CandidateSolution:
    """Stream-wise dominant-eigenvector candidate from a solved instance.

    When the solution splits its mass over several eigenvectors, plain
    truncation drops whole stream blocks (a rank-2 solution typically
    carries one served user per eigenvector).  Taking each stream's
    block from whichever eigenvector holds the most mass there yields a
    vector that misses no stream, which is a far better start for the
    Gauss-Newton refinement than the global truncation.
    """
    if solution.status is not SdpStatus.OPTIMAL:
        raise SolverStatusError(solution.status, "cannot extract from a non-optimal solve")
    eig = eig_hermitian(solution.x)
    n_streams = n_ue if reduced else n_ue + n_uav
    dim = n_streams * n_tx
    if solution.x.shape[0] != dim:
        raise ValueError(
            f"solution dimension {solution.x.shape[0]} != {n_streams} streams x {n_tx} antennas"
        )
    f_hat = np.zeros(dim, dtype=complex)
    for i in range(n_streams):
        blk = slice(i * n_tx, (i + 1) * n_tx)
        masses = [
            lam * float(np.linalg.norm(eig.vectors[blk, j]) ** 2)
            for j, lam in enumerate(np.clip(eig.values, 0.0, None))
        ]
        j = int(np.argmax(masses))
        f_hat[blk] = np.sqrt(max(eig.values[j], 0.0)) * eig.vectors[blk, j]
    f_hat = _phase_fix(f_hat)
    f_mat = np.zeros((n_tx, n_ue + n_uav), dtype=complex)
    for i in range(n_streams):
        f_mat[:, i] = f_hat[i * n_tx : (i + 1) * n_tx]
    total = float(np.sum(np.clip(eig.values, 0.0, None)))
    lam_max = float(eig.values[0])
    return CandidateSolution(
        eta=eta,
        f_hat=f_hat,
        f_mat=f_mat,
        rank1_ratio=lam_max / total if total > 0 else 0.0,
        sdr_power_mw=float(np.trace(solution.x).real),
    )


def refine_candidate(
    cand: CandidateSolution,
    problem: JcjProblem,
) -> CandidateSolution:
    """Gauss-Newton projection of a candidate onto the threshold manifold.

    Eigenvector truncation of a not-quite-rank-1 solution lands near but
    not on the surface where every constraint row meets its threshold
    exactly; a few Newton steps close that gap while barely moving the
    vector.  Returns a new unscored candidate; the projection can fail
    to converge from a poor start, which the caller detects by scoring.
    """
    rows = list(problem.a1) + list(problem.a2)
    if not rows:
        return cand
    f_hat = _phase_fix(project_feasible(cand.f_hat, rows))
    n_tx = cand.f_mat.shape[0]
    f_mat = np.zeros_like(cand.f_mat)
    for i in range(f_hat.size // n_tx):
        f_mat[:, i] = f_hat[i * n_tx : (i + 1) * n_tx]
    return CandidateSolution(
        eta=cand.eta,
        f_hat=f_hat,
        f_mat=f_mat,
        rank1_ratio=cand.rank1_ratio,
        sdr_power_mw=cand.sdr_power_mw,
    )


def _run_sweep(
    scenario: Scenario,
    sweep: EtaSweep,
    opts: SolverOptions | None,
    equality: bool,
    relative_error: bool,
    reduced: bool,
    include_relaxation: bool,
    selection_tol: float,
    refine: bool,
) -> Beamformer:
    etas: list[float | None] = list(sweep.phi)
    if include_relaxation:
        etas.insert(0, None)
    per_eta = []
    candidates: list[CandidateSolution] = []
    for eta in etas:
        problem = build_problem(scenario, eta=eta, reduced=reduced)
        sol = solve(spec_from_problem(problem, equality=equality), opts)
        if sol.status is not SdpStatus.OPTIMAL:
            per_eta.append((eta, None, sol.status))
            # The cyclic-diagonal rows only shrink the feasible set, so an
            # infeasible plain relaxation dooms the entire sweep.
            if eta is None and sol.status is SdpStatus.INFEASIBLE:
                raise AllEtaInfeasibleError([(e, s) for e, _, s in per_eta])
            continue
        try:
            cand = extract_candidate(
                sol, scenario.n_tx, scenario.n_ue, scenario.n_uav,
                reduced=reduced, eta=eta,
            )
        except DegenerateSolutionError:
            per_eta.append((eta, None, SdpStatus.NUMERICAL_FAILURE))
            continue
        cand.error = score_candidate(
            cand, problem, relative=relative_error, equality=equality
        )
        if refine and equality and cand.error > selection_tol:
            starts = [cand]
            if cand.rank1_ratio < 0.999:
                starts.append(
                    composite_candidate(
                        sol, scenario.n_tx, scenario.n_ue, scenario.n_uav,
                        reduced=reduced, eta=eta,
                    )
                )
            for start in starts:
                refined = refine_candidate(start, problem)
                refined.error = score_candidate(
                    refined, problem, relative=relative_error, equality=equality
                )
                if refined.error < cand.error:
                    cand = refined
                if cand.error <= selection_tol:
                    break
        per_eta.append((eta, cand.error, sol.status))
        candidates.append(cand)
    best = None
    for cand in candidates:
        if cand.error <= selection_tol:
            best = cand
            break
    if best is None and candidates:
        best = min(candidates, key=lambda c: c.error)
    if best is None:
        raise AllEtaInfeasibleError([(e, s) for e, _, s in per_eta])
    return Beamformer(
        f=best.f_mat,
        power_mw=float(np.sum(np.abs(best.f_mat) ** 2)),
        chosen_eta=best.eta,
        per_eta_errors=per_eta,
        candidate=best,
        equality_mode=equality,
    )


def run_jcj(
    scenario: Scenario,
    sweep: EtaSweep | None = None,
    opts: SolverOptions | None = None,
    equality: bool | None = None,
    relative_error: bool = True,
    reduced: bool = True,
    include_relaxation: bool = True,
    selection_tol: float = 1e-4,
    refine: bool = True,
) -> Beamformer:
    """Full scheme: sweep eta, keep the best-scoring rank-1 candidate.

    The plain relaxation without cyclic-diagonal rows enters the
    comparison first (``include_relaxation``): when its solution is
    already rank 1, as in the single-user case, truncating it is exact
    and every eta value would only inflate the power.  Selection takes
    the first candidate in sweep order whose score is within
    ``selection_tol`` and falls back to the overall minimum, so among
    essentially exact candidates the cheapest (smallest-eta) one wins
    rather than whichever hits the smallest rounding error.  Candidates
    that miss the tolerance get one Gauss-Newton refinement pass
    (``refine``) before scoring.  Raises AllEtaInfeasibleError when no
    instance yields an optimal solve.

    ``equality=None`` (default) sweeps with the threshold rows as
    equalities; if no candidate meets the tolerance, it sweeps again
    with the original inequalities and keeps the better result.  The
    equality form loses nothing when the thresholds bind at the optimum,
    but it can be far costlier or genuinely infeasible when some
    constraints hold with slack there, as in overloaded scenarios where
    the serving beams alone already over-jam every UAV.
    """
    if scenario.n_ue < 1:
        raise ValueError("run_jcj needs at least one UE; use run_jamming_only")
    if equality is not None:
        return _run_sweep(
            scenario, sweep or EtaSweep(), opts, equality,
            relative_error, reduced, include_relaxation, selection_tol, refine,
        )
    try:
        eq_bf = run_jcj(
            scenario, sweep, opts, equality=True,
            relative_error=relative_error, reduced=reduced,
            include_relaxation=include_relaxation,
            selection_tol=selection_tol, refine=refine,
        )
    except AllEtaInfeasibleError:
        eq_bf = None
    if eq_bf is not None and eq_bf.candidate.error <= selection_tol:
        return eq_bf
    try:
        ge_bf = run_jcj(
            scenario, sweep, opts, equality=False,
            relative_error=relative_error, reduced=reduced,
            include_relaxation=include_relaxation,
            selection_tol=selection_tol, refine=refine,
        )
    except AllEtaInfeasibleError:
        if eq_bf is not None:
            return eq_bf
        raise
    if eq_bf is not None and eq_bf.candidate.error <= ge_bf.candidate.error:
        return eq_bf
    return ge_bf


def run_jamming_only(
    scenario: Scenario,
    opts: SolverOptions | None = None,
) -> Beamformer:
    """Jamming-only design for scenarios with no served UEs.

    Solves the plain relaxation at full size; its solution is block
    diagonal with one rank-1 block per UAV stream, so each beam is the
    scaled dominant eigenvector of its own block.
    """
    if scenario.n_ue != 0:
        raise ValueError("run_jamming_only requires n_ue == 0")
    n_tx = scenario.n_tx
    f_mat = np.zeros((n_tx, scenario.n_uav), dtype=complex)
    if scenario.n_uav == 0:
        return Beamformer(f=f_mat, power_mw=0.0, chosen_eta=None)
    problem = build_problem(scenario, eta=None, reduced=False)
    if not problem.a2:
        return Beamformer(f=f_mat, power_mw=0.0, chosen_eta=None)
    sol = solve(spec_from_problem(problem, equality=False), opts)
    if sol.status is not SdpStatus.OPTIMAL:
        raise SolverStatusError(sol.status, f"jamming-only solve failed: {sol.status}")
    for m in range(scenario.n_uav):
        lo = m * n_tx
        block = sol.x[lo : lo + n_tx, lo : lo + n_tx]
        eig = eig_hermitian(block)
        lam = float(eig.values[0])
        if lam > 0.0:
            f_mat[:, m] = _phase_fix(np.sqrt(lam) * eig.vectors[:, 0])
    return Beamformer(
        f=f_mat,
        power_mw=float(np.sum(np.abs(f_mat) ** 2)),
        chosen_eta=None,
        per_eta_errors=[(None, None, sol.status)],
    )
