"""Assembly of the power-minimization SDP data from a scenario.

The lifted variable is the PSD matrix built from the stacked beamforming
vector f (all columns of F concatenated), so every constraint becomes a
trace functional:

* one rate constraint per UE (matrix ``A1``, right-hand side ``gamma1``),
* one jamming-power constraint per UAV (``A2``, ``gamma2``),
* optionally one cyclic-diagonal constraint per shift k (``A3``, rhs 0),
  which pushes the relaxed solution toward rank 1.

By default the problem is built on the leading ``n_ue * n_tx`` block only:
the optimal jamming-stream columns are provably zero, so the trailing
blocks are dropped and restored as zero columns after extraction.  The
full-size build is kept for structure-verification experiments.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channel import Scenario
from .hermitian import hermitize


def circshift_identity(size: int, shift: int) -> np.ndarray:
    """Identity with columns cyclically shifted right: P[i, (i+shift) % size] = 1."""
    if not 0 <= shift < size:
        raise ValueError(f"shift {shift} outside [0, {size})")
    p = np.zeros((size, size))
    p[np.arange(size), (np.arange(size) + shift) % size] = 1.0
    return p


@dataclass(frozen=True)
class JcjProblem:
    """Constraint data of one lifted problem instance.

    ``a1``/``a2``/``a3`` are lists of (Hermitian matrix, rhs in mW) pairs;
    ``a2_kept`` records which UAV indices survived the vacuous-constraint
    filter.  ``dim`` is the side of the matrix variable actually solved.
    """

    dim: int
    a1: tuple
    a2: tuple
    a3: tuple
    eta: float | None
    reduced: bool
    a2_kept: tuple


def _block(dim_streams: int, n_tx: int, outer: np.ndarray, stream: int) -> np.ndarray:
    """Place ``outer`` (n_tx x n_tx) on stream block ``stream`` of a
    dim_streams*n_tx square matrix."""
    a = np.zeros((dim_streams * n_tx, dim_streams * n_tx), dtype=complex)
    lo = stream * n_tx
    a[lo : lo + n_tx, lo : lo + n_tx] = outer
    return a


def build_constraint_matrices(scenario: Scenario, reduced: bool = True):
    """Rate and jamming constraint matrices with their right-hand sides.

    Returns (a1, gamma1, a2, gamma2, kept_uav_indices).  UAV constraints
    whose rhs is non-positive (receiver noise alone already suppresses the
    link) are dropped with a warning rather than raised.
    """
    n_tx = scenario.n_tx
    n_ue, n_uav, n_s = scenario.n_ue, scenario.n_uav, scenario.n_s
    if reduced and n_ue < 1:
        raise ValueError("reduced build requires at least one UE")
    n_streams = n_ue if reduced else n_s
    dim = n_streams * n_tx

    a1, gamma1 = [], []
    for n in range(n_ue):
        h = scenario.h_ue[:, n]
        outer = np.outer(h, h.conj())
        r_th = scenario.r_th[n]
        c_r = (2.0**r_th - 1.0) / 2.0**r_th
        a = np.zeros((dim, dim), dtype=complex)
        for i in range(n_streams):
            a -= c_r * _block(n_streams, n_tx, outer, i)
        a += _block(n_streams, n_tx, outer, n)
        a1.append(hermitize(a))
        gamma1.append(c_r * scenario.ues[n].noise_power_mw)

    a2, gamma2, kept = [], [], []
    for m in range(n_uav):
        uav = scenario.uavs[m]
        g = uav.eaves_power_mw * 10.0 ** (-scenario.gamma_th_db[m] / 10.0) - uav.noise_power_mw
        if g <= 0.0:
            warnings.warn(
                f"UAV {m}: jamming constraint vacuous (rhs {g:.3e} mW <= 0); dropped",
                stacklevel=2,
            )
            continue
        h = scenario.h_uav[:, m]
        outer = np.outer(h, h.conj())
        a = np.zeros((dim, dim), dtype=complex)
        for i in range(n_streams):
            a += _block(n_streams, n_tx, outer, i)
        a2.append(hermitize(a))
        gamma2.append(g)
        kept.append(m)
    return a1, gamma1, a2, gamma2, tuple(kept)


def build_eta_constraints(
    n_ue: int,
    n_tx: int,
    n_uav: int,
    eta: float,
    reduced: bool = True,
):
    """Cyclic-diagonal constraint matrices, one per shift k = 1..n_ue*n_tx-1.

    Each matrix is (P_k - eta * I) Hermitian-symmetrized, so that
    Re tr(A X) >= 0 encodes "the k-th cyclic diagonal sum of the UE block
    is at least eta times the trace".
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    if n_ue < 1:
        raise ValueError("eta constraints need at least one UE")
    k_ue = n_ue * n_tx
    dim = k_ue if reduced else (n_ue + n_uav) * n_tx
    out = []
    for k in range(1, k_ue):
        a = np.zeros((dim, dim))
        a[:k_ue, :k_ue] = circshift_identity(k_ue, k)
        a -= eta * np.eye(dim)
        out.append(hermitize(a))
    return out


def build_problem(
    scenario: Scenario,
    eta: float | None = None,
    reduced: bool = True,
) -> JcjProblem:
    """Full constraint set for one solve; ``eta=None`` omits the
    rank-1-inducing constraints (plain relaxation)."""
    a1, g1, a2, g2, kept = build_constraint_matrices(scenario, reduced=reduced)
    a3 = []
    if eta is not None:
        a3 = build_eta_constraints(
            scenario.n_ue, scenario.n_tx, scenario.n_uav, eta, reduced=reduced
        )
    n_streams = scenario.n_ue if reduced else scenario.n_s
    return JcjProblem(
        dim=n_streams * scenario.n_tx,
        a1=tuple(zip(a1, g1)),
        a2=tuple(zip(a2, g2)),
        a3=tuple((a, 0.0) for a in a3),
        eta=eta,
        reduced=reduced,
        a2_kept=kept,
    )
