"""Finitely correlated states of an infinite qubit chain.

A translation invariant state is encoded by a pair of ``b x b`` matrices
``(v1, v2)`` -- one per qubit basis state -- and an auxiliary density matrix
``rho_B`` left invariant by ``rho -> v1^H rho v1 + v2^H rho v2``.  Every
finite window of the chain then has the reduced density matrix

    <s_1..s_n| rho |t_1..t_n> = Tr[(v_{s_1}...v_{s_n})^H rho_B v_{t_1}...v_{t_n}]

Qubit basis index 0 corresponds to ``v1`` and index 1 to ``v2``.  Site 1 is
the most significant bit of the row/column index of every reduced state.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    BadSubset,
    CapExceeded,
    NotPositive,
    NullspaceDegenerate,
    NullspaceIllConditioned,
    NullspaceEmpty,
)

NULLSPACE_RTOL = 1e-9
# the state error grows like eps / gap; below this relative gap it exceeds ~1e-10
GAP_RTOL = 1e-5
CLIP_TOL = 1e-10
REJECT_TOL = 1e-8
DEFAULT_CAP = 6


def _frozen(a, dtype=None):
    a = np.array(a)
    if dtype is None:
        # keep real data real; complex only when needed
        dtype = complex if np.iscomplexobj(a) and a.imag.any() else float
    a = np.array(a.real if dtype is float else a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class KrausPair:
    """The two Kraus matrices of a one-Kraus-operator unital CP map."""

    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        v1 = _frozen(self.v1)
        v2 = _frozen(self.v2)
        if v1.ndim != 2 or v1.shape[0] != v1.shape[1] or v1.shape != v2.shape:
            raise ValueError(f"v1, v2 must be equal square matrices, got {v1.shape} and {v2.shape}")
        if v1.shape[0] < 2:
            raise ValueError("auxiliary dimension must be at least 2")
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @property
    def b(self) -> int:
        return self.v1.shape[0]

    @property
    def kraus(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.v1, self.v2)


@dataclass(frozen=True)
class AuxiliaryState:
    """Invariant auxiliary density matrix plus solver diagnostics.

    ``rank`` is the measured rank of the fixed-point map (``b**2 - 1`` for a
    unique invariant state) and ``singular_values`` its full spectrum.
    """

    rho: np.ndarray
    rank: int = -1
    singular_values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"auxiliary state must be square, got shape {rho.shape}")
        object.__setattr__(self, "rho", rho)
        if self.singular_values is not None:
            object.__setattr__(self, "singular_values", _frozen(self.singular_values, float))

    @property
    def b(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True)
class ReducedState:
    """Density matrix of ``n`` consecutive (or selected) sites."""

    n: int
    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.shape != (2**self.n, 2**self.n):
            raise ValueError(f"expected {(2**self.n,) * 2} matrix for n={self.n}, got {rho.shape}")
        object.__setattr__(self, "rho", rho)


def check_unitality(pair: KrausPair) -> float:
    """Frobenius norm of ``v1 v1^H + v2 v2^H - 1``."""
    v1, v2 = pair.kraus
    s = v1 @ v1.conj().T + v2 @ v2.conj().T
    return float(np.linalg.norm(s - np.eye(pair.b)))


def transfer(pair: KrausPair, rho: np.ndarray) -> np.ndarray:
    """Apply ``rho -> sum_j v_j^H rho v_j``; broadcasts over leading axes."""
    out = 0
    for v in pair.kraus:
        out = out + v.conj().T @ rho @ v
    return out


def fixed_point_residual(pair: KrausPair, rho: np.ndarray) -> float:
    return float(np.linalg.norm(transfer(pair, rho) - rho))


def fixed_point_matrix(pair: KrausPair) -> np.ndarray:
    """Matrix of ``L(rho) = transfer(rho) - rho`` on row-major vectorized ``b x b`` matrices.

    Column ``k`` is ``L`` applied to the ``k``-th matrix unit.
    """
    b = pair.b
    dtype = complex if np.iscomplexobj(pair.v1) or np.iscomplexobj(pair.v2) else float
    units = np.eye(b * b, dtype=dtype).reshape(b * b, b, b)
    images = transfer(pair, units) - units
    return images.reshape(b * b, b * b).T


def solve_invariant_state(
    pair: KrausPair, rtol: float = NULLSPACE_RTOL, gap_rtol: float = GAP_RTOL
) -> AuxiliaryState:
    """Unique density matrix fixed by the transfer map.

    The nullspace of the fixed-point map is found by SVD; singular values
    below ``rtol * s_max`` count as zero.  The nullspace vector is divided by
    its trace (removing the arbitrary phase), Hermitized and checked for
    positivity.

    Raises
    ------
    NullspaceDegenerate
        If the nullspace has dimension larger than one.
    NullspaceIllConditioned
        If the second-smallest singular value is below ``gap_rtol * s_max``,
        so the state cannot be resolved reliably (subclass of the above).
    NullspaceEmpty
        If no singular value is below tolerance.
    NotPositive
        If the candidate has trace ~0 or an eigenvalue below ``-1e-8``.
    """
    b = pair.b
    # real pairs stay real throughout: same nullspace, cheaper SVD
    m = fixed_point_matrix(pair)
    _, s, vh = scipy.linalg.svd(m, check_finite=False)
    tol = rtol * s[0] if s[0] > 0 else np.inf
    nullity = int(np.count_nonzero(s < tol)) if s[0] > 0 else b * b
    if nullity > 1:
        raise NullspaceDegenerate(f"nullspace dimension {nullity} (b={b})")
    if nullity == 0:
        raise NullspaceEmpty(f"smallest singular value {s[-1]:.3e} above tolerance {tol:.3e}")
    if s.size > 1 and s[-2] < gap_rtol * s[0]:
        raise NullspaceIllConditioned(f"relative spectral gap {s[-2] / s[0]:.2e} below {gap_rtol:.0e} (b={b})")

    x = vh[-1].conj().reshape(b, b)
    tr = np.trace(x)
    if abs(tr) < 1e-12:
        raise NotPositive("invariant candidate is traceless")
    x = x / tr
    rho = 0.5 * (x + x.conj().T)
    rho = rho / np.trace(rho).real

    w, u = np.linalg.eigh(rho)
    if w[0] < -REJECT_TOL:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e}")
    if w[0] < 0:
        w = np.clip(w, 0.0, None)
        rho = (u * w) @ u.conj().T
        rho = rho / np.trace(rho).real
    return AuxiliaryState(rho=rho, rank=b * b - nullity, singular_values=s)


def _string_products(pair: KrausPair, n: int) -> np.ndarray:
    """All ``2**n`` products ``v_{t_1} ... v_{t_n}``, site 1 most significant."""
    ks = np.stack(pair.kraus)
    prods = np.eye(pair.b, dtype=ks.dtype)[None]
    for _ in range(n):
        prods = (prods[:, None] @ ks[None]).reshape(-1, pair.b, pair.b)
    return prods


def reduced_density(
    pair: KrausPair, state: AuxiliaryState, n: int, cap: int = DEFAULT_CAP
) -> ReducedState:
    """Reduced density matrix of ``n`` consecutive sites."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise CapExceeded(f"n={n} exceeds window cap {cap}")
    p = _string_products(pair, n)
    x = state.rho @ p
    flat_p = p.reshape(p.shape[0], -1)
    flat_x = x.reshape(x.shape[0], -1)
    # Tr(P_s^H X_t) = sum_ij conj(P_s)_ij (X_t)_ij
    rho = flat_p.conj() @ flat_x.T
    return ReducedState(n=n, rho=rho)


def partial_trace(state: ReducedState, keep) -> ReducedState:
    """Trace out every site not in ``keep`` (1-based site labels).

    The kept sites appear in the output in the order given.
    """
    keep = list(keep)
    n = state.n
    if not keep or len(set(keep)) != len(keep) or any(not 1 <= k <= n for k in keep):
        raise BadSubset(f"invalid site subset {keep} for n={n}")
    t = state.rho.reshape((2,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for site in range(1, n + 1):
        if site not in keep:
            cols[site - 1] = rows[site - 1]
    out = [rows[k - 1] for k in keep] + [cols[k - 1] for k in keep]
    spec = "".join(rows + cols) + "->" + "".join(out)
    m = len(keep)
    return ReducedState(n=m, rho=np.einsum(spec, t).reshape(2**m, 2**m))


def next_nearest(pair: KrausPair, state: AuxiliaryState) -> ReducedState:
    """State of sites 1 and 3, summing the traced middle index directly."""
    v = pair.kraus
    rho = np.zeros((4, 4), dtype=complex)
    for (s1, s3), (t1, t3) in itertools.product(itertools.product(range(2), repeat=2), repeat=2):
        acc = 0j
        for m in range(2):
            left = v[s1] @ v[m] @ v[s3]
            right = v[t1] @ v[m] @ v[t3]
            acc += np.trace(left.conj().T @ state.rho @ right)
        rho[2 * s1 + s3, 2 * t1 + t3] = acc
    return ReducedState(n=2, rho=rho)
