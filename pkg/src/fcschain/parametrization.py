"""Angle parametrization of nilpotent unital Kraus pairs and Bloch vectors.

For auxiliary dimension ``b`` a parameter vector carries ``b // 2`` angles
``alpha`` and ``b(b-1)/2`` angles ``phi``:

* ``v1`` has ``cos(alpha_k)`` at (1-based) position ``(2k, 2k-1)`` and zeros
  elsewhere, so ``v1 @ v1 == 0``.
* ``v2 = diag(1, sin alpha_1, 1, sin alpha_2, ...) @ R`` with ``R`` a product
  of plane rotations, planes ordered (1,2), (1,3), ..., (1,b), (2,3), ...

which makes ``v1 v1^H + v2 v2^H = 1`` by construction.  Angles are never
wrapped; the map is 2*pi periodic in each of them.

Two opt-in extensions exist for robustness probes: ``chi`` turns ``R`` into a
general unitary (one phase per plane plus one per diagonal entry) and
``beta`` adds upper-diagonal weight to ``v1`` making it non-nilpotent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import UnsupportedDimension
from .fcs import KrausPair


def n_alpha(b: int) -> int:
    return b // 2


def n_phi(b: int) -> int:
    return b * (b - 1) // 2


def n_chi(b: int) -> int:
    return n_phi(b) + b


def _vec(x) -> np.ndarray:
    a = np.array(x, dtype=float).reshape(-1)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ParameterVector:
    """Unconstrained angles (radians) generating a Kraus pair."""

    b: int
    alpha: np.ndarray
    phi: np.ndarray
    chi: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None

    def __post_init__(self):
        b = int(self.b)
        if b < 2:
            raise ValueError(f"auxiliary dimension must be >= 2, got {b}")
        object.__setattr__(self, "b", b)
        for name, want in (("alpha", n_alpha(b)), ("phi", n_phi(b)), ("chi", n_chi(b)), ("beta", n_alpha(b))):
            value = getattr(self, name)
            if value is None and name in ("chi", "beta"):
                continue
            value = _vec(value)
            if value.size != want:
                raise ValueError(f"{name} must have length {want} for b={b}, got {value.size}")
            object.__setattr__(self, name, value)

    @property
    def complex_r(self) -> bool:
        return self.chi is not None

    @property
    def non_nilpotent(self) -> bool:
        return self.beta is not None

    @property
    def size(self) -> int:
        return self.flat().size

    def flat(self) -> np.ndarray:
        """Concatenate ``alpha, phi`` (and ``chi``, ``beta`` when present)."""
        parts = [self.alpha, self.phi]
        if self.chi is not None:
            parts.append(self.chi)
        if self.beta is not None:
            parts.append(self.beta)
        return np.concatenate(parts)

    @classmethod
    def from_flat(cls, b: int, x, complex_r: bool = False, non_nilpotent: bool = False) -> "ParameterVector":
        x = np.asarray(x, dtype=float)
        sizes = [n_alpha(b), n_phi(b), n_chi(b) if complex_r else 0, n_alpha(b) if non_nilpotent else 0]
        if x.size != sum(sizes):
            raise ValueError(f"expected {sum(sizes)} parameters for b={b}, got {x.size}")
        a, p, c = sizes[0], sizes[0] + sizes[1], sizes[0] + sizes[1] + sizes[2]
        return cls(b, x[:a], x[a:p], x[p:c] if complex_r else None, x[c:] if non_nilpotent else None)

    @classmethod
    def dimension(cls, b: int, complex_r: bool = False, non_nilpotent: bool = False) -> int:
        return n_alpha(b) + n_phi(b) + (n_chi(b) if complex_r else 0) + (n_alpha(b) if non_nilpotent else 0)

    def to_dict(self) -> dict:
        d = {"b": self.b, "alpha": self.alpha.tolist(), "phi": self.phi.tolist()}
        if self.chi is not None:
            d["chi"] = self.chi.tolist()
        if self.beta is not None:
            d["beta"] = self.beta.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ParameterVector":
        return cls(int(d["b"]), d["alpha"], d["phi"], d.get("chi"), d.get("beta"))


def build_v1(params: ParameterVector) -> np.ndarray:
    b = params.b
    v1 = np.zeros((b, b))
    for k, a in enumerate(params.alpha):
        if params.beta is None:
            v1[2 * k + 1, 2 * k] = np.cos(a)
        else:
            v1[2 * k + 1, 2 * k] = np.cos(a) * np.cos(params.beta[k])
            v1[2 * k, 2 * k + 1] = np.cos(a) * np.sin(params.beta[k])
    return v1


def plane_pairs(b: int) -> list[tuple[int, int]]:
    """0-based planes in rotation order: (0,1), (0,2), ..., (0,b-1), (1,2), ..."""
    return [(i, j) for i in range(b) for j in range(i + 1, b)]


def build_rotation(params: ParameterVector) -> np.ndarray:
    """Real ``R in SO(b)`` as the ordered product of plane rotations.

    Each factor is the identity except for ``[[cos, sin], [-sin, cos]]`` in
    rows/columns ``(i, j)``.
    """
    b = params.b
    # columns as plain lists: right-multiplying by a plane factor mixes only columns i and j
    cols = [[1.0 if k == m else 0.0 for k in range(b)] for m in range(b)]
    for (i, j), p in zip(plane_pairs(b), params.phi.tolist()):
        c, s = math.cos(p), math.sin(p)
        ci, cj = cols[i], cols[j]
        cols[i] = [c * x - s * y for x, y in zip(ci, cj)]
        cols[j] = [s * x + c * y for x, y in zip(ci, cj)]
    return np.array(cols).T


def build_unitary(params: ParameterVector) -> np.ndarray:
    """Rotation factor of ``v2``; complex unitary when ``params.chi`` is set."""
    if params.chi is None:
        return build_rotation(params)
    b = params.b
    u = np.eye(b, dtype=complex)
    planes = plane_pairs(b)
    for (i, j), p, x in zip(planes, params.phi, params.chi[: len(planes)]):
        c, s = np.cos(p), np.sin(p)
        e = np.exp(1j * x)
        ci, cj = u[:, i].copy(), u[:, j].copy()
        u[:, i] = c * ci - s * np.conj(e) * cj
        u[:, j] = s * e * ci + c * cj
    return u * np.exp(1j * params.chi[len(planes):])[None, :]


def unitality_prefactor(params: ParameterVector) -> np.ndarray:
    """Diagonal ``d`` with ``v1 v1^H + diag(d)^2 = 1``."""
    d = np.ones(params.b)
    for k, a in enumerate(params.alpha):
        if params.beta is None:
            d[2 * k + 1] = np.sin(a)
        else:
            c2 = np.cos(a) ** 2
            sb, cb = np.sin(params.beta[k]), np.cos(params.beta[k])
            d[2 * k] = np.sqrt(max(0.0, 1.0 - c2 * sb * sb))
            sign = -1.0 if np.sin(a) < 0 else 1.0
            d[2 * k + 1] = sign * np.sqrt(max(0.0, 1.0 - c2 * cb * cb))
    return d


def build_v2(params: ParameterVector) -> np.ndarray:
    return unitality_prefactor(params)[:, None] * build_unitary(params)


def build_pair(params: ParameterVector) -> KrausPair:
    return KrausPair(build_v1(params), build_v2(params))


# --- Bloch vectors ---------------------------------------------------------

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

GELL_MANN = np.array(
    [
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
        [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
        np.diag([1, 1, -2]) / np.sqrt(3),
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class BlochVector:
    b: int
    components: np.ndarray
    length_sq: float


def bloch_decompose(rho, b: int) -> BlochVector:
    """Pauli (b=2) or Gell-Mann (b=3) coefficients of a density matrix.

    Normalizations: ``rho = (1 + n.sigma)/2`` for qubits and
    ``rho = (1 + sqrt(3) n.lambda)/3`` for qutrits.
    """
    rho = np.asarray(rho)
    if b in (2, 3) and rho.shape != (b, b):
        raise UnsupportedDimension(f"matrix shape {rho.shape} does not match b={b}")
    if b == 2:
        n = np.einsum("kij,ji->k", PAULI, rho).real
    elif b == 3:
        n = np.sqrt(3) / 2 * np.einsum("kij,ji->k", GELL_MANN, rho).real
    else:
        raise UnsupportedDimension(f"Bloch components only for b in (2, 3), got {b}")
    n = _vec(n)
    return BlochVector(b=b, components=n, length_sq=float(n @ n))


def bloch_length_sq(rho, b: Optional[int] = None) -> float:
    """Squared generalized Bloch length ``(b Tr rho^2 - 1)/(b - 1)``."""
    rho = np.asarray(rho)
    b = rho.shape[0] if b is None else b
    p = np.vdot(rho, rho).real
    return float((b * p - 1) / (b - 1))


def ellipse_residual(bloch: BlochVector) -> float:
    """Signed distance-like residual from the qubit invariant-state ellipse.

    Zero when ``n_x^2 / (1/2) + (n_z - 1/2)^2 / (1/4) == 1``.
    """
    if bloch.b != 2:
        raise UnsupportedDimension("ellipse residual is defined for b=2 only")
    nx, _, nz = bloch.components
    return float(nx * nx / 0.5 + (nz - 0.5) ** 2 / 0.25 - 1.0)
