"""Two-qubit entanglement and mixedness measures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadShape, NonConvergence, OutOfRange

SIGMA_Y = np.array([[0, -1j], [1j, 0]])
YY = np.kron(SIGMA_Y, SIGMA_Y)

C_WOOTTERS = 0.434467

PSI_PLUS = np.array([0, 1, 1, 0]) / np.sqrt(2)
PSI_MINUS = np.array([0, 1, -1, 0]) / np.sqrt(2)
KET_11 = np.array([0, 0, 0, 1.0])


def _two_qubit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise BadShape(f"expected a 4x4 two-qubit matrix, got shape {rho.shape}")
    return rho


def _proj(psi) -> np.ndarray:
    return np.outer(psi, np.conj(psi))


def spin_flip(rho) -> np.ndarray:
    """``(sigma_y x sigma_y) rho* (sigma_y x sigma_y)``."""
    rho = _two_qubit(rho)
    return YY @ rho.conj() @ YY


@dataclass(frozen=True)
class ConcurrenceSpectrum:
    lambdas: np.ndarray
    concurrence: float
    assistance: float


RANK_TOL = 1e-13


def concurrence_spectrum(rho) -> ConcurrenceSpectrum:
    """Square roots of the eigenvalues of ``rho @ spin_flip(rho)``, descending.

    With ``rho = X X^H`` (eigenvalues of ``rho`` below ``RANK_TOL`` dropped)
    these are the singular values of ``X^T (sigma_y x sigma_y) X``.  Taking
    singular values directly avoids square roots of round-off sized
    eigenvalues, which would otherwise leave spurious ``~1e-9`` lambdas.
    """
    rho = _two_qubit(rho)
    try:
        w, u = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        keep = w > RANK_TOL
        x = u[:, keep] * np.sqrt(w[keep])
        lam = np.linalg.svd(x.T @ YY @ x, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    lam = np.concatenate([lam, np.zeros(4 - lam.size)])
    return ConcurrenceSpectrum(
        lambdas=lam,
        concurrence=float(max(0.0, lam[0] - lam[1:].sum())),
        assistance=float(lam.sum()),
    )


def concurrence(rho) -> float:
    return concurrence_spectrum(rho).concurrence


def assistance(rho) -> float:
    return concurrence_spectrum(rho).assistance


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.vdot(rho, rho).real)


# --- nilpotent nearest-neighbour form -------------------------------------


def abc_elements(rho12) -> tuple[float, complex, complex]:
    """``(A, B, C)`` read from the <01|, <10| rows of a nearest-neighbour state."""
    rho12 = _two_qubit(rho12)
    return float(rho12[1, 1].real), complex(rho12[1, 2]), complex(rho12[1, 3])


def abc_matrix(a: float, b: complex, c: complex) -> np.ndarray:
    return np.array(
        [
            [0, 0, 0, 0],
            [0, a, b, c],
            [0, np.conj(b), a, c],
            [0, np.conj(c), np.conj(c), 1 - 2 * a],
        ],
        dtype=complex,
    )


def abc_purity(a: float, b: complex, c: complex) -> float:
    return float(1 - 4 * a + 6 * a * a + 2 * abs(b) ** 2 + 4 * abs(c) ** 2)


def abc_single_site_purity(a: float, c: complex) -> float:
    return float(1 - 2 * a + 2 * a * a + 2 * abs(c) ** 2)


# --- closed forms for b = 2 ------------------------------------------------


def _b2_fraction(alpha1: float, phi1: float, with_cos_phi: bool) -> float:
    sa, ca = np.sin(alpha1), np.cos(alpha1)
    sp, cp = np.sin(phi1), np.cos(phi1)
    den = ca * ca * cp * cp * (sa - 1) - 2 * (1 + sa) * sp * sp
    num = ca * ca * (1 + sa) * sp * sp
    if with_cos_phi:
        num = num * cp * cp
    if den == 0.0:
        # only where v1 vanishes or sin(alpha1) = -1; the invariant state is not unique there
        return 0.0
    return num / den


def analytic_concurrence_b2(alpha1: float, phi1: float) -> float:
    """Nearest-neighbour concurrence of the b=2 chain in closed form.

    The fraction below equals ``-B``; the concurrence is ``2|B|``.
    """
    return float(2 * abs(_b2_fraction(alpha1, phi1, True)))


def analytic_assistance_b2(alpha1: float, phi1: float) -> float:
    """Nearest-neighbour concurrence of assistance ``2A`` for b=2."""
    return float(2 * abs(_b2_fraction(alpha1, phi1, False)))


# --- reference families ----------------------------------------------------


def mems_state(q: float) -> np.ndarray:
    if not 0.0 <= q <= 1.0:
        raise OutOfRange(f"q must lie in [0, 1], got {q}")
    if q <= 2.0 / 3.0:
        return (1 / 3 + q / 2) * _proj(PSI_PLUS) + (1 / 3 - q / 2) * _proj(PSI_MINUS) + _proj(KET_11) / 3
    return q * _proj(PSI_PLUS) + (1 - q) * _proj(KET_11)


def mems_point(q: float) -> tuple[float, float]:
    """(purity, concurrence) on the maximally entangled mixed state frontier."""
    rho = mems_state(q)
    return purity(rho), concurrence(rho)


def werner_state(p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"p must lie in [0, 1], got {p}")
    return (1 - p) / 4 * np.eye(4) + p * _proj(PSI_PLUS)


def werner_point(p: float) -> tuple[float, float]:
    rho = werner_state(p)
    return purity(rho), concurrence(rho)
