"""Entanglement measures for the outgoing electron pair.

The general mixed-state measure is the Wootters concurrence; for the
states produced by ionization there are closed forms in terms of the
amplitudes and initial polarizations, which the functions below expose
alongside the matrix route so each can serve as an oracle for the
other.  Entropies are base-2 throughout.
"""

from __future__ import annotations

import math

import numpy as np

from .spin import AmplitudePair, DegenerateStateError, SpinDensityMatrix

__all__ = [
    "concurrence_wootters",
    "concurrence_pure_closed",
    "concurrence_pure_from_state",
    "concurrence_unpolarized",
    "singlet_triplet_concurrence",
    "entanglement_of_formation",
    "entropy_from_concurrence",
    "von_neumann_entropy",
    "linear_entropy",
]

# sigma_y (x) sigma_y in the product basis (real matrix).
_YY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


def _as_product_matrix(rho) -> np.ndarray:
    if isinstance(rho, SpinDensityMatrix):
        if rho.basis != "product":
            raise ValueError("concurrence requires a product-basis density matrix")
        m = rho.matrix
    else:
        m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {m.shape}")
    if np.abs(m - m.conj().T).max() > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    return m


def wootters_batch(rhos: np.ndarray) -> np.ndarray:
    """Wootters concurrence of a stack of product-basis matrices (..., 4, 4).

    The needed square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy) are the eigenvalues of the Hermitian
    surrogate sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho), which
    factors as A A^dag with A = sqrt(rho) (sy x sy) conj(sqrt(rho)).
    Taking the singular values of A directly avoids the square root of
    noise-level eigenvalues, which would otherwise inflate rounding
    errors from 1e-16 to 1e-8.
    """
    w, v = np.linalg.eigh(rhos)
    # spectral floor: eigenvalues at rounding level are structural zeros
    w = np.where(w > 1e-14 * w[..., -1:], w, 0.0)
    vh = np.conj(np.swapaxes(v, -1, -2))
    sqrt_rho = (v * np.sqrt(w)[..., None, :]) @ vh
    a = sqrt_rho @ _YY @ np.conj(sqrt_rho)
    s = np.linalg.svd(a, compute_uv=False)  # descending
    c = s[..., 0] - s[..., 1] - s[..., 2] - s[..., 3]
    return np.clip(c, 0.0, 1.0)


def concurrence_wootters(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix (product basis)."""
    return float(wootters_batch(_as_product_matrix(rho)))


def concurrence_pure_closed(amps: AmplitudePair, zeta1, zeta2) -> float:
    """Closed-form pair concurrence for fully polarized initial spins.

    C = |t_d||t_e|(1 - z1.z2) / (|t_d|^2 + |t_e|^2 - Re(t_d t_e*)(1 + z1.z2))
    """
    td, te = complex(amps.t_d), complex(amps.t_e)
    z1 = np.asarray(zeta1, dtype=float)
    z2 = np.asarray(zeta2, dtype=float)
    for name, z in (("zeta1", z1), ("zeta2", z2)):
        if abs(np.linalg.norm(z) - 1.0) > 1e-8:
            raise ValueError(f"{name} must be a unit vector")
    dot = float(z1 @ z2)
    u = abs(td) ** 2 + abs(te) ** 2 - (td * te.conjugate()).real * (1.0 + dot)
    if u <= 1e-14 * (abs(td) ** 2 + abs(te) ** 2 + 1e-300):
        raise DegenerateStateError("pair state vanishes (u = 0)")
    c = abs(td) * abs(te) * (1.0 - dot) / u
    return min(1.0, max(0.0, c))


def concurrence_pure_from_state(psi) -> float:
    """Concurrence of a normalized pure pair state via reduced purity.

    C = sqrt(2 (1 - Tr rho_1^2)).
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ValueError("pair state must have 4 amplitudes")
    n = float(np.vdot(psi, psi).real)
    if abs(n - 1.0) > 1e-10:
        raise ValueError(f"pair state must be normalized, |psi|^2 = {n:.12g}")
    a = psi.reshape(2, 2)
    rho1 = a @ a.conj().T
    purity = float(np.trace(rho1 @ rho1).real)
    return math.sqrt(max(0.0, 2.0 * (1.0 - purity)))


def concurrence_unpolarized(amps: AmplitudePair) -> float:
    """Pair concurrence for unpolarized projectile and target.

    Nonzero only when singlet scattering dominates:
    theta(|t_d + t_e|^2 - 3 |t_d - t_e|^2)
      * (4 Re(t_d t_e*) - |t_d|^2 - |t_e|^2)
      / (2 (|t_d|^2 + |t_e|^2 - Re(t_d t_e*))).
    """
    td, te = complex(amps.t_d), complex(amps.t_e)
    if td == 0.0 and te == 0.0:
        raise ValueError("both amplitudes are zero")
    gate = abs(td + te) ** 2 - 3.0 * abs(td - te) ** 2
    if gate <= 0.0:
        return 0.0
    re = (td * te.conjugate()).real
    num = 4.0 * re - abs(td) ** 2 - abs(te) ** 2
    den = 2.0 * (abs(td) ** 2 + abs(te) ** 2 - re)
    return min(1.0, max(0.0, num / den))


def singlet_triplet_concurrence(i_s: float, i_t: float) -> float:
    """Unpolarized-beam concurrence from singlet/triplet TDCS components."""
    if i_s < 0.0 or i_t < 0.0:
        raise ValueError("cross-section components must be nonnegative")
    if i_s == 0.0 and i_t == 0.0:
        raise ValueError("cross-section components are both zero")
    if i_s <= i_t:
        return 0.0
    return (i_s - i_t) / (i_s + i_t)


def _binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entanglement_of_formation(c: float) -> float:
    """Entanglement of formation of a two-qubit state with concurrence c."""
    c = float(c)
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"concurrence must be in [0, 1], got {c}")
    return _binary_entropy(0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c))))


def entropy_from_concurrence(c: float) -> float:
    """Von Neumann entropy of either marginal of a pure pair state.

    For pure states this coincides with the entanglement of formation.
    """
    return entanglement_of_formation(c)


def von_neumann_entropy(rho1) -> float:
    """-Tr(rho log2 rho) of a single-electron density matrix."""
    m = np.asarray(rho1, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 reduced density matrix")
    if np.abs(m - m.conj().T).max() > 1e-10:
        raise ValueError("reduced density matrix is not Hermitian")
    w = np.linalg.eigvalsh(m)
    if w.min() < -1e-8:
        raise ValueError(f"reduced density matrix has eigenvalue {w.min():.3g} < 0")
    return sum(_binary_entropy_term(float(x)) for x in w)


def _binary_entropy_term(x: float) -> float:
    if x <= 0.0:
        return 0.0
    return -x * math.log2(x)


def linear_entropy(rho1) -> float:
    """1 - Tr(rho^2) of a single-electron density matrix."""
    m = np.asarray(rho1, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 reduced density matrix")
    return 1.0 - float(np.trace(m @ m).real)
