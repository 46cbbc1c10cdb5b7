"""Gaussian covariance states and the symplectic machinery behind the sampler.

States are zero-mean Gaussian states over ``M = spatial * spectral`` bosonic
modes, held as a ``2M x 2M`` covariance matrix ``sigma`` in the doubled
annihilation/creation ordering: index ``f`` is mode ``f``'s annihilation row,
``f + M`` its creation row, and the flat mode index is
``f = spatial_index * spectral_modes + spectral_index``.  The vacuum has
``sigma = I`` in this convention, a single squeezer ``r`` has
``sigma = [[cosh 2r, sinh 2r], [sinh 2r, cosh 2r]]``, and detection formulas
work with ``Sigma = (sigma + I) / 2`` so probabilities come out normalized.

Graph embedding follows the doubled-kernel construction: a symmetric kernel
``K = c (A (+) A)`` with block swap ``X = [[0, I], [I, 0]]`` determines
``sigma = 2 (I - X K)^{-1} - I``, which is a pure product of two-mode-style
squeezers whose tanh values are ``c |lambda_i|`` for adjacency eigenvalues
``lambda_i``.  The scaling must satisfy ``c < 1 / max |lambda_i|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DecompositionError, InfeasiblePurityError, PurityError, ScalingError
from .graphs import Graph

__all__ = [
    "CovarianceState",
    "SqueezerBank",
    "SymplecticFactors",
    "SchmidtProfile",
    "embed_graph",
    "recover_kernel",
    "williamson_pure",
    "bloch_messiah",
    "schmidt_profile",
    "expand_spectral",
    "apply_uniform_loss",
    "symplectic_eigenvalues",
    "takagi_real_symmetric",
    "passive_doubled",
    "squeezer_doubled",
]

_HERMITICITY_RTOL = 1e-8
_PHYSICALITY_TOL = 1e-9
_PURITY_TOL = 1e-6


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix in the doubled basis.

    Returns the ``M`` positive eigenvalues of ``sqrt(sigma) K sqrt(sigma)``
    with ``K = diag(1, ..., 1, -1, ..., -1)``, ascending.  They are all 1
    exactly when the state is pure.
    """
    sigma = np.asarray(sigma)
    dim = sigma.shape[0]
    half = dim // 2
    w, q = np.linalg.eigh(sigma)
    if np.min(w) <= 0.0:
        raise ValueError(
            f"covariance is not positive definite (smallest eigenvalue {np.min(w):.3e})"
        )
    root = (q * np.sqrt(w)[None, :]) @ q.conj().T
    kform = np.ones(dim)
    kform[half:] = -1.0
    h = root @ (kform[:, None] * root)
    vals = np.linalg.eigvalsh(h)
    return vals[half:]


class CovarianceState:
    """Zero-mean Gaussian state over spatial x spectral modes.

    Parameters
    ----------
    sigma:
        ``2M x 2M`` covariance in the doubled basis, vacuum = identity.
    spatial_modes:
        Number of detected (spatial) modes.
    spectral_modes:
        Schmidt modes per spatial mode; a detector clicks when *any* of a
        spatial mode's spectral modes is occupied.
    scaling:
        Kernel scaling the state was embedded with, if any (provenance only).
    validate:
        Check hermiticity, conjugation structure and physicality
        (symplectic eigenvalues >= 1) on construction.
    """

    def __init__(
        self,
        sigma: np.ndarray,
        spatial_modes: int,
        spectral_modes: int = 1,
        scaling: float | None = None,
        validate: bool = True,
    ) -> None:
        sigma = np.array(sigma, dtype=np.complex128)
        m = spatial_modes * spectral_modes
        if sigma.shape != (2 * m, 2 * m):
            raise ValueError(
                f"covariance shape {sigma.shape} does not match "
                f"{spatial_modes} x {spectral_modes} modes (expected {(2 * m, 2 * m)})"
            )
        scale = max(1.0, float(np.max(np.abs(sigma)))) if sigma.size else 1.0
        if validate:
            if np.max(np.abs(sigma - sigma.conj().T)) > _HERMITICITY_RTOL * scale:
                raise ValueError("covariance must be Hermitian")
            # doubled-basis conjugation structure: lower blocks mirror upper ones
            if (
                np.max(np.abs(sigma[m:, m:] - sigma[:m, :m].conj())) > _HERMITICITY_RTOL * scale
                or np.max(np.abs(sigma[m:, :m] - sigma[:m, m:].conj())) > _HERMITICITY_RTOL * scale
            ):
                raise ValueError("covariance lacks the doubled-basis conjugation structure")
        sigma = (sigma + sigma.conj().T) / 2.0
        sigma.flags.writeable = False
        self.sigma = sigma
        self.spatial_modes = int(spatial_modes)
        self.spectral_modes = int(spectral_modes)
        self.scaling = scaling
        self._cache: dict = {}
        if validate:
            nu = self.symplectic_eigenvalues()
            floor = 1.0 - _PHYSICALITY_TOL * max(1.0, float(nu[-1]))
            if nu[0] < floor:
                raise ValueError(
                    f"unphysical covariance: smallest symplectic eigenvalue {nu[0]:.12g} < 1"
                )

    # -- basic geometry -------------------------------------------------

    @property
    def mode_count(self) -> int:
        """Total flat mode count ``spatial * spectral``."""
        return self.spatial_modes * self.spectral_modes

    @property
    def doubled_dim(self) -> int:
        return 2 * self.mode_count

    def flat_indices(self, spatial_subset: Iterable[int]) -> np.ndarray:
        """Flat mode indices covering every spectral mode of the given spatial modes."""
        nf = self.spectral_modes
        spatial = sorted(int(i) for i in spatial_subset)
        if spatial and (spatial[0] < 0 or spatial[-1] >= self.spatial_modes):
            raise ValueError(f"spatial subset {spatial} out of range")
        return np.array([i * nf + j for i in spatial for j in range(nf)], dtype=np.intp)

    # -- derived matrices ------------------------------------------------

    @property
    def husimi(self) -> np.ndarray:
        """``Sigma = (sigma + I) / 2``; the detection formulas use this."""
        if "husimi" not in self._cache:
            self._cache["husimi"] = (self.sigma + np.eye(self.doubled_dim)) / 2.0
        return self._cache["husimi"]

    @property
    def husimi_inv(self) -> np.ndarray:
        if "husimi_inv" not in self._cache:
            self._cache["husimi_inv"] = np.linalg.inv(self.husimi)
        return self._cache["husimi_inv"]

    @property
    def husimi_logdet(self) -> float:
        if "husimi_logdet" not in self._cache:
            sign, logdet = np.linalg.slogdet(self.husimi)
            if np.real(sign) <= 0:
                raise ValueError("Sigma determinant is not positive")
            self._cache["husimi_logdet"] = float(np.real(logdet))
        return self._cache["husimi_logdet"]

    @property
    def is_real(self) -> bool:
        if "is_real" not in self._cache:
            self._cache["is_real"] = bool(np.max(np.abs(self.sigma.imag)) < 1e-12)
        return self._cache["is_real"]

    # -- physics ----------------------------------------------------------

    def symplectic_eigenvalues(self) -> np.ndarray:
        if "nu" not in self._cache:
            self._cache["nu"] = symplectic_eigenvalues(self.sigma)
        return self._cache["nu"]

    def is_pure(self, tol: float = _PURITY_TOL) -> bool:
        nu = self.symplectic_eigenvalues()
        return bool(np.max(np.abs(nu - 1.0)) <= tol)

    def mean_photons(self) -> np.ndarray:
        """Mean photon number per spatial mode (summed over spectral modes)."""
        m = self.mode_count
        per_flat = (np.real(np.diag(self.sigma)[:m]) - 1.0) / 2.0
        return per_flat.reshape(self.spatial_modes, self.spectral_modes).sum(axis=1)

    def marginal(self, spatial_subset: Iterable[int]) -> "CovarianceState":
        """Reduced state on a subset of spatial modes (ascending order)."""
        flat = self.flat_indices(spatial_subset)
        if len(flat) == 0:
            raise ValueError("marginal needs at least one spatial mode")
        m = self.mode_count
        idx = np.concatenate([flat, flat + m])
        sub = self.sigma[np.ix_(idx, idx)]
        return CovarianceState(
            sub,
            spatial_modes=len(flat) // self.spectral_modes,
            spectral_modes=self.spectral_modes,
            scaling=self.scaling,
            validate=False,
        )

    def __repr__(self) -> str:
        return (
            f"CovarianceState(spatial={self.spatial_modes}, "
            f"spectral={self.spectral_modes}, scaling={self.scaling})"
        )


# -- graph embedding ------------------------------------------------------


def embed_graph(g: Graph, c: float) -> CovarianceState:
    """Pure Gaussian state whose detection kernel is ``c (A (+) A)``.

    Args:
        g: graph whose adjacency matrix ``A`` is embedded.
        c: kernel scaling; must satisfy ``0 < c < 1 / max|lambda(A)|``.

    Returns:
        A pure :class:`CovarianceState` on ``g.n`` spatial modes.

    Raises:
        ScalingError: if ``c`` is non-positive or at/beyond the spectral bound.
    """
    a = g.adjacency.astype(np.float64)
    n = g.n
    radius = float(np.max(np.abs(np.linalg.eigvalsh(a)))) if n else 0.0
    if c <= 0.0:
        raise ScalingError(f"kernel scaling must be positive, got {c}")
    if radius > 0.0 and c >= 1.0 / radius:
        raise ScalingError(
            f"kernel scaling {c} is at or beyond the bound 1/lambda_max = {1.0 / radius:.12g}"
        )
    eye = np.eye(n)
    block = np.block([[eye, -c * a], [-c * a, eye]])
    sigma = 2.0 * np.linalg.inv(block) - np.eye(2 * n)
    sigma = (sigma + sigma.T) / 2.0
    return CovarianceState(sigma, spatial_modes=n, spectral_modes=1, scaling=c)


def recover_kernel(state: CovarianceState) -> np.ndarray:
    """Detection kernel ``X (I - Sigma^{-1})`` of a single-spectral-mode state.

    For a state produced by :func:`embed_graph` this returns ``c (A (+) A)``
    up to floating point noise.
    """
    if state.spectral_modes != 1:
        raise ValueError("kernel recovery expects a single spectral mode per spatial mode")
    m = state.mode_count
    b = np.eye(2 * m) - state.husimi_inv
    kernel = np.vstack([b[m:], b[:m]])  # X @ b swaps the row blocks
    return (kernel + kernel.T) / 2.0


# -- symplectic decompositions ---------------------------------------------


@dataclass(frozen=True)
class SqueezerBank:
    """Nonnegative squeezing parameters, sorted descending."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.ndim != 1:
            raise ValueError("squeezing values must be one-dimensional")
        if np.any(vals < 0):
            raise ValueError("squeezing values must be nonnegative")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def tanh(self) -> np.ndarray:
        """The tanh of each squeezing value (the kernel eigen-scalings)."""
        return np.tanh(self.values)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SymplecticFactors:
    """Passive/squeeze/passive factorization ``M = U_d S_d V_d^dagger``.

    ``u`` and ``v`` are the half-size unitaries; the doubled factors are
    ``U_d = diag(u, conj(u))`` and ``S_d`` the squeezer block built from
    ``squeezers``.
    """

    u: np.ndarray
    v: np.ndarray
    squeezers: SqueezerBank

    def reconstruct(self) -> np.ndarray:
        """Rebuild the doubled symplectic matrix from the factors."""
        return (
            passive_doubled(self.u)
            @ squeezer_doubled(self.squeezers.values)
            @ passive_doubled(self.v).conj().T
        )


def passive_doubled(u: np.ndarray) -> np.ndarray:
    """Doubled-basis matrix of a passive (interferometer) unitary."""
    m = u.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    out[:m, :m] = u
    out[m:, m:] = u.conj()
    return out


def squeezer_doubled(r: Sequence[float]) -> np.ndarray:
    """Doubled-basis matrix of a bank of single-mode squeezers."""
    r = np.asarray(r, dtype=np.float64)
    ch = np.cosh(r)
    sh = np.sinh(r)
    return np.block([[np.diag(ch), np.diag(sh)], [np.diag(sh), np.diag(ch)]])


def williamson_pure(state: CovarianceState) -> np.ndarray:
    """Symplectic matrix ``M`` with ``sigma = M M^dagger`` for a pure state.

    Uses the principal (Hermitian) square root of ``sigma``, which is
    symplectic exactly when the state is pure.

    Raises:
        PurityError: if any symplectic eigenvalue strays from 1 by more than
            ``1e-6``; the message reports the worst offender.
    """
    nu = state.symplectic_eigenvalues()
    worst = float(np.max(np.abs(nu - 1.0)))
    if worst > _PURITY_TOL:
        raise PurityError(
            f"state is not pure: largest symplectic eigenvalue deviation {worst:.6g} "
            f"(eigenvalue {nu[np.argmax(np.abs(nu - 1.0))]:.12g})"
        )
    w, q = np.linalg.eigh(state.sigma)
    return (q * np.sqrt(w)[None, :]) @ q.conj().T


def _group_indices(values: Sequence[float], rtol: float) -> list[list[int]]:
    """Group consecutive entries of a sorted sequence that agree within rtol."""
    groups: list[list[int]] = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or abs(values[i] - values[start]) > rtol * max(
            1.0, abs(values[start])
        ):
            groups.append(list(range(start, i)))
            start = i
    return groups


def _unitary_symmetric_root(w: np.ndarray, rtol: float = 1e-7) -> np.ndarray:
    """Unitary ``p`` with ``p p^T = w`` for unitary symmetric ``w``.

    Real and imaginary parts of ``w`` commute, so a real orthogonal basis
    diagonalizes both; half the resulting phases give the root.
    """
    a = np.ascontiguousarray(w.real)
    b = np.ascontiguousarray(w.imag)
    vals, o = np.linalg.eigh(a)
    o = o.copy()
    for grp in _group_indices(list(vals), rtol):
        if len(grp) > 1:
            cols = o[:, grp]
            sub = cols.T @ b @ cols
            sub = (sub + sub.T) / 2.0
            _, p = np.linalg.eigh(sub)
            o[:, grp] = cols @ p
    d = np.einsum("ji,jk,ki->i", o, w.astype(np.complex128), o)
    return o.astype(np.complex128) * np.exp(0.5j * np.angle(d))[None, :]


def bloch_messiah(m: np.ndarray) -> SymplecticFactors:
    """Factor a doubled-basis symplectic matrix as passive / squeeze / passive.

    Parameters
    ----------
    m:
        ``2M x 2M`` matrix of Bogoliubov form ``[[E, F], [conj(F), conj(E)]]``
        satisfying ``m K m^dagger = K`` within ``1e-9`` (scaled), with
        ``K = diag(1,...,1,-1,...,-1)``.

    Returns
    -------
    SymplecticFactors
        With unitary ``u``, ``v`` and squeezing values sorted descending.
        Degenerate squeezing blocks are jointly rediagonalized so the middle
        factor is exactly diagonal.

    Raises
    ------
    DecompositionError
        If the input is not symplectic or lacks the Bogoliubov structure;
        the message carries the defect norm.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise DecompositionError(f"expected an even-dimensional square matrix, got {m.shape}")
    half = m.shape[0] // 2
    scale = max(1.0, float(np.max(np.abs(m))) ** 2)
    structure_defect = max(
        float(np.max(np.abs(m[half:, half:] - m[:half, :half].conj()))),
        float(np.max(np.abs(m[half:, :half] - m[:half, half:].conj()))),
    )
    if structure_defect > 1e-9 * scale:
        raise DecompositionError(
            f"input lacks Bogoliubov block structure (defect norm {structure_defect:.3e})"
        )
    kform = np.ones(2 * half)
    kform[half:] = -1.0
    defect = float(np.max(np.abs(m @ (kform[:, None] * m.conj().T) - np.diag(kform))))
    if defect > 1e-9 * scale:
        raise DecompositionError(f"input is not symplectic (defect norm {defect:.3e})")

    e = m[:half, :half]
    f = m[:half, half:]
    u, cvals, vh = np.linalg.svd(e)
    v = vh.conj().T
    u = u.astype(np.complex128)
    v = v.astype(np.complex128)
    fprime = u.conj().T @ f @ v.conj()
    for grp in _group_indices(list(cvals), rtol=1e-8):
        c = cvals[grp[0]]
        s = np.sqrt(max(c * c - 1.0, 0.0))
        if s < 1e-9:
            continue  # vacuum block: nothing to rotate
        sub = fprime[np.ix_(grp, grp)]
        sub = (sub + sub.T) / 2.0
        w = _unitary_symmetric_root(sub / s)
        u[:, grp] = u[:, grp] @ w
        v[:, grp] = v[:, grp] @ w
    fdiag = u.conj().T @ f @ v.conj()
    svals = np.real(np.diag(fdiag)).copy()
    residual = float(np.max(np.abs(fdiag - np.diag(svals))))
    if residual > 1e-7 * scale:
        raise DecompositionError(
            f"failed to diagonalize the squeezing block (residual {residual:.3e})"
        )
    r = np.arcsinh(np.clip(svals, 0.0, None))
    return SymplecticFactors(u=u, v=v, squeezers=SqueezerBank(r))


def takagi_real_symmetric(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decompose real symmetric ``a`` as ``U diag(|lambda|) U^T``.

    Columns of ``U`` are the orthonormal eigenvectors, multiplied by ``i``
    wherever the eigenvalue is negative, so the diagonal factor is
    nonnegative.  Returns ``(|lambda|, U)`` in ascending eigenvalue order.
    """
    lam, o = np.linalg.eigh(np.asarray(a, dtype=np.float64))
    phases = np.where(lam < 0.0, 1j, 1.0 + 0j)
    return np.abs(lam), o.astype(np.complex128) * phases[None, :]


# -- spectral (Schmidt) structure -------------------------------------------


@dataclass(frozen=True)
class SchmidtProfile:
    """Squared Schmidt coefficients of a squeezer's spectral decomposition.

    ``x`` holds the squared coefficients (summing to 1), ``purity`` their
    squared sum.  ``level_count`` and ``base`` record the geometric family
    the tail was drawn from.
    """

    level_count: int
    base: float
    purity: float
    x: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64).copy()
        if len(x) != self.level_count:
            raise ValueError("coefficient count must equal level_count")
        if np.any(x < -1e-15):
            raise ValueError(f"squared coefficients must be nonnegative, got {x}")
        x = np.clip(x, 0.0, None)
        if abs(float(np.sum(x)) - 1.0) > 1e-12:
            raise ValueError(f"squared coefficients must sum to 1, got {np.sum(x)!r}")
        if abs(float(np.sum(x * x)) - self.purity) > 1e-12:
            raise ValueError(
                f"sum of squares {np.sum(x * x)!r} does not match purity {self.purity!r}"
            )
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def s(self) -> np.ndarray:
        """Schmidt coefficients (square roots of ``x``)."""
        return np.sqrt(self.x)


def schmidt_profile(level_count: int, base: float, purity: float) -> SchmidtProfile:
    """Build a Schmidt profile with a geometric tail and prescribed purity.

    The tail weights are ``k_i = base**(level_count - i) / sum_j base**(j-1)``
    for ``i = 2..level_count`` (they sum to 1).  The leading squared
    coefficient ``x_1`` solves

        ``(1 + kappa) x_1^2 - 2 kappa x_1 + kappa - purity = 0``,

    ``kappa = sum k_i^2``, taking the positive root; the remaining squared
    coefficients are ``x_i = k_i (1 - x_1)``.

    Raises:
        InfeasiblePurityError: if the purity is below the family's floor
            ``kappa / (1 + kappa)`` (or != 1 for a single level); the message
            states the achievable range.
    """
    if not isinstance(level_count, (int, np.integer)) or level_count < 1:
        raise ValueError(f"level count must be a positive integer, got {level_count!r}")
    if not base > 0.0:
        raise ValueError(f"geometric base must be positive, got {base}")
    if not 0.0 < purity <= 1.0:
        raise ValueError(f"purity must lie in (0, 1], got {purity}")
    if level_count == 1:
        if abs(purity - 1.0) > 1e-12:
            raise InfeasiblePurityError(
                f"a single spectral level is pure by construction; achievable purity is "
                f"exactly 1, got {purity}"
            )
        return SchmidtProfile(1, float(base), 1.0, np.array([1.0]))
    denom = sum(base ** (j - 1) for j in range(1, level_count))
    tail = np.array([base ** (level_count - i) / denom for i in range(2, level_count + 1)])
    kappa = float(np.sum(tail * tail))
    floor = kappa / (1.0 + kappa)
    disc = purity * (1.0 + kappa) - kappa
    if disc < -1e-15:
        raise InfeasiblePurityError(
            f"purity {purity} unachievable for level_count={level_count}, base={base}; "
            f"achievable range is [{floor:.12g}, 1]"
        )
    x1 = (kappa + np.sqrt(max(disc, 0.0))) / (1.0 + kappa)
    x = np.concatenate([[x1], tail * (1.0 - x1)])
    # reported purity is the exact sum of squares, absorbing roundoff
    return SchmidtProfile(int(level_count), float(base), float(np.sum(x * x)), x)


def _split_squeezing(r: float, s: np.ndarray) -> float:
    """Scale ``mu`` such that ``sum_j sinh^2(mu * s_j) = sinh^2(r)``.

    Splitting a squeezer across Schmidt modes this way preserves its mean
    photon number.  Monotone in ``mu``, solved by bracketed root finding.
    """
    if r == 0.0:
        return 0.0
    target = np.sinh(r) ** 2
    smax = float(np.max(s))
    if smax <= 0.0:
        raise ValueError("at least one Schmidt coefficient must be positive")

    def excess(mu: float) -> float:
        return float(np.sum(np.sinh(mu * s) ** 2) - target)

    hi = r / smax
    if excess(hi) <= 0.0:  # single nonzero coefficient: exact solution
        return hi
    return float(brentq(excess, 0.0, hi, xtol=1e-12, rtol=8.9e-16))


def expand_spectral(state: CovarianceState, profile: SchmidtProfile) -> CovarianceState:
    """Give every squeezer of a pure state the spectral structure of ``profile``.

    The state is factored into passive / squeeze / passive form, each passive
    unitary is lifted to act identically on every spectral mode, and each
    squeezer ``r_i`` is replaced by one squeezer per spectral mode with
    values ``mu_i * s_j``, normalized so the mean photon number of each
    spatial mode is unchanged.  With a single fully-pure level the output
    equals the input.

    Raises:
        PurityError: if the input state is not pure.
        ValueError: if the input already carries spectral structure.
    """
    if state.spectral_modes != 1:
        raise ValueError("state already has spectral structure")
    factors = bloch_messiah(williamson_pure(state))
    nf = profile.level_count
    n = state.spatial_modes
    svec = profile.s
    r_flat = np.zeros(n * nf)
    for i, r in enumerate(factors.squeezers.values):
        r_flat[i * nf : (i + 1) * nf] = _split_squeezing(float(r), svec) * svec
    u_big = np.kron(factors.u, np.eye(nf))
    v_big = np.kron(factors.v, np.eye(nf))
    ch = np.cosh(r_flat)
    sh = np.sinh(r_flat)
    e = u_big @ (ch[:, None] * v_big.conj().T)
    f = u_big @ (sh[:, None] * v_big.T)
    msym = np.block([[e, f], [f.conj(), e.conj()]])
    sigma = msym @ msym.conj().T
    return CovarianceState(
        sigma,
        spatial_modes=n,
        spectral_modes=nf,
        scaling=state.scaling,
    )


def apply_uniform_loss(state: CovarianceState, loss: float) -> CovarianceState:
    """Send every mode through a loss channel of strength ``loss``.

    ``sigma -> (1 - loss) sigma + loss I``; ``loss = 0`` is the identity and
    ``loss = 1`` maps to vacuum.  Losses compose multiplicatively in the
    transmissions: applying ``l1`` then ``l2`` equals ``1 - (1-l1)(1-l2)``.
    """
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must lie in [0, 1], got {loss}")
    sigma = (1.0 - loss) * state.sigma + loss * np.eye(state.doubled_dim)
    return CovarianceState(
        sigma,
        spatial_modes=state.spatial_modes,
        spectral_modes=state.spectral_modes,
        scaling=state.scaling,
    )
