"""Detection probabilities and samplers for Gaussian covariance states.

Two detector models are supported on the same state object:

* photon-number resolution: :func:`pnr_probability` evaluates the hafnian of
  the detection kernel with rows/columns repeated per occupation, divided by
  ``s_1! ... s_n! sqrt(det Sigma)`` with ``Sigma = (sigma + I)/2``.
* threshold ("click") detectors: a spatial mode clicks when any of its
  spectral modes holds at least one photon.  Click probabilities reduce by
  inclusion-exclusion to vacuum probabilities of mode subsets, each of which
  is ``1 / sqrt(det)`` of a principal submatrix of ``Sigma``.

Everything here funnels through one batched determinant engine per state.
It exploits two structural facts: restricting ``Sigma`` to a mode subset
commutes with inversion through the Schur-complement identity
``det(Sigma_R) = det(Sigma) det((Sigma^{-1})_{R^c})`` (so whichever of the
set and its complement is smaller pays for the determinant), and real
covariances have equal diagonal blocks, letting a ``2d x 2d`` determinant
split into two ``d x d`` ones.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, EmptyDistributionError, ScalingError
from .graphs import Graph
from .states import CovarianceState, embed_graph, recover_kernel, takagi_real_symmetric
from .states import apply_uniform_loss

__all__ = [
    "ClickPattern",
    "SubspaceDistribution",
    "hafnian",
    "pnr_probability",
    "vacuum_probability",
    "threshold_probability",
    "expected_clicks",
    "click_count_mass",
    "optimize_scaling",
    "enumerate_subspace",
    "sample_subspace",
    "sample_chain",
]

#: Exact enumeration of k-click subspaces is limited to this many spatial modes.
ENUMERATION_LIMIT = 14

#: Largest doubled dimension the hafnian evaluators accept.
_HAFNIAN_ENUM_LIMIT = 12
_HAFNIAN_TRACE_LIMIT = 32

#: No code path may enumerate more work items than this without erroring first.
_CAPACITY_CEILING = 2**24


@dataclass(frozen=True)
class ClickPattern:
    """Threshold detector outcome over ``width`` spatial modes, as a bitmask."""

    bits: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 0:
            raise ValueError("width must be nonnegative")
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError(f"bitmask {self.bits:#x} does not fit in {self.width} modes")

    @classmethod
    def from_vertices(cls, vertices: Iterable[int], width: int) -> "ClickPattern":
        bits = 0
        for v in vertices:
            v = int(v)
            if not 0 <= v < width:
                raise ValueError(f"vertex {v} out of range for width {width}")
            if bits >> v & 1:
                raise ValueError(f"vertex {v} repeated")
            bits |= 1 << v
        return cls(bits, width)

    @property
    def count(self) -> int:
        """Number of clicked modes."""
        return self.bits.bit_count()

    def vertices(self) -> tuple[int, ...]:
        """Clicked mode indices, ascending."""
        return tuple(i for i in range(self.width) if self.bits >> i & 1)

    def bitstring(self) -> str:
        """'0'/'1' string with mode 0 leftmost."""
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.width))


# -- hafnian ----------------------------------------------------------------


def _haf_enumerate(a: np.ndarray) -> complex:
    """Sum over perfect matchings; the reference oracle."""
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j

    def rec(rem: tuple[int, ...]) -> complex:
        if not rem:
            return 1.0 + 0.0j
        first = rem[0]
        total = 0.0 + 0.0j
        for pos in range(1, len(rem)):
            partner = rem[pos]
            total += a[first, partner] * rec(rem[1:pos] + rem[pos + 1 :])
        return total

    return rec(tuple(range(n)))


def _haf_trace(a: np.ndarray) -> complex:
    """Power-trace hafnian over pair subsets; ``O(n^3 2^(n/2))``."""
    n = a.shape[0]
    m = n // 2
    if n == 0:
        return 1.0 + 0.0j
    powers = np.arange(1, m + 1)
    total = 0.0 + 0.0j
    for mask in range(1, 1 << m):
        pairs = [i for i in range(m) if mask >> i & 1]
        idx = np.array([2 * i + off for i in pairs for off in (0, 1)], dtype=np.intp)
        b = a[np.ix_(idx, idx)]
        swap = np.arange(len(idx)).reshape(-1, 2)[:, ::-1].ravel()
        ev = np.linalg.eigvals(b[swap])
        # coefficient of x^m in exp(sum_j tr((XB)^j) x^j / (2j))
        psums = np.sum(ev[None, :] ** powers[:, None], axis=1) / (2.0 * powers)
        coeff = np.zeros(m + 1, dtype=np.complex128)
        coeff[0] = 1.0
        for k in range(1, m + 1):
            acc = 0.0 + 0.0j
            for j in range(1, k + 1):
                acc += j * psums[j - 1] * coeff[k - j]
            coeff[k] = acc / k
        total += (-1) ** (m - len(pairs)) * coeff[m]
    return complex(total)


def hafnian(m: np.ndarray, method: str = "auto") -> complex:
    """Hafnian of an even-dimensional symmetric matrix.

    Methods: ``"enumerate"`` walks every perfect matching (dimension <= 12,
    the reference oracle), ``"trace"`` uses the power-trace formula
    (dimension <= 32, the default).  The two are validated against each
    other by the test suite; neither is ever silently substituted.

    Examples: the 4x4 all-ones matrix has hafnian 3 (three matchings), the
    2x2 off-diagonal pair has hafnian 1, and the empty matrix has hafnian 1.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"hafnian needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n % 2:
        raise ValueError(f"hafnian needs even dimension, got {n}")
    scale = max(1.0, float(np.max(np.abs(m)))) if n else 1.0
    if n and np.max(np.abs(m - m.T)) > 1e-10 * scale:
        raise ValueError("hafnian needs a symmetric matrix")
    if method == "enumerate":
        if n > _HAFNIAN_ENUM_LIMIT:
            raise CapacityError(
                f"matching enumeration supports dimension <= {_HAFNIAN_ENUM_LIMIT}, got {n}"
            )
        return _haf_enumerate(m)
    if method in ("trace", "auto"):
        if n > _HAFNIAN_TRACE_LIMIT:
            raise CapacityError(
                f"power-trace hafnian supports dimension <= {_HAFNIAN_TRACE_LIMIT}, got {n}"
            )
        return _haf_trace(m)
    raise ValueError(f"unknown hafnian method {method!r}")


# -- vacuum-determinant engine ----------------------------------------------


class _DetEngine:
    """Batched vacuum probabilities for subsets of one state's spatial modes."""

    def __init__(self, state: CovarianceState) -> None:
        m = state.mode_count
        self.flat_count = m
        self.nf = state.spectral_modes
        self.n_spatial = state.spatial_modes
        self.logdet = state.husimi_logdet
        self.real = state.is_real
        hus = state.husimi
        inv = state.husimi_inv
        if self.real:
            self.sig_aa = np.ascontiguousarray(hus[:m, :m].real)
            self.sig_ab = np.ascontiguousarray(hus[:m, m:].real)
            self.inv_aa = np.ascontiguousarray(inv[:m, :m].real)
            self.inv_ab = np.ascontiguousarray(inv[:m, m:].real)
        else:
            self.sig = np.ascontiguousarray(hus)
            self.inv = np.ascontiguousarray(inv)
        self._all = frozenset(range(self.n_spatial))

    def _flat_rows(self, spatial_sets: Sequence[tuple[int, ...]]) -> np.ndarray:
        nf = self.nf
        rows = np.empty((len(spatial_sets), len(spatial_sets[0]) * nf), dtype=np.intp)
        for pos, modes in enumerate(spatial_sets):
            base = np.asarray(modes, dtype=np.intp) * nf
            rows[pos] = (base[:, None] + np.arange(nf)[None, :]).ravel()
        return rows

    def _dets_real(self, aa: np.ndarray, ab: np.ndarray, rows: np.ndarray) -> np.ndarray:
        p = aa[rows[:, :, None], rows[:, None, :]]
        q = ab[rows[:, :, None], rows[:, None, :]]
        return np.linalg.det(p + q) * np.linalg.det(p - q)

    def _dets_complex(self, full: np.ndarray, rows: np.ndarray) -> np.ndarray:
        idx = np.concatenate([rows, rows + self.flat_count], axis=1)
        sub = full[idx[:, :, None], idx[:, None, :]]
        return np.real(np.linalg.det(sub))

    def vacuum_probs(self, spatial_sets: Sequence[tuple[int, ...]]) -> np.ndarray:
        """P(every spectral mode of every listed spatial mode is vacuum), per set."""
        out = np.empty(len(spatial_sets))
        by_size: dict[tuple[int, bool], list[int]] = {}
        for pos, modes in enumerate(spatial_sets):
            size = len(modes)
            if size == 0:
                out[pos] = 1.0
                continue
            direct = size <= self.n_spatial - size
            by_size.setdefault((size if direct else self.n_spatial - size, direct), []).append(pos)
        for (size, direct), positions in by_size.items():
            if direct:
                sets = [spatial_sets[p] for p in positions]
            else:
                sets = [tuple(sorted(self._all - set(spatial_sets[p]))) for p in positions]
            if size == 0:
                # complement route with the full set: det(Sigma_R) = det(Sigma)
                dets = np.ones(len(positions))
            else:
                rows = self._flat_rows(sets)
                if direct:
                    if self.real:
                        dets = self._dets_real(self.sig_aa, self.sig_ab, rows)
                    else:
                        dets = self._dets_complex(self.sig, rows)
                else:
                    if self.real:
                        dets = self._dets_real(self.inv_aa, self.inv_ab, rows)
                    else:
                        dets = self._dets_complex(self.inv, rows)
            if direct:
                vals = 1.0 / np.sqrt(dets)
            else:
                vals = np.exp(-0.5 * self.logdet) / np.sqrt(dets)
            out[np.asarray(positions, dtype=np.intp)] = vals
        return out


def _engine(state: CovarianceState) -> _DetEngine:
    if "det_engine" not in state._cache:
        state._cache["det_engine"] = _DetEngine(state)
    return state._cache["det_engine"]


def _as_spatial_tuple(subset, n: int) -> tuple[int, ...]:
    """Accept a bitmask, a ClickPattern, or an iterable of mode indices."""
    if isinstance(subset, ClickPattern):
        if subset.width != n:
            raise ValueError(f"pattern width {subset.width} does not match {n} modes")
        return subset.vertices()
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >> n:
            raise ValueError(f"bitmask {mask:#x} does not fit in {n} modes")
        return tuple(i for i in range(n) if mask >> i & 1)
    modes = tuple(sorted(int(i) for i in subset))
    if len(set(modes)) != len(modes):
        raise ValueError(f"subset has repeated modes: {modes}")
    if modes and (modes[0] < 0 or modes[-1] >= n):
        raise ValueError(f"subset {modes} out of range for {n} modes")
    return modes


# -- probabilities -----------------------------------------------------------


def vacuum_probability(state: CovarianceState, spatial_subset) -> float:
    """Probability that every spectral mode of the given spatial modes is vacuum.

    ``spatial_subset`` may be a bitmask, an iterable of mode indices, or a
    :class:`ClickPattern`.  The empty subset has probability 1; the full
    subset gives the total vacuum probability ``det(Sigma)^{-1/2}``.
    """
    modes = _as_spatial_tuple(spatial_subset, state.spatial_modes)
    return float(_engine(state).vacuum_probs([modes])[0])


def threshold_probability(state: CovarianceState, pattern) -> float:
    """Probability that exactly the given spatial modes click.

    Inclusion-exclusion over subsets ``T`` of the clicked set ``C``:
    ``P = sum_T (-1)^(|C|-|T|) P_vac(complement of T)``, which costs
    ``2^|C|`` vacuum determinants.
    """
    clicked = _as_spatial_tuple(pattern, state.spatial_modes)
    k = len(clicked)
    if 2**k > _CAPACITY_CEILING:
        raise CapacityError(f"2^{k} inclusion-exclusion terms exceed the capacity ceiling")
    all_modes = frozenset(range(state.spatial_modes))
    sets: list[tuple[int, ...]] = []
    signs = np.empty(2**k)
    for pos, size_subset in enumerate(_subsets_of(clicked)):
        sets.append(tuple(sorted(all_modes - set(size_subset))))
        signs[pos] = -1.0 if (k - len(size_subset)) % 2 else 1.0
    vals = _engine(state).vacuum_probs(sets)
    prob = float(np.dot(signs, vals))
    if prob < 0.0:
        if prob < -1e-9:
            raise RuntimeError(f"inclusion-exclusion produced {prob}; state is ill-conditioned")
        prob = 0.0
    return prob


def _subsets_of(items: tuple[int, ...]):
    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


def pnr_probability(state: CovarianceState, occupations: Sequence[int]) -> float:
    """Photon-number-resolved outcome probability for a single-spectral state.

    Builds the detection kernel, repeats the i'th row/column block of it
    ``occupations[i]`` times, and returns
    ``Haf(kernel_S) / (prod_i occupations[i]! sqrt(det Sigma))``.

    States whose kernel has no annihilation/creation cross terms (pure,
    zero-displacement embeddings) have support only on even total photon
    number; odd totals return exactly 0.
    """
    if state.spectral_modes != 1:
        raise ValueError("photon-number probabilities expect a single spectral mode")
    occ = np.asarray(occupations)
    if occ.shape != (state.spatial_modes,):
        raise ValueError(
            f"need one occupation per spatial mode ({state.spatial_modes}), got {occ.shape}"
        )
    if not np.issubdtype(occ.dtype, np.integer) or np.any(occ < 0):
        raise ValueError("occupations must be nonnegative integers")
    total = int(occ.sum())
    norm = math.exp(-0.5 * state.husimi_logdet)
    if total == 0:
        return norm
    if 2 * total > _HAFNIAN_TRACE_LIMIT:
        raise CapacityError(
            f"{total} photons need a hafnian of dimension {2 * total}; "
            f"the supported maximum is {_HAFNIAN_TRACE_LIMIT}"
        )
    if "kernel" not in state._cache:
        state._cache["kernel"] = recover_kernel(state)
    kernel = state._cache["kernel"]
    n = state.spatial_modes
    if total % 2 and np.max(np.abs(kernel[:n, n:])) < 1e-14:
        return 0.0
    reps = np.repeat(np.arange(n), occ)
    idx = np.concatenate([reps, reps + n])
    haf = hafnian(kernel[np.ix_(idx, idx)], method="trace")
    denom = 1.0
    for s in occ:
        denom *= math.factorial(int(s))
    prob = float(np.real(haf)) * norm / denom
    return max(prob, 0.0) if prob > -1e-9 else prob


# -- closed-form expected clicks ---------------------------------------------


def expected_clicks(g: Graph, c: float, loss: float = 0.0) -> float:
    """Expected number of clicking detectors for an embedded graph under loss.

    Uses the closed form built from the adjacency decomposition
    ``A = U diag(|lambda|) U^T`` with per-mode tanh values ``t = c |lambda|``:
    each mode's vacuum probability is

        ``(|sum_j |U_ij|^2 (1 - loss t_j^2)/(1 - t_j^2)|^2
           - (1-loss)^2 |sum_j U_ij^2 t_j/(1 - t_j^2)|^2)^(-1/2)``

    and the expectation is ``n - sum_i P_vac(i)``.  Agrees with the
    determinant machinery on the explicitly constructed lossy state.
    """
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must lie in [0, 1], got {loss}")
    a = g.adjacency.astype(np.float64)
    radius = float(np.max(np.abs(np.linalg.eigvalsh(a)))) if g.n else 0.0
    if c <= 0.0:
        raise ScalingError(f"kernel scaling must be positive, got {c}")
    if radius > 0.0 and c >= 1.0 / radius:
        raise ScalingError(
            f"kernel scaling {c} is at or beyond the bound 1/lambda_max = {1.0 / radius:.12g}"
        )
    lam, u = takagi_real_symmetric(a)
    t = c * lam
    fac1 = (1.0 - loss * t * t) / (1.0 - t * t)
    fac2 = t / (1.0 - t * t)
    term1 = np.abs(np.abs(u) ** 2 @ fac1) ** 2
    term2 = (1.0 - loss) ** 2 * np.abs((u * u) @ fac2) ** 2
    pvac = 1.0 / np.sqrt(term1 - term2)
    return float(g.n - np.sum(pvac))


def _mode_vacuum_probs(state: CovarianceState) -> np.ndarray:
    eng = _engine(state)
    return eng.vacuum_probs([(i,) for i in range(state.spatial_modes)])


# -- click-count masses and scaling optimization ------------------------------


def click_count_mass(state: CovarianceState, k: int) -> float:
    """Exact probability of seeing exactly ``k`` clicks.

    Summing the pattern-level inclusion-exclusion over all k-click patterns
    collapses to ``sum_j (-1)^(k-j) C(n-j, k-j) e_j`` where ``e_j`` adds the
    vacuum probabilities of all (n-j)-mode complements, so only
    ``C(n, <=k)`` determinants are needed.
    """
    n = state.spatial_modes
    if not 0 <= k <= n:
        raise ValueError(f"click count must lie in [0, {n}], got {k}")
    budget = sum(math.comb(n, j) for j in range(k + 1))
    if budget > _CAPACITY_CEILING:
        raise CapacityError(f"{budget} determinants exceed the capacity ceiling")
    eng = _engine(state)
    all_modes = frozenset(range(n))
    mass = 0.0
    for j in range(k + 1):
        sets = [
            tuple(sorted(all_modes - set(tt))) for tt in itertools.combinations(range(n), j)
        ]
        e_j = float(np.sum(eng.vacuum_probs(sets)))
        mass += (-1.0) ** (k - j) * math.comb(n - j, k - j) * e_j
    return max(mass, 0.0)


def optimize_scaling(g: Graph, k: int, loss: float = 0.0) -> float:
    """Kernel scaling that best targets ``k`` clicks under the given loss.

    Seeds a 32-point grid over ``(0, 1/lambda_max)`` and refines the best
    bracket by golden-section search to a relative tolerance of ``1e-4``.
    Up to :data:`ENUMERATION_LIMIT` spatial modes the objective is the exact
    k-click probability mass; beyond that it is the (negated) distance of
    the closed-form expected click count from ``k``.

    Emits a ``UserWarning`` and returns the best-effort scaling when the
    target click count is not attainable.
    """
    n = g.n
    if not 0 <= k <= n:
        raise ValueError(f"target click count must lie in [0, {n}], got {k}")
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"loss must lie in [0, 1], got {loss}")
    radius = float(np.max(np.abs(np.linalg.eigvalsh(g.adjacency.astype(np.float64)))))
    c_sup = 1.0 / radius if radius > 0.0 else 1.0

    if n <= ENUMERATION_LIMIT:

        def objective(c: float) -> float:
            state = embed_graph(g, c)
            if loss > 0.0:
                state = apply_uniform_loss(state, loss)
            return click_count_mass(state, k)

    else:

        def objective(c: float) -> float:
            return -abs(expected_clicks(g, c, loss) - k)

    grid = [c_sup * (i + 1) / 33.0 for i in range(32)]
    scores = [objective(c) for c in grid]
    best = int(np.argmax(scores))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, 31)]

    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - ratio * (hi - lo)
    x2 = lo + ratio * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > 1e-4 * c_sup:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - ratio * (hi - lo)
            f1 = objective(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + ratio * (hi - lo)
            f2 = objective(x2)
    c_star = (lo + hi) / 2.0
    achieved = objective(c_star)
    unattainable = (n <= ENUMERATION_LIMIT and achieved < 1e-9) or (
        n > ENUMERATION_LIMIT and -achieved >= 1.0
    )
    if unattainable:
        warnings.warn(
            f"target click count {k} appears unattainable on this graph "
            f"(best objective {achieved:.3g}); returning best-effort scaling",
            UserWarning,
            stacklevel=2,
        )
    return float(c_star)


# -- subspace distributions ----------------------------------------------------


@dataclass(frozen=True)
class SubspaceDistribution:
    """Exact threshold distribution restricted to k-click patterns.

    ``weights`` are the raw pattern probabilities; ``norm`` their total, the
    probability of landing in the subspace at all.  Renormalized weights sum
    to one and drive :func:`sample_subspace`.
    """

    k: int
    width: int
    patterns: tuple[ClickPattern, ...]
    weights: np.ndarray
    norm: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64).copy()
        if len(w) != len(self.patterns):
            raise ValueError("one weight per pattern required")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(float(np.sum(w)) - self.norm) > 1e-9 * max(1.0, self.norm):
            raise ValueError("norm must equal the sum of the weights")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def renormalized(self) -> np.ndarray:
        if self.norm <= 0.0:
            raise EmptyDistributionError("subspace carries no probability mass")
        w = self.weights / self.norm
        return w / np.sum(w)

    def write_csv(self, path) -> None:
        """Two columns: pattern bitstring (mode 0 leftmost) and renormalized weight."""
        w = self.renormalized()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"# k = {self.k}, width = {self.width}, subspace_mass = {self.norm:.12g}\n")
            fh.write("pattern,probability\n")
            for pat, val in zip(self.patterns, w):
                fh.write(f"{pat.bitstring()},{val:.12g}\n")


def enumerate_subspace(state: CovarianceState, k: int) -> SubspaceDistribution:
    """Exact k-click distribution by enumerating every pattern.

    Patterns are ordered lexicographically by their ascending vertex tuples.
    Limited to :data:`ENUMERATION_LIMIT` spatial modes; larger states must go
    through :func:`sample_chain`.
    """
    n = state.spatial_modes
    if not 0 <= k <= n:
        raise ValueError(f"click count must lie in [0, {n}], got {k}")
    if n > ENUMERATION_LIMIT:
        raise CapacityError(
            f"exact enumeration supports at most {ENUMERATION_LIMIT} spatial modes "
            f"(got {n}); draw samples with sample_chain instead"
        )
    if math.comb(n, k) * 2**k > _CAPACITY_CEILING:
        raise CapacityError("subspace enumeration exceeds the capacity ceiling")
    eng = _engine(state)
    all_modes = frozenset(range(n))
    # vacuum probability of each complement, for every subset T with |T| <= k
    pv: list[dict[tuple[int, ...], float]] = []
    for j in range(k + 1):
        subsets = list(itertools.combinations(range(n), j))
        vals = eng.vacuum_probs([tuple(sorted(all_modes - set(t))) for t in subsets])
        pv.append(dict(zip(subsets, vals)))
    patterns = []
    weights = np.empty(math.comb(n, k))
    for pos, combo in enumerate(itertools.combinations(range(n), k)):
        acc = 0.0
        for j in range(k + 1):
            sign = -1.0 if (k - j) % 2 else 1.0
            table = pv[j]
            acc += sign * sum(table[t] for t in itertools.combinations(combo, j))
        patterns.append(ClickPattern.from_vertices(combo, n))
        weights[pos] = max(acc, 0.0)
    return SubspaceDistribution(
        k=k, width=n, patterns=tuple(patterns), weights=weights, norm=float(np.sum(weights))
    )


def sample_subspace(
    dist: SubspaceDistribution, rng: np.random.Generator, count: int
) -> list[ClickPattern]:
    """Draw ``count`` patterns from a subspace distribution (renormalized)."""
    if count < 0:
        raise ValueError(f"sample count must be nonnegative, got {count}")
    if len(dist.patterns) == 0 or dist.norm <= 0.0:
        raise EmptyDistributionError(
            f"the {dist.k}-click subspace carries no probability mass"
        )
    idx = rng.choice(len(dist.patterns), size=count, p=dist.renormalized())
    return [dist.patterns[i] for i in idx]


# -- chain-rule sampling -------------------------------------------------------

_minor_mask_cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _minor_masks(count: int, block: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Subset masks expanded to ``block`` columns per element, plus parity signs,
    for subset indices ``lo..hi`` (bit t of the index = membership of element t)."""
    key = (count, block)
    full = lo == 0 and hi == 2**count
    if full and key in _minor_mask_cache:
        return _minor_mask_cache[key]
    rows = np.arange(lo, hi, dtype=np.uint32)
    member = (rows[:, None] >> np.arange(count)[None, :] & 1).astype(bool)
    signs = np.where(member.sum(axis=1) % 2, -1.0, 1.0)
    wide = np.repeat(member, block, axis=1)
    out = (wide[:, :, None] & wide[:, None, :], signs)
    if full and count <= 12 and block <= 2:
        _minor_mask_cache[key] = out
    return out


def _ie_over_minors(stacked: np.ndarray, count: int, block: int) -> float:
    """``sum_S (-1)^|S| prod_f det(f restricted to S)^(-1/2)`` over all subsets.

    ``stacked`` holds one positive-definite matrix per determinant factor,
    each of dimension ``count * block``.  Minor ``S`` is embedded in the full
    matrix by overwriting the rows and columns outside ``S`` with the
    identity, which leaves its determinant unchanged and lets batched
    determinant calls cover whole subset ranges.  Subsets are processed in
    bounded chunks so memory stays flat even for click counts in the
    twenties.
    """
    if count > 24:
        raise CapacityError(
            f"2^{count} inclusion-exclusion terms exceed the capacity ceiling; "
            "pass max_clicks to abandon over-budget draws early"
        )
    dim = stacked.shape[-1]
    eye = np.eye(dim, dtype=stacked.dtype)
    total = 0.0
    step = min(2**count, max(256, 2**22 // (dim * dim)))
    for lo in range(0, 2**count, step):
        mask, signs = _minor_masks(count, block, lo, min(lo + step, 2**count))
        padded = np.where(mask[:, None, :, :], stacked[None, :, :, :], eye[None, None, :, :])
        dets = np.prod(np.real(np.linalg.det(padded)), axis=1)
        total += float(np.dot(signs, 1.0 / np.sqrt(np.clip(dets, 1e-300, None))))
    return total


def _chain_matrices(state: CovarianceState) -> tuple[np.ndarray, np.ndarray, int]:
    """Stacked matrices whose minor determinants multiply to det(Sigma_R).

    Real states split into the two symmetric factors ``P + Q`` and ``P - Q``
    (one matrix row per flat mode); complex states keep the doubled Husimi
    matrix (two rows per flat mode, creation rows after all annihilation
    rows).  Returns the stack, a spatial-mode label per matrix row, and the
    number of rows each flat mode contributes.
    """
    if "chain_matrices" not in state._cache:
        eng = _engine(state)
        flat_labels = np.repeat(np.arange(state.spatial_modes), state.spectral_modes)
        if eng.real:
            stack = np.stack([eng.sig_aa + eng.sig_ab, eng.sig_aa - eng.sig_ab])
            labels = flat_labels
            halves = 1
        else:
            stack = eng.sig[None, :, :]
            labels = np.concatenate([flat_labels, flat_labels])
            halves = 2
        state._cache["chain_matrices"] = (stack, labels, halves)
    return state._cache["chain_matrices"]


def sample_chain(
    state: CovarianceState, rng: np.random.Generator, max_clicks: int | None = None
) -> ClickPattern | None:
    """Draw one threshold pattern exactly, one spatial mode at a time.

    Walks the modes in index order, maintaining the covariance of the
    not-yet-vacuum rows conditioned on every mode already decided vacuum
    (one Schur-complement update per vacuum mode).  Mode ``j``'s conditional
    vacuum probability is then a ratio of constrained masses, each an
    inclusion-exclusion over the already-clicked modes evaluated as minors
    of one small conditional block, so the per-sample cost is
    ``sum_j 2^(clicks before j)`` tiny determinants, independent of the
    ``C(n, k)`` pattern count.

    ``max_clicks`` makes rejection sampling cheap: the draw is abandoned
    (returning ``None``) as soon as more than ``max_clicks`` modes have
    clicked.  Completed draws are distributed identically either way, since
    the abandonment decision never looks past the already-fixed prefix.
    """
    n = state.spatial_modes
    cap = n if max_clicks is None else int(max_clicks)
    stack, labels, halves = _chain_matrices(state)
    block = state.spectral_modes * halves
    cond = stack.copy()

    clicked: list[int] = []
    logdet_base = 0.0
    denom = 1.0
    for j in range(n):
        jpos = np.flatnonzero(labels == j)
        jj = cond[:, jpos[:, None], jpos[None, :]]
        if block == 1:
            logdet_j = float(np.sum(np.log(np.real(jj[:, 0, 0]))))
        else:
            logdet_j = float(np.sum(np.linalg.slogdet(jj)[1]))
        c = len(clicked)
        if c == 0:
            ie = 1.0
        else:
            cpos = np.concatenate([np.flatnonzero(labels == t) for t in clicked])
            cross = cond[:, jpos[:, None], cpos[None, :]]
            cc = cond[:, cpos[:, None], cpos[None, :]]
            reduced = cc - np.conj(np.swapaxes(cross, 1, 2)) @ np.linalg.solve(jj, cross)
            ie = _ie_over_minors(reduced, c, block)
        numer = math.exp(-0.5 * (logdet_base + logdet_j)) * ie
        numer = min(max(numer, 0.0), denom)
        if rng.random() * denom < numer:
            # condition every remaining row on mode j being vacuum
            rows = cond[:, jpos, :]
            cond = cond - np.conj(np.swapaxes(rows, 1, 2)) @ np.linalg.solve(jj, rows)
            keep = labels != j
            cond = cond[:, keep[:, None] & keep[None, :]].reshape(
                cond.shape[0], keep.sum(), keep.sum()
            )
            labels = labels[keep]
            logdet_base += logdet_j
            denom = max(numer, 1e-300)
        else:
            clicked.append(j)
            denom = max(denom - numer, 1e-300)
            if len(clicked) > cap:
                return None
    return ClickPattern.from_vertices(clicked, n)
