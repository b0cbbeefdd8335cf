"""Two-branch amplifier dynamics and Born-weight time averages.

The combined system holds a two-state particle and the n-site amplifier.
States are kept in branch form

    a0 * psi0 (x) amp0  +  a1 * psi1 (x) amp1 ,

with amp0/amp1 sparse over basis indices.  The interaction freezes the
psi0 branch and advances the psi1 branch with the shift propagator, so a
detection event walks the amplifier pattern around its orbit while a
non-event leaves it cocked.

The time average of the pointer variable over one period approaches the
Born weight |a1|^2 of the moving branch:

    <f_n> = |a1|^2 (1 - 1/n)        (strict cocked start, horizon n)

which is what `born_limit_sweep` tabulates across lattice sizes.  The
orbit-compressed path evaluates the same average by counting cocked
revisits, needs only O(horizon) index arithmetic, and therefore reaches
sizes like n = 1009 far beyond the dense bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Callable, Iterable, Mapping

import numpy as np

from .bitlattice import decompose_orbits, require_dense, require_prime, shift_index
from .errors import NotNormalizedError, UnsupportedInitialStateError
from .ming import assemble_propagator
from .observable import CockedSet, PointerVariable, strict_cocked_index

NORM_RTOL = 1e-9

_cached_decomposition = lru_cache(maxsize=16)(decompose_orbits)


def _as_sparse(amp) -> dict[int, complex]:
    if isinstance(amp, Mapping):
        return {int(i): complex(c) for i, c in amp.items() if c != 0}
    if isinstance(amp, (int, np.integer)):
        return {int(amp): 1.0 + 0j}
    v = np.asarray(amp, dtype=complex).ravel()
    nz = np.nonzero(v)[0]
    return {int(i): complex(v[i]) for i in nz}


def _norm(amp: Mapping[int, complex]) -> float:
    return math.sqrt(math.fsum(abs(c) ** 2 for c in amp.values()))


@dataclass(frozen=True)
class CombinedState:
    """Branch decomposition of a combined particle+amplifier state."""

    n: int
    a0: complex
    a1: complex
    amp0: Mapping[int, complex]
    amp1: Mapping[int, complex]

    def __post_init__(self) -> None:
        object.__setattr__(self, "amp0", MappingProxyType(dict(self.amp0)))
        object.__setattr__(self, "amp1", MappingProxyType(dict(self.amp1)))
        size = 1 << self.n
        for amp in (self.amp0, self.amp1):
            for i in amp:
                if not 0 <= i < size:
                    raise ValueError(f"basis index {i} out of range for n={self.n}")
        total = self.norm()
        if abs(total - 1.0) > NORM_RTOL:
            raise NotNormalizedError(
                f"combined norm {total!r} deviates from 1 beyond {NORM_RTOL}"
            )

    @property
    def branches(self) -> tuple[tuple[complex, Mapping[int, complex]], ...]:
        """Branch view consumed by the pointer variable."""
        return ((self.a0, self.amp0), (self.a1, self.amp1))

    def norm(self) -> float:
        return math.sqrt(
            abs(self.a0) ** 2 * _norm(self.amp0) ** 2
            + abs(self.a1) ** 2 * _norm(self.amp1) ** 2
        )


def combined_state(n: int, a0: complex, a1: complex, amp0, amp1) -> CombinedState:
    """Normalize-friendly constructor: branch amplitudes may be indices,
    dense vectors or mappings; branch vectors are scaled to norm one."""
    s0 = _as_sparse(amp0)
    s1 = _as_sparse(amp1)
    for label, s in (("amp0", s0), ("amp1", s1)):
        nrm = _norm(s)
        if nrm == 0.0:
            raise NotNormalizedError(f"{label} has zero norm")
        for i in s:
            s[i] /= nrm
    w = math.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
    if w == 0.0:
        raise NotNormalizedError("particle amplitudes are both zero")
    return CombinedState(n=n, a0=a0 / w, a1=a1 / w, amp0=s0, amp1=s1)


def cocked_start(n: int, a0: complex, a1: complex) -> CombinedState:
    """Both branches on the strict cocked configuration, particle in (a0, a1)."""
    i = strict_cocked_index(n)
    return combined_state(n, a0, a1, {i: 1.0}, {i: 1.0})


def evolve_combined(state: CombinedState, t: float, mode: str = "auto") -> CombinedState:
    """Advance the psi1 branch by time t; the psi0 branch is frozen.

    Integer t uses exact index relabeling at any n.  Non-integer t needs
    the interpolated propagator and therefore the dense bound.
    """
    t_int = float(t).is_integer()
    if mode == "auto":
        mode = "permutation" if t_int else "interpolated"
    if mode == "permutation":
        if not t_int:
            raise ValueError("permutation mode needs integer t")
        moved = {
            shift_index(i, state.n, int(t)): c for i, c in state.amp1.items()
        }
    else:
        require_dense(state.n)
        prop = assemble_propagator(_cached_decomposition(state.n), t, mode="interpolated")
        dense = np.zeros(1 << state.n, dtype=complex)
        for i, c in state.amp1.items():
            dense[i] = c
        moved = _as_sparse(prop.apply_dense(dense))
    return CombinedState(
        n=state.n, a0=state.a0, a1=state.a1, amp0=dict(state.amp0), amp1=moved
    )


@dataclass(frozen=True)
class TimeAverageResult:
    n: int
    horizon: int
    mean: float
    per_step: tuple[float, ...] | None
    closed_form: float | None


def _closed_form_if_applicable(state: CombinedState, cocked: CockedSet, horizon: int) -> float | None:
    """|a1|^2 (1 - 1/n) holds for the strict cocked start over one period."""
    if cocked.epsilon != 0.0 or horizon != state.n:
        return None
    target = strict_cocked_index(state.n)
    for _, amp in state.branches:
        if set(amp) != {target}:
            return None
        if abs(abs(next(iter(amp.values()))) - 1.0) > 1e-12:
            return None
    return abs(state.a1) ** 2 * (1.0 - 1.0 / state.n)


def time_average_f(
    state: CombinedState,
    cocked: CockedSet,
    horizon: int,
    keep_steps: bool = False,
) -> TimeAverageResult:
    """Stroboscopic mean of f_n over t = 0 .. horizon-1 (exact permutation steps)."""
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    if cocked.n != state.n:
        raise ValueError("cocked set and state have different n")
    pv = PointerVariable(cocked)
    vals = []
    current = state
    for t in range(horizon):
        if t > 0:
            current = evolve_combined(current, 1)
        vals.append(pv.value(current))
    mean = math.fsum(vals) / horizon
    return TimeAverageResult(
        n=state.n,
        horizon=horizon,
        mean=mean,
        per_step=tuple(vals) if keep_steps else None,
        closed_form=_closed_form_if_applicable(state, cocked, horizon),
    )


def orbit_compressed_average(
    state: CombinedState,
    cocked: CockedSet,
    horizon: int | None = None,
) -> TimeAverageResult:
    """Same stroboscopic mean, evaluated by counting cocked revisits.

    Needs both branch vectors to be single basis configurations; then

        f(t) = 1 - |a0|^2 [amp0 in C] - |a1|^2 [shift^t(amp1) in C]

    and the mean only requires the revisit counts, one membership test per
    step, independent of 2**n.
    """
    if cocked.n != state.n:
        raise ValueError("cocked set and state have different n")
    if horizon is None:
        horizon = state.n
    if horizon < 1:
        raise ValueError(f"horizon must be positive, got {horizon}")
    basis = []
    for _, amp in state.branches:
        if len(amp) != 1:
            raise UnsupportedInitialStateError(
                "orbit-compressed averaging needs basis-vector branches"
            )
        ((i, c),) = amp.items()
        if abs(abs(c) - 1.0) > NORM_RTOL:
            raise UnsupportedInitialStateError("branch amplitude must be unit modulus")
        basis.append(i)
    i0, i1 = basis
    k0 = horizon if cocked.contains(i0) else 0
    k1 = 0
    j = i1
    for t in range(horizon):
        if cocked.contains(j):
            k1 += 1
        j = shift_index(j, state.n, 1)
    w0 = abs(state.a0) ** 2
    w1 = abs(state.a1) ** 2
    mean = 1.0 - w0 * (k0 / horizon) - w1 * (k1 / horizon)
    return TimeAverageResult(
        n=state.n,
        horizon=horizon,
        mean=mean,
        per_step=None,
        closed_form=_closed_form_if_applicable(state, cocked, horizon),
    )


@dataclass(frozen=True)
class SweepRow:
    n: int
    mean: float
    born_weight: float
    abs_error: float


def born_limit_sweep(
    a: tuple[complex, complex],
    n_list: Iterable[int],
    epsilon_schedule: float | Callable[[int], float] = 0.0,
    horizon_rule: Callable[[int], int] | None = None,
    path: str = "auto",
) -> list[SweepRow]:
    """Tabulate <f_n> against the Born weight |a1|^2 across lattice sizes.

    path "dense" forces full state evolution (dense bound applies),
    "compressed" the revisit-count evaluation, "auto" picks per size.
    Every size starts from the strict cocked configuration in both branches.
    """
    if path not in ("auto", "dense", "compressed"):
        raise ValueError(f"unknown path {path!r}")
    eps = epsilon_schedule if callable(epsilon_schedule) else (lambda n: float(epsilon_schedule))
    horizon_of = horizon_rule or (lambda n: n)
    a0, a1 = a
    rows = []
    for n in n_list:
        require_prime(n)
        state = cocked_start(n, a0, a1)
        cocked = CockedSet(n, eps(n))
        horizon = horizon_of(n)
        use_dense = path == "dense" or (path == "auto" and n <= 13)
        if use_dense:
            res = time_average_f(state, cocked, horizon)
        else:
            res = orbit_compressed_average(state, cocked, horizon)
        w1 = abs(state.a1) ** 2
        rows.append(
            SweepRow(n=n, mean=res.mean, born_weight=w1, abs_error=abs(res.mean - w1))
        )
    return rows
