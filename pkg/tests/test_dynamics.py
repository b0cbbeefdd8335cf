"""Branch evolution and Born-weight time averages."""

import math

import numpy as np
import pytest

from mingsim.dynamics import (
    CombinedState,
    SweepRow,
    born_limit_sweep,
    cocked_start,
    combined_state,
    evolve_combined,
    orbit_compressed_average,
    time_average_f,
)
from mingsim.errors import NotNormalizedError, UnsupportedInitialStateError
from mingsim.observable import CockedSet, PointerVariable, strict_cocked_index

INV_SQRT2 = 1 / math.sqrt(2)


def test_evolution_moves_only_branch_one():
    s = cocked_start(5, INV_SQRT2, INV_SQRT2)
    s1 = evolve_combined(s, 1)
    assert set(s1.amp0) == {3}
    assert set(s1.amp1) == {6}


def test_full_period_returns_to_start():
    s = cocked_start(5, INV_SQRT2, INV_SQRT2)
    s5 = evolve_combined(s, 5)
    assert set(s5.amp1) == {3}
    assert s5.amp1[3] == pytest.approx(s.amp1[3])


def test_interpolated_halves_compose_to_one_step():
    s = cocked_start(5, 0.6, 0.8)
    half = evolve_combined(evolve_combined(s, 0.5), 0.5)
    whole = evolve_combined(s, 1)
    dense_half = np.zeros(2**5, dtype=complex)
    dense_whole = np.zeros(2**5, dtype=complex)
    for i, c in half.amp1.items():
        dense_half[i] = c
    for i, c in whole.amp1.items():
        dense_whole[i] = c
    assert np.abs(dense_half - dense_whole).max() < 1e-9


def test_norm_is_conserved():
    s = cocked_start(7, 0.6, 0.8j)
    for t in (1, 3, 0.37, 2.25):
        assert evolve_combined(s, t).norm() == pytest.approx(1.0, abs=1e-12)


def test_combined_state_rejects_bad_norm():
    with pytest.raises(NotNormalizedError):
        CombinedState(n=5, a0=1.0, a1=1.0, amp0={3: 1.0}, amp1={3: 1.0})
    with pytest.raises(NotNormalizedError):
        combined_state(5, 0.0, 0.0, {3: 1.0}, {3: 1.0})


def test_time_average_example_half_half():
    s = cocked_start(5, INV_SQRT2, INV_SQRT2)
    res = time_average_f(s, CockedSet(5, 0.0), horizon=5, keep_steps=True)
    assert res.mean == pytest.approx(0.4, abs=1e-12)
    assert res.per_step[0] == pytest.approx(0.0, abs=1e-14)
    for v in res.per_step[1:]:
        assert v == pytest.approx(0.5, abs=1e-12)
    assert res.closed_form == pytest.approx(0.4, abs=1e-15)


def test_time_average_detector_branch_only():
    s = cocked_start(7, 0.0, 1.0)
    res = time_average_f(s, CockedSet(7, 0.0), horizon=7)
    assert res.mean == pytest.approx(6 / 7, abs=1e-12)


def test_phase_of_amplitudes_is_irrelevant():
    c = CockedSet(5, 0.0)
    m1 = time_average_f(cocked_start(5, 0.6, 0.8), c, 5).mean
    m2 = time_average_f(cocked_start(5, 0.6 * 1j, 0.8 * np.exp(0.3j)), c, 5).mean
    assert m1 == pytest.approx(m2, abs=1e-14)


@pytest.mark.parametrize("n", [5, 7, 11, 13])
@pytest.mark.parametrize("eps", [0.0, 0.2])
def test_compressed_equals_dense(n, eps):
    s = cocked_start(n, 0.6, 0.8)
    c = CockedSet(n, eps)
    dense = time_average_f(s, c, horizon=n)
    fast = orbit_compressed_average(s, c, horizon=n)
    assert fast.mean == pytest.approx(dense.mean, abs=1e-12)


def test_compressed_large_n():
    for n in (101, 1009):
        s = cocked_start(n, INV_SQRT2, INV_SQRT2)
        res = orbit_compressed_average(s, CockedSet(n, 0.0))
        assert res.mean == pytest.approx(0.5 * (1 - 1 / n), abs=1e-12)
        assert res.closed_form == pytest.approx(res.mean, abs=1e-12)


def test_compressed_needs_basis_branches():
    s = combined_state(5, INV_SQRT2, INV_SQRT2, {3: 1.0}, {3: INV_SQRT2, 6: INV_SQRT2})
    with pytest.raises(UnsupportedInitialStateError):
        orbit_compressed_average(s, CockedSet(5, 0.0))


def test_pointer_sees_both_branches():
    # f counts cocked weight in either branch
    s = cocked_start(5, INV_SQRT2, INV_SQRT2)
    pv = PointerVariable(CockedSet(5, 0.0))
    assert pv.value(s) == pytest.approx(0.0, abs=1e-14)
    s1 = evolve_combined(s, 1)
    assert pv.value(s1) == pytest.approx(0.5, abs=1e-12)


def test_born_sweep_error_table():
    rows = born_limit_sweep((INV_SQRT2, INV_SQRT2), [5, 7, 11, 13])
    assert [r.n for r in rows] == [5, 7, 11, 13]
    expected = [0.1, 1 / 14, 1 / 22, 1 / 26]
    for row, err in zip(rows, expected):
        assert isinstance(row, SweepRow)
        assert row.born_weight == pytest.approx(0.5, abs=1e-15)
        assert row.abs_error == pytest.approx(err, abs=1e-12)
        assert row.mean == pytest.approx(0.5 - err, abs=1e-12)


def test_born_sweep_paths_agree():
    rows_d = born_limit_sweep((0.6, 0.8), [5, 7], path="dense")
    rows_c = born_limit_sweep((0.6, 0.8), [5, 7], path="compressed")
    for rd, rc in zip(rows_d, rows_c):
        assert rd.mean == pytest.approx(rc.mean, abs=1e-12)


def test_born_sweep_rejects_nonprime():
    from mingsim.errors import NonPrimeOrderError

    with pytest.raises(NonPrimeOrderError):
        born_limit_sweep((1.0, 0.0), [6])


def test_strict_start_is_cocked():
    s = cocked_start(11, 1.0, 0.0)
    assert set(s.amp0) == {strict_cocked_index(11)}
