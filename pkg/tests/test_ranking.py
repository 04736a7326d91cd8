import numpy as np
import pytest

from slotrank import (
    CapacityError,
    HEParams,
    HESimulator,
    KernelConfig,
    block_merge,
    block_size_for,
    block_split,
    compare_kernel,
    multi_rank,
    rank,
    rank_corrected,
    read_row,
    tie_offset,
)
from slotrank import reference
from slotrank.ranking import multi_rank_pipeline, rank_pipeline, read_col

IDEAL = KernelConfig(mode="ideal", degree=256)


def make_engine(slot_count, max_level=40):
    return HESimulator(HEParams(slot_count=slot_count, max_level=max_level))


def tie_heavy_vector(rng, n):
    v = rng.uniform(0, 1, n)
    dup = rng.integers(0, n, size=max(1, n // 3))
    v[dup] = v[rng.integers(0, n, size=dup.size)]
    return v


# ----------------------------------------------------------------------
# single ciphertext
# ----------------------------------------------------------------------


def test_rank_known_vector():
    eng = make_engine(16)
    res = rank(eng, eng.encrypt([20, 30, 10, 40]), 4, IDEAL)
    assert np.array_equal(read_row(eng, res.ranks, 4), [2, 3, 1, 4])
    assert not res.corrected


def test_rank_with_padding_fractional_ties():
    eng = make_engine(64)
    res = rank(eng, eng.encrypt([50, 10, 20, 20, 40]), 5, IDEAL)
    assert np.array_equal(read_row(eng, res.ranks, 5), [5, 1, 2.5, 2.5, 4])
    assert np.all(eng.decrypt(res.ranks)[5:] == 0)


def test_rank_constant_vector():
    for n in (4, 8):
        eng = make_engine(64)
        res = rank(eng, eng.encrypt([3.3] * n), n, IDEAL)
        assert np.array_equal(read_row(eng, res.ranks, n), [(n + 1) / 2] * n)


def test_rank_budget_counters():
    for n in (4, 8, 16, 5, 100):
        side = 1 << (n - 1).bit_length()
        eng = make_engine(max(16, side * side))
        eng.cost_reset()
        rank(eng, eng.encrypt(np.random.default_rng(n).uniform(size=n)), n, IDEAL)
        rep = eng.cost_snapshot()
        log_n = (side - 1).bit_length()
        assert rep.cmp_evals == 1
        assert rep.rotations <= 4 * log_n
        assert rep.critical_rotations <= 3 * log_n
        assert rep.levels_consumed <= 9 + 4  # ideal depth of degree 256 is 9


def test_rank_capacity_error_points_at_blocks():
    eng = make_engine(16)
    with pytest.raises(CapacityError):
        rank(eng, eng.encrypt(np.zeros(5)), 5, IDEAL)


def test_rank_matches_oracle_randomised():
    rng = np.random.default_rng(40)
    for n in (4, 8, 16, 32):
        eng = make_engine(n * n)
        for trial in range(30):
            v = tie_heavy_vector(rng, n) if trial % 5 == 0 else rng.uniform(0, 1, n)
            res = rank(eng, eng.encrypt(v), n, IDEAL)
            assert np.array_equal(read_row(eng, res.ranks, n), reference.fractional_ranks(v))


def test_column_form_rank_matches_row_form():
    rng = np.random.default_rng(8)
    eng = make_engine(64)
    v = rng.uniform(0, 1, 8)
    row = rank_pipeline(eng, eng.encrypt(v), 8, IDEAL)
    col = rank_pipeline(eng, eng.encrypt(v), 8, IDEAL, column_form=True)
    assert np.array_equal(
        read_row(eng, row.result.ranks, 8),
        read_col(eng, col.result.ranks, col.result.layout, 8),
    )


# ----------------------------------------------------------------------
# tie correction
# ----------------------------------------------------------------------


def test_tie_offset_known_vectors():
    eng = make_engine(16)
    pipe = rank_pipeline(eng, eng.encrypt([10, 20, 20, 40]), 4, IDEAL)
    f = tie_offset(eng, pipe.comparison, pipe.result.layout)
    assert np.array_equal(read_row(eng, f, 4), [0, -0.5, 0.5, 0])


def test_tie_offset_distinct_is_zero():
    eng = make_engine(16)
    pipe = rank_pipeline(eng, eng.encrypt([4, 1, 3, 2]), 4, IDEAL)
    f = tie_offset(eng, pipe.comparison, pipe.result.layout)
    assert np.array_equal(read_row(eng, f, 4), [0, 0, 0, 0])


def test_tie_offset_all_equal():
    # positions in the tie are 1..4, tie size 4: offsets (1..4) - 2 - 0.5
    eng = make_engine(16)
    pipe = rank_pipeline(eng, eng.encrypt([7, 7, 7, 7]), 4, IDEAL)
    f = tie_offset(eng, pipe.comparison, pipe.result.layout)
    assert np.array_equal(read_row(eng, f, 4), [-1.5, -0.5, 0.5, 1.5])
    assert np.array_equal(
        read_row(eng, f, 4), reference.tie_offsets([7.0, 7.0, 7.0, 7.0])
    )


def test_rank_corrected_known_vectors():
    eng = make_engine(16)
    res = rank_corrected(eng, eng.encrypt([10, 20, 20, 40]), 4, IDEAL)
    assert res.corrected
    assert np.array_equal(read_row(eng, res.ranks, 4), [1, 2, 3, 4])
    res = rank_corrected(eng, eng.encrypt([5, 5, 5, 5]), 4, IDEAL)
    assert np.array_equal(read_row(eng, res.ranks, 4), [1, 2, 3, 4])


def test_rank_corrected_equals_rank_on_distinct_input():
    rng = np.random.default_rng(3)
    eng = make_engine(64)
    v = rng.permutation(8) * 0.1
    plain = rank(eng, eng.encrypt(v), 8, IDEAL)
    corrected = rank_corrected(eng, eng.encrypt(v), 8, IDEAL)
    assert np.array_equal(read_row(eng, plain.ranks, 8), read_row(eng, corrected.ranks, 8))


def test_rank_corrected_is_permutation_and_respects_position_order():
    rng = np.random.default_rng(77)
    for n in (4, 8, 16, 32):
        eng = make_engine(n * n)
        for trial in range(25):
            v = tie_heavy_vector(rng, n)
            got = read_row(eng, rank_corrected(eng, eng.encrypt(v), n, IDEAL).ranks, n)
            assert np.array_equal(np.sort(got), np.arange(1, n + 1))
            assert np.array_equal(got, reference.corrected_ranks(v))
            # ranks inside a tie group increase with the position index
            for value in np.unique(v):
                group = got[v == value]
                assert np.all(np.diff(group) > 0)


def test_rank_corrected_level_budget():
    eng = make_engine(64, max_level=40)
    eng.cost_reset()
    rank_corrected(eng, eng.encrypt(np.random.default_rng(0).uniform(size=8)), 8, IDEAL)
    rep = eng.cost_snapshot()
    assert rep.levels_consumed <= 9 + 4
    assert rep.cmp_evals == 1


# ----------------------------------------------------------------------
# blocks
# ----------------------------------------------------------------------


def test_block_split_shapes():
    eng = make_engine(16)  # block side 4
    assert block_size_for(eng) == 4
    bv = block_split(eng, np.arange(8.0))
    assert len(bv.blocks) == 2 and bv.block_size == 4
    bv = block_split(eng, np.arange(5.0))
    assert len(bv.blocks) == 2
    assert np.array_equal(eng.decrypt(bv.blocks[1])[:4], [4, 0, 0, 0])
    assert bv.valid_in(1) == 1


def test_block_round_trip():
    eng = make_engine(16)
    rng = np.random.default_rng(0)
    for n in (3, 4, 5, 8, 13):
        v = rng.normal(size=n)
        assert np.array_equal(block_merge(eng, block_split(eng, v)), v)


def test_multi_rank_matches_single_and_oracle():
    eng = make_engine(16)
    v = np.array([3.0, 1.0, 7.0, 5.0, 8.0, 2.0, 6.0, 4.0])
    merged = block_merge(eng, multi_rank(eng, block_split(eng, v), IDEAL))
    assert np.array_equal(merged, v)  # a permutation of 1..8 ranks to itself
    assert np.array_equal(merged, reference.fractional_ranks(v))


def test_multi_rank_single_block_degenerates_to_rank():
    eng = make_engine(16)
    v = np.array([0.4, 0.1, 0.9, 0.6])
    multi = block_merge(eng, multi_rank(eng, block_split(eng, v), IDEAL))
    single = read_row(eng, rank(eng, eng.encrypt(v), 4, IDEAL).ranks, 4)
    assert np.array_equal(multi, single)


def test_multi_rank_comparison_count():
    for n, expected_pairs in ((16, 10), (12, 6), (8, 3)):
        eng = make_engine(16)  # block size 4
        eng.cost_reset()
        multi_rank(eng, block_split(eng, np.random.default_rng(n).uniform(size=n)), IDEAL)
        assert eng.cost_snapshot().cmp_evals == expected_pairs


def test_multi_rank_with_padding():
    eng = make_engine(16)
    v = np.array([50.0, 10.0, 20.0, 20.0, 40.0])
    merged = block_merge(eng, multi_rank(eng, block_split(eng, v), IDEAL))
    assert np.array_equal(merged, [5, 1, 2.5, 2.5, 4])


def test_multi_rank_tie_correction_matches_oracle():
    rng = np.random.default_rng(15)
    eng = make_engine(16)
    for n in (6, 8, 11, 16):
        for _ in range(10):
            v = tie_heavy_vector(rng, n)
            merged = block_merge(
                eng, multi_rank(eng, block_split(eng, v), IDEAL, tie_correction=True)
            )
            assert np.array_equal(merged, reference.corrected_ranks(v))


def test_multi_rank_parallel_matches_serial():
    eng = make_engine(16)
    v = np.random.default_rng(2).uniform(size=16)
    serial = block_merge(eng, multi_rank(eng, block_split(eng, v), IDEAL))
    parallel = block_merge(eng, multi_rank(eng, block_split(eng, v), IDEAL, parallel=True))
    assert np.array_equal(serial, parallel)


def test_multi_rank_complement_identity():
    eng = make_engine(16)
    v = np.random.default_rng(6).uniform(size=16)
    pipe = multi_rank_pipeline(eng, block_split(eng, v), IDEAL)
    b = pipe.layout.n_dim
    for (i, j), stored in pipe.comparisons.items():
        if i == j:
            continue
        reverse = compare_kernel(eng, pipe.row_replicated[j], pipe.col_replicated[i], IDEAL)
        lhs = eng.decrypt(stored)[: b * b].reshape(b, b)
        rhs = eng.decrypt(reverse)[: b * b].reshape(b, b)
        assert np.array_equal(lhs + rhs.T, np.ones((b, b)))


def test_multi_rank_matches_single_when_both_fit():
    eng = make_engine(256)  # block side 16, and 16 values fit a single 16x16 matrix
    v = np.random.default_rng(12).uniform(size=16)
    single = read_row(eng, rank(eng, eng.encrypt(v), 16, IDEAL).ranks, 16)
    multi = block_merge(eng, multi_rank(eng, block_split(eng, v), IDEAL))
    assert np.array_equal(single, multi)


def test_block_pack_merges_under_encryption():
    from slotrank import block_pack

    eng = make_engine(64)  # block side 8
    v = np.random.default_rng(20).uniform(size=20)
    bv = block_split(eng, v)
    assert np.array_equal(eng.decrypt(block_pack(eng, bv))[:20], v)
    eng.cost_reset()
    ranks = multi_rank(eng, bv, IDEAL)
    eng.cost_reset()
    packed = block_pack(eng, ranks)
    rep = eng.cost_snapshot()
    assert np.array_equal(eng.decrypt(packed)[:20], reference.fractional_ranks(v))
    assert rep.rotations == len(bv.blocks) - 1
    assert rep.ctct_mults == 0 and rep.ctpt_mults == 0


def test_polynomial_rank_tolerates_simulated_scheme_noise():
    # per-op noise emulates scheme error; the smooth comparison kernel
    # absorbs it for separated values (the ideal step would not)
    eng = HESimulator(HEParams(slot_count=64, max_level=40, noise_sigma=1e-9, seed=3))
    cfg = KernelConfig(mode="chebyshev", degree=256)
    v = np.array([0.9, 0.1, 0.35, 0.55, 0.7])
    got = read_row(eng, rank(eng, eng.encrypt(v), 5, cfg).ranks, 5)
    assert np.max(np.abs(got - reference.fractional_ranks(v))) < 1e-2
