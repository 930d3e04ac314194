import numpy as np
import pytest

from lrpslab.linalg import CovarianceSnapshot
from lrpslab.proposals import METHODS, WHITENED, LiveSet, ProposalState
from lrpslab.slice_engine import StuckChain


def live_from(points):
    points = np.asarray(points, dtype=float)
    return LiveSet(points, np.zeros(len(points)))


def gaussian_live(seed=0, K=200, d=4):
    rng = np.random.default_rng(seed)
    return live_from(rng.normal(size=(K, d)) * np.arange(1, d + 1))


def with_snapshot(kind, matrix):
    state = ProposalState(kind, len(matrix))
    state.snapshot = CovarianceSnapshot.from_matrix(matrix)
    return state


class TestScripted:
    def test_cube_slice_axis(self, scripted):
        state = ProposalState("cube-slice", 3)
        v = state.propose(np.zeros(3), gaussian_live(d=3), scripted(ints=[1]))
        np.testing.assert_array_equal(v, [0.0, 1.0, 0.0])

    def test_de1_keeps_one_coordinate(self, scripted):
        state = ProposalState("de1", 3)
        live = live_from([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]])
        # pair (0, 1), kept axis 1
        v = state.propose(np.zeros(3), live, scripted(ints=[0, 0, 1]))
        np.testing.assert_array_equal(v, [0.0, 2.0, 0.0])

    def test_region_slice_scaled_axis(self, scripted):
        state = with_snapshot("region-slice", np.diag([4.0, 1.0]))
        v = state.propose(np.zeros(2), gaussian_live(d=2), scripted(ints=[0]))
        np.testing.assert_allclose(np.abs(v), [2.0, 0.0])

    def test_de_mix_coin(self, scripted):
        state = with_snapshot("de-mix", np.diag([4.0, 1.0]))
        live = live_from([[1.0, 2.0], [0.0, 0.0]])
        v = state.propose(np.zeros(2), live, scripted(uniforms=[0.3], ints=[1, 0]))
        np.testing.assert_array_equal(v, [-1.0, -2.0])
        v = state.propose(np.zeros(2), live, scripted(uniforms=[0.7], ints=[1]))
        np.testing.assert_allclose(np.abs(v), [0.0, 1.0])


class TestSnapshots:
    def test_unwhitened_ignore_refresh(self):
        state = ProposalState("cube-harm", 4).refresh(gaussian_live())
        assert state.snapshot is None

    @pytest.mark.parametrize("kind", sorted(WHITENED))
    def test_missing_snapshot(self, kind):
        with pytest.raises(RuntimeError):
            ProposalState(kind, 4).propose(np.zeros(4), gaussian_live(), np.random.default_rng(0))

    def test_refresh_epoch_and_reset(self):
        state = ProposalState("region-seq-slice", 4).refresh(gaussian_live(), epoch=7)
        assert state.snapshot.epoch == 7
        rng = np.random.default_rng(0)
        state.propose(np.zeros(4), gaussian_live(), rng)
        assert state.axis_cursor == 1
        state.refresh(gaussian_live(1), epoch=8)
        assert state.axis_cursor == 0

    def test_failed_refresh_keeps_previous(self, caplog):
        state = ProposalState("region-harm", 2).refresh(gaussian_live(d=2), epoch=1)
        old = state.snapshot
        state.refresh(live_from([[0.3, 0.3]] * 5), epoch=2)
        assert state.snapshot is old
        assert state.warnings == 1
        assert "keeping previous" in caplog.text

    def test_refresh_clears_pending_batch(self):
        state = ProposalState("region-ortho-harm", 4).refresh(gaussian_live())
        state.propose(np.zeros(4), gaussian_live(), np.random.default_rng(0))
        assert len(state.pending) == 3
        state.refresh(gaussian_live(2))
        assert len(state.pending) == 0


class TestInvariants:
    def test_axis_aligned(self):
        rng = np.random.default_rng(0)
        live = gaussian_live(d=6)
        for kind in ("cube-slice", "de1"):
            state = ProposalState(kind, 6)
            for _ in range(200):
                v = state.propose(np.zeros(6), live, rng)
                assert np.count_nonzero(v) == 1

    def test_cube_harm_unit(self):
        state = ProposalState("cube-harm", 5)
        rng = np.random.default_rng(1)
        for _ in range(50):
            assert np.linalg.norm(state.propose(None, None, rng)) == pytest.approx(1.0)

    def test_cube_ortho_batches(self):
        d = 5
        state = ProposalState("cube-ortho-harm", d)
        rng = np.random.default_rng(2)
        for _ in range(10):
            batch = np.array([state.propose(None, None, rng) for _ in range(d)])
            np.testing.assert_allclose(batch @ batch.T, np.eye(d), atol=1e-10)

    def test_region_ortho_batches_whitened_orthogonal(self):
        d = 4
        live = gaussian_live(d=d)
        state = ProposalState("region-ortho-harm", d).refresh(live)
        rng = np.random.default_rng(3)
        batch = np.array([state.propose(None, live, rng) for _ in range(d)])
        inv_root = np.linalg.inv(state.snapshot.sqrt_map)
        w = batch @ inv_root.T
        np.testing.assert_allclose(w @ w.T, np.eye(d), atol=1e-8)

    def test_region_seq_cycles_in_order(self):
        d = 3
        live = gaussian_live(d=d)
        state = ProposalState("region-seq-slice", d).refresh(live)
        rng = np.random.default_rng(0)
        got = [state.propose(None, live, rng) for _ in range(2 * d)]
        for i, v in enumerate(got):
            np.testing.assert_array_equal(v, state.snapshot.axes[:, i % d])

    def test_region_harm_within_covariance_ellipsoid(self):
        live = gaussian_live(d=4)
        state = ProposalState("region-harm", 4).refresh(live)
        inv = np.linalg.inv(state.snapshot.matrix)
        rng = np.random.default_rng(4)
        for _ in range(100):
            v = state.propose(None, live, rng)
            assert v @ inv @ v <= 1 + 1e-9

    def test_de_vectors_are_live_differences(self):
        live = gaussian_live(K=10, d=3)
        diffs = {tuple(a - b) for a in live.points for b in live.points}
        state = ProposalState("de-harm", 3)
        rng = np.random.default_rng(5)
        for _ in range(100):
            assert tuple(state.propose(None, live, rng)) in diffs

    def test_exclude_never_paired(self):
        live = live_from([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        state = ProposalState("de-harm", 2)
        rng = np.random.default_rng(6)
        for _ in range(200):
            v = state.propose(None, live, rng, exclude=0)
            assert tuple(np.abs(v)) == (1.0, 1.0)

    def test_duplicate_points_stuck(self):
        live = live_from([[0.2, 0.2]] * 4)
        with pytest.raises(StuckChain):
            ProposalState("de-harm", 2).propose(None, live, np.random.default_rng(0))

    def test_too_few_after_exclusion(self):
        live = live_from([[0.0, 0.0], [1.0, 1.0]])
        with pytest.raises(StuckChain):
            ProposalState("de1", 2).propose(None, live, np.random.default_rng(0), exclude=1)


@pytest.mark.parametrize("kind", METHODS)
def test_deterministic_per_seed(kind):
    live = gaussian_live(d=4)
    out = []
    for _ in range(2):
        state = ProposalState(kind, 4).refresh(live)
        rng = np.random.default_rng(42)
        out.append(np.array([state.propose(live.points[0], live, rng) for _ in range(9)]))
    np.testing.assert_array_equal(*out)
    assert np.all(np.linalg.norm(out[0], axis=1) > 0)


def test_unknown_method():
    with pytest.raises(ValueError):
        ProposalState("gibbs", 3)
