"""Dense/Lanczos solvers, labeling, photon filtering, and level tracking."""

import numpy as np
import pytest

from dispersive_nphoton.analytic import dispersive_level
from dispersive_nphoton.eigensolve import (
    DENSE_LIMIT,
    LevelCurve,
    SpectrumResult,
    eigh_dense,
    eigs_lowest,
    filter_by_mean_photon,
    label_by_overlap,
    track_levels,
)
from dispersive_nphoton.errors import (
    CapacityError,
    ConfigError,
    DispersiveNphotonError,
    IterationLimitError,
    PropagationError,
    ResonanceError,
    SolverError,
    TruncationError,
)
from dispersive_nphoton.fockspace import (
    HilbertLayout,
    SparseOperator,
    embed,
    pauli,
    qubit_oscillator_layout,
)
from dispersive_nphoton.models import (
    OscillatorSpec,
    QubitSpec,
    StabilizerSpec,
    SystemSpec,
    build_dispersive,
    build_nJC,
    build_nR,
)


def single(omega_q=2.5, n=2, g=0.02, trunc=30, stabilizer=None):
    return SystemSpec(
        topology="single",
        qubits=(QubitSpec(omega_q=omega_q, n=n, g=g),),
        oscillators=(OscillatorSpec(omega=1.0, trunc=trunc),),
        stabilizer=stabilizer,
    )


def residuals(h, result):
    dense = h.toarray()
    return np.linalg.norm(
        dense @ result.states - result.states * result.energies, axis=0
    )


class TestDense:
    def test_spectrum_properties(self):
        h = build_nR(single(trunc=24))
        res = eigh_dense(h)
        assert res.k == 48
        assert np.all(np.diff(res.energies) >= 0)
        scale = max(1.0, np.max(np.abs(res.energies)))
        assert residuals(h, res).max() <= 1e-12 * scale
        gram = res.states.conj().T @ res.states
        assert np.max(np.abs(gram - np.eye(48))) <= 1e-12
        assert res.mean_photons is not None
        assert np.all(res.mean_photons >= -1e-12)

    def test_energies_only(self):
        res = eigh_dense(build_nR(single(trunc=10)), want_states=False)
        assert res.states is None and res.mean_photons is None
        with pytest.raises(ValueError):
            label_by_overlap(res)

    def test_requires_certified_hermitian(self):
        layout = HilbertLayout((("qubit", 2),))
        lop = SparseOperator.from_dense(layout, [[0.0, 1.0], [0.0, 0.0]])
        assert not lop.hermitian
        with pytest.raises(ValueError):
            eigh_dense(lop)
        with pytest.raises(ValueError):
            eigs_lowest(lop, 1)

    def test_dense_limit(self):
        h = build_nR(single(trunc=16))  # dim 32
        with pytest.raises(CapacityError):
            eigh_dense(h, dense_limit=31)
        assert DENSE_LIMIT == 4096


class TestLanczos:
    def test_matches_dense_reference(self):
        h = build_nR(single(omega_q=3.1, n=3, g=0.05, trunc=80))
        dense = eigh_dense(h, want_states=False)
        low = eigs_lowest(h, 10)
        scale = max(1.0, abs(dense.energies[0]))
        assert np.max(np.abs(low.energies - dense.energies[:10])) <= 1e-9 * scale
        assert residuals(h, low).max() <= 1e-8 * max(1.0, h.one_norm())

    def test_breakdown_restart_finds_other_invariant_subspace(self):
        # sigma_x (x) 1: the all-ones start vector is an exact +1 eigenvector,
        # so the first Krylov step breaks down having seen only half the
        # spectrum; the deterministic restart must still reach the -1 branch.
        layout = qubit_oscillator_layout(1, [4])
        h = embed(layout, [(0, pauli("x"))])
        res = eigs_lowest(h, 2)
        np.testing.assert_allclose(res.energies, [-1.0, -1.0], atol=1e-12)

    def test_degenerate_diagonal_via_restarts(self):
        layout = qubit_oscillator_layout(1, [3])
        h = SparseOperator.from_dense(layout, np.diag([0.0, 0, 1, 1, 2, 2]))
        res = eigs_lowest(h, 4)
        np.testing.assert_allclose(res.energies, [0, 0, 1, 1], atol=1e-12)

    def test_iteration_limit_carries_partial(self):
        h = build_nR(single(trunc=100))
        with pytest.raises(IterationLimitError) as exc_info:
            eigs_lowest(h, 6, max_iters=5)
        partial = exc_info.value.partial
        assert isinstance(partial, SpectrumResult)
        assert 1 <= partial.k <= 6

    def test_zero_operator(self):
        from dispersive_nphoton.fockspace import zeros

        layout = qubit_oscillator_layout(1, [5])
        res = eigs_lowest(zeros(layout), 3)
        np.testing.assert_array_equal(res.energies, np.zeros(3))
        assert res.states.shape == (10, 3)

    def test_k_range_validation(self):
        h = build_nR(single(trunc=8))
        with pytest.raises(ValueError):
            eigs_lowest(h, 0)
        with pytest.raises(ValueError):
            eigs_lowest(h, 17)

    def test_bit_identical_reruns(self):
        h = build_nR(
            single(
                omega_q=3.1,
                n=3,
                g=0.01,
                trunc=150,
                stabilizer=StabilizerSpec("number_power", 0.02),
            )
        )
        a = eigs_lowest(h, 5)
        b = eigs_lowest(h, 5)
        assert np.array_equal(a.energies, b.energies)
        assert np.array_equal(a.states, b.states)


class TestLabeling:
    def test_diagonal_model_labels_exactly(self):
        spec = single(trunc=12)
        res = label_by_overlap(
            eigh_dense(build_dispersive(spec, "rwa", include_squeezing=False))
        )
        p = spec.qubit_params()
        for config, fock, overlap in res.labels:
            assert overlap == pytest.approx(1.0)
            j = fock[0]
            assert res.energy_of(config, fock) == pytest.approx(
                dispersive_level(p, config, j, "rwa"), abs=1e-13
            )

    def test_weakly_coupled_labels_have_high_overlap(self):
        res = label_by_overlap(eigh_dense(build_nR(single(g=0.02, trunc=20))))
        # Every label is unambiguous; low-lying states are nearly bare (mixing
        # grows with the Fock index as g sqrt(j (j-1)) approaches the detuning).
        assert all(entry[2] > 0.5 for entry in res.labels)
        assert all(entry[2] > 0.98 for entry in res.labels[:8])
        assert {entry[0] for entry in res.labels} == {"e", "g"}

    def test_exact_tie_breaks_toward_lower_indices(self):
        layout = qubit_oscillator_layout(1, [2])
        s = 1.0 / np.sqrt(2.0)
        states = np.zeros((4, 2))
        states[0, 0] = s  # |e,0>
        states[2, 0] = s  # |g,0>
        states[0, 1] = s
        states[2, 1] = -s
        res = SpectrumResult(
            energies=np.array([0.0, 1.0]), states=states, layout=layout
        )
        labels = label_by_overlap(res).labels
        assert labels[0] == ("e", (0,), pytest.approx(0.5))
        assert labels[1] == ("g", (0,), pytest.approx(0.5))

    def test_energy_of_key_errors(self):
        res = eigh_dense(build_nR(single(trunc=8)))
        with pytest.raises(KeyError):
            res.energy_of("e", (0,))  # unlabeled
        labeled = label_by_overlap(res)
        with pytest.raises(KeyError):
            labeled.energy_of("e", (99,))


class TestFiltering:
    def _result(self):
        layout = qubit_oscillator_layout(1, [3])
        states = np.eye(6)[:, :3]
        return SpectrumResult(
            energies=np.array([0.0, 1.0, 2.0]),
            states=states,
            layout=layout,
            mean_photons=np.array([0.5, 20.0, 19.999]),
            labels=[("e", (0,), 1.0), ("e", (1,), 1.0), ("e", (2,), 1.0)],
        )

    def test_threshold_is_strict(self):
        kept = filter_by_mean_photon(self._result(), 20.0)
        np.testing.assert_array_equal(kept.energies, [0.0, 2.0])
        np.testing.assert_array_equal(kept.mean_photons, [0.5, 19.999])
        assert [lab[1] for lab in kept.labels] == [(0,), (2,)]
        assert kept.states.shape == (6, 2)

    def test_requires_mean_photons(self):
        res = self._result()
        res.mean_photons = None
        with pytest.raises(ValueError):
            filter_by_mean_photon(res, 10.0)


def _point(layout, energies, states, labels=None):
    return SpectrumResult(
        energies=np.asarray(energies, dtype=float),
        states=np.asarray(states, dtype=float),
        layout=layout,
        labels=labels,
    )


class TestTracking:
    layout = HilbertLayout((("qubit", 2),))

    def test_follows_levels_through_an_index_swap(self):
        eye = np.eye(2)
        swap = eye[:, ::-1]
        pts = [
            _point(self.layout, [0.0, 1.0], eye, labels=[("e", (), 1.0), ("g", (), 1.0)]),
            _point(self.layout, [0.1, 1.1], eye),
            _point(self.layout, [0.2, 1.2], swap),
        ]
        curves = track_levels(pts)
        assert curves[0].label == ("e", ())
        assert curves[0].indices == [0, 0, 1]
        np.testing.assert_allclose(curves[0].energies, [0.0, 0.1, 1.2])
        assert curves[1].indices == [1, 1, 0]
        np.testing.assert_allclose(curves[1].energies, [1.0, 1.1, 0.2])
        assert not curves[0].terminated and not curves[1].terminated
        assert curves[0].overlaps == [1.0, 1.0, 1.0]

    def test_termination_below_continuity_floor(self):
        eye = np.eye(2)
        s = 1.0 / np.sqrt(2.0)
        mixed = np.array([[s, s], [s, -s]])
        pts = [
            _point(self.layout, [0.0, 1.0], eye),
            _point(self.layout, [0.1, 1.1], mixed),
        ]
        curves = track_levels(pts, continuity_floor=0.6)
        for curve in curves:
            assert curve.terminated
            assert curve.terminated_at == 1
            assert curve.indices[1] is None
            assert np.isnan(curve.energies[1])
        # Exactly at the floor the connection is kept (termination is strict <).
        curves = track_levels(pts, continuity_floor=s * s)
        assert not any(c.terminated for c in curves)

    def test_unlabeled_seed_gives_none_labels(self):
        eye = np.eye(2)
        pts = [_point(self.layout, [0.0, 1.0], eye)] * 2
        curves = track_levels(pts)
        assert all(c.label is None for c in curves)
        assert all(isinstance(c, LevelCurve) for c in curves)

    def test_validation(self):
        with pytest.raises(ValueError):
            track_levels([])
        eye = np.eye(2)
        good = _point(self.layout, [0.0, 1.0], eye)
        bad = SpectrumResult(
            energies=np.array([0.0, 1.0]), states=None, layout=self.layout
        )
        with pytest.raises(ValueError):
            track_levels([good, bad])
        other = _point(qubit_oscillator_layout(1, [2]), np.zeros(4), np.eye(4))
        with pytest.raises(ValueError):
            track_levels([good, other])

    def test_real_sweep_keeps_weakly_coupled_levels(self):
        specs = [single(g=g, trunc=20) for g in (0.0, 0.05, 0.1)]
        pts = [label_by_overlap(eigh_dense(build_nJC(s))) for s in specs]
        curves = track_levels(pts)
        tracked = {c.label: c for c in curves}
        ground = tracked[("g", (0,))]
        assert not ground.terminated
        # |g,0> is uncoupled in the rotating model: energy stays -omega_q/2.
        np.testing.assert_allclose(ground.energies, -1.25, atol=1e-12)


class TestErrorTaxonomy:
    def test_hierarchy(self):
        for exc in (
            ConfigError,
            SolverError,
            TruncationError,
            ResonanceError,
            CapacityError,
        ):
            assert issubclass(exc, DispersiveNphotonError)
        assert issubclass(IterationLimitError, SolverError)
        assert issubclass(PropagationError, SolverError)
