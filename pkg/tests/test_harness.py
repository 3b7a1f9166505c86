import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssmusic.errors import ConfigError
from ssmusic.harness import (
    ALGORITHMS,
    CSV_COLUMNS,
    EnsembleSpec,
    aggregate_json,
    generate_problem,
    iteration_histogram,
    phase_transition,
    read_records_csv,
    records_csv,
    run_sweep,
)
from ssmusic.linalg import numerical_rank
from ssmusic.svg import bar_chart_svg, heatmap_svg, line_chart_svg


def test_rank_defective_generation_has_rank_n():
    spec = EnsembleSpec(m=40, K=30, N=20)
    for t in range(3):
        assert numerical_rank(generate_problem(spec, t).Y) == 20


def test_full_rank_generation_has_rank_k():
    spec = EnsembleSpec(m=40, K=8, N=20)
    assert numerical_rank(generate_problem(spec, 0).Y) == 8


def test_generation_is_bitwise_deterministic():
    spec = EnsembleSpec(m=12, K=5, N=3, snr_db=20.0, master_seed=99)
    a, b = generate_problem(spec, 7), generate_problem(spec, 7)
    assert np.array_equal(a.A, b.A) and np.array_equal(a.Y, b.Y)
    assert a.true_support == b.true_support
    assert generate_problem(spec, 8).digest() != a.digest()
    assert generate_problem(spec, 7, spec_index=1).digest() != a.digest()


def test_generated_atoms_are_unit_norm():
    p = generate_problem(EnsembleSpec(m=9, K=4, N=2, n=30), 0)
    np.testing.assert_allclose(np.linalg.norm(p.A, axis=0), 1.0, atol=1e-12)


def test_paired_trials_share_instance():
    res = run_sweep([EnsembleSpec(m=20, K=10, N=5, trials=1)], ["ss_music", "somp"])[0]
    assert res.records["ss_music"][0].problem_hash == res.records["somp"][0].problem_hash


def test_unknown_algorithm_rejected_before_running():
    with pytest.raises(ConfigError):
        run_sweep([EnsembleSpec(m=20, K=10, N=5, trials=1)], ["ss_music", "nope"])


def test_parallel_equals_serial():
    specs = [EnsembleSpec(m=20, K=12, N=4, n=50, trials=12, master_seed=5),
             EnsembleSpec(m=25, K=12, N=4, n=50, trials=12, master_seed=5)]
    a = run_sweep(specs, ["ss_music", "imusic"], threads=1)
    b = run_sweep(specs, ["ss_music", "imusic"], threads=3)
    assert records_csv(a) == records_csv(b)


def test_histogram_overflow_bin_and_mass():
    spec = EnsembleSpec(m=10, K=8, N=2, n=40, trials=20, master_seed=1)
    hist = iteration_histogram(spec, "somp")
    assert sum(hist.values()) == 20
    res = run_sweep([spec], ["somp"])[0]
    assert hist.get(101, 0) == sum(not r.success for r in res.records["somp"])


def test_all_success_histogram_has_empty_overflow():
    hist = iteration_histogram(EnsembleSpec(m=40, K=30, N=20, trials=10), "ss_music")
    assert 101 not in hist


def test_phase_transition_shape_and_regions():
    rates, infeasible, _ = phase_transition([5, 12], [4, 10], N=20, trials=10, n=40)
    assert rates.shape == (2, 2)
    assert infeasible.tolist() == [[False, True], [False, False]]
    assert rates[0, 0] == 1.0  # m = K + 1, full rank
    assert rates[0, 1] == 0.0  # m < K


def test_csv_and_json_outputs():
    res = run_sweep([EnsembleSpec(m=20, K=10, N=5, trials=3, snr_db=None)], ["ss_music"])
    text = records_csv(res, {"seed": 0})
    assert text.startswith("# seed = 0\n")
    rows = read_records_csv(text)
    assert len(rows) == 3
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["snr_db"] == ""
    assert rows[0]["wall_time_us"] == "0"
    doc = json.loads(aggregate_json(res, {"seed": 0}))
    assert doc["schema"] == 1
    agg = doc["results"][0]["algorithms"]["ss_music"]
    assert 0.0 <= agg["success_rate"] <= 1.0
    assert sum(agg["histogram"].values()) == 3


def test_timing_is_opt_in():
    res = run_sweep([EnsembleSpec(m=20, K=10, N=5, trials=2)], ["ss_music"], timing=True)
    assert all(r.wall_time_us > 0 for r in res[0].records["ss_music"])


def test_svg_emitters_are_well_formed():
    import xml.etree.ElementTree as ET

    for doc in (
        heatmap_svg([[0.0, 0.5], [1.0, 0.25]], [10, 20], [5, 6], "phase <map>"),
        line_chart_svg([31, 33, 35], {"ss_music": [0.9, 1.0, 1.0], "somp": [0.0, 0.0, 0.1]}, "sweep", "m"),
        bar_chart_svg({1: 10, 2: 3, 101: 1}, "hist"),
    ):
        root = ET.fromstring(doc)
        assert root.tag.endswith("svg")


@settings(max_examples=40, deadline=None)
@given(m=st.integers(2, 12), n=st.integers(3, 12), K=st.integers(1, 11), N=st.integers(1, 12),
       snr=st.sampled_from([None, 20.0]))
def test_every_algorithm_survives_small_shapes(m, n, K, N, snr):
    K = min(K, n - 1)
    res = run_sweep([EnsembleSpec(m=m, K=K, N=N, n=n, trials=1, snr_db=snr)], list(ALGORITHMS))[0]
    for name in ALGORITHMS:
        assert 0 <= res.records[name][0].iterations <= 101
