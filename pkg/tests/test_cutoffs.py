import numpy as np
import pytest

from duropoly import (
    CutoffTable,
    HorizonReason,
    MarketParams,
    StoppingRule,
    TableExhausted,
    compute_cutoffs,
    indifference_gap,
)

from conftest import MU2_08, MU3_08
from helpers import oracle_gap, scan_cutoff


def test_degenerate_table(tabledeg):
    assert tabledeg.cutoffs == (0.0, 0.0)
    assert tabledeg.horizon_reason is HorizonReason.REACHED_ONE
    assert tabledeg.degenerate


def test_first_cutoffs_closed_form(table08):
    assert table08.cutoffs[0] == 0.0
    assert table08.cutoffs[1] == 0.5
    assert table08.cutoffs[2] == pytest.approx(MU2_08, abs=1e-12)
    assert table08.cutoffs[3] == pytest.approx(MU3_08, abs=1e-12)


def test_low_delta_closed_form():
    # impatience pushes the second cutoff almost to 1
    table = compute_cutoffs(MarketParams(1.0, 2.0, 0.1))
    assert table.cutoffs[2] == pytest.approx(21.0 / 22.0, abs=1e-12)


def test_impatience_shortens_delay(table08):
    t_low = compute_cutoffs(MarketParams(1.0, 2.0, 0.1))
    below_low = sum(1 for c in t_low.cutoffs if c < 0.99)
    below_high = sum(1 for c in table08.cutoffs if c < 0.99)
    assert below_low < below_high


def test_cutoffs_strictly_increasing(table08, table095):
    for table in (table08, table095):
        cuts = table.cutoffs
        assert all(cuts[i] < cuts[i + 1] for i in range(1, len(cuts) - 1))
        assert all(0.0 <= c <= 1.0 for c in cuts)


def test_gap_zero_at_next_cutoff(p08, table08):
    for n in range(1, len(table08.cutoffs) - 1):
        r = indifference_gap(p08, table08, n, table08.cutoffs[n + 1])
        assert abs(r) < 1e-10 * p08.v_high


def test_gap_negative_at_own_cutoff(p08, table08):
    # delaying one extra period at the class boundary loses (1 - delta) x value
    assert indifference_gap(p08, table08, 1, 0.5) == pytest.approx(-0.2, abs=1e-12)


def test_gap_positive_above_root(p08, table08):
    assert indifference_gap(p08, table08, 1, MU2_08 + 0.01) > 0.0


def test_gap_monotone_on_grid(p08, table08):
    for n in (1, 2, 3):
        lo = table08.cutoffs[n]
        grid = np.linspace(lo, 1.0, 1001)[:-1]
        vals = [indifference_gap(p08, table08, n, float(m)) for m in grid]
        assert all(b - a >= -1e-12 for a, b in zip(vals, vals[1:]))


def test_gap_input_validation(p08, table08, tabledeg, pdeg):
    with pytest.raises(ValueError):
        indifference_gap(p08, table08, 0, 0.6)
    with pytest.raises(ValueError):
        indifference_gap(p08, table08, len(table08.cutoffs), 0.6)
    with pytest.raises(ValueError):
        indifference_gap(p08, table08, 1, 1.0)
    with pytest.raises(ValueError):
        indifference_gap(pdeg, tabledeg, 1, 0.5)


def test_bisection_matches_sign_scan(p08, table08):
    cuts = table08.cutoffs
    for n in range(1, min(5, len(cuts) - 1)):
        root = scan_cutoff(p08, cuts, n, n_points=100_000)
        assert root is not None
        assert abs(root - cuts[n + 1]) < 1e-8


def test_delay_class_examples(table08):
    assert table08.delay_class(0.3) == 0
    assert table08.delay_class(0.5) == 1  # tie at a cutoff favors delay
    assert table08.delay_class(0.6) == 1
    assert table08.delay_class(table08.cutoffs[2]) == 2


def test_delay_class_steps_exactly_at_cutoffs(table08):
    for n in range(1, len(table08.cutoffs) - 1):
        c = table08.cutoffs[n]
        assert table08.delay_class(c) == n
        assert table08.delay_class(c - 1e-9) == n - 1


def test_delay_class_monotone(table08):
    grid = np.linspace(0.0, 0.9999, 2001)
    classes = [table08.delay_class(float(m)) for m in grid]
    assert all(a <= b for a, b in zip(classes, classes[1:]))


def test_delay_class_beyond_table(table08):
    # the table reached 1, so the tail belongs to the last class
    assert table08.delay_class(1.0 - 1e-8) == len(table08.cutoffs) - 1


def test_delay_class_degenerate(tabledeg):
    assert tabledeg.delay_class(0.0) == 0
    assert tabledeg.delay_class(0.5) == 1
    assert tabledeg.delay_class(0.999) == 1


def test_truncated_table_raises(p08):
    table = compute_cutoffs(p08, StoppingRule(max_cutoffs=3))
    assert table.horizon_reason is HorizonReason.MAX_ITERATIONS
    assert len(table.cutoffs) == 3
    with pytest.raises(TableExhausted):
        table.delay_class(0.9)


def test_stopping_rule_validation():
    with pytest.raises(ValueError):
        StoppingRule(max_cutoffs=1)
    with pytest.raises(ValueError):
        StoppingRule(proximity_to_one=0.0)


def test_alphas_and_gammas(table08):
    # alpha at a cutoff follows the split chain; gamma is (1 - c) delta^k
    cuts, d = table08.cutoffs, table08.params.delta
    assert table08.alphas[0] == 0.0
    assert table08.alphas[1] == 0.5
    expected_a2 = (cuts[2] - 0.5) / 0.5 + d * (1.0 - cuts[2]) / 0.5 * 0.5
    assert table08.alphas[2] == pytest.approx(expected_a2, abs=1e-15)
    for k, c in enumerate(cuts):
        assert table08.gammas[k] == (1.0 - c) * d**k


def test_csv_json_round_trip(table08, tmp_path):
    csv_path = tmp_path / "cutoffs.csv"
    table08.write_csv(csv_path)
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0] == "n,mu_bar"
    parsed = [float(r.split(",")[1]) for r in rows[1:]]
    assert tuple(parsed) == table08.cutoffs

    json_path = tmp_path / "cutoffs.json"
    table08.write_json(json_path)
    import json

    data = json.loads(json_path.read_text())
    assert tuple(data["cutoffs"]) == table08.cutoffs
    assert data["horizon_reason"] == "reached_one"


def test_oracle_gap_agrees_with_production(p08, table08):
    # same function, two independent evaluation routes
    cuts = table08.cutoffs
    for n in (1, 2, 3):
        for m in np.linspace(cuts[n], 0.999, 37):
            a = indifference_gap(p08, table08, n, float(m))
            b = float(oracle_gap(p08, cuts, n, float(m)))
            assert abs(a - b) < 1e-10
