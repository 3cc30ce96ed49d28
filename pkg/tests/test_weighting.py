import math

import pytest
from hypothesis import given, strategies as st

from reportcert.errors import LengthMismatch
from reportcert.weighting import (
    BatchLossInput,
    ReportLossInput,
    WeightConfig,
    rep_weight,
    sen_weight,
    weighted_batch_loss,
)

ZERO = WeightConfig(0.0, 0.0, 0.0, 0.0)


def test_rep_weight_values():
    assert rep_weight(0.7, 3.0, 2.0, WeightConfig(alpha=0, beta=0)) == 1.0
    assert rep_weight(0.055556, 0.0, 0.0, WeightConfig(alpha=1, beta=0)) == pytest.approx(0.945960, abs=1e-6)
    assert rep_weight(0.055556, 0.0, 0.0, WeightConfig(alpha=1, beta=0)) == pytest.approx(math.exp(-0.055556), abs=1e-9)
    assert rep_weight(0.0, 0.0, 0.0, WeightConfig(alpha=0, beta=1)) == pytest.approx(math.exp(-1), abs=1e-9)


def test_sen_weight_values():
    assert sen_weight(0.0, WeightConfig()) == 1.0
    assert sen_weight(0.25, WeightConfig(gamma=1)) == pytest.approx(0.778801, abs=1e-6)
    assert sen_weight(5.0, WeightConfig(gamma=0)) == 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        WeightConfig(alpha=-1)
    with pytest.raises(ValueError):
        WeightConfig(gamma=float("nan"))


def test_neutral_config_gives_plain_sum():
    batch = BatchLossInput([
        ReportLossInput([1.5, 2.0], 0.3, [0.1, 0.2], 0.4, 0.5),
        ReportLossInput([0.25], 0.0, [0.9]),
    ], autoen_loss=7.0)
    total, _ = weighted_batch_loss(batch, ZERO)
    assert total == 1.5 + 2.0 + 0.25


def test_single_sentence_forced_arithmetic():
    # rep weight 0.5 and sentence weight 0.5 on a loss of 2.0
    cfg = WeightConfig(alpha=1, beta=0, gamma=1, lambda_autoen=0)
    var = math.log(2)
    total, bd = weighted_batch_loss(BatchLossInput([ReportLossInput([2.0], var, [var])]), cfg)
    assert total == pytest.approx(0.5, abs=1e-12)
    assert bd.reports[0].rep_weight == pytest.approx(0.5)


def test_autoen_term_added():
    batch = BatchLossInput([ReportLossInput([1.0], 0.0, [0.0])], autoen_loss=0.5)
    total, bd = weighted_batch_loss(batch, WeightConfig(beta=0))
    assert total == pytest.approx(1.5)
    assert bd.autoen_term == 0.5


def test_two_report_batch_against_manual_recomputation():
    cfg = WeightConfig(alpha=2.0, beta=0.5, gamma=1.5, lambda_autoen=0.3)
    reports = [
        ReportLossInput([0.4, 1.2, 0.7], 0.02, [0.0, 0.1, 0.3], 0.2, 0.05, "r1"),
        ReportLossInput([2.5], 0.15, [0.6], -0.1, 0.01, "r2"),
    ]
    total, bd = weighted_batch_loss(BatchLossInput(reports, autoen_loss=1.1), cfg)
    expected = 0.3 * 1.1
    for r in reports:
        w = math.exp(-(2.0 * r.smas_var + 0.5 * (math.exp(r.vis_mu_mean) + r.vis_var_mean)))
        expected += w * sum(math.exp(-1.5 * v) * loss for v, loss in zip(r.sentence_vars, r.sentence_losses))
    assert total == pytest.approx(expected, abs=1e-12)
    assert [b.case_id for b in bd.reports] == ["r1", "r2"]
    assert bd.total == total


def test_length_mismatch_names_report_and_index():
    batch = BatchLossInput([ReportLossInput([1.0, 2.0, 3.0], 0.0, [0.1], case_id="case-7")])
    with pytest.raises(LengthMismatch, match=r"case-7.*index 1"):
        weighted_batch_loss(batch, WeightConfig())


def test_negative_loss_rejected():
    with pytest.raises(ValueError):
        weighted_batch_loss(BatchLossInput([ReportLossInput([-1.0], 0.0, [0.0])]), WeightConfig())


variances = st.floats(0, 5, allow_nan=False)


@given(variances, variances, st.floats(0, 3), st.floats(0.001, 2))
def test_weights_monotone_and_positive(v, dv, gamma, alpha):
    cfg = WeightConfig(alpha=alpha, beta=0.0, gamma=gamma)
    assert 0 < sen_weight(v + dv, cfg) <= sen_weight(v, cfg) <= 1
    assert 0 < rep_weight(v + dv, 0.0, 0.0, cfg) <= rep_weight(v, 0.0, 0.0, cfg) <= 1


@given(st.lists(st.tuples(st.floats(0, 5), variances), min_size=1, max_size=5), st.data())
def test_raising_one_variance_never_raises_total(rows, data):
    losses = [loss for loss, _ in rows]
    vars_ = [v for _, v in rows]
    cfg = WeightConfig(alpha=1.0, beta=0.2, gamma=1.0)
    base, _ = weighted_batch_loss(BatchLossInput([ReportLossInput(losses, 0.1, vars_)]), cfg)
    k = data.draw(st.integers(0, len(rows) - 1))
    bumped = list(vars_)
    bumped[k] += data.draw(st.floats(0, 3))
    after, _ = weighted_batch_loss(BatchLossInput([ReportLossInput(losses, 0.1, bumped)]), cfg)
    assert after <= base + 1e-12
    higher_rep, _ = weighted_batch_loss(BatchLossInput([ReportLossInput(losses, 0.9, vars_)]), cfg)
    assert higher_rep <= base + 1e-12
