import math

import numpy as np
import pytest

from lgsim.protocol import ProtocolParams, closed_form_q3
from lgsim.stats import NdcTest, ShotRecord, ndc_test, sample_protocol

HALF_PI = math.pi / 2
PAPER = ProtocolParams(HALF_PI, HALF_PI, 18e-9, 10e-9)


def test_record_invariants():
    r = ShotRecord(30, 70)
    assert r.shots == 100
    assert r.estimate == pytest.approx(-0.4)
    assert r.std_error == pytest.approx(math.sqrt((1 - 0.16) / 100))


def test_ground_state_never_fires():
    r = sample_protocol(ProtocolParams(0.0, 0.0), True, 5000, 1)
    assert r.n_minus == 5000 and r.n_plus == 0


def test_seed_reproducible():
    assert sample_protocol(PAPER, False, 1000, 9) == sample_protocol(PAPER, False, 1000, 9)


def test_zero_shots_rejected():
    with pytest.raises(ValueError):
        sample_protocol(PAPER, True, 0, 1)


def test_pulse_estimate_concentrates_at_zero():
    shots = 10**5
    r = sample_protocol(PAPER, True, shots, 2)
    assert abs(r.estimate) < 5 / math.sqrt(shots)


def test_identical_records():
    r = ShotRecord(400, 600)
    t = ndc_test(r, r)
    assert t.z_score == 0 and t.p_value == 1


def test_plug_in_arithmetic():
    # d_hat = 0.1653 with se ~ 0.00985 per arm
    se_arm = math.sqrt((1 - 0.0) / 1e4)
    r_g = ShotRecord(5000, 5000)
    r_n = ShotRecord(5827, 4173)
    t = ndc_test(r_g, r_n)
    assert t.d_hat == pytest.approx(0.1654)
    assert t.se_d == pytest.approx(math.hypot(se_arm, r_n.std_error))
    assert 11.5 < t.z_score < 12.2
    assert t.p_value < 1e-20


def test_degenerate_records():
    t = ndc_test(ShotRecord(10, 0), ShotRecord(0, 10))
    assert t.degenerate and t.p_value == 0
    t = ndc_test(ShotRecord(10, 0), ShotRecord(10, 0))
    assert t.degenerate and t.p_value == 1


def test_small_samples_rarely_significant():
    rejects = 0
    for k in range(200):
        g = sample_protocol(PAPER, True, 10, 2 * k)
        n = sample_protocol(PAPER, False, 10, 2 * k + 1)
        rejects += ndc_test(g, n).rejects(0.01)
    assert rejects < 40


def test_estimator_unbiased():
    shots, runs = 2000, 1000
    mu = closed_form_q3(HALF_PI, HALF_PI, 18e-9, 10e-9, False)
    estimates = [sample_protocol(PAPER, False, shots, s).estimate for s in range(runs)]
    se = math.sqrt((1 - mu**2) / shots) / math.sqrt(runs)
    assert abs(np.mean(estimates) - mu) < 4 * se
