import json

import numpy as np
import pytest

from gorlicz.conditions import (
    check_A0,
    check_A1,
    check_A2,
    check_aDec,
    check_aInc,
    check_condition,
    equivalence_constant,
    inverse_monotonicity,
)
from gorlicz.phi import ArgumentError, Coefficient, Conjugate, MaxCombined, Power, double_phase, power, variable_exponent

BUMP = Coefficient("bump", {"amplitude": 1.0, "width": 1.0})
DECAY = Coefficient("decay", {"limit": 2.0, "amplitude": 0.5})
DP = double_phase(2.0, 3.0, BUMP)


def test_power_is_almost_increasing_with_own_exponent():
    rep = check_aInc(power(2.0), 2.0)
    assert rep.verdict == "pass" and rep.constants["L_p"] == 1.0


def test_power_not_almost_increasing_with_larger_exponent():
    rep = check_aInc(power(2.0), 3.0)
    assert rep.verdict == "fail"
    assert rep.witnesses and not rep.constants


def test_double_phase_almost_increasing_with_lower_exponent():
    rep = check_aInc(DP, 2.0)
    assert rep.verdict == "pass" and np.isfinite(rep.constants["L_p"])


def test_power_almost_decreasing_with_own_exponent():
    assert check_aDec(power(3.0), 3.0).passed


def test_almost_decreasing_nests_upwards():
    assert check_aDec(DP, 3.0).passed and check_aDec(DP, 4.0).passed


def test_inverse_satisfies_dual_conditions():
    inc, dec = inverse_monotonicity(DP, 2.0, 3.0)
    assert inc.passed and dec.passed


def test_A0_power_has_unit_beta():
    rep = check_A0(power(3.0))
    assert rep.passed and rep.constants["beta"] == 1.0


def test_A0_double_phase_beta_in_unit_interval():
    beta = check_A0(DP).constants["beta"]
    assert 0.0 < beta <= 1.0


def test_A0_fails_for_growing_weight():
    rep = check_A0(Power(2.0, 1.0, Coefficient("abs", {})))
    assert rep.verdict == "fail" and rep.witnesses


def test_A0_inherited_by_conjugate():
    assert check_A0(DP).passed and check_A0(Conjugate(DP)).passed


def test_A1_x_independent_passes_with_unit_beta():
    rep = check_A1(power(2.0))
    assert rep.passed and rep.constants["beta"] == 1.0


def test_A1_fails_for_exponent_jump():
    phi = variable_exponent(Coefficient("step", {"left": 2.0, "right": 3.0}))
    assert check_A1(phi).verdict == "fail"


def test_A1_smooth_decaying_exponent_passes():
    assert check_A1(variable_exponent(DECAY)).passed


def test_A2_x_independent_passes_with_zero_envelope():
    rep = check_A2(power(2.0))
    assert rep.passed and rep.constants["h_integral"] == 0.0


def test_A2_decaying_exponent_passes():
    assert check_A2(variable_exponent(DECAY)).passed


def test_A2_oscillating_exponent_not_certified():
    phi = variable_exponent(Coefficient("sine", {"mean": 2.0, "amplitude": 1.0}))
    assert check_A2(phi).verdict in ("fail", "inconclusive")


def test_equivalence_with_itself():
    rep = equivalence_constant(DP, DP)
    assert rep.passed and rep.constants["L"] == pytest.approx(1.0, abs=1e-12)


def test_square_equivalent_to_its_affine_maximum():
    assert equivalence_constant(power(2.0), MaxCombined((power(2.0),), (2.0, -1.0))).passed


def test_square_not_equivalent_to_cube():
    rep = equivalence_constant(power(2.0), power(3.0))
    assert rep.verdict == "fail" and rep.witnesses


@pytest.mark.parametrize("phi", [
    power(2.5),
    double_phase(2.0, 3.0, 1.0),
    double_phase(2.0, 3.0, Coefficient("decay", {"limit": 1.0, "amplitude": 1.0})),
    variable_exponent(DECAY),
], ids=["power", "double_phase_const", "double_phase_decay", "variable_exponent"])
def test_double_conjugate_equivalent(phi):
    rep = equivalence_constant(phi, Conjugate(Conjugate(phi)))
    assert rep.passed and rep.constants["L"] < 1.05


@pytest.mark.parametrize("cond,verdict", [("A0", "pass"), ("A1", "pass"), ("A2", "pass"),
                                          ("aInc:2", "pass"), ("aDec:2", "pass"), ("aInc:3", "fail")])
def test_condition_dispatch(cond, verdict):
    assert check_condition(power(2.0), cond).verdict == verdict


def test_condition_dispatch_rejects_unknown():
    with pytest.raises(ArgumentError):
        check_condition(power(2.0), "A7")


def test_report_serialises():
    rep = check_A1(variable_exponent(DECAY))
    d = json.loads(rep.to_json())
    assert d["condition"] == "A1" and d["verdict"] in ("pass", "fail", "inconclusive")
    assert isinstance(d["sampling_plan"], list) and len(d["sampling_plan"]) >= 2


def test_constants_only_on_pass():
    for rep in (check_aInc(power(2.0), 3.0), check_A0(Power(2.0, 1.0, Coefficient("abs", {})))):
        assert rep.verdict != "pass" and rep.constants == {}
