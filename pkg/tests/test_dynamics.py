from fractions import Fraction as F

import pytest

from blowtower.dynamics import (
    ADDITIVE,
    EXPONENT,
    MULTIPLICATIVE,
    NO_CONCLUSION,
    DegreeProfile,
    DerivationStep,
    check_log_concavity,
    derive_rigidity,
    duality_flip,
    entropy_and_hyperbolicity,
    hyperkahler_profile,
)
from blowtower.errors import MathError


def gates_pass(k, r, q):
    return k > 2 * r + 2 and k - r - 1 - q > r + 1


class TestProfiles:
    def test_hyperkahler_values(self):
        assert hyperkahler_profile(2, 2).values == (1, 2, 4, 2, 1)
        assert hyperkahler_profile(1, F(3, 2)).values == (1, F(3, 2), 1)

    def test_lambda_below_one_rejected(self):
        with pytest.raises(MathError):
            hyperkahler_profile(2, F(1, 2))

    def test_duality_flip(self):
        p = DegreeProfile((F(1), F(3), F(5), F(2)), MULTIPLICATIVE)
        assert duality_flip(p).values == (2, 5, 3, 1)
        assert duality_flip(duality_flip(p)) == p

    def test_log_concavity_detects_failure(self):
        assert not check_log_concavity(DegreeProfile((F(1), F(1), F(4), F(1)), MULTIPLICATIVE))
        assert check_log_concavity(DegreeProfile((F(0), F(2), F(3), F(3)), EXPONENT))
        assert not check_log_concavity(DegreeProfile((F(0), F(1), F(3)), ADDITIVE))


class TestEntropy:
    def test_hyperkahler(self):
        rep = entropy_and_hyperbolicity(hyperkahler_profile(2, 2))
        assert rep.expression == "log(4)"
        assert rep.cohomologically_hyperbolic and rep.dominant_index == 2

    def test_trivial(self):
        rep = entropy_and_hyperbolicity(hyperkahler_profile(3, 1))
        assert rep.expression == "0" and not rep.cohomologically_hyperbolic

    def test_tie_is_not_hyperbolic(self):
        rep = entropy_and_hyperbolicity(DegreeProfile((F(1), F(3), F(3), F(1)), MULTIPLICATIVE))
        assert rep.entropy_base == 3 and rep.dominant_index is None

    def test_exponent_mode(self):
        rep = entropy_and_hyperbolicity(DegreeProfile((F(0), F(1), F(2), F(1), F(0)), EXPONENT))
        assert rep.expression == "2*log(lambda_1)" and rep.dominant_index == 2


class TestRigidity:
    @pytest.mark.parametrize("k", range(3, 13))
    def test_gates(self, k):
        for r in range(-1, k):
            for q in range(0, k - r):
                trace = derive_rigidity(k, r, q)
                if gates_pass(k, r, q):
                    assert trace.verdict == "λ₁=1"
                    assert derive_rigidity(k, r, q, ADDITIVE).verdict == "m₁=0"
                else:
                    assert trace.verdict == NO_CONCLUSION and not trace.concluded

    def test_trace_rules(self):
        trace = derive_rigidity(6, 0, 0)
        rules = [s.rule for s in trace.steps]
        assert rules[:2] == ["gate", "gate"]
        assert {"eigen-class powering", "log-concavity equalization", "duality flip", "contradiction"} <= set(rules)
        assert (5, 5) in trace.lower_bounds

    def test_additive_cites_external(self):
        trace = derive_rigidity(6, 0, 1, ADDITIVE)
        assert trace.steps[-1].rule == "cited-external"

    def test_inverse_direction(self):
        trace = derive_rigidity(7, 1, 0, inverse=True)
        assert trace.verdict == "λ₁=1"
        assert "f^-1" in trace.steps[2].relation

    def test_out_of_range(self):
        with pytest.raises(MathError):
            derive_rigidity(4, 4, 0)
        with pytest.raises(MathError):
            derive_rigidity(4, 0, 4)

    def test_unregistered_rule(self):
        with pytest.raises(ValueError):
            DerivationStep("intuition", "x", "y")
