from fractions import Fraction as F
from itertools import product

import pytest

from blowtower.algebra import (
    BaseModel,
    blow_up,
    center_in_fiber,
    complete_intersection_center,
    curve_center,
    make_base,
    point_center,
    slice_center,
)
from blowtower.conditions import (
    CONDITIONAL,
    HOLDS,
    MOVABLE,
    NOT_ESTABLISHED,
    PROPER,
    ConditionCertificate,
    ConditionId,
    base_certificate,
    build_probe_system,
    check_inheritance,
    common_roots,
    lemma_p4_verdict,
    multiproj_nef_power,
    probe_verdict,
    propagate_conditions,
    raw_probe,
)
from blowtower.errors import MathError
from blowtower.exact import UniPoly

from oracles import brute_force_power, quadratic_discriminant, special_degree_polys

C = ConditionId.parse


def pk(k):
    return make_base(BaseModel.projective_space(k))


def full_fiber_tower(movable=True, k=6):
    t = blow_up(pk(k), curve_center(k, 1, k + 1, c1_tangent=2))
    return blow_up(t, center_in_fiber(k, 0, k - 2, "E1", movable=movable))


class TestConditionId:
    def test_parse_round_trip(self):
        c = C("NA(1,2)")
        assert (c.kind, c.r, c.q) == ("NA", 1, 2) and str(c) == "NA(1,2)"

    @pytest.mark.parametrize("bad", ["X(0,0)", "B(0)", "B(-2,0)", "B(0,-1)"])
    def test_parse_rejects(self, bad):
        with pytest.raises(MathError):
            C(bad)

    def test_range_depends_on_dimension(self):
        with pytest.raises(MathError):
            C("B(4,0)").validate(4)
        with pytest.raises(MathError):
            C("B(1,3)").validate(4)
        C("B(1,2)").validate(4)


class TestCertificates:
    def test_holds_carries_no_assumptions(self):
        with pytest.raises(ValueError):
            ConditionCertificate(C("B(0,0)"), HOLDS, ("x",), ())

    def test_conditional_needs_assumptions(self):
        with pytest.raises(ValueError):
            ConditionCertificate(C("B(0,0)"), CONDITIONAL, (), ())


class TestBaseAxioms:
    def test_projective_space(self):
        assert base_certificate(BaseModel.projective_space(5), C("B(1,2)")).verdict == HOLDS

    def test_implications(self):
        base = BaseModel.projective_space(5)
        for kind in ("A", "NB", "NA"):
            cert = base_certificate(base, C(f"{kind}(0,0)"))
            assert cert.verdict == HOLDS and "implied by B(0,0)" in cert.derivation[0]

    def test_picard_one_only_nb(self):
        base = BaseModel.picard_one(5)
        assert base_certificate(base, C("NB(0,0)")).verdict == HOLDS
        assert base_certificate(base, C("B(0,0)")).verdict == NOT_ESTABLISHED
        assert base_certificate(base, C("NB(0,1)")).verdict == NOT_ESTABLISHED
        assert base_certificate(BaseModel.picard_one(5, canonical=-2), C("NB(0,1)")).verdict == HOLDS

    def test_hyperkahler(self):
        assert base_certificate(BaseModel.hyperkahler(2), C("B(1,0)")).verdict == HOLDS
        assert base_certificate(BaseModel.hyperkahler(2), C("B(0,0)")).verdict == NOT_ESTABLISHED

    def test_multi_projective(self):
        base = BaseModel.multi_projective(2, 3)
        assert base_certificate(base, C("A(2,0)")).verdict == HOLDS  # l = 2
        assert base_certificate(base, C("B(0,2)")).verdict == HOLDS  # k1 = 2


class TestProbes:
    def test_point_in_p4(self):
        t = blow_up(pk(4), point_center(4))
        system = build_probe_system(t, 0, 0, 0)
        assert system.n == 3
        assert system.polynomials == (UniPoly([1]),)
        assert system.provenance[0].stripped == 3

    def test_curve_probe(self):
        # c_1(N) = 4, degree 2 in P^4: (H + bE)^3 E -> 6 + 4b after stripping
        t = blow_up(pk(4), curve_center(4, 2, 4))
        system = build_probe_system(t, 0, 0, 0)
        assert system.polynomials == (UniPoly([6, 4]),)

    def test_line_in_p4_with_r1(self):
        t = blow_up(pk(4), curve_center(4, 1, 3))
        system = build_probe_system(t, 0, 1, 0)
        assert [d.e_power for d in system.provenance] == [1, 2]
        # cross-check against direct integration: (H + bE)^2 E^2 with s = 3
        from blowtower.algebra import integrate
        h, e = t.gen("H"), t.gen("E1")
        direct = [integrate(t, h ** (2 - a) * e ** (a + 2)) * __import__("math").comb(2, a) for a in range(3)]
        assert direct[0] == 0
        assert system.polynomials[1] == UniPoly(direct[1:]) == UniPoly([2, 3])

    def test_degenerate_exponent(self):
        t = blow_up(pk(4), point_center(4))
        with pytest.raises(MathError, match="degenerate"):
            build_probe_system(t, 0, 2, 1)

    def test_raw_probe_sign_normalized(self):
        # integrals of w^a E^(k-a) on the blowup of a point: only E^k survives
        p = raw_probe(point_center(4), 3, 0, 1, 0)
        assert p == UniPoly([0, 0, 0, 1])

    @pytest.mark.parametrize("k", range(5, 11))
    @pytest.mark.parametrize("dim_v", range(0, 4))
    def test_special_degrees(self, k, dim_v):
        s = k - dim_v
        center = complete_intersection_center(BaseModel.projective_space(k), [1] + [0] * (s - 1), top=1)
        system = build_probe_system(blow_up(pk(k), center), 0, 1, 0)
        g, f = system.polynomials
        want_f, want_g = special_degree_polys(k, dim_v)
        assert f == UniPoly(want_f) and g == UniPoly(want_g)


class TestCommonRoots:
    def test_shared_root(self):
        roots = common_roots([UniPoly.from_roots([2, 3]), UniPoly.from_roots([2, -1])])
        assert roots.gcd.monic() == UniPoly([-2, 1])
        assert roots.nonzero_real == 1

    def test_all_zero(self):
        with pytest.raises(MathError, match="uninformative"):
            common_roots([UniPoly([]), UniPoly([])])

    def test_verdict_kinds(self):
        t = blow_up(pk(4), curve_center(4, 2, 4))
        system = build_probe_system(t, 0, 0, 0)
        # single probe 6 + 4b has the rational root -3/2
        assert probe_verdict(system, C("NB(0,0)")).verdict == NOT_ESTABLISHED
        assert probe_verdict(system, C("NA(0,0)")).verdict == HOLDS

    def test_irrational_common_root_blocks_na(self):
        from blowtower.conditions import ProbeSystem, ProbeDescriptor
        p = UniPoly([-2, 0, 1])
        system = ProbeSystem((p, p * UniPoly([1, 1])), (ProbeDescriptor(1, 1, 0), ProbeDescriptor(2, 0, 0)),
                             0, 1, 0, 3, F(0))
        assert probe_verdict(system, C("NA(1,0)")).verdict == NOT_ESTABLISHED

    @pytest.mark.parametrize("scale", [F(1, 3), F(2), F(7, 5)])
    def test_scaling_invariance(self, scale):
        t1 = blow_up(pk(5), complete_intersection_center(BaseModel.projective_space(5), [2, 3, 1]))
        c = complete_intersection_center(BaseModel.projective_space(5), [2, 3, 1])
        t2 = blow_up(pk(5), type(c)(**{**c.__dict__, "top": c.top * scale}))
        for cond in ("NB(1,0)", "NA(1,0)", "NB(0,0)"):
            cond = C(cond)
            a = probe_verdict(build_probe_system(t1, 0, cond.r, 0), cond)
            b = probe_verdict(build_probe_system(t2, 0, cond.r, 0), cond)
            assert a.verdict == b.verdict


class TestLemmaP4:
    def test_point(self):
        assert lemma_p4_verdict(point_center(4)).b_values == (0,)

    @pytest.mark.parametrize("deg,c1", [(1, 3), (3, 7), (2, -5), (5, 1)])
    def test_curve(self, deg, c1):
        assert lemma_p4_verdict(curve_center(4, deg, c1)).b_values == (F(-3 * deg, c1),)

    def test_curve_with_zero_c1_flagged(self):
        with pytest.raises(MathError, match="flagged"):
            lemma_p4_verdict(curve_center(4, 2, 0))

    def test_surface_grid(self):
        for d1, d2 in product(range(1, 11), repeat=2):
            res = lemma_p4_verdict(complete_intersection_center(BaseModel.projective_space(4), [d1, d2]))
            q = res.quadratic
            assert res.discriminant == quadratic_discriminant(*q.coeffs) == -3 * (d1 - d2) ** 2
            assert res.real_roots == (d1 == d2)
            if d1 == d2:
                assert res.a_roots == (-d1,) and res.b_values == (F(-1, d1),)

    def test_outside_p4(self):
        with pytest.raises(MathError):
            lemma_p4_verdict(point_center(5))


class TestInheritance:
    def test_ek_i(self):
        t = blow_up(pk(5), curve_center(5, 2, 9))
        assert check_inheritance(t, 0, C("B(1,0)"), "EK-i").verdict == HOLDS
        assert check_inheritance(t, 0, C("B(0,0)"), "EK-i").verdict == NOT_ESTABLISHED

    def test_full_fiber_conditional(self):
        certs = propagate_conditions(full_fiber_tower(), C("B(1,0)"), ["EK-i", "EK-ii'"])
        top = certs[-1]
        assert top.verdict == CONDITIONAL
        assert any(MOVABLE in a for a in top.assumptions)

    def test_full_fiber_without_flag(self):
        certs = propagate_conditions(full_fiber_tower(movable=False), C("B(1,0)"), ["EK-i", "EK-ii'"])
        assert certs[-1].verdict == NOT_ESTABLISHED and certs[-1].failing_step == 1

    @pytest.mark.parametrize("r,expected", [(1, CONDITIONAL), (2, NOT_ESTABLISHED)])
    def test_fiber_hypersurface_parity(self, r, expected):
        # 1 - h^2 normal bundle: the odd Segre terms vanish, so dim W - r must be even
        t = blow_up(pk(6), curve_center(6, 1, 7, c1_tangent=2))
        t = blow_up(t, center_in_fiber(6, 1, 4, "E1", movable=True))
        assert t.steps[1].center.dim_v == 3
        cert = propagate_conditions(t, C(f"B({r},0)"), ["EK-i", "EK-ii'"])[-1]
        assert cert.verdict == expected

    def test_cor_ii_negative_chern(self):
        t = blow_up(pk(6), curve_center(6, 1, 7, c1_tangent=2))
        t = blow_up(t, center_in_fiber(6, 2, 4, "E1", proper_intersection_level=2))
        assert t.steps[1].center.chern[:3] == (1, 1, -1)
        cert = propagate_conditions(t, C("B(1,0)"), ["EK-i", "COR-ii"])[-1]
        assert cert.verdict == CONDITIONAL
        assert any(PROPER in a for a in cert.assumptions)

    def test_ek_iii_prime_needs_q(self):
        t = blow_up(pk(5), curve_center(5, 1, 6, c1_tangent=2))
        with pytest.raises(MathError, match="q > 0"):
            check_inheritance(t, 0, C("B(0,0)"), "EK-iii'")

    def test_ek_iii_prime(self):
        # linear subspace: the Segre class of (1+h)^4 has a negative term
        t = blow_up(pk(6), complete_intersection_center(BaseModel.projective_space(6), [1, 1, 1, 1]))
        assert check_inheritance(t, 0, C("B(1,1)"), "EK-iii'").verdict == NOT_ESTABLISHED
        # fiber center with c = 1 - h: every Segre term is 1 and c_1 restricts amply
        cert = propagate_conditions(full_fiber_tower(), C("B(1,1)"), ["EK-i", "EK-iii'"])[-1]
        assert cert.verdict == CONDITIONAL and any(MOVABLE in a for a in cert.assumptions)
        cert = propagate_conditions(full_fiber_tower(movable=False), C("B(1,1)"), ["EK-i", "EK-iii'"])[-1]
        assert cert.verdict == NOT_ESTABLISHED

    def test_structural_errors(self):
        t = blow_up(pk(5), curve_center(5, 1, 6))
        with pytest.raises(MathError):
            check_inheritance(t, 0, C("B(0,1)"), "COR-i")
        with pytest.raises(MathError):
            check_inheritance(t, 0, C("B(0,1)"), "EK-ii'")
        with pytest.raises(MathError):
            check_inheritance(t, 0, C("B(0,0)"), "no-such-rule")

    def test_probe_rule_restrictions(self):
        t = blow_up(make_base(BaseModel.multi_projective(2, 2)), slice_center(BaseModel.multi_projective(2, 2), 0))
        cert = check_inheritance(t, 0, C("A(1,0)"), "PROBE")
        assert cert.verdict == NOT_ESTABLISHED
        assert any("Picard-one" in line for line in cert.derivation)

    def test_p4_point_na_via_probe(self):
        t = blow_up(pk(4), point_center(4))
        assert check_inheritance(t, 0, C("NA(0,0)"), "PROBE").verdict == HOLDS
        assert check_inheritance(t, 0, C("NB(0,0)"), "PROBE").verdict == HOLDS
        # a line gives the probe 3b + 3, whose root b = -1 blocks NB but not NA
        t2 = blow_up(pk(4), curve_center(4, 1, 3))
        assert check_inheritance(t2, 0, C("NB(0,0)"), "PROBE").verdict == NOT_ESTABLISHED
        assert check_inheritance(t2, 0, C("NA(0,0)"), "PROBE").verdict == HOLDS

    def test_auto_lists_every_rule(self):
        t = blow_up(pk(4), curve_center(4, 1, 3))
        cert = check_inheritance(t, 0, C("B(0,0)"), "auto")
        assert cert.verdict == NOT_ESTABLISHED
        text = "\n".join(cert.derivation)
        for rule in ("EK-i", "EK-ii", "COR-i", "PROBE"):
            assert rule in text


class TestPropagation:
    def test_picard_one_two_points(self):
        t = make_base(BaseModel.picard_one(5))
        t = blow_up(blow_up(t, point_center(5)), point_center(5), host_level=0)
        certs = propagate_conditions(t, C("NB(0,0)"))
        assert [c.verdict for c in certs] == [HOLDS] * 3
        assert propagate_conditions(t, C("B(0,0)"))[-1].verdict == NOT_ESTABLISHED

    def test_failure_propagates_up(self):
        t = blow_up(blow_up(pk(5), curve_center(5, 1, 6)), point_center(5), host_level=0)
        certs = propagate_conditions(t, C("B(0,0)"), ["EK-i", "EK-i"])
        assert certs[1].failing_step == 0 and certs[2].failing_step == 0
        assert certs[2].verdict == NOT_ESTABLISHED

    def test_hyperkahler_curve(self):
        t = blow_up(make_base(BaseModel.hyperkahler(2)), curve_center(4, 1, 0, restriction={}))
        assert propagate_conditions(t, C("B(1,0)"))[-1].verdict == HOLDS

    def test_wrong_variant_count(self):
        with pytest.raises(MathError):
            propagate_conditions(blow_up(pk(4), point_center(4)), C("B(0,0)"), [])


class TestMultiProjective:
    def test_examples(self):
        assert multiproj_nef_power((1, 1), (1, 0), 2).vanishes
        res = multiproj_nef_power((1, 1), (1, 1), 2)
        assert not res.vanishes and res.support == (1, 2)
        assert res.expansion == {(1, 1): 2}

    def test_negative_rejected(self):
        with pytest.raises(MathError, match="nef"):
            multiproj_nef_power((1, 2), (1, -1), 3)

    def test_matches_brute_force(self):
        grid = [F(0), F(1, 2), F(1), F(2)]
        for dims in [(1, 2), (2, 2, 1), (1, 1, 1)]:
            for a in product(grid, repeat=len(dims)):
                for e in range(sum(dims) + 1):
                    assert multiproj_nef_power(dims, a, e).expansion == brute_force_power(dims, a, e)
