"""Built-in fixtures: the worked examples every install must reproduce.

Each fixture raises on failure; run_fixtures reports one entry per fixture
and never stops early, so a broken install shows everything that is wrong.
"""

from __future__ import annotations

import sys

from . import center as C
from . import cohomology as coh
from . import diffeq as DQ
from . import trivialization as TV
from .endo import bkk_family, etale_family, identity_endo
from .parser import parse_expr
from .scalars import FieldParams, Witt2
from .weyl import AlgebraParams, commutator


def _f3() -> FieldParams:
    return FieldParams(3)


def fixture_witt_ring() -> None:
    """W_2(F_p) is Z/p^2 under (a1, a2) -> a1^p + p a2^p, for p = 2, 3."""
    for p in (2, 3):
        field = FieldParams(p)

        def enc(w: Witt2) -> int:
            return (w.a1.coeffs[0] ** p + p * w.a2.coeffs[0] ** p) % (p * p)

        elems = [Witt2(field.element((a,)), field.element((b,))) for a in range(p) for b in range(p)]
        assert len({enc(w) for w in elems}) == p * p
        for x in elems:
            for y in elems:
                assert enc(x + y) == (enc(x) + enc(y)) % (p * p)
                assert enc(x * y) == (enc(x) * enc(y)) % (p * p)
            assert x.times_p() == field.w2_from_int(p * enc(x))


def fixture_normal_order() -> None:
    """Kernel product equals the one-swap rewriting oracle on small inputs."""
    from .weyl import mono_mul, mono_mul_naive

    alg = AlgebraParams(1, _f3())
    for ea in ((0, 0), (1, 2), (2, 1), (2, 2)):
        for eb in ((1, 1), (2, 0), (2, 2)):
            for ring in ("k", "w2"):
                assert mono_mul(alg, ea, eb, ring) == mono_mul_naive(alg, ea, eb, ring)


def fixture_bkk() -> None:
    """The nonliftable quadruple: C pattern, verdicts, gamma, center image."""
    field = _f3()
    alg = AlgebraParams(2, field)
    e = bkk_family(alg, 2, field.one)
    rep = e.analyze()
    minus1 = C.poly_const(alg, "x", -field.one)
    for i in range(4):
        for j in range(4):
            want = minus1 if (i, j) == (0, 3) else (-minus1 if (i, j) == (3, 0) else None)
            got = rep.C[i][j]
            assert got == (want if want is not None else C.poly_zero(alg, "x"))
    assert not rep.liftable and not rep.poisson
    sol = DQ.gamma_solution(e)
    assert sol.gamma[2] == C.poly_var(alg, "y", 1)
    for i in (0, 1, 3):
        assert sol.gamma[i].is_zero()
    assert not sol.symmetric
    want = (
        C.poly_var(alg, "x", 0)
        + C.poly_from_terms(alg, "x", {(0, 3, 2, 0): field.one})
        - C.poly_var(alg, "x", 1)
    )
    assert e.center_images[0] == want


def fixture_etale_family() -> None:
    """phi = (z1, z2 + z2^3 z1^i): liftable iff i < 2; explicit lift at i=0."""
    field = _f3()
    alg = AlgebraParams(1, field)
    for i in range(3):
        rep = etale_family(alg, i, field.one).analyze()
        assert rep.liftable == rep.poisson == rep.etale == (i < 2)
    e = etale_family(alg, 0, field.one)
    lift = coh.construct_lift(e)
    assert isinstance(lift, coh.Lift)
    # the textbook lift: Phi(z1) = [z1] - p [z2^2 z1], Phi(z2) = [z2] + [z2^3]
    z1 = alg.gen(0, "w2")
    z2 = alg.gen(1, "w2")
    Phi1 = z1 - coh.p_times_lift(alg.monomial((1, 2), field.one, "k"))
    Phi2 = z2 + alg.monomial((0, 3), field.w2_one(), "w2")
    om = alg.from_terms({(0, 0): field.w2_from_int(-1)}, "w2")
    assert commutator(Phi1, Phi2) == om
    assert coh.verify_lift(alg, [Phi1, Phi2])
    assert coh.verify_lift(alg, lift.Phi)


def fixture_obstruction_witness() -> None:
    """BKK p=3: harmonic certificate matches c_14 and the residual identity."""
    field = _f3()
    alg = AlgebraParams(2, field)
    e = bkk_family(alg, 2, field.one)
    out = coh.construct_lift(e)
    assert isinstance(out, coh.ObstructionWitness)
    hp = out.harmonic[(0, 3)]
    assert coh.harmonic_to_center(alg, hp) == C.poly_const(alg, "x", -field.one)
    assert list(out.harmonic) == [(0, 3)]


def fixture_trace() -> None:
    """Trace identities of the trivialization."""
    field = _f3()
    alg = AlgebraParams(1, field)
    ide = identity_endo(alg)
    f = alg.monomial((2, 2), field.one, "k")
    assert TV.trace(TV.rep(alg, f)) == C.poly_const(alg, "y", -field.one)
    assert TV.trace_top_coefficient(ide, f) == C.poly_one(alg, "y")
    alg2 = AlgebraParams(2, field)
    e = bkk_family(alg2, 2, field.one)
    prod = alg2.one_elem()
    for i in range(4):
        prod = prod * e.u(i) ** 2
    assert TV.trace_top_coefficient(e, prod) == C.poly_one(alg2, "y")


def fixture_conjugator() -> None:
    """Conjugator recovery on the identity and an etale twist."""
    field = _f3()
    alg = AlgebraParams(1, field)
    cj = TV.conjugator_for_endo(identity_endo(alg))
    assert TV.mat_eq(cj.G, TV.mat_identity(alg, 3))
    cj = TV.conjugator_for_endo(etale_family(alg, 1, field.one))
    assert cj.det.is_constant() and not cj.det.is_zero()


def fixture_parser() -> None:
    """The grammar examples parse to the intended elements."""
    field = _f3()
    alg2 = AlgebraParams(2, field)
    e = parse_expr(alg2, "z1 + z2^3*z3^2")
    assert e.terms == {(1, 0, 0, 0): field.one, (0, 3, 2, 0): field.one}
    alg1 = AlgebraParams(1, field)
    e = parse_expr(alg1, "z2*z1")
    assert e.terms == {(1, 1): field.one, (0, 0): field.one}


FIXTURES = (
    ("witt-ring", fixture_witt_ring),
    ("normal-order", fixture_normal_order),
    ("bkk", fixture_bkk),
    ("etale-family", fixture_etale_family),
    ("obstruction-witness", fixture_obstruction_witness),
    ("trace", fixture_trace),
    ("conjugator", fixture_conjugator),
    ("parser", fixture_parser),
)


def run_fixtures() -> list[dict]:
    results = []
    for name, fn in FIXTURES:
        try:
            fn()
            results.append({"name": name, "ok": True})
            print(f"fixture {name}: ok", file=sys.stderr)
        except Exception as ex:  # noqa: BLE001 - selftest must report, not crash
            results.append({"name": name, "ok": False, "detail": f"{type(ex).__name__}: {ex}"})
            print(f"fixture {name}: FAIL ({type(ex).__name__}: {ex})", file=sys.stderr)
    return results
