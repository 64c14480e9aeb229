"""The twisted-basis correspondence psi and the de Rham splitting that
turns a vanishing obstruction into an explicit lift.

For a valid endomorphism with images u_i, the duals u^_i = -u_{n+i},
u^_{n+i} = u_i satisfy [u_i, u^_j] = delta_ij, and the ordered monomials
u^^m with exponents < p form a basis of A_n(k) over the center Z.  The
correspondence

    psi( f(x) u^^m ) = f(y^p) y^m      (S = k[y_1..y_2n])

intertwines ad(u_i) with d/dy_i.  The obstruction terms u_ij assemble into
a closed 2-form F = sum_{i<j} psi(u_ij) dy_i dy_j; splitting F into an
exact part d(h) plus a harmonic part supported on k[y^p] y_i^{p-1} y_j^{p-1}
dy_i dy_j recovers the obstruction matrix, and when the harmonic part is
zero the 1-form h pulls back to correction terms v_i making
Phi(z_i) = [u_i] + p [v_i] a lift to W_2(k).

The splitting processes variables in increasing order; each stage first
integrates every slot monomial whose exponent in the stage variable is not
p-1 mod p, then strips the residual (which closedness forces into the
harmonic pattern).  This is deterministic, so h is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

from . import center as C
from . import linsolve
from .endo import Endo
from .errors import InternalInconsistency, NotClosed, SolveFailure, WeyliftError
from .scalars import Witt2
from .weyl import AlgebraParams, WeylElem, ad_pow, commutator, teich_lift


def hat_u(e: Endo, i: int) -> WeylElem:
    """u^_i = -u_{n+i} for i < n, u_{i-n} for i >= n (0-based)."""
    return e.u_hat(i)


# ---------------------------------------------------------------------------
# basis expansion in the twisted generator monomials


def _prod_cache(e: Endo, which: str) -> dict:
    caches = getattr(e, "_prod_caches", None)
    if caches is None:
        caches = {}
        e._prod_caches = caches
    got = caches.get(which)
    if got is None:
        got = {}
        caches[which] = got
    return got


def _ordered_monomial(e: Endo, which: str, m: tuple) -> WeylElem:
    """The ordered product g_1^{m_1} ... g_2n^{m_2n} for g = u or u^."""
    cache = _prod_cache(e, which)
    got = cache.get(m)
    if got is not None:
        return got
    if not any(m):
        res = e.alg.one_elem()
    else:
        i = max(j for j, x in enumerate(m) if x)
        prev = _ordered_monomial(e, which, tuple(x - (1 if j == i else 0) for j, x in enumerate(m)))
        g = e.u_hat(i) if which == "uhat" else e.u(i)
        res = prev * g
    cache[m] = res
    return res


def _exps_bounded(nvars: int, total: int):
    """All exponent vectors with given coordinate count and sum <= total."""
    if nvars == 0:
        yield ()
        return
    for head in range(total + 1):
        for tail in _exps_bounded(nvars - 1, total - head):
            yield (head,) + tail


def basis_expand(e: Endo, f: WeylElem, which: str = "uhat") -> dict:
    """Write f as sum_m g_m(x) * (ordered monomial m); returns {m: Poly(x)}.

    Solves a bounded-degree linear system over k against the free-module
    basis; the degree bound starts at deg f and grows by p until the system
    is consistent (freeness guarantees termination for elements of A_n(k)).
    """
    alg = e.alg
    p = alg.field.p
    n2 = alg.nvars
    if f.is_zero():
        return {}
    gens_deg = [int((e.u_hat(i) if which == "uhat" else e.u(i)).degree()) for i in range(n2)]
    D = max(int(f.degree()), 0)
    cap = int(f.degree()) + (p - 1) * sum(gens_deg) + 2 * p
    while True:
        cands = []
        elems = []
        for m in iter_product(range(p), repeat=n2):
            base_deg = sum(mi * di for mi, di in zip(m, gens_deg))
            if base_deg > D:
                continue
            mono = _ordered_monomial(e, which, m)
            for a in _exps_bounded(n2, (D - base_deg) // p):
                cands.append((m, a))
                elems.append(mono.times_central_monomial(tuple(p * x for x in a)))
        support = set(f.terms)
        for el in elems:
            support.update(el.terms)
        support = sorted(support)
        rows = [[el.terms.get(s, alg.field.zero) for el in elems] for s in support]
        rhs = [f.terms.get(s, alg.field.zero) for s in support]
        sol = linsolve.solve(alg.field, rows, rhs)
        if sol is not None:
            out: dict = {}
            for (m, a), c in zip(cands, sol):
                if c:
                    g = out.setdefault(m, {})
                    g[a] = c
            return {m: C.Poly(alg, "x", g) for m, g in out.items()}
        D += p
        if D > cap:
            raise SolveFailure(f"no expansion of degree <= {cap} found")


def psi_forward(e: Endo, f: WeylElem) -> C.Poly:
    """psi(f) in S = k[y]: each basis term g(x) u^^m maps to g(y^p) y^m."""
    out = C.poly_zero(e.alg, "y")
    p = e.alg.field.p
    for m, g in basis_expand(e, f, "uhat").items():
        shift = C.Poly(e.alg, "y", {m: e.alg.field.one})
        out = out + C.x_to_y(g) * shift
    return out


def psi_inverse(e: Endo, s: C.Poly) -> WeylElem:
    """psi^{-1}: y^(pa+m) -> x^a u^^m, assembled term by term."""
    if s.tag != "y":
        raise WeyliftError("psi_inverse expects a y-polynomial")
    alg = e.alg
    p = alg.field.p
    acc = alg.zero_elem()
    for b, c in s.terms.items():
        m = tuple(x % p for x in b)
        a = tuple(x // p for x in b)
        el = _ordered_monomial(e, "uhat", m).times_central_monomial(tuple(p * x for x in a))
        acc = acc + el.scale(c)
    return acc


# ---------------------------------------------------------------------------
# differential forms over S


class Form:
    """An alternating form sum_I f_I dy_I with strictly increasing index tuples."""

    __slots__ = ("alg", "degree", "coeffs")

    def __init__(self, alg: AlgebraParams, degree: int, coeffs: dict):
        self.alg = alg
        self.degree = degree
        self.coeffs = coeffs

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (
            self.alg == other.alg
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    __hash__ = None

    def slot(self, I: tuple) -> C.Poly:
        return self.coeffs.get(I, C.poly_zero(self.alg, "y"))

    def __add__(self, other: Form) -> Form:
        if self.degree != other.degree or self.alg != other.alg:
            raise WeyliftError("form degree or algebra mismatch")
        out = dict(self.coeffs)
        for I, f in other.coeffs.items():
            s = out.get(I)
            s = f if s is None else s + f
            if s:
                out[I] = s
            elif I in out:
                del out[I]
        return Form(self.alg, self.degree, out)

    def __neg__(self) -> Form:
        return Form(self.alg, self.degree, {I: -f for I, f in self.coeffs.items()})

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def d(self) -> Form:
        """Exterior derivative with signs from sorting dy_w into dy_I."""
        out: dict = {}
        for I, f in self.coeffs.items():
            for w in range(self.alg.nvars):
                df = f.pderiv(w)
                if df.is_zero() or w in I:
                    continue
                pos = sum(1 for i in I if i < w)
                J = tuple(sorted(I + (w,)))
                piece = df if pos % 2 == 0 else -df
                s = out.get(J)
                s = piece if s is None else s + piece
                if s:
                    out[J] = s
                elif J in out:
                    del out[J]
        return Form(self.alg, self.degree + 1, out)

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"0 ({self.degree}-form)"
        bits = [
            f"({f!r}) dy{'dy'.join(str(i + 1) for i in I)}" for I, f in sorted(self.coeffs.items())
        ]
        return " + ".join(bits)


def form_zero(alg: AlgebraParams, degree: int) -> Form:
    return Form(alg, degree, {})


def form_from_coeffs(alg: AlgebraParams, degree: int, coeffs: dict) -> Form:
    clean = {}
    for I, f in coeffs.items():
        I = tuple(I)
        if len(I) != degree or list(I) != sorted(set(I)):
            raise WeyliftError(f"index tuple {I} is not strictly increasing")
        if f:
            clean[I] = f
    return Form(alg, degree, clean)


def d(F: Form) -> Form:
    return F.d()


# ---------------------------------------------------------------------------
# splitting closed forms


def _split_poly_by_class(f: C.Poly, v: int, p: int) -> tuple[C.Poly, C.Poly]:
    """(monomials with e_v % p != p-1, monomials with e_v % p == p-1)."""
    a: dict = {}
    b: dict = {}
    for e, c in f.terms.items():
        (b if e[v] % p == p - 1 else a)[e] = c
    return C.Poly(f.alg, "y", a), C.Poly(f.alg, "y", b)


def _integrate(f: C.Poly, v: int) -> C.Poly:
    """Antiderivative in y_v; every exponent must satisfy e_v != p-1 mod p."""
    alg = f.alg
    p = alg.field.p
    out = {}
    for e, c in f.terms.items():
        inv = alg.field.from_int(e[v] + 1).inverse()
        out[tuple(x + 1 if i == v else x for i, x in enumerate(e))] = c * inv
    return C.Poly(alg, "y", out)


def _split_closed_1form(W: dict, vs: list[int], alg: AlgebraParams):
    """Split a closed 1-form sum_{t in vs} W[t] dy_t into d(g) + harmonic.

    Returns (g, harm) with harm[t] a polynomial whose y_t exponents are p-1
    mod p and all other exponents are 0 mod p.  The input must be closed
    with respect to the variables vs (guaranteed by the callers).
    """
    p = alg.field.p
    W = {t: f for t, f in W.items() if f}
    g_total = C.poly_zero(alg, "y")
    harm: dict = {}
    for v in vs:
        Wv = W.get(v)
        if Wv is None or Wv.is_zero():
            continue
        integ, res = _split_poly_by_class(Wv, v, p)
        if integ:
            g = _integrate(integ, v)
            g_total = g_total + g
            for w in vs:
                dg = g.pderiv(w)
                if dg.is_zero():
                    continue
                s = W.get(w, C.poly_zero(alg, "y")) - dg
                if s:
                    W[w] = s
                elif w in W:
                    del W[w]
        res = W.get(v, C.poly_zero(alg, "y"))
        if res:
            for e in res.terms:
                ok = all(
                    (x % p == p - 1 if i == v else x % p == 0) for i, x in enumerate(e) if x
                )
                if not ok:
                    raise InternalInconsistency("1-form residual escapes the harmonic pattern")
            harm[v] = res
            del W[v]
    if any(f for f in W.values()):
        raise InternalInconsistency("1-form splitting left an unprocessed slot")
    return g_total, harm


def split_closed_2form(F: Form):
    """Split a closed 2-form into (h, harmonic) with F = d(h) + harmonic part.

    h is a 1-form; harmonic maps (i, j) with i < j to the k[y^p] coefficient
    of y_i^{p-1} y_j^{p-1} dy_i dy_j.  Raises NotClosed with the nonzero dF
    as witness for non-closed input.
    """
    if F.degree != 2:
        raise WeyliftError("expected a 2-form")
    dF = F.d()
    if not dF.is_zero():
        raise NotClosed(dF)
    alg = F.alg
    p = alg.field.p
    n2 = alg.nvars
    work = Form(alg, 2, dict(F.coeffs))
    h = form_zero(alg, 1)
    harmonic: dict = {}
    for v in range(n2):
        # 1) integrate in y_v whatever can be integrated
        for t in range(v + 1, n2):
            slot = work.slot((v, t))
            if slot.is_zero():
                continue
            integ, _ = _split_poly_by_class(slot, v, p)
            if integ:
                g = _integrate(integ, v)
                piece = form_from_coeffs(alg, 1, {(t,): g})
                h = h + piece
                work = work - piece.d()
        # 2) the residual of each dy_v slot now has y_v exponents p-1 mod p;
        #    group by the exact y_v exponent and split the proxy 1-forms
        groups: dict = {}
        for t in range(v + 1, n2):
            slot = work.slot((v, t))
            for e, c in slot.terms.items():
                if e[v] % p != p - 1:
                    raise InternalInconsistency("unintegrated monomial in stage residual")
                stripped = tuple(0 if i == v else x for i, x in enumerate(e))
                groups.setdefault(e[v], {}).setdefault(t, {})[stripped] = c
        for cv, slots in sorted(groups.items()):
            W = {t: C.Poly(alg, "y", terms) for t, terms in slots.items()}
            g_b, harm_b = _split_closed_1form(W, list(range(v + 1, n2)), alg)
            yv_pow = C.Poly(alg, "y", {tuple(cv if i == v else 0 for i in range(n2)): alg.field.one})
            if g_b:
                eta = form_from_coeffs(alg, 1, {(v,): -(yv_pow * g_b)})
                h = h + eta
                work = work - eta.d()
            for t, Ct in harm_b.items():
                slotpoly = yv_pow * Ct
                cur = work.slot((v, t))
                new = cur - slotpoly
                if new:
                    work.coeffs[(v, t)] = new
                elif (v, t) in work.coeffs:
                    del work.coeffs[(v, t)]
                # strip y_v^{p-1} y_t^{p-1} to leave the k[y^p] coefficient
                kpart = {}
                for e, c in slotpoly.terms.items():
                    kpart[tuple(x - (p - 1) if i in (v, t) else x for i, x in enumerate(e))] = c
                add = C.Poly(alg, "y", kpart)
                prev = harmonic.get((v, t))
                tot = add if prev is None else prev + add
                if tot:
                    harmonic[(v, t)] = tot
                elif (v, t) in harmonic:
                    del harmonic[(v, t)]
        for t in range(v + 1, n2):
            if not work.slot((v, t)).is_zero():
                raise InternalInconsistency("stage left a nonzero slot behind")
    if not work.is_zero():
        raise InternalInconsistency("splitting left unprocessed slots")
    return h, harmonic


# ---------------------------------------------------------------------------
# the obstruction 2-form and lift construction


def obstruction_2form(e: Endo) -> Form:
    """F = sum_{i<j} psi(u_ij) dy_i dy_j; closed by the Jacobi identity."""
    alg = e.alg
    coeffs = {}
    for i in range(alg.nvars):
        for j in range(i + 1, alg.nvars):
            f = psi_forward(e, e.u_ij(i, j))
            if f:
                coeffs[(i, j)] = f
    return Form(alg, 2, coeffs)


@dataclass
class Lift:
    """An explicit lift Phi(z_i) = [u_i] + p [v_i] with verified relations."""

    v: list[WeylElem]
    Phi: list[WeylElem]


@dataclass
class ObstructionWitness:
    """Nonzero obstruction: the matrix C plus the harmonic certificate."""

    C: list[list]
    harmonic: dict
    v: list[WeylElem]


def p_times_lift(f: WeylElem) -> WeylElem:
    """p * teich_lift(f) over W_2(k): coefficients (0, c^p)."""
    zero = f.alg.field.zero
    return WeylElem(
        f.alg, "w2", {e: Witt2(zero, c.frobenius()) for e, c in f.terms.items()}
    )


def harmonic_to_center(alg: AlgebraParams, poly_ypow: C.Poly) -> C.Poly:
    """k[y^p] coefficient -> polynomial on the center (divide exponents by p)."""
    p = alg.field.p
    for e in poly_ypow.terms:
        if any(x % p for x in e):
            raise WeyliftError("harmonic coefficient is not a polynomial in y^p")
    return C.Poly(alg, "x", {tuple(x // p for x in e): c for e, c in poly_ypow.terms.items()})


def construct_lift(e: Endo):
    """Split the obstruction 2-form; return a verified Lift or a witness.

    In both cases the residual identity

        u_ij + [u_i, v_j] - [u_j, v_i] = c_ij u^_i^{p-1} u^_j^{p-1}

    is asserted exactly, with c_ij read off the harmonic part.
    """
    alg = e.alg
    p = alg.field.p
    F = obstruction_2form(e)
    h, harmonic = split_closed_2form(F)
    v = [psi_inverse(e, -h.slot((i,))) for i in range(alg.nvars)]
    # residual identity, all pairs
    for i in range(alg.nvars):
        for j in range(i + 1, alg.nvars):
            lhs = (
                e.u_ij(i, j)
                + commutator(e.u(i), v[j])
                - commutator(e.u(j), v[i])
            )
            hp = harmonic.get((i, j))
            if hp is None:
                rhs = alg.zero_elem()
            else:
                c_elem = C.embed_center(harmonic_to_center(alg, hp), "k")
                mono = _ordered_monomial(
                    e, "uhat", tuple(p - 1 if t in (i, j) else 0 for t in range(alg.nvars))
                )
                rhs = c_elem * mono
            if lhs != rhs:
                raise InternalInconsistency("the residual identity fails")
    if harmonic:
        return ObstructionWitness(C=e.obstruction_C, harmonic=harmonic, v=v)
    Phi = [teich_lift(e.u(i)) + p_times_lift(v[i]) for i in range(alg.nvars)]
    if not verify_lift(alg, Phi):
        raise InternalInconsistency("constructed lift violates a relation")
    return Lift(v=v, Phi=Phi)


def verify_lift(alg: AlgebraParams, Phi: list[WeylElem]) -> bool:
    """Check [Phi_i, Phi_j] = omega_{ij} in A_n(W_2(k)) for all pairs."""
    if len(Phi) != alg.nvars:
        return False
    for F in Phi:
        if F.alg != alg or F.ring != "w2":
            return False
    for i in range(alg.nvars):
        for j in range(i + 1, alg.nvars):
            om = alg.from_terms(
                {(0,) * alg.nvars: alg.field.w2_from_int(alg.omega_int(i, j))}, "w2"
            )
            if commutator(Phi[i], Phi[j]) != om:
                return False
    return True
