"""Endomorphisms of A_n(k) and their lifting obstruction.

An endomorphism is given by images u_i = phi(z_i) satisfying the defining
relations [u_i, u_j] = omega_{ij} exactly.  Teichmuller lifts U_i then
satisfy [U_i, U_j] = omega_{ij} + p u_ij in A_n(W_2(k)), and the obstruction
matrix has entries

    c_ij = ad(u_i)^{p-1} ad(u_j)^{p-1} (u_ij)      (central, antisymmetric)

with p c_ij = [U_i^p, U_j^p] + p omega_{ij} as the independent oracle route.
phi lifts to W_2(k) iff every c_ij vanishes, iff the induced map on the
center is a Poisson morphism.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property

from . import center as C
from .errors import (
    InternalInconsistency,
    NotDivisibleByP,
    ParamsMismatch,
    RelationViolation,
    ResourceLimit,
    WeyliftError,
)
from .weyl import AlgebraParams, WeylElem, ad_pow, commutator, teich_lift, w2_decompose_elem

# Default term budget for the analyze guardrail.  The estimate
# p^{2n} (p deg phi)^{2n} reaches 2.6e9 on the standard degree-9 n=2 p=5
# fixture, so the default must clear that.
DEFAULT_BUDGET = 10**10


class Endo:
    """phi: A_n(k) -> A_n(k) determined by the images of the generators."""

    def __init__(self, alg: AlgebraParams, images: list[WeylElem]):
        if len(images) != alg.nvars:
            raise WeyliftError(f"expected {alg.nvars} images, got {len(images)}")
        for u in images:
            if u.alg != alg or u.ring != "k":
                raise ParamsMismatch("images must live in A_n(k) for this algebra")
        self.alg = alg
        self.images = list(images)

    # -- validation and degree ----------------------------------------------

    def validate(self) -> None:
        """Check every defining relation exactly; raises RelationViolation."""
        alg = self.alg
        for i in range(alg.nvars):
            for j in range(i + 1, alg.nvars):
                want = alg.from_terms(
                    {(0,) * alg.nvars: alg.field.from_int(alg.omega_int(i, j))}
                )
                residual = commutator(self.images[i], self.images[j]) - want
                if not residual.is_zero():
                    raise RelationViolation(i, j, residual)

    @cached_property
    def deg(self) -> int:
        """max_i deg(u_i); images are nonzero for a valid endomorphism."""
        return max(int(u.degree()) for u in self.images if u.terms) if any(
            u.terms for u in self.images
        ) else 0

    def u(self, i: int) -> WeylElem:
        return self.images[i]

    def u_hat(self, i: int) -> WeylElem:
        """The dual family: u^_i = -u_{n+i} for i < n, u^_i = u_{i-n} for i >= n."""
        n = self.alg.n
        if i < n:
            return -self.images[n + i]
        return self.images[i - n]

    @cached_property
    def _teich(self) -> list[WeylElem]:
        return [teich_lift(u) for u in self.images]

    # -- obstruction data ----------------------------------------------------

    @cached_property
    def _u_ij_upper(self) -> dict:
        """u_ij for i < j, from [U_i, U_j] = omega_{ij} + p u_ij."""
        alg = self.alg
        out = {}
        for i in range(alg.nvars):
            for j in range(i + 1, alg.nvars):
                om = alg.from_terms(
                    {(0,) * alg.nvars: alg.field.w2_from_int(alg.omega_int(i, j))}, "w2"
                )
                diff = commutator(self._teich[i], self._teich[j]) - om
                d1, d2 = w2_decompose_elem(diff)
                if not d1.is_zero():
                    raise InternalInconsistency(
                        "[U_i, U_j] - omega has a Teichmuller part; validate first"
                    )
                out[(i, j)] = d2
        return out

    def u_ij(self, i: int, j: int) -> WeylElem:
        if i == j:
            return self.alg.zero_elem()
        if i < j:
            return self._u_ij_upper[(i, j)]
        return -self._u_ij_upper[(j, i)]

    def u_ij_matrix(self) -> list[list[WeylElem]]:
        """The full antisymmetric matrix (u_ij) over A_n(k)."""
        size = self.alg.nvars
        return [[self.u_ij(i, j) for j in range(size)] for i in range(size)]

    @cached_property
    def obstruction_C(self) -> list[list[C.Poly]]:
        """The antisymmetric matrix c_ij, as polynomials on the center."""
        alg = self.alg
        p = alg.field.p
        size = alg.nvars
        mat = [[C.poly_zero(alg, "x") for _ in range(size)] for _ in range(size)]
        for i in range(size):
            for j in range(i + 1, size):
                c = ad_pow(self.images[i], p - 1, ad_pow(self.images[j], p - 1, self.u_ij(i, j)))
                if not c.is_central():
                    raise InternalInconsistency("c_ij is not central")
                cp = c.to_center_poly()
                mat[i][j] = cp
                mat[j][i] = -cp
        return mat

    def obstruction_C_direct(self, i: int, j: int) -> C.Poly:
        """c_ij recomputed from scratch in the stated orientation (test hook)."""
        p = self.alg.field.p
        c = ad_pow(self.images[i], p - 1, ad_pow(self.images[j], p - 1, self.u_ij(i, j)))
        return c.to_center_poly()

    @cached_property
    def obstruction_C_oracle(self) -> list[list[C.Poly]]:
        """c_ij via p c_ij = [U_i^p, U_j^p] + p omega_{ij} over W_2(k)."""
        alg = self.alg
        size = alg.nvars
        pows = [u.p_power() for u in self._teich]
        mat = [[C.poly_zero(alg, "x") for _ in range(size)] for _ in range(size)]
        for i in range(size):
            for j in range(i + 1, size):
                om_p = alg.field.w2_from_int(alg.omega_int(i, j)).times_p()
                D = commutator(pows[i], pows[j]) + alg.from_terms(
                    {(0,) * alg.nvars: om_p}, "w2"
                )
                d1, d2 = w2_decompose_elem(D)
                if not d1.is_zero():
                    raise NotDivisibleByP("[U_i^p, U_j^p] + p omega not in p*W_2")
                cp = d2.to_center_poly()
                mat[i][j] = cp
                mat[j][i] = -cp
        return mat

    @cached_property
    def center_images(self) -> list[C.Poly]:
        """phi(x_i) = u_i^p written in the x coordinates."""
        return [u.p_power().to_center_poly() for u in self.images]

    def check_theorem_idjac(self) -> bool:
        """J omega^{-1} J^T = omega^{-1} + C, exactly."""
        alg = self.alg
        J = C.jacobian(self.center_images)
        inv = C.omega_inv_matrix(alg, "x")
        lhs = C.mat_mul(C.mat_mul(J, inv), C.mat_transpose(J))
        return C.mat_eq(lhs, C.mat_add(inv, self.obstruction_C))

    def tsuchimoto_bound(self) -> bool:
        """deg u_l + deg u_{n+l} < 2p for every conjugate pair."""
        n, p = self.alg.n, self.alg.field.p
        return all(
            int(self.images[l].degree()) + int(self.images[n + l].degree()) < 2 * p
            for l in range(n)
        )

    # -- composition ---------------------------------------------------------

    def apply(self, f: WeylElem) -> WeylElem:
        """phi(f): substitute the images into a normally ordered element."""
        if f.alg != self.alg or f.ring != "k":
            raise ParamsMismatch("apply expects an element of A_n(k)")
        alg = self.alg
        cache: list[dict[int, WeylElem]] = [
            {0: alg.one_elem(), 1: u} for u in self.images
        ]

        def power(i: int, e: int) -> WeylElem:
            got = cache[i].get(e)
            if got is None:
                got = power(i, e - 1) * self.images[i]
                cache[i][e] = got
            return got

        acc = alg.zero_elem()
        for exps, c in f.terms.items():
            term = None
            for i, e in enumerate(exps):
                if e:
                    pw = power(i, e)
                    term = pw if term is None else term * pw
            if term is None:
                term = alg.one_elem()
            acc = acc + term.scale(c)
        return acc

    def compose(self, other: Endo) -> Endo:
        """self after other: z_i -> self(other(z_i))."""
        if self.alg != other.alg:
            raise ParamsMismatch("composition across different algebras")
        return Endo(self.alg, [self.apply(u) for u in other.images])

    # -- analysis ------------------------------------------------------------

    def estimate_terms(self) -> int:
        p, n2 = self.alg.field.p, self.alg.nvars
        return p**n2 * (p * max(self.deg, 1)) ** n2

    def analyze(self, budget: int = DEFAULT_BUDGET) -> ObstructionReport:
        """Validate, compute C and the center criteria, and cross-check flags."""
        est = self.estimate_terms()
        if est > budget:
            raise ResourceLimit(f"estimated {est} terms exceeds budget {budget}")
        self.validate()
        Cmat = self.obstruction_C
        liftable = all(c.is_zero() for row in Cmat for c in row)
        phi_x = self.center_images
        poisson = C.is_poisson_morphism(phi_x)
        etale = C.is_etale(phi_x)
        bound = self.tsuchimoto_bound()
        if liftable != poisson:
            raise InternalInconsistency("liftable and Poisson flags disagree")
        if poisson and not etale:
            raise InternalInconsistency("Poisson morphism with non-unit Jacobian")
        if bound and not liftable:
            raise InternalInconsistency("degree bound met but obstruction nonzero")
        return ObstructionReport(
            degree=self.deg,
            C=Cmat,
            liftable=liftable,
            poisson=poisson,
            etale=etale,
            injective_certified=etale,
            tsuchimoto_bound_met=bound,
            term_counts={
                "images": [len(u.terms) for u in self.images],
                "C": [[len(c.terms) for c in row] for row in Cmat],
            },
        )


@dataclass
class ObstructionReport:
    """Everything analyze() decides about one endomorphism."""

    degree: int
    C: list[list[C.Poly]]
    liftable: bool
    poisson: bool
    etale: bool
    injective_certified: bool
    tsuchimoto_bound_met: bool
    term_counts: dict


# ---------------------------------------------------------------------------
# standard endomorphism constructors


def validate(images: list[WeylElem]) -> Endo:
    """Build an Endo from generator images, checking every relation."""
    if not images:
        raise WeyliftError("no images given")
    e = Endo(images[0].alg, images)
    e.validate()
    return e


def identity_endo(alg: AlgebraParams) -> Endo:
    return Endo(alg, [alg.gen(i) for i in range(alg.nvars)])


def _half_pderiv(g: WeylElem, i: int) -> WeylElem:
    """Formal derivative of an element supported in one commuting half."""
    alg = g.alg
    out = {}
    for e, c in g.terms.items():
        if e[i] == 0:
            continue
        w = c * alg.field.from_int(e[i])
        if w:
            out[tuple(x - 1 if j == i else x for j, x in enumerate(e))] = w
    return WeylElem(alg, "k", out)


def elementary(alg: AlgebraParams, g: WeylElem, half: str = "second") -> Endo:
    """Translation automorphism from a potential g on one commuting half.

    half="second": g in k[z_{n+1}..z_2n], z_l -> z_l + dg/dz_{n+l}, other
    generators fixed.  half="first" is the mirror image.  Valid for any g
    because the correction terms commute among themselves.
    """
    n = alg.n
    if half == "second":
        allowed = range(n, 2 * n)
    elif half == "first":
        allowed = range(0, n)
    else:
        raise WeyliftError(f"half must be 'first' or 'second', got {half!r}")
    allowed = set(allowed)
    for e in g.terms:
        if any(x and i not in allowed for i, x in enumerate(e)):
            raise WeyliftError("g must be supported on one commuting half")
    images = [alg.gen(i) for i in range(alg.nvars)]
    if half == "second":
        for l in range(n):
            images[l] = images[l] + _half_pderiv(g, n + l)
    else:
        for l in range(n):
            images[n + l] = images[n + l] + _half_pderiv(g, l)
    return Endo(alg, images)


def fourier(alg: AlgebraParams) -> Endo:
    """The symplectic swap z_l -> -z_{n+l}, z_{n+l} -> z_l."""
    n = alg.n
    images = [None] * alg.nvars
    for l in range(n):
        images[l] = -alg.gen(n + l)
        images[n + l] = alg.gen(l)
    return Endo(alg, images)


def etale_family(alg: AlgebraParams, i: int, c=None) -> Endo:
    """n=1 family z_2 -> z_2 + c z_2^p z_1^i; liftable iff i < p-1."""
    if alg.n != 1:
        raise WeyliftError("etale_family is defined for n = 1")
    p = alg.field.p
    if not 0 <= i <= p - 1:
        raise WeyliftError(f"family index must be in [0, p-1], got {i}")
    if c is None:
        c = alg.field.one
    images = [alg.gen(0), alg.gen(1) + alg.monomial((i, p), c)]
    return Endo(alg, images)


def bkk_family(alg: AlgebraParams, j: int | None = None, c=None) -> Endo:
    """n=2 family z_1 -> z_1 + c z_2^p z_3^j; the obstruction case is j = p-1."""
    if alg.n != 2:
        raise WeyliftError("bkk_family is defined for n = 2")
    p = alg.field.p
    if j is None:
        j = p - 1
    if not 0 <= j <= p - 1:
        raise WeyliftError(f"family index must be in [0, p-1], got {j}")
    if c is None:
        c = alg.field.one
    images = [alg.gen(0) + alg.monomial((0, p, j, 0), c)] + [
        alg.gen(i) for i in range(1, 4)
    ]
    return Endo(alg, images)


# ---------------------------------------------------------------------------
# seeded corpus generation


def _random_half_poly(alg: AlgebraParams, rng: random.Random, half: str, max_deg: int) -> WeylElem:
    n = alg.n
    lo = n if half == "second" else 0
    terms = {}
    for _ in range(rng.randint(1, 3)):
        exps = [0] * alg.nvars
        total = rng.randint(1, max_deg)
        for _ in range(total):
            exps[lo + rng.randrange(n)] += 1
        c = alg.field.from_int(rng.randint(1, alg.field.p - 1))
        terms[tuple(exps)] = c
    return alg.from_terms(terms)


def _random_linear(alg: AlgebraParams, rng: random.Random) -> Endo:
    """A short word in quadratic translations and the symplectic swap."""
    e = identity_endo(alg)
    for _ in range(rng.randint(0, 2)):
        kind = rng.randrange(3)
        if kind == 0:
            e = e.compose(fourier(alg))
        else:
            half = "first" if kind == 1 else "second"
            g = _random_half_poly(alg, rng, half, 2)
            e = e.compose(elementary(alg, g, half))
    return e


def generate_corpus(alg: AlgebraParams, count: int, seed: int) -> list[Endo]:
    """Deterministic mix of translations, linear maps, and the two families.

    Every returned endomorphism is valid by construction; degrees stay at or
    below 2p-1 because nonlinear factors are sandwiched between linear ones.
    """
    rng = random.Random((seed, alg.field.p, alg.n).__repr__())
    p = alg.field.p
    out = []
    while len(out) < count:
        roll = rng.random()
        if roll < 0.35:
            half = rng.choice(["first", "second"])
            core = elementary(alg, _random_half_poly(alg, rng, half, p + 1), half)
        elif roll < 0.45:
            core = fourier(alg)
        elif roll < 0.70 and alg.n == 1:
            core = etale_family(alg, rng.randrange(p), alg.field.from_int(rng.randint(1, p - 1)))
        elif roll < 0.70 and alg.n == 2:
            core = bkk_family(alg, rng.randrange(p), alg.field.from_int(rng.randint(1, p - 1)))
        else:
            core = identity_endo(alg)
        e = _random_linear(alg, rng).compose(core).compose(_random_linear(alg, rng))
        out.append(e)
    return out
