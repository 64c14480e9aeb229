"""The Weyl algebra A_n over k = F_{p^m} and over W_2(k), in normal order.

Generators z_1, ..., z_2n satisfy [z_i, z_j] = omega_{ij} with omega the
block matrix [[0, -I_n], [I_n, 0]]; the conjugate pairs are (l, n+l).  Every
element is stored as a sparse map from normally ordered monomials
z_1^{e_1} ... z_2n^{e_2n} to nonzero coefficients.

Multiplication uses the closed contraction formula (pairs are independent
because the brackets are central):

    z_{n+l}^a z_l^b = sum_k binom(a,k) binom(b,k) k! z_l^{b-k} z_{n+l}^{a-k}

The naive single-swap rewriter mono_mul_naive is retained as a slow oracle;
it fixes the sign conventions and the fast paths are tested against it.
Products over prime fields go through the packed kernels in _kernel; the
generic dictionary path handles extension fields and cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product
from math import comb, factorial

import numpy as np

from . import _kernel
from .errors import NotCentral, ParamsMismatch, WeyliftError
from .scalars import FieldElem, FieldParams, Witt2

NEG_INF = float("-inf")


@dataclass(frozen=True)
class AlgebraParams:
    """Parameters of A_n(k): the number of conjugate pairs and the base field."""

    n: int
    field: FieldParams
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise WeyliftError(f"n must be >= 1, got {self.n}")

    @property
    def nvars(self) -> int:
        return 2 * self.n

    def omega_int(self, i: int, j: int) -> int:
        """[z_i, z_j] as an integer in {0, 1, -1}; indices are 0-based."""
        if j == i + self.n:
            return -1
        if i == j + self.n:
            return 1
        return 0

    # -- coefficient-ring helpers (ring is "k" or "w2") ----------------------

    def ring_zero(self, ring: str):
        return self.field.zero if ring == "k" else self.field.w2_zero()

    def ring_one(self, ring: str):
        return self.field.one if ring == "k" else self.field.w2_one()

    def ring_from_int(self, ring: str, t: int):
        if ring == "k":
            return self.field.from_int(t)
        return self.field.w2_from_int(t)

    def binom_ring(self, ring: str, a: int, k: int):
        """binom(a, k) as a ring element (image of the integer)."""
        cache = self._cache.setdefault("binom", {})
        key = (ring, a, k)
        v = cache.get(key)
        if v is None:
            v = self.ring_from_int(ring, comb(a, k))
            cache[key] = v
        return v

    def fact_ring(self, ring: str, k: int):
        cache = self._cache.setdefault("fact", {})
        key = (ring, k)
        v = cache.get(key)
        if v is None:
            v = self.ring_from_int(ring, factorial(k))
            cache[key] = v
        return v

    # -- element constructors ------------------------------------------------

    def zero_elem(self, ring: str = "k") -> WeylElem:
        return WeylElem(self, ring, {})

    def one_elem(self, ring: str = "k") -> WeylElem:
        return WeylElem(self, ring, {(0,) * self.nvars: self.ring_one(ring)})

    def gen(self, i: int, ring: str = "k") -> WeylElem:
        """The generator z_{i+1} (0-based index i)."""
        if not 0 <= i < self.nvars:
            raise WeyliftError(f"generator index {i} out of range")
        exps = [0] * self.nvars
        exps[i] = 1
        return WeylElem(self, ring, {tuple(exps): self.ring_one(ring)})

    def monomial(self, exps, coeff=None, ring: str = "k") -> WeylElem:
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.nvars or any(e < 0 for e in exps):
            raise WeyliftError(f"bad exponent vector {exps}")
        if coeff is None:
            coeff = self.ring_one(ring)
        if not coeff:
            return WeylElem(self, ring, {})
        return WeylElem(self, ring, {exps: coeff})

    def from_terms(self, terms: dict, ring: str = "k") -> WeylElem:
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.nvars or any(e < 0 for e in exps):
                raise WeyliftError(f"bad exponent vector {exps}")
            if c:
                clean[exps] = c
        return WeylElem(self, ring, clean)


class WeylElem:
    """A sparse element of A_n over k ("k") or over W_2(k) ("w2").

    Instances are treated as immutable: no method mutates terms after
    construction, so sharing across threads or caches is safe.
    """

    __slots__ = ("alg", "ring", "terms")

    def __init__(self, alg: AlgebraParams, ring: str, terms: dict):
        if ring not in ("k", "w2"):
            raise WeyliftError(f"unknown coefficient ring {ring!r}")
        self.alg = alg
        self.ring = ring
        self.terms = terms

    # -- basics --------------------------------------------------------------

    def _require_compatible(self, other: WeylElem) -> None:
        if self.alg != other.alg:
            raise ParamsMismatch("elements from different algebras")
        if self.ring != other.ring:
            raise ParamsMismatch(f"ring mismatch: {self.ring} vs {other.ring}")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylElem):
            return NotImplemented
        return self.alg == other.alg and self.ring == other.ring and self.terms == other.terms

    __hash__ = None

    def degree(self):
        """Total degree; minus infinity for the zero element."""
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.alg.ring_zero(self.ring))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for exps in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True)[:8]:
            mono = "*".join(
                f"z{i + 1}^{e}" if e > 1 else f"z{i + 1}" for i, e in enumerate(exps) if e
            )
            c = self.terms[exps]
            bits.append(f"{c!r}*{mono}" if mono else f"{c!r}")
        tail = " + ..." if len(self.terms) > 8 else ""
        return " + ".join(bits) + tail

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: WeylElem) -> WeylElem:
        self._require_compatible(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return WeylElem(self.alg, self.ring, out)

    def __neg__(self) -> WeylElem:
        return WeylElem(self.alg, self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: WeylElem) -> WeylElem:
        return self + (-other)

    def scale(self, c) -> WeylElem:
        if not c:
            return WeylElem(self.alg, self.ring, {})
        out = {}
        for e, v in self.terms.items():
            w = c * v
            if w:
                out[e] = w
        return WeylElem(self.alg, self.ring, out)

    # -- multiplication ------------------------------------------------------

    def __mul__(self, other: WeylElem) -> WeylElem:
        self._require_compatible(other)
        if not self.terms or not other.terms:
            return WeylElem(self.alg, self.ring, {})
        if self.alg.field.m == 1:
            prod = _mul_kernel(self, other)
            if prod is not None:
                return prod
        return _mul_generic(self, other)

    def __pow__(self, e: int) -> WeylElem:
        if e < 0:
            raise WeyliftError("negative powers are not defined")
        result = self.alg.one_elem(self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def times_central_monomial(self, exps, coeff=None) -> WeylElem:
        """Multiply by the central monomial z^exps (all exponents divisible by p).

        Central monomials contract with nothing, so this is an exponent shift.
        """
        p = self.alg.field.p
        exps = tuple(int(e) for e in exps)
        if any(e % p for e in exps):
            raise NotCentral(f"monomial {exps} is not central")
        out = {}
        for e, c in self.terms.items():
            shifted = tuple(a + b for a, b in zip(e, exps))
            v = c if coeff is None else coeff * c
            if v:
                out[shifted] = v
        return WeylElem(self.alg, self.ring, out)

    # -- characteristic-p structure ------------------------------------------

    def p_power(self) -> WeylElem:
        """f^p by square and multiply."""
        return self ** self.alg.field.p

    def is_central(self) -> bool:
        """True when every exponent is divisible by p (membership in Z)."""
        p = self.alg.field.p
        return all(all(x % p == 0 for x in e) for e in self.terms)

    def to_center_poly(self):
        """Rewrite a central element as a polynomial in x_i = z_i^p."""
        from .center import Poly

        p = self.alg.field.p
        if not self.is_central():
            raise NotCentral("element has an exponent not divisible by p")
        return Poly(self.alg, "x", {tuple(x // p for x in e): c for e, c in self.terms.items()})


# ---------------------------------------------------------------------------
# multiplication routes


def _mul_generic(A: WeylElem, B: WeylElem) -> WeylElem:
    """Dictionary contraction product, valid over any coefficient ring."""
    alg, ring = A.alg, A.ring
    n = alg.n
    out: dict = {}
    for ea, ca in A.terms.items():
        for eb, cb in B.terms.items():
            base = ca * cb
            caps = [min(ea[n + l], eb[l]) for l in range(n)]
            for kvec in iter_product(*(range(c + 1) for c in caps)):
                coeff = base
                for l, k in enumerate(kvec):
                    if k:
                        coeff = (
                            coeff
                            * alg.binom_ring(ring, ea[n + l], k)
                            * alg.binom_ring(ring, eb[l], k)
                            * alg.fact_ring(ring, k)
                        )
                if not coeff:
                    continue
                exps = tuple(
                    ea[i] + eb[i] - kvec[i if i < n else i - n] for i in range(2 * n)
                )
                s = out.get(exps)
                s = coeff if s is None else s + coeff
                if s:
                    out[exps] = s
                elif exps in out:
                    del out[exps]
    return WeylElem(alg, ring, out)


def _mul_kernel(A: WeylElem, B: WeylElem) -> WeylElem | None:
    """Packed-array product for m = 1; returns None when not encodable."""
    alg = A.alg
    n = alg.n
    n2 = 2 * n
    maxa = max(max(e) for e in A.terms)
    maxb = max(max(e) for e in B.terms)
    base = maxa + maxb + 1
    if base**n2 >= 2**62:
        return None
    p = alg.field.p
    t = _kernel.tables(p, max(maxa, maxb))
    ea = np.array(list(A.terms.keys()), dtype=np.int64).reshape(len(A.terms), n2)
    eb = np.array(list(B.terms.keys()), dtype=np.int64).reshape(len(B.terms), n2)
    elems = alg.field._cache["elems"]
    if A.ring == "k":
        ca = np.fromiter((c.coeffs[0] for c in A.terms.values()), np.int64, len(A.terms))
        cb = np.fromiter((c.coeffs[0] for c in B.terms.values()), np.int64, len(B.terms))
        keys, vals = _kernel._contract_modp(ea, ca, eb, cb, n, p, t["binom"], t["fact"], base)
        exps = _kernel.decode_keys(keys, n2, base)
        rows = exps.tolist()
        vl = vals.tolist()
        return WeylElem(alg, "k", {tuple(rows[r]): elems[vl[r]] for r in range(len(rows))})
    c1a = np.fromiter((c.a1.coeffs[0] for c in A.terms.values()), np.int64, len(A.terms))
    c2a = np.fromiter((c.a2.coeffs[0] for c in A.terms.values()), np.int64, len(A.terms))
    c1b = np.fromiter((c.a1.coeffs[0] for c in B.terms.values()), np.int64, len(B.terms))
    c2b = np.fromiter((c.a2.coeffs[0] for c in B.terms.values()), np.int64, len(B.terms))
    keys, v1, v2 = _kernel._contract_w2(
        ea, c1a, c2a, eb, c1b, c2b, n, p, t["bw1"], t["bw2"], t["fw1"], t["fw2"], t["carry"], base
    )
    exps = _kernel.decode_keys(keys, n2, base)
    rows = exps.tolist()
    l1 = v1.tolist()
    l2 = v2.tolist()
    return WeylElem(
        alg,
        "w2",
        {tuple(rows[r]): Witt2(elems[l1[r]], elems[l2[r]]) for r in range(len(rows))},
    )


# ---------------------------------------------------------------------------
# derived operations


def mono_mul(alg: AlgebraParams, ea, eb, ring: str = "k") -> WeylElem:
    """Normal-ordered product of the bare monomials z^ea and z^eb."""
    return alg.monomial(ea, ring=ring) * alg.monomial(eb, ring=ring)


def mono_mul_naive(alg: AlgebraParams, ea, eb, ring: str = "k") -> WeylElem:
    """Reference product by repeated adjacent swaps z_j z_i = z_i z_j + omega_{ji}.

    Exponential-time test oracle; keeps the contraction formula honest.
    """
    word = []
    for idx, e in enumerate(ea):
        word.extend([idx] * int(e))
    for idx, e in enumerate(eb):
        word.extend([idx] * int(e))
    memo: dict = {}

    def order(w: tuple) -> dict:
        res = memo.get(w)
        if res is not None:
            return res
        for i in range(len(w) - 1):
            if w[i] > w[i + 1]:
                swapped = w[:i] + (w[i + 1], w[i]) + w[i + 2 :]
                res = dict(order(swapped))
                om = alg.omega_int(w[i], w[i + 1])
                if om:
                    c = alg.ring_from_int(ring, om)
                    for e2, c2 in order(w[:i] + w[i + 2 :]).items():
                        s = res.get(e2)
                        s = c * c2 if s is None else s + c * c2
                        if s:
                            res[e2] = s
                        elif e2 in res:
                            del res[e2]
                memo[w] = res
                return res
        exps = [0] * alg.nvars
        for idx in w:
            exps[idx] += 1
        res = {tuple(exps): alg.ring_one(ring)}
        memo[w] = res
        return res

    return WeylElem(alg, ring, dict(order(tuple(word))))


def commutator(f: WeylElem, g: WeylElem) -> WeylElem:
    return f * g - g * f


def ad_pow(f: WeylElem, r: int, g: WeylElem) -> WeylElem:
    """ad(f)^r applied to g."""
    for _ in range(r):
        g = commutator(f, g)
    return g


def teich_lift(f: WeylElem) -> WeylElem:
    """Coefficientwise Teichmuller lift A_n(k) -> A_n(W_2(k)).

    Multiplicative on coefficients but not additive: over F_3 the lift of
    2*z_1 is (2,0)*z_1 while lift(z_1) + lift(z_1) carries to (2,1)*z_1.
    """
    if f.ring != "k":
        raise WeyliftError("teich_lift expects an element over k")
    zero = f.alg.field.zero
    return WeylElem(f.alg, "w2", {e: Witt2(c, zero) for e, c in f.terms.items()})


def times_p_elem(F: WeylElem) -> WeylElem:
    """Multiplication by p over W_2(k), coefficientwise (0, a1^p).

    A mod-p element is read through its Teichmuller lift; the result only
    depends on the class mod p, so this is well defined on either ring.
    """
    out = {}
    for e, c in F.terms.items():
        if F.ring == "k":
            pc = Witt2(F.alg.field.zero, c.frobenius())
        else:
            pc = c.times_p()
        if pc:
            out[e] = pc
    return WeylElem(F.alg, "w2", out)


def w2_decompose_elem(F: WeylElem) -> tuple[WeylElem, WeylElem]:
    """Coefficientwise Witt decomposition F = teich(f1) + p * teich(f2)."""
    if F.ring != "w2":
        raise WeyliftError("decompose expects an element over W_2(k)")
    t1 = {}
    t2 = {}
    for e, c in F.terms.items():
        if c.a1:
            t1[e] = c.a1
        r = c.a2.pth_root()
        if r:
            t2[e] = r
    return WeylElem(F.alg, "k", t1), WeylElem(F.alg, "k", t2)
