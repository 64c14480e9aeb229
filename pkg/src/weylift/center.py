"""The center Z = k[x_1..x_2n] of A_n(k), x_i = z_i^p, and its Poisson structure.

Polynomials carry a tag: "x" for center coordinates, "y" for coordinates on
the polynomial algebra S = k[y_1..y_2n] with x_i = y_i^p.  The tag only
guards against mixing the two coordinate systems; arithmetic is identical.

The Poisson bracket on Z is {f, g} = sum_l (df/dx_l dg/dx_{n+l}
- df/dx_{n+l} dg/dx_l), normalized so {x_i, x_j} = -omega_{ij}.  The
commutator oracle poisson_witt_oracle recomputes the bracket upstairs as
[f~, g~]/p in A_n(W_2(k)) and is kept as an independent route.
"""

from __future__ import annotations

from .errors import DivisionByZero, NotCentral, NotDivisibleByP, ParamsMismatch, WeyliftError
from .scalars import teichmuller
from .weyl import AlgebraParams, WeylElem, commutator, w2_decompose_elem

NEG_INF = float("-inf")


class Poly:
    """Sparse polynomial over k in 2n tagged commuting variables."""

    __slots__ = ("alg", "tag", "terms")

    def __init__(self, alg: AlgebraParams, tag: str, terms: dict):
        if tag not in ("x", "y"):
            raise WeyliftError(f"unknown variable tag {tag!r}")
        self.alg = alg
        self.tag = tag
        self.terms = terms

    def _require_compatible(self, other: Poly) -> None:
        if self.alg != other.alg or self.tag != other.tag:
            raise ParamsMismatch("polynomials from different rings or coordinate tags")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.alg == other.alg and self.tag == other.tag and self.terms == other.terms

    __hash__ = None

    def degree(self):
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.alg.nvars, self.alg.field.zero)

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.alg.field.zero)

    def homogeneous_slice(self, d: int) -> Poly:
        return Poly(self.alg, self.tag, {e: c for e, c in self.terms.items() if sum(e) == d})

    def __add__(self, other: Poly) -> Poly:
        self._require_compatible(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            elif e in out:
                del out[e]
        return Poly(self.alg, self.tag, out)

    def __neg__(self) -> Poly:
        return Poly(self.alg, self.tag, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        self._require_compatible(other)
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                c = ca * cb
                if not c:
                    continue
                e = tuple(a + b for a, b in zip(ea, eb))
                s = out.get(e)
                s = c if s is None else s + c
                if s:
                    out[e] = s
                elif e in out:
                    del out[e]
        return Poly(self.alg, self.tag, out)

    def scale(self, c) -> Poly:
        if not c:
            return Poly(self.alg, self.tag, {})
        out = {}
        for e, v in self.terms.items():
            w = c * v
            if w:
                out[e] = w
        return Poly(self.alg, self.tag, out)

    def __pow__(self, e: int) -> Poly:
        if e < 0:
            raise WeyliftError("negative powers are not defined")
        result = poly_one(self.alg, self.tag)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def pderiv(self, i: int) -> Poly:
        """Partial derivative in variable i (0-based), in characteristic p."""
        out = {}
        alg = self.alg
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            w = c * alg.field.from_int(e[i])
            if w:
                out[tuple(x - 1 if j == i else x for j, x in enumerate(e))] = w
        return Poly(alg, self.tag, out)

    def pderiv_iter(self, i: int, r: int) -> Poly:
        f = self
        for _ in range(r):
            f = f.pderiv(i)
        return f

    def lex_leading(self):
        """(exponent, coefficient) of the lex-largest monomial."""
        e = max(self.terms)
        return e, self.terms[e]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        v = self.tag
        bits = []
        for exps in sorted(self.terms, key=lambda e: (sum(e), e), reverse=True)[:8]:
            mono = "*".join(
                f"{v}{i + 1}^{e}" if e > 1 else f"{v}{i + 1}" for i, e in enumerate(exps) if e
            )
            c = self.terms[exps]
            bits.append(f"{c!r}*{mono}" if mono else f"{c!r}")
        tail = " + ..." if len(self.terms) > 8 else ""
        return " + ".join(bits) + tail


# -- constructors -----------------------------------------------------------


def poly_zero(alg: AlgebraParams, tag: str) -> Poly:
    return Poly(alg, tag, {})


def poly_one(alg: AlgebraParams, tag: str) -> Poly:
    return Poly(alg, tag, {(0,) * alg.nvars: alg.field.one})


def poly_const(alg: AlgebraParams, tag: str, c) -> Poly:
    if not c:
        return Poly(alg, tag, {})
    return Poly(alg, tag, {(0,) * alg.nvars: c})


def poly_var(alg: AlgebraParams, tag: str, i: int) -> Poly:
    exps = [0] * alg.nvars
    exps[i] = 1
    return Poly(alg, tag, {tuple(exps): alg.field.one})


def poly_from_terms(alg: AlgebraParams, tag: str, terms: dict) -> Poly:
    clean = {}
    for e, c in terms.items():
        e = tuple(int(x) for x in e)
        if len(e) != alg.nvars or any(x < 0 for x in e):
            raise WeyliftError(f"bad exponent vector {e}")
        if c:
            clean[e] = c
    return Poly(alg, tag, clean)


# -- coordinate changes ------------------------------------------------------


def x_to_y(f: Poly) -> Poly:
    """f(x) -> f(y^p): multiply exponents by p."""
    if f.tag != "x":
        raise WeyliftError("expected an x-polynomial")
    p = f.alg.field.p
    return Poly(f.alg, "y", {tuple(p * a for a in e): c for e, c in f.terms.items()})


def pth_power_retag(f: Poly) -> Poly:
    """f(y)^p rewritten through y_i^p = x_i: exponents kept, coefficients^p."""
    if f.tag != "y":
        raise WeyliftError("expected a y-polynomial")
    return Poly(f.alg, "x", {e: c.frobenius() for e, c in f.terms.items()})


def pth_root_retag(f: Poly) -> Poly:
    """The y-polynomial g with g(y)^p = f(y^p): exponents kept, coefficient roots."""
    if f.tag != "x":
        raise WeyliftError("expected an x-polynomial")
    return Poly(f.alg, "y", {e: c.pth_root() for e, c in f.terms.items()})


def embed_center(f: Poly, ring: str = "w2") -> WeylElem:
    """Send f(x) to f(z^p) in A_n; coefficients lift by Teichmuller for w2."""
    if f.tag != "x":
        raise WeyliftError("expected an x-polynomial")
    p = f.alg.field.p
    if ring == "k":
        terms = {tuple(p * a for a in e): c for e, c in f.terms.items()}
    else:
        terms = {tuple(p * a for a in e): teichmuller(c) for e, c in f.terms.items()}
    return WeylElem(f.alg, ring, terms)


# -- Poisson structure -------------------------------------------------------


def poisson(f: Poly, g: Poly) -> Poly:
    """{f, g} = sum_l (f_{x_l} g_{x_{n+l}} - f_{x_{n+l}} g_{x_l})."""
    f._require_compatible(g)
    n = f.alg.n
    out = poly_zero(f.alg, f.tag)
    for l in range(n):
        out = out + f.pderiv(l) * g.pderiv(n + l) - f.pderiv(n + l) * g.pderiv(l)
    return out


def poisson_witt_oracle(f: Poly, g: Poly) -> Poly:
    """{f, g} recomputed as [f(z^p), g(z^p)] / p over W_2(k).

    Raises NotDivisibleByP if the commutator has a nonzero Teichmuller part
    and NotCentral if the quotient is not in Z (neither occurs for center
    inputs; the checks guard the oracle itself).
    """
    F = embed_center(f, "w2")
    G = embed_center(g, "w2")
    C = commutator(F, G)
    c1, c2 = w2_decompose_elem(C)
    if not c1.is_zero():
        raise NotDivisibleByP("commutator of central elements not in p*W_2")
    if not c2.is_central():
        raise NotCentral("commutator quotient is not central")
    return c2.to_center_poly()


# -- matrices of polynomials -------------------------------------------------


def jacobian(images: list[Poly], tag: str | None = None) -> list[list[Poly]]:
    """J[i][j] = d(images[i]) / d var_j."""
    return [[f.pderiv(j) for j in range(f.alg.nvars)] for f in images]


def omega_matrix(alg: AlgebraParams, tag: str) -> list[list[Poly]]:
    return [
        [poly_const(alg, tag, alg.field.from_int(alg.omega_int(i, j))) for j in range(alg.nvars)]
        for i in range(alg.nvars)
    ]


def omega_inv_matrix(alg: AlgebraParams, tag: str) -> list[list[Poly]]:
    """omega^{-1} = -omega for the standard symplectic form."""
    return [
        [poly_const(alg, tag, alg.field.from_int(-alg.omega_int(i, j))) for j in range(alg.nvars)]
        for i in range(alg.nvars)
    ]


def mat_mul(A, B):
    rows, inner, cols = len(A), len(B), len(B[0])
    return [
        [_dot(A[i], [B[t][j] for t in range(inner)]) for j in range(cols)] for i in range(rows)
    ]


def _dot(row, col):
    acc = row[0] * col[0]
    for a, b in zip(row[1:], col[1:]):
        acc = acc + a * b
    return acc


def mat_transpose(A):
    return [list(col) for col in zip(*A)]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_eq(A, B) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_frobenius_twist(M):
    """Entrywise p-th power; y-entries are re-tagged to x via y_i^p = x_i."""
    out = []
    for row in M:
        new = []
        for f in row:
            if f.tag == "y":
                new.append(pth_power_retag(f))
            else:
                p = f.alg.field.p
                new.append(
                    Poly(f.alg, "x", {tuple(p * a for a in e): c.frobenius() for e, c in f.terms.items()})
                )
        out.append(new)
    return out


# -- exact division and determinants -----------------------------------------


def divexact(f: Poly, g: Poly) -> Poly:
    """Quotient f/g when g divides f exactly; raises otherwise."""
    if g.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    f._require_compatible(g)
    quot: dict = {}
    rem = f
    ge, gc = g.lex_leading()
    gcinv = gc.inverse()
    while rem.terms:
        re, rc = rem.lex_leading()
        qe = tuple(a - b for a, b in zip(re, ge))
        if any(x < 0 for x in qe):
            raise WeyliftError("division is not exact")
        qc = rc * gcinv
        quot[qe] = qc
        rem = rem - Poly(f.alg, f.tag, {qe: qc}) * g
    return Poly(f.alg, f.tag, quot)


def det(M: list[list[Poly]]) -> Poly:
    """Determinant: cofactor expansion for size <= 4, Bareiss beyond."""
    size = len(M)
    if size == 0:
        raise WeyliftError("empty matrix")
    alg, tag = M[0][0].alg, M[0][0].tag
    if size <= 4:
        return _det_cofactor(M, alg, tag)
    return _det_bareiss(M, alg, tag)


def _det_cofactor(M, alg, tag) -> Poly:
    size = len(M)
    if size == 1:
        return M[0][0]
    acc = poly_zero(alg, tag)
    sign = alg.field.one
    for j in range(size):
        if M[0][j]:
            minor = [[M[i][jj] for jj in range(size) if jj != j] for i in range(1, size)]
            acc = acc + M[0][j].scale(sign) * _det_cofactor(minor, alg, tag)
        sign = -sign
    return acc


def _det_bareiss(M, alg, tag) -> Poly:
    size = len(M)
    A = [row[:] for row in M]
    prev = poly_one(alg, tag)
    sign = False
    for r in range(size - 1):
        if A[r][r].is_zero():
            swap = next((i for i in range(r + 1, size) if not A[i][r].is_zero()), None)
            if swap is None:
                return poly_zero(alg, tag)
            A[r], A[swap] = A[swap], A[r]
            sign = not sign
        for i in range(r + 1, size):
            for j in range(r + 1, size):
                A[i][j] = divexact(A[r][r] * A[i][j] - A[i][r] * A[r][j], prev)
        prev = A[r][r]
    d = A[size - 1][size - 1]
    return -d if sign else d


# -- morphism criteria -------------------------------------------------------


def is_poisson_morphism(images: list[Poly]) -> bool:
    """Whether x_i -> images[i] preserves {,}: J omega^{-1} J^T = omega^{-1}."""
    alg = images[0].alg
    J = jacobian(images)
    lhs = mat_mul(mat_mul(J, omega_inv_matrix(alg, images[0].tag)), mat_transpose(J))
    return mat_eq(lhs, omega_inv_matrix(alg, images[0].tag))


def is_etale(images: list[Poly]) -> bool:
    """Whether the Jacobian determinant is a nonzero constant."""
    d = det(jacobian(images))
    return (not d.is_zero()) and d.is_constant()


def to_center_poly(f: WeylElem) -> Poly:
    """Central element of A_n(k) as a polynomial in x_i = z_i^p."""
    return f.to_center_poly()
