"""Differential equations on the Frobenius-twisted center.

Write S = k[y_1..y_2n] with x_i = y_i^p.  The restriction of a valid
endomorphism to the center, x_i -> F_i(x), induces ybar_i in S with
ybar_i^p = F_i(y^p) by taking p-th roots of coefficients.  Each coordinate
carries the equation

    gamma^p + (d/dy_i)^{p-1} gamma = r_i,
    r_i = (d/dy_i)^{p-1} ( sum_{l<n} (d ybar_l / dy_i) ybar_{n+l} ),

which always has a unique polynomial solution gamma_i; liftability is
equivalent to symmetry of the Jacobian of (f_i), where f_i is gamma_i with
Frobenius applied to coefficients (so f_i(y^p) = gamma_i(y)^p).

The solver runs a degree descent: the top slice of the right side must be
a p-th power (its root is the top slice of gamma), and degrees below p
leave only a constant.  Failures raise NoSolution with the blocking slice.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import center as C
from .endo import Endo
from .errors import InternalInconsistency, NoSolution
from .weyl import AlgebraParams


def phi_S(e: Endo, i: int) -> C.Poly:
    """The induced image ybar_i = F_i^(1/p), as a y-polynomial."""
    return C.pth_root_retag(e.center_images[i])


def phi_S_all(e: Endo) -> list[C.Poly]:
    return [phi_S(e, i) for i in range(e.alg.nvars)]


def rhs_gamma(e: Endo, i: int) -> C.Poly:
    """Right side of the gamma equation in coordinate i (0-based)."""
    ybar = phi_S_all(e)
    n = e.alg.n
    acc = C.poly_zero(e.alg, "y")
    for l in range(n):
        acc = acc + ybar[l].pderiv(i) * ybar[n + l]
    return acc.pderiv_iter(i, e.alg.field.p - 1)


def _pth_root_termwise(f: C.Poly) -> C.Poly:
    """Termwise root: c y^(p b) -> c^(1/p) y^b; None if some exponent resists."""
    p = f.alg.field.p
    out = {}
    for exps, c in f.terms.items():
        if any(x % p for x in exps):
            return None
        out[tuple(x // p for x in exps)] = c.pth_root()
    return C.Poly(f.alg, f.tag, out)


def solve_gamma(rhs: C.Poly, i: int) -> C.Poly:
    """Solve gamma^p + (d/dy_i)^{p-1} gamma = rhs by degree descent.

    Works uniformly for the y-level and x-level equations (the tag of rhs
    is kept).  Raises NoSolution when a slice blocks the descent.
    """
    alg = rhs.alg
    p = alg.field.p
    gamma = C.poly_zero(alg, rhs.tag)
    R = rhs
    while not R.is_zero():
        D = int(R.degree())
        if D < p:
            if D > 0:
                raise NoSolution(f"residual of degree {D} in (0, p) cannot be matched: {R!r}")
            g0 = _pth_root_termwise(R)
            gamma = gamma + g0
            R = R - g0**p
            break
        if D % p:
            raise NoSolution(f"top degree {D} is not divisible by p: {R.homogeneous_slice(D)!r}")
        top = R.homogeneous_slice(D)
        gt = _pth_root_termwise(top)
        if gt is None:
            raise NoSolution(f"top slice is not a p-th power: {top!r}")
        gamma = gamma + gt
        R = R - gt**p - gt.pderiv_iter(i, p - 1)
    if R:
        raise NoSolution(f"descent finished with nonzero residual {R!r}")
    check = gamma**p + gamma.pderiv_iter(i, p - 1)
    if check != rhs:
        raise InternalInconsistency("gamma solver produced a non-solution")
    return gamma


@dataclass
class GammaSolution:
    """Solutions of all 2n coordinate equations plus the symmetry verdict."""

    gamma: list[C.Poly]
    f: list[C.Poly]
    rhs: list[C.Poly]
    J_gamma: list[list[C.Poly]]
    J_f: list[list[C.Poly]]
    symmetric: bool


def gamma_solution(e: Endo) -> GammaSolution:
    """Solve every coordinate equation; f_i is the x-level counterpart."""
    gammas = []
    rhss = []
    for i in range(e.alg.nvars):
        r = rhs_gamma(e, i)
        rhss.append(r)
        gammas.append(solve_gamma(r, i))
    fs = [C.pth_power_retag(g) for g in gammas]
    Jf = C.jacobian(fs)
    return GammaSolution(
        gamma=gammas,
        f=fs,
        rhs=rhss,
        J_gamma=C.jacobian(gammas),
        J_f=Jf,
        symmetric=C.mat_eq(Jf, C.mat_transpose(Jf)),
    )


def solve_f(e: Endo, i: int) -> C.Poly:
    """Solve the x-level equation directly from the center images.

    The right side is the x-level analogue of rhs_gamma; by Frobenius
    equivariance of the equation its solution equals pth_power_retag of
    gamma_i, which the tests cross-check.
    """
    F = e.center_images
    n = e.alg.n
    acc = C.poly_zero(e.alg, "x")
    for l in range(n):
        acc = acc + F[l].pderiv(i) * F[n + l]
    rhs = acc.pderiv_iter(i, e.alg.field.p - 1)
    return solve_gamma(rhs, i)


def symmetry_criterion(e: Endo) -> bool:
    """Liftability via the Jacobian of (f_i): symmetric iff liftable."""
    return gamma_solution(e).symmetric


def check_matrix_id(e: Endo, sol: GammaSolution | None = None) -> bool:
    """Jbar^T omega Jbar = omega + J_gamma^T - J_gamma, and its x-level twin.

    Jbar is the Jacobian of (ybar_i); the x-level identity replaces ybar by
    the center images and gamma by f.  Both are checked exactly.
    """
    if sol is None:
        sol = gamma_solution(e)
    alg = e.alg
    ybar = phi_S_all(e)
    for images, parts, tag in ((ybar, sol.gamma, "y"), (e.center_images, sol.f, "x")):
        J = C.jacobian(images)
        om = C.omega_matrix(alg, tag)
        lhs = C.mat_mul(C.mat_transpose(J), C.mat_mul(om, J))
        Jg = C.jacobian(parts)
        rhs = C.mat_add(om, C.mat_sub(C.mat_transpose(Jg), Jg))
        if not C.mat_eq(lhs, rhs):
            return False
    return True
