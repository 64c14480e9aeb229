"""Packed-array kernels for the normal-ordered Weyl product.

The product of two normally ordered terms reduces, one conjugate pair at a
time, to the contraction identity

    z_{n+l}^a z_l^b = sum_k binom(a,k) binom(b,k) k! z_l^{b-k} z_{n+l}^{a-k}

(the bracket [z_{n+l}, z_l] = 1 is central, so pairs contract independently).
These kernels run that contraction over packed exponent/coefficient arrays
for the m = 1 coefficient rings F_p and W_2(F_p), which is where all the
runtime of obstruction computations goes.  Exponent vectors are encoded into
a single int64 key (mixed radix) so terms can be merged with one argsort.

With numba present the kernels are jit-compiled; setting WEYLIFT_NO_NUMBA=1
(or running without numba installed) selects the plain numpy/Python fallback,
which executes the identical code uncompiled.  bench/bench_kernel.py compares
the two.
"""

from __future__ import annotations

import os
from math import comb, factorial

import numpy as np


def _numba_check():
    """Return (have_numba, jit decorator), a passthrough when disabled."""
    if os.environ.get("WEYLIFT_NO_NUMBA", "") not in ("", "0"):
        return False, _dummy_jit
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        return False, _dummy_jit
    return True, numba.njit


def _dummy_jit(*args, **kwargs):
    def wrapper(f):
        return f

    if len(args) == 1 and callable(args[0]):
        return args[0]
    return wrapper


HAVE_NUMBA, jit = _numba_check()


def backend() -> str:
    return "numba" if HAVE_NUMBA else "python"


# ---------------------------------------------------------------------------
# Per-prime tables.  Integer binomials/factorials are taken mod p^2 (enough
# for both F_p and W_2(F_p) images, since W_2(F_p) has characteristic p^2)
# and converted to Witt pairs through the pair addition law itself.

_tables_cache: dict[int, dict] = {}


def _w2_pair_of_int(t: int, p: int, carry: np.ndarray) -> tuple[int, int]:
    """Witt pair of the integer t >= 0, by repeated pair addition."""
    a1, a2 = 0, 0
    for _ in range(t % (p * p)):
        c = carry[a1, 1]
        a1n = (a1 + 1) % p
        a2 = (a2 + c) % p
        a1 = a1n
    return a1, a2


def tables(p: int, size: int) -> dict:
    """Contraction tables covering exponents up to size (inclusive)."""
    cached = _tables_cache.get(p)
    if cached is not None and cached["size"] >= size:
        return cached
    size = max(size, 2 * cached["size"] if cached else 0, 32)
    p2 = p * p
    carry = np.empty((p, p), dtype=np.int64)
    for a in range(p):
        for b in range(p):
            carry[a, b] = ((a**p + b**p - (a + b) ** p) // p) % p
    img = np.empty((p2, 2), dtype=np.int64)
    for t in range(p2):
        img[t] = _w2_pair_of_int(t, p, carry)
    binom = np.empty((size + 1, size + 1), dtype=np.int64)
    bw1 = np.empty((size + 1, size + 1), dtype=np.int64)
    bw2 = np.empty((size + 1, size + 1), dtype=np.int64)
    for a in range(size + 1):
        for k in range(size + 1):
            c = comb(a, k) % p2
            binom[a, k] = c % p
            bw1[a, k], bw2[a, k] = img[c]
    fact = np.empty(size + 1, dtype=np.int64)
    fw1 = np.empty(size + 1, dtype=np.int64)
    fw2 = np.empty(size + 1, dtype=np.int64)
    for k in range(size + 1):
        c = factorial(k) % p2
        fact[k] = c % p
        fw1[k], fw2[k] = img[c]
    out = {
        "size": size,
        "carry": carry,
        "img": img,
        "binom": binom,
        "bw1": bw1,
        "bw2": bw2,
        "fact": fact,
        "fw1": fw1,
        "fw2": fw2,
    }
    _tables_cache[p] = out
    return out


@jit(cache=True)
def _contract_modp(ea, ca, eb, cb, n, p, binom, fact, base):
    """All contraction terms of (sum ca z^ea) * (sum cb z^eb) over F_p.

    Returns encoded exponent keys and merged nonzero coefficients.
    """
    na = ea.shape[0]
    nb = eb.shape[0]
    n2 = 2 * n
    total = 0
    for i in range(na):
        for j in range(nb):
            c = 1
            for l in range(n):
                hi = ea[i, n + l]
                lo = eb[j, l]
                m = hi if hi < lo else lo
                c *= m + 1
            total += c
    keys = np.empty(total, np.int64)
    vals = np.empty(total, np.int64)
    kvec = np.zeros(n, np.int64)
    cap = np.zeros(n, np.int64)
    pos = 0
    for i in range(na):
        for j in range(nb):
            cc = ca[i] * cb[j] % p
            for l in range(n):
                hi = ea[i, n + l]
                lo = eb[j, l]
                cap[l] = hi if hi < lo else lo
                kvec[l] = 0
            while True:
                coeff = cc
                for l in range(n):
                    k = kvec[l]
                    if k:
                        coeff = coeff * binom[ea[i, n + l], k] % p
                        coeff = coeff * binom[eb[j, l], k] % p
                        coeff = coeff * fact[k] % p
                key = 0
                mult = 1
                for l in range(n2):
                    e = ea[i, l] + eb[j, l]
                    ll = l if l < n else l - n
                    e -= kvec[ll]
                    key += e * mult
                    mult *= base
                keys[pos] = key
                vals[pos] = coeff
                pos += 1
                l = 0
                while l < n:
                    if kvec[l] < cap[l]:
                        kvec[l] += 1
                        break
                    kvec[l] = 0
                    l += 1
                if l == n:
                    break
    order = np.argsort(keys[:pos])
    out_k = np.empty(pos, np.int64)
    out_v = np.empty(pos, np.int64)
    m = 0
    i = 0
    while i < pos:
        k = keys[order[i]]
        acc = 0
        while i < pos and keys[order[i]] == k:
            acc = (acc + vals[order[i]]) % p
            i += 1
        if acc != 0:
            out_k[m] = k
            out_v[m] = acc
            m += 1
    return out_k[:m], out_v[:m]


@jit(cache=True)
def _contract_w2(ea, c1a, c2a, eb, c1b, c2b, n, p, bw1, bw2, fw1, fw2, carry, base):
    """Same contraction over W_2(F_p) with pair coefficients.

    Pair product uses a^p = a in F_p:  (x1,x2)(y1,y2) = (x1 y1, x1 y2 + y1 x2).
    Pair sums go through the carry table.
    """
    na = ea.shape[0]
    nb = eb.shape[0]
    n2 = 2 * n
    total = 0
    for i in range(na):
        for j in range(nb):
            c = 1
            for l in range(n):
                hi = ea[i, n + l]
                lo = eb[j, l]
                m = hi if hi < lo else lo
                c *= m + 1
            total += c
    keys = np.empty(total, np.int64)
    v1 = np.empty(total, np.int64)
    v2 = np.empty(total, np.int64)
    kvec = np.zeros(n, np.int64)
    cap = np.zeros(n, np.int64)
    pos = 0
    for i in range(na):
        for j in range(nb):
            x1 = c1a[i] * c1b[j] % p
            x2 = (c1a[i] * c2b[j] + c1b[j] * c2a[i]) % p
            for l in range(n):
                hi = ea[i, n + l]
                lo = eb[j, l]
                cap[l] = hi if hi < lo else lo
                kvec[l] = 0
            while True:
                y1 = x1
                y2 = x2
                for l in range(n):
                    k = kvec[l]
                    if k:
                        t1 = bw1[ea[i, n + l], k]
                        t2 = bw2[ea[i, n + l], k]
                        y1, y2 = y1 * t1 % p, (y1 * t2 + t1 * y2) % p
                        t1 = bw1[eb[j, l], k]
                        t2 = bw2[eb[j, l], k]
                        y1, y2 = y1 * t1 % p, (y1 * t2 + t1 * y2) % p
                        t1 = fw1[k]
                        t2 = fw2[k]
                        y1, y2 = y1 * t1 % p, (y1 * t2 + t1 * y2) % p
                key = 0
                mult = 1
                for l in range(n2):
                    e = ea[i, l] + eb[j, l]
                    ll = l if l < n else l - n
                    e -= kvec[ll]
                    key += e * mult
                    mult *= base
                keys[pos] = key
                v1[pos] = y1
                v2[pos] = y2
                pos += 1
                l = 0
                while l < n:
                    if kvec[l] < cap[l]:
                        kvec[l] += 1
                        break
                    kvec[l] = 0
                    l += 1
                if l == n:
                    break
    order = np.argsort(keys[:pos])
    out_k = np.empty(pos, np.int64)
    o1 = np.empty(pos, np.int64)
    o2 = np.empty(pos, np.int64)
    m = 0
    i = 0
    while i < pos:
        k = keys[order[i]]
        a1 = 0
        a2 = 0
        while i < pos and keys[order[i]] == k:
            b1 = v1[order[i]]
            b2 = v2[order[i]]
            a2 = (a2 + b2 + carry[a1, b1]) % p
            a1 = (a1 + b1) % p
            i += 1
        if a1 != 0 or a2 != 0:
            out_k[m] = k
            o1[m] = a1
            o2[m] = a2
            m += 1
    return out_k[:m], o1[:m], o2[:m]


def decode_keys(keys: np.ndarray, n2: int, base: int) -> np.ndarray:
    """Inverse of the mixed-radix key encoding: (N,) keys -> (N, n2) exponents."""
    out = np.empty((keys.shape[0], n2), dtype=np.int64)
    rem = keys.copy()
    for l in range(n2):
        out[:, l] = rem % base
        rem //= base
    return out


def warmup() -> None:
    """Compile the kernels on a trivial input (no-op without numba)."""
    t = tables(3, 4)
    e = np.array([[1, 1]], dtype=np.int64)
    c = np.array([1], dtype=np.int64)
    _contract_modp(e, c, e, c, 1, 3, t["binom"], t["fact"], 8)
    _contract_w2(e, c, c, e, c, c, 1, 3, t["bw1"], t["bw2"], t["fw1"], t["fw2"], t["carry"], 8)
