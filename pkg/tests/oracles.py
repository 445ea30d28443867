"""Brute-force reference implementations used as test oracles.

Everything here works on plain dicts and loops over points and pairs, and
shares no code with the package beyond reading ``model.sigma``.
"""

import math

import numpy as np


def sigma_dict(model):
    return {i: int(s) for i, s in enumerate(model.sigma) if s >= 0}


def power(sig, x, n):
    for _ in range(n):
        if x not in sig:
            return None
        x = sig[x]
    return x


def in_U(sig, x, n):
    return power(sig, x, n) is not None and (n == 0 or power(sig, x, n - 1) in sig)


def U(sig, N, n):
    return {x for x in range(N) if power(sig, x, n) is not None}


def classes(sig, N, n):
    """``x -> frozenset`` of its ``R_n``-class, for x in ``U_n``."""
    by_img = {}
    for x in U(sig, N, n):
        by_img.setdefault(power(sig, x, n), set()).add(x)
    out = {}
    for members in by_img.values():
        fs = frozenset(members)
        for x in fs:
            out[x] = fs
    return out


def hn(sig, h, x, n):
    total, cur = 0.0, x
    for _ in range(n):
        total += h[cur]
        cur = sig[cur]
    return total


def zeta(sig, h, N, n, pinned=frozenset()):
    cl = classes(sig, N, n)
    out = {}
    for x, members in cl.items():
        if members & pinned:
            out[x] = math.inf
        else:
            out[x] = sum(math.exp(hn(sig, h, y, n)) for y in sorted(members))
    return out


def mul(a, b):
    return 0.0 if a == 0 or b == 0 else a * b


def kernel(sig, h, N, n, kind, pinned=frozenset()):
    """Dense ``K`` with ``T(f)(x) = sum_t K[x, t] f(t)``."""
    cl = classes(sig, N, n)
    z = zeta(sig, h, N, n, pinned)
    K = np.zeros((N, N))
    for x, members in cl.items():
        for t in members:
            rho = math.exp(hn(sig, h, t, n))
            if kind == "F":
                K[x, t] = 1.0
            elif kind == "E_rho":
                K[x, t] = rho
            else:
                K[x, t] = mul(rho, 0.0 if math.isinf(z[t]) else 1.0 / z[t])
    return K


def transfer_kernel(sig, h, N, n, weighted):
    K = np.zeros((N, N))
    for t in range(N):
        x = power(sig, t, n)
        if x is not None:
            K[x, t] += math.exp(hn(sig, h, t, n)) if weighted else 1.0
    return K


def qi_pairs(sig, h, N, n, mu, rtol):
    """Pairwise quasi-invariance of ``mu`` at level n."""
    cl = classes(sig, N, n)
    for x, members in cl.items():
        for y in members:
            lhs = mu[x]
            rhs = math.exp(hn(sig, h, x, n) - hn(sig, h, y, n)) * mu[y]
            if abs(lhs - rhs) > rtol * max(abs(lhs), abs(rhs)):
                return False
    return True


def groupoid(sig, N, depth):
    """Triples ``(x, k - l, y)`` with ``sigma^k x = sigma^l y`` and witnesses."""
    out = {}
    for x in range(N):
        for y in range(N):
            for k in range(depth + 1):
                for l in range(depth + 1):
                    a, b = power(sig, x, k), power(sig, y, l)
                    if a is not None and a == b:
                        out.setdefault((x, k - l, y), []).append((k, l))
    return out


def conformal_measure(sig, h, N, boundary):
    """``mu(t) = exp(h(t)) mu(sigma t)`` off cycles, free mass on ``X - U``.

    Points whose orbit never leaves ``dom(sigma)`` get zero mass.
    """
    mu = {}

    def val(x, seen=()):
        if x in mu:
            return mu[x]
        if x not in sig:
            mu[x] = boundary.get(x, 0.0)
        elif x in seen:
            return 0.0
        else:
            mu[x] = math.exp(h[x]) * val(sig[x], seen + (x,))
        return mu[x]

    for x in range(N):
        val(x)
    # anything touched while on a cycle was left at zero
    for x in range(N):
        orbit, cur = set(), x
        while cur in sig and cur not in orbit:
            orbit.add(cur)
            cur = sig[cur]
        if cur in sig:
            mu[x] = 0.0
    return np.array([mu[x] for x in range(N)])
