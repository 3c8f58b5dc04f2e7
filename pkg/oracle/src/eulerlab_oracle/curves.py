"""Integer curve arithmetic for the oracle: registry, traces, coefficients.

Deliberately self-contained (pure Python integers, Euler-criterion
characters on the completed-square quartic) so the reference values share
no code with the package under test.
"""

from __future__ import annotations

from dataclasses import dataclass


class OracleError(Exception):
    pass


#: label -> (a-invariants, conductor); the desk curves of the experiments
REGISTRY: dict[str, tuple[tuple[int, int, int, int, int], int]] = {
    "11a1": ((0, -1, 1, -10, -20), 11),
    "37a1": ((0, 0, 1, -1, 0), 37),
    "389a1": ((0, 1, 1, -2, 0), 389),
    "5077a1": ((0, 0, 1, -7, 6), 5077),
}


@dataclass(frozen=True)
class OracleCurve:
    label: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int

    @property
    def b_invariants(self) -> tuple[int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        return b2, b4, b6


def resolve_curve(spec) -> OracleCurve:
    """A label from the registry, or {"label","ainvs","conductor"}."""
    if isinstance(spec, str):
        if spec not in REGISTRY:
            raise OracleError(f"unknown curve label {spec!r}; registry has "
                              f"{sorted(REGISTRY)} (or pass ainvs+conductor)")
        ainvs, cond = REGISTRY[spec]
        return OracleCurve(spec, ainvs, cond)
    try:
        ainvs = tuple(int(v) for v in spec["ainvs"])
        cond = int(spec["conductor"])
        label = str(spec.get("label", "custom"))
    except (KeyError, TypeError, ValueError) as exc:
        raise OracleError(f"curve spec must be a label or ainvs+conductor: {exc}") from exc
    if len(ainvs) != 5:
        raise OracleError(f"need exactly 5 a-invariants, got {len(ainvs)}")
    return OracleCurve(label, ainvs, cond)


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _sieve(limit: int) -> list[int]:
    mask = bytearray([1]) * (limit + 1)
    mask[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if mask[i]:
            mask[i * i :: i] = b"\x00" * len(mask[i * i :: i])
    return [i for i in range(2, limit + 1) if mask[i]]


def trace_of_frobenius(curve: OracleCurve, p: int) -> int:
    """a_p at any prime: good via the quartic character sum, bad via counting."""
    a1, a2, a3, a4, a6 = curve.ainvs
    if p == 2:
        count = 1
        singular = None
        for x in range(2):
            for y in range(2):
                if (y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)) % 2:
                    continue
                if (a1 * y + 3 * x * x + 2 * a2 * x + a4) % 2 == 0 and (2 * y + a1 * x + a3) % 2 == 0:
                    singular = (x, y)
                    continue
                count += 1
        if curve.conductor % 2 == 0:
            return 2 - count
        return 3 - count
    b2, b4, b6 = curve.b_invariants
    total = 0
    singular = 0
    for x in range(p):
        g = (4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6) % p
        chi = _legendre(g, p)
        total += 1 + chi
        if chi == 0 and (12 * x * x + 2 * b2 * x + 2 * b4) % p == 0:
            singular += 1
    if curve.conductor % p == 0:
        npts = 1 + total - singular
        return p - npts
    return p + 1 - total - 1  # p + 1 - (1 + total)


def dirichlet_coefficients(curve: OracleCurve, n_max: int) -> list[int]:
    """a_n for n <= n_max from the Euler product (index 0 unused)."""
    primes = _sieve(n_max) if n_max >= 2 else []
    a = [0] * (n_max + 1)
    a[1] = 1
    ppow: dict[int, list[int]] = {}
    for p in primes:
        ap = trace_of_frobenius(curve, p)
        bad = curve.conductor % p == 0
        vals = [1, ap]
        pk = p
        while pk * p <= n_max:
            pk *= p
            vals.append(vals[-1] * ap if bad else ap * vals[-1] - p * vals[-2])
        ppow[p] = vals
    for n in range(2, n_max + 1):
        spf = None
        for p in primes:
            if p * p > n:
                break
            if n % p == 0:
                spf = p
                break
        if spf is None:
            spf = n  # n itself is prime
        m, k = n, 0
        while m % spf == 0:
            m //= spf
            k += 1
        a[n] = ppow[spf][k] * a[m]
    return a
