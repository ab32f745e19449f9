#!/usr/bin/env python3
"""
Spot-Value Check
Evaluates three published bound values straight from their closed forms with
mpmath at 200 bits, without importing src.

Usage:
    python scripts/verify_spot_values.py
Exit status is 0 when every value lands inside its tolerance, 1 otherwise.
"""

import sys

from mpmath import mp, mpf

PRECISION_BITS = 200

# (label, expected, tolerance)
EXPECTED = {
    'hall(28, 0, 2^10)': (0.7874, 0.0002),
    'gg(28, 0, 2^10)': (0.4263, 0.0002),
    'stam(4, 1, 2)': (0.12472, 0.00001),
}


def _r(n: int, m: int, q: int) -> mpf:
    return mpf(q) / mp.power(2, mpf(n + m) / 2)


def hall(n: int, m: int, q: int) -> mpf:
    r = _r(n, m, q)
    return 5 * r ** (mpf(2) / 3) + r ** 3 * mp.power(2, -mpf(n - 7 * m) / 2) / 2


def gg_small_m(n: int, m: int, q: int) -> mpf:
    r = _r(n, m, q)
    return (2 * mp.cbrt(2) * r ** (mpf(2) / 3)
            + 2 * mp.sqrt(2) / mp.sqrt(3) * r ** (mpf(3) / 2)
            + r ** 2)


def stam(n: int, m: int, q: int) -> mpf:
    N = mpf(2) ** n
    return mp.sqrt((mpf(2) ** (n - m) - 1) * q * (q - 1) / ((N - 1) * (N - (q - 1)))) / 2


def compute() -> dict:
    """Label -> high-precision value."""
    with mp.workprec(PRECISION_BITS):
        return {
            'hall(28, 0, 2^10)': hall(28, 0, 2 ** 10),
            'gg(28, 0, 2^10)': gg_small_m(28, 0, 2 ** 10),
            'stam(4, 1, 2)': stam(4, 1, 2),
        }


def check() -> list[tuple[str, mpf, float, bool]]:
    rows = []
    for label, value in compute().items():
        expected, tol = EXPECTED[label]
        rows.append((label, value, expected, abs(value - expected) <= tol))
    return rows


def main() -> int:
    print("=" * 60)
    print("SPOT VALUES (mpmath, 200-bit)")
    print("=" * 60)
    rows = check()
    for label, value, expected, ok in rows:
        mark = "ok" if ok else "MISMATCH"
        print(f"  {label:<20} {mp.nstr(value, 12):>16}   expected {expected:<8}  {mark}")
    print()
    failed = [label for label, _, _, ok in rows if not ok]
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return 1
    print("All spot values within tolerance.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
