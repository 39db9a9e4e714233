"""Recompute the constants frozen in the test suite with 50-digit arithmetic.

Run it with ``python3 scripts/oracle_values.py``.  It uses mpmath, so nothing
here shares a code path with the package.
"""

import argparse

import mpmath as mp


def contraction(R, M0):
    R, M0 = mp.mpf(R), mp.mpf(M0)
    mu = 1 / (mp.e**R * M0 + 1)
    c = mp.log(mu + (1 - mu) * mp.e ** (2 * R)) / (2 * R)
    return mu, c


def perron_2x2(a, b, c, d):
    a, b, c, d = map(mp.mpf, (a, b, c, d))
    return (a + d + mp.sqrt((a - d) ** 2 + 4 * b * c)) / 2


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--digits", type=int, default=50)
    args = parser.parse_args()
    mp.mp.dps = args.digits

    print("contraction constant (R, M0) -> mu, c")
    for R, M0 in [(1, 1), (2, 3), ("1e-6", 1), (1, "1e9")]:
        mu, c = contraction(R, M0)
        print(f"  ({R}, {M0}): mu = {mp.nstr(mu, 18)}  c = {mp.nstr(c, 18)}")

    print("Perron roots of 2x2 matrices")
    for entries in [(1, 1, 1, 1), (2, 0, 0, 3), (1, 2, 3, 4)]:
        print(f"  {entries}: {mp.nstr(perron_2x2(*entries), 18)}")

    print("max-plus [[0,1],[2,0]] radius e^1.5 =", mp.nstr(mp.e ** mp.mpf(1.5), 18))


if __name__ == "__main__":
    main()
