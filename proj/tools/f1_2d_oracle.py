"""Reference values for the f1 integrals over the square and a triangle.

Nested quadrature in 30-digit arithmetic with the inner integral in closed
form (arctan for f1, erf for f2). Output is pasted into
include/phsadapt/fixtures.hpp.
"""
import mpmath as mp

mp.mp.dps = 30

SHIFTS = [
    ("0.322471807186779", "0.784739294760742"),
    ("0.471357153710612", "-0.964237266730882"),
    ("-0.824125584316469", "0.721758033391102"),
    ("-0.526514007034680", "-0.847278799561768"),
]


def square(a, y1, y2):
    def inner(y):
        c = mp.sqrt(1 / mp.mpf(a) + (y - y2) ** 2)
        return (mp.atan((1 - y1) / c) - mp.atan((-1 - y1) / c)) / (a * c)
    return mp.quad(inner, [-1, y2, 1])


def unit_triangle(a, y1, y2, kind):
    def inner(y):
        if kind == "f1":
            c = mp.sqrt(1 / mp.mpf(a) + (y - y2) ** 2)
            return (mp.atan((1 - y - y1) / c) - mp.atan(-y1 / c)) / (a * c)
        sa = mp.sqrt(a)
        return mp.exp(-a * (y - y2) ** 2) * mp.sqrt(mp.pi) / (2 * sa) * (mp.erf(sa * (1 - y - y1)) - mp.erf(-sa * y1))
    return mp.quad(inner, [0, y2, 1])


if __name__ == "__main__":
    shifts = [(mp.mpf(x), mp.mpf(y)) for x, y in SHIFTS]
    for a in (1, 10, 1000):
        print(f"a={a} origin {mp.nstr(square(a, 0, 0), 20)}")
        print(f"a={a} four shifts {mp.nstr(sum(square(a, *s) for s in shifts), 20)}")
    for kind in ("f1", "f2"):
        value = unit_triangle(10, mp.mpf("0.2"), mp.mpf("0.3"), kind)
        print(f"{kind} a=10 y=(0.2,0.3) unit triangle {mp.nstr(value, 20)}")
