"""Reference values for the two-fragment free state at t = 0.

Independent of the package: closed-form Gaussian derivatives, adaptive
quadrature and numerical differentiation in 25-digit arithmetic (mpmath).
Run with ``python3 tests/oracles/derive_fig1.py``; the printed numbers are
frozen in the tests.
"""
import mpmath as mp

mp.mp.dps = 25

SPAN = [-14, -1, 0, 1, 14]  # integrands are below 1e-60 outside


def g(u, c):
    return mp.exp(-(u - c) ** 2)


def g1d(u, c):
    return -2 * (u - c) * g(u, c)


def g2(u, c):
    return (4 * (u - c) ** 2 - 2) * g(u, c)


def g3(u, c):
    d = u - c
    return (12 * d - 8 * d ** 3) * g(u, c)


s = mp.exp(-2)
lam_p = 1 / mp.sqrt(2 * (1 + s))
lam_m = 1 / mp.sqrt(2 * (1 - s))
norm = (mp.pi / 2) ** mp.mpf("-0.25")


def phi(u, sign):
    lam = lam_p if sign > 0 else lam_m
    return norm * lam * (g(u, -1) + sign * g(u, 1))


def rho_mi(u):
    return (phi(u, 1) ** 2 + phi(u, -1) ** 2) / 2


def force_mi(u):
    """-dq/dx for psi(x, y) ~ L(x)L(y) - R(x)R(y), the symmetrized |11> over phi_+-.

    q = -N/(2D) with N = int psi lap psi dy and D = int psi^2 dy; the x
    derivatives are taken under the integral sign.
    """
    def parts(v):
        psi = g(u, -1) * g(v, -1) - g(u, 1) * g(v, 1)
        psi_x = g1d(u, -1) * g(v, -1) - g1d(u, 1) * g(v, 1)
        lap = g2(u, -1) * g(v, -1) + g(u, -1) * g2(v, -1) - g2(u, 1) * g(v, 1) - g(u, 1) * g2(v, 1)
        lap_x = g3(u, -1) * g(v, -1) + g1d(u, -1) * g2(v, -1) - g3(u, 1) * g(v, 1) - g1d(u, 1) * g2(v, 1)
        return psi, psi_x, lap, lap_x

    def integral(f):
        return mp.quad(lambda v: f(*parts(v)), SPAN)

    n = integral(lambda p, px, lp, lpx: p * lp)
    dn = integral(lambda p, px, lp, lpx: px * lp + p * lpx)
    d = integral(lambda p, px, lp, lpx: p * p)
    dd = integral(lambda p, px, lp, lpx: 2 * p * px)
    return (dn * d - n * dd) / d ** 2 / 2


def force_single(amplitude, u):
    """-dQ/dx with Q = -A''/(2A) for an analytic real amplitude A."""
    q = lambda w: -mp.diff(amplitude, w, 2) / amplitude(w) / 2
    return -mp.diff(q, u)


def second_moment(sign):
    """<x^2> under phi_+-, from int x^2 g_c^2 = sqrt(pi/2)(c^2 + 1/4) and int x^2 g_-1 g_1 = s sqrt(pi/2)/4."""
    lam = lam_p if sign > 0 else lam_m
    return 2 * lam ** 2 * (mp.mpf("1.25") + sign * s / 4)


if __name__ == "__main__":
    print("s", mp.nstr(s, 17))
    print("lambda_plus", mp.nstr(lam_p, 17))
    print("lambda_minus", mp.nstr(lam_m, 17))
    forces = (("SF1", lambda u: force_single(lambda w: mp.sqrt(rho_mi(w)), u)),
              ("MI", force_mi),
              ("SF2", lambda u: force_single(lambda w: phi(w, -1), u)))
    for name, f in forces:
        print(name, "F(0.5)", mp.nstr(f(mp.mpf("0.5")), 17), "F(-0.5)", mp.nstr(f(mp.mpf("-0.5")), 17))
    # both densities are even, so the variance is the second moment
    print("dx2 MI(0)", mp.nstr((second_moment(1) + second_moment(-1)) / 2, 17))
    print("dx2 SF2(0)", mp.nstr(second_moment(-1), 17))
