#!/usr/bin/env python3
"""High precision reference values for the scalar kernel tests.

Everything here is computed with mpmath at 60 digits, independently of the
C++ code, and pasted into the tests as frozen constants.
"""

import mpmath as mp

mp.mp.dps = 60

LN2 = mp.log(2)


def h2(p):
    if p == 0 or p == 1:
        return mp.mpf(0)
    return (-p * mp.log(p) - (1 - p) * mp.log(1 - p)) / LN2


def h2_inv(y):
    if y == 0:
        return mp.mpf(0)
    if y == 1:
        return mp.mpf("0.5")
    return mp.findroot(lambda p: h2(p) - y, (mp.mpf("1e-40"), mp.mpf("0.5")),
                       solver="anderson")


def j(p):
    return (mp.log(1 - p) - mp.log(p)) / LN2


def d2(x, y):
    return (x * mp.log(x / y) + (1 - x) * mp.log((1 - x) / (1 - y))) / LN2


def eta(x):
    if x == 1:
        return mp.mpf(0)
    p = h2_inv(x)
    return (1 - 2 * p) * j(p)


def big_l(u):
    return 2 * h2(u) / (1 - 2 * u)


def big_l_inv(y):
    return mp.findroot(lambda u: big_l(u) - y,
                       (mp.mpf("1e-40"), mp.mpf("0.5") - mp.mpf("1e-30")),
                       solver="anderson")


def solve_r(x, y):
    if x == mp.mpf("0.5"):
        return mp.mpf(1)
    return h2(big_l_inv(2 * y / abs(1 - 2 * x)))


def phi(x, y):
    if h2(x) <= y:
        return mp.mpf(0)
    r = solve_r(x, y)
    return eta(y) - (y / r) * eta(r)


def zeta_symmetric(m, e):
    return phi(mp.mpf("0.5"), e) - phi(m, e)


def kappa(u, w):
    if u == w:
        return mp.mpf(0)
    two_point = (u - w) * (j(w) - j(u)) / 2
    mixed = abs(u - w) * j(big_l_inv((h2(u) + h2(w)) / abs(u - w)))
    return two_point - mixed


def zeta_lower_bound(mu_, mw, eu, ew):
    hu, hw = h2_inv(eu), h2_inv(ew)
    mid = (eu + ew) / 2
    t1 = phi((1 - abs(hu - hw)) / 2, mid)
    t2 = (hu - hw) * (j(hw) - j(hu)) / 2
    t3 = phi((1 - abs(mu_ - mw)) / 2, mid)
    return t1 + t2 - t3


def zeta_lower_bound_alt(mu_, mw, eu, ew):
    return (abs(mu_ - mw) * j(big_l_inv((eu + ew) / abs(mu_ - mw)))
            + kappa(h2_inv(eu), h2_inv(ew)))


def binary_conv(a, b):
    return a * (1 - b) + b * (1 - a)


def crossover(t):
    return (1 - mp.e ** (-2 * t)) / 2


def fmt(x):
    return mp.nstr(x, 22)


def emit(label, x):
    print(f"{label:38s} {fmt(x)}")


print("== h2 ==")
for p in ["0.11", "0.25", "0.3", "0.45"]:
    emit(f"h2({p})", h2(mp.mpf(p)))

print("== h2_inv ==")
for y in ["0.1", "0.25", "0.5", "0.75", "0.9", "0.971967"]:
    emit(f"h2_inv({y})", h2_inv(mp.mpf(y)))

print("== j ==")
for p in ["0.05", "0.11", "0.3"]:
    emit(f"j({p})", j(mp.mpf(p)))

print("== d2 ==")
for x, y in [("0.3", "0.5"), ("0.11", "0.45"), ("0.9", "0.2")]:
    emit(f"d2({x},{y})", d2(mp.mpf(x), mp.mpf(y)))

print("== eta ==")
for x in ["0.1", "0.25", "0.5", "0.75", "0.9"]:
    emit(f"eta({x})", eta(mp.mpf(x)))

print("== L ==")
for u in ["0.05", "0.2", "0.35"]:
    emit(f"L({u})", big_l(mp.mpf(u)))
for y in ["2.2", "3.0", "6.0"]:
    emit(f"L_inv({y})", big_l_inv(mp.mpf(y)))

print("== solve_r / phi ==")
for x, y in [("0.3", "0.4"), ("0.2", "0.5"), ("0.45", "0.9"), ("0.05", "0.2")]:
    emit(f"solve_r({x},{y})", solve_r(mp.mpf(x), mp.mpf(y)))
    emit(f"phi({x},{y})", phi(mp.mpf(x), mp.mpf(y)))
for y in ["0.2", "0.5", "0.8"]:
    emit(f"phi(0.5,{y})", phi(mp.mpf("0.5"), mp.mpf(y)))

print("== zeta_symmetric ==")
for m, e in [("0.3", "0.5"), ("0.25", "0.4"), ("0.45", "0.8")]:
    emit(f"zeta_symmetric({m},{e})", zeta_symmetric(mp.mpf(m), mp.mpf(e)))

print("== kappa ==")
for u, w in [("0.1", "0.3"), ("0.2", "0.45"), ("0.35", "0.05"), ("0.7", "0.2")]:
    emit(f"kappa({u},{w})", kappa(mp.mpf(u), mp.mpf(w)))

print("== remark identity x*J(Linv(y/x)) ==")
x, y = mp.mpf("0.4"), mp.mpf("1.1")
emit("identity residual",
     x * j(big_l_inv(y / x)) - (phi(mp.mpf("0.5"), y / 2) - phi((1 - x) / 2, y / 2)))

print("== zeta_lower_bound ==")
for q in [("0.3", "0.7", "0.5", "0.5"), ("0.2", "0.6", "0.4", "0.7"),
          ("0.4", "0.8", "0.6", "0.5")]:
    args = [mp.mpf(v) for v in q]
    emit(f"zeta_lower_bound{q}", zeta_lower_bound(*args))
    emit(f"  alt form agreement", zeta_lower_bound(*args) - zeta_lower_bound_alt(*args))

print("== ode closed form ==")
# gamma_t of a single biased bit: h2(crossover(t) * (1-p0) + (1-crossover(t)) * p0)
for g0, t in [("0.1", "0.05"), ("0.1", "0.5"), ("0.3", "0.2"), ("0.5", "1.0"),
              ("0.9", "0.3"), ("0.02", "2.0")]:
    p0 = h2_inv(mp.mpf(g0))
    val = h2(binary_conv(crossover(mp.mpf(t)), p0))
    emit(f"ode({g0},{t})", val)

print("== dictator flow ==")
# gamma for a dictator equals h2(p_t) exactly; mutual information 1 - h2(p_t).
for t in ["0.001", "0.1", "1.0", "3.0"]:
    emit(f"h2(crossover({t}))", h2(crossover(mp.mpf(t))))

print("== eta guess counterexample ==")
w_ = [mp.mpf("0.1"), mp.mpf("0.45"), mp.mpf("0.45")]
u_ = [mp.mpf("0.99"), mp.mpf("0.9999"), mp.mpf("0.0001")]
v_ = [mp.mpf("0.01"), mp.mpf("0.9999"), mp.mpf("0.0001")]


def eta_guess(a, b):
    arg = 1 - h2(a) + b
    if arg >= 1:
        return mp.mpf(0)
    return eta(arg)


def lhs(w, u, v):
    s = mp.mpf(0)
    for i in range(len(w)):
        if u[i] != v[i]:
            s += w[i] * (u[i] - v[i]) * (j(v[i]) - j(u[i]))
    return s / 2


def psi_margin(psi, w, u, v):
    mu = sum(w[i] * u[i] for i in range(len(w)))
    mv = sum(w[i] * v[i] for i in range(len(w)))
    hu = sum(w[i] * h2(u[i]) for i in range(len(w)))
    hv = sum(w[i] * h2(v[i]) for i in range(len(w)))
    mid = psi((mu + mv) / 2, (hu + hv) / 2)
    ends = (psi(mu, hu) + psi(mv, hv)) / 2
    return lhs(w, u, v) - (mid - ends)


emit("psi_margin(eta_guess)", psi_margin(eta_guess, w_, u_, v_))

print("== hellinger natural counterexample ==")
wh = [mp.mpf("0.9118"), mp.mpf("0.0760"), mp.mpf("0.0122")]
uh = [mp.mpf("0.9996"), mp.mpf("0.7316"), mp.mpf("0.2996")]
vh = [mp.mpf("0.9992"), mp.mpf("0.1416"), mp.mpf("0.5866")]


def hell_natural(a, b):
    num = 1 - a * a - b * b
    if num <= 0:
        return mp.mpf(0)
    return num / b


def g_h(x):
    return x / mp.sqrt(1 - x * x)


def lhs_h(w, u, v):
    s = mp.mpf(0)
    for i in range(len(w)):
        if u[i] != v[i]:
            s += w[i] * (u[i] - v[i]) * (g_h(v[i]) - g_h(u[i]))
    return s / 2


def psi_h_margin(psi, w, u, v):
    mu = sum(w[i] * u[i] for i in range(len(w)))
    mv = sum(w[i] * v[i] for i in range(len(w)))
    su = sum(w[i] * mp.sqrt(1 - u[i] * u[i]) for i in range(len(w)))
    sv = sum(w[i] * mp.sqrt(1 - v[i] * v[i]) for i in range(len(w)))
    mid = psi((mu + mv) / 2, (su + sv) / 2)
    ends = (psi(mu, su) + psi(mv, sv)) / 2
    return lhs_h(w, u, v) - (mid - ends)


emit("psi_h_margin(hell_natural)", psi_h_margin(hell_natural, wh, uh, vh))

print("== dd sanity ==")
emit("ln2_hi+lo check: ln2", mp.log(2))
emit("exp(0.3)", mp.e ** mp.mpf("0.3"))
emit("log2(0.7)", mp.log(mp.mpf("0.7")) / LN2)
