"""High-precision reference values for the unit tests (mpmath, 40 digits).

Run: python3 tests/oracles/generate.py > tests/oracles.inc
"""
import mpmath as mp

mp.mp.dps = 40


def Lam_const(nu, a0):
    return lambda y: a0 * y**nu


def Lam_delta(nu, a0):
    return lambda y: nu * a0 * y**nu / (nu + a0 * (1 - y**nu))


def f_of(Lam):
    return lambda s: (1 - s) * Lam(1 - s)


def R_ode(Lam, y0, t):
    # d ln R / dt = -Lambda(R)
    sol = mp.odefun(lambda u, x: -Lam(mp.e**x), 0, mp.log(y0))
    return mp.e ** sol(t)


def emit(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 20, min_fixed=-1, max_fixed=-1)};")


nu = mp.mpf("0.5")

# offspring intensities
fd = f_of(Lam_delta(nu, mp.mpf("0.1")))
c = mp.taylor(fd, 0, 6)
for j, v in enumerate(c):
    emit(f"kDeltaCoeff{j}", v)

# R(t; s) for DeltaEqualsLambda(0.5, 1) by an independent ODE
for t in ["1", "10"]:
    for s in ["0", "0.5"]:
        emit(f"kDeltaR_t{t}_s{s.replace('.', '')}", R_ode(Lam_delta(nu, 1), 1 - mp.mpf(s), mp.mpf(t)))

# normalizer N^nu L((nu t)^{1/nu}/N) = 1, DeltaEqualsLambda(0.5, 1), t = 100
a0 = mp.mpf(1)
L = lambda x: nu * a0 / (nu + a0 * (1 - x**(-nu)))
t = mp.mpf(100)
N = mp.findroot(lambda N: N**nu * L((nu * t) ** (1 / nu) / N) - 1, 1.5)
emit("kDeltaNormalizer_t100", N)

# M(s) = int_1^{1/(1-s)} dx / (x^{1-nu} L(x)) at s = 0.5
emit("kDeltaM_s05", mp.quad(lambda x: 1 / (x ** (1 - nu) * L(x)), [1, 2]))

# Q-process generating function, ConstantL(0.5, 1), t = 1, s = 0.5
s, t = mp.mpf("0.5"), mp.mpf(1)
F = 1 - ((1 - s) ** (-nu) + nu * t) ** (-1 / nu)
fc = f_of(Lam_const(nu, 1))
emit("kConstG_t1_s05", s * fc(F) / fc(s))

# limit law D(x) at nu = 1/2 from its Laplace transform Psi(p)/p
D = lambda x: mp.invertlaplace(lambda p: (1 + p**nu) ** (-(1 + 1 / nu)) / p, x, method="talbot")
for x in ["0.1", "1", "5"]:
    emit(f"kD_x{x.replace('.', '')}", D(mp.mpf(x)))

# pi_j = [s^{j-1}] 1/f for DeltaEqualsLambda(0.5, 0.1)
inv = mp.taylor(lambda s: 1 / fd(s), 0, 5)
for j, v in enumerate(inv, start=1):
    emit(f"kDeltaPi{j}", v)

# P_11(t) = q Lambda(q) / a0 for DeltaEqualsLambda(0.5, 0.1), t = 2
Lam = Lam_delta(nu, mp.mpf("0.1"))
q = R_ode(Lam, 1, 2)
emit("kDeltaP11_t2", q * Lam(q) / mp.mpf("0.1"))

# mho(t; 0) = int_0^t Lambda(R(u)) du for DeltaEqualsLambda(0.5, 1), t = 10
Lam = Lam_delta(nu, 1)
sol = mp.odefun(lambda u, x: [-Lam(mp.e ** x[0]), Lam(mp.e ** x[0])], 0, [0, 0])
emit("kDeltaMho_t10", sol(10)[1])
