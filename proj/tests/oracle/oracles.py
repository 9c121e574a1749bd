"""Independent high-precision reference values frozen into the unit tests.

Run: python3 tests/oracle/oracles.py
Uses mpmath at 50 digits; nothing here imports the C++ code.
"""
from mpmath import mp, mpf, sqrt, coth, exp, cosh, sinh, tanh, odefun

mp.dps = 50
g = mpf("9.81")
mH, hH = mpf(75), mpf("1.20")
mR, hR = mpf("20.2"), mpf("0.55")
wH, wR = sqrt(g / hH), sqrt(g / hR)


def sigma1(T, w):
    return w * coth(T * w / 2)


def end_of_step(T, xi, w):
    s = sigma1(T, w)
    xm = xi / (1 + s / w)
    return xm, w * (xi - xm)


out = {}
out["omega_H"] = wH
out["omega_R"] = wR
out["accel(0.1,0,wH)"] = wH**2 * mpf("0.1")
out["accel(0,0.05,wR)"] = wR**2 * (0 - mpf("0.05"))
out["contact(75,wH,0.05,0)"] = mH * wH**2 * mpf("0.05")
out["contact(20.2,wR,0.02,0.01)"] = mR * wR**2 * mpf("0.01")
out["dcm(0.1,0.2,wR)"] = mpf("0.1") + mpf("0.2") / wR
out["sigma1(0.3)"] = sigma1(mpf("0.3"), wH)
out["sigma1(0.4)"] = sigma1(mpf("0.4"), wH)
xm, xdm = end_of_step(mpf("0.3"), mpf("0.05"), wH)
out["x_minus(0.3,0.05)"] = xm
out["xdot_minus(0.3,0.05)"] = xdm
out["xi_plus(0.3,0.05)"] = mpf("0.05") * exp(-wH * mpf("0.3"))
out["ref_dcm(0.0212,0.3)"] = mpf("0.0212") * exp(wH * mpf("0.3"))
# passive LIP from (x-, xdot-) over 0.3 s, closed form
c1 = (xm + xdm / wH) / 2
c2 = (xm - xdm / wH) / 2
t = mpf("0.3")
out["passive_x(0.3)"] = c1 * exp(wH * t) + c2 * exp(-wH * t)
out["passive_xd(0.3)"] = wH * (c1 * exp(wH * t) - c2 * exp(-wH * t))
# same by adaptive Taylor ODE integration, as a cross-check of the closed form
f = odefun(lambda tt, y: [y[1], wH**2 * y[0]], 0, [-xm, xdm])
out["orbit_closure_x(0.3)"] = f(mpf("0.3"))[0]
out["orbit_closure_xd(0.3)"] = f(mpf("0.3"))[1]
out["gap(0.05/1.2, 0)"] = mpf("0.05") / hH
out["rate_gap(0.2)"] = mpf("0.2") / (hH * wH)
out["force_to_cop(5.45)"] = -mpf("5.45") / (mR * wR**2)
# constant external force with the CoP held under the initial CoM
F = mpf(30)
out["xdot_Fext_held_cop(0.1)"] = F / (mR * wR) * sinh(wR * mpf("0.1"))
out["x_Fext_held_cop(0.1)"] = F / (mR * wR**2) * (cosh(wR * mpf("0.1")) - 1)
out["F_ref(0.014398)"] = mH * wH**2 * mpf("0.014398")
out["F_s(-0.014398)"] = mH * wH**2 * mpf("-0.014398")
out["ff_scale"] = (mR * hR * wR**2) / (mH * hH * wH**2)
out["F_ff(10)"] = out["ff_scale"] * 10
out["F_fb(0.05,0,K=100)"] = 100 * (mpf("0.05") / hH)
out["F_hmi(Fext=30)"] = (mH / mR) * 30
out["F_hmi(xdR=0.36)"] = mH * hH * wH**2 * (mpf("0.36") / (hR * wR))
out["frontal_cop(0.05)"] = mpf("0.05") * hR / hH
out["swing_y(0.10)"] = mpf("0.10") * hR / hH
out["step_nominal"] = mpf("0.10") - mpf("0.021204") * mpf("0.45833")
out["step_closed_loop"] = out["step_nominal"] + mpf("0.3") * mpf("0.05")
out["pilot_10N_0.1s"] = mpf(10) / mH * mpf("0.1")
# frontal transfer DCM between feet at +0.04583 / -0.04583, SSP 0.25 s, robot omega
tt = tanh(wR * mpf("0.25") / 2)
a, b = mpf("0.04583"), mpf("-0.04583")
out["frontal_transfer(0.25)"] = (a * (1 + tt) + b * (1 - tt)) / 2

for k, v in out.items():
    print(f"{k:28s} {mp.nstr(v, 17)}")
