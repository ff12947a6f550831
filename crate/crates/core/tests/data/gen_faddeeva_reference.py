"""Regenerates faddeeva_reference.csv with mpmath at 30 significant digits.

Grid: 40 radii x 50 angles covering |z| <= 10 in both half-planes.
Run: python3 gen_faddeeva_reference.py > faddeeva_reference.csv
"""
import mpmath as mp

mp.mp.dps = 30


def w(z):
    return mp.exp(-z * z) * mp.erfc(-1j * z)


print("re,im,w_re,w_im")
for i in range(40):
    r = mp.mpf(10) * (i + 1) / 40
    for j in range(50):
        th = 2 * mp.pi * (j + mp.mpf(0.37)) / 50
        z = mp.mpc(float(r * mp.cos(th)), float(r * mp.sin(th)))
        v = w(z)
        print(f"{mp.nstr(z.real, 17)},{mp.nstr(z.imag, 17)},{mp.nstr(v.real, 20)},{mp.nstr(v.imag, 20)}")
