"""Independent high-precision oracle for the frozen scalar reference values.

Uses mpmath only (no package code). Regenerate with
``python tests/oracles/generate.py > tests/oracles/frozen.json``.
"""

import json

import mpmath as mp

mp.mp.dps = 40


def projection_pair(theta):
    c, s = mp.cos(theta), mp.sin(theta)
    return mp.matrix([[1, 0], [0, 0]]), mp.matrix([[c * c, c * s], [c * s, s * s]])


def opnorm(x):
    return max(mp.sqrt(abs(v)) for v in mp.eig(x.H * x)[0])


def min_eig(x):
    return min(mp.re(v) for v in mp.eig(x)[0])


def harmonic(a, b):
    return 2 * mp.inverse(mp.inverse(a) + mp.inverse(b))


def lemma22_margin(theta, eps, squared=False):
    p, q = projection_pair(theta)
    eye = mp.eye(2)
    a, b = p + eps * eye, q + eps * eye
    if squared:
        a, b = a * a, b * b
    rhs = harmonic(a, b)
    m = (p + q) / 2 + eps * eye
    lhs = m * m
    return min_eig(rhs - lhs) / max(1, opnorm(rhs), opnorm(lhs))


def bound(theta):
    c2 = mp.cos(theta) ** 2
    return 2 * c2 / (1 + c2)


def lemma24_det(eps):
    q = mp.matrix([[0.5, 0.5], [0.5, 0.5]])
    k = eps * q - (mp.eye(2) - q)
    return mp.det(mp.matrix([[1, 0], [0, 0]]) - k)


def measure_h0(alpha, atoms):
    # 2 σ 0 as the limit of 2 σ δ, from the scalar measure formula
    def ps(x, y):
        return x * y / (x + y)

    a, b = mp.mpf(2), mp.mpf("1e-35")
    out = alpha / 2 * (a + b)
    for lam, w in atoms:
        out += w * (lam + 1) / (2 * lam) * (ps(lam * a, b) + ps(a, lam * b))
    return out


def f(x):
    return float(x)


values = {
    "lemma22_bound": {str(t): f(bound(mp.mpf(t))) for t in ("0.05", "0.3")},
    "lemma22_bound_pi_over_3": f(bound(mp.pi / 3)),
    "lemma22_margin_harm": {
        "theta=0.3,eps=1e-4": f(lemma22_margin(mp.mpf("0.3"), mp.mpf("1e-4"))),
        "theta=0.05,eps=1e-4": f(lemma22_margin(mp.mpf("0.05"), mp.mpf("1e-4"))),
    },
    "lemma22_margin_squared_harm": {
        "theta=0.3,eps=1e-4": f(lemma22_margin(mp.mpf("0.3"), mp.mpf("1e-4"), squared=True)),
    },
    "lemma24_det": {e: f(lemma24_det(mp.mpf(e))) for e in ("0.05", "0.1", "0.2")},
    "decompose_harm_x1_y075": [f(mp.mpf("0.5")), f(mp.mpf("1.5"))],
    "decompose_geom_x1_y05": [f(1 - mp.sqrt(3) / 2), f(1 + mp.sqrt(3) / 2)],
    "phi_harm_half": f(2 / (2 + mp.mpf(2) / 3)),
    "phi_inverse_harm_075": f(1 - mp.sqrt(1 - mp.mpf("0.75"))),
    "gamma0_measure_half_atom1": f(measure_h0(mp.mpf("0.5"), [(1, mp.mpf("0.5"))])),
    "transform_atom1": {x: f(2 / (1 + mp.mpf(x))) for x in ("0.5", "1", "2")},
    "chain_gamma_half_x2_y1": [f(1 + mp.mpf(2) ** -k) for k in range(5)],
}

if __name__ == "__main__":
    print(json.dumps(values, indent=2, sort_keys=True))
