"""Regenerate the JSON filter records shipped in ``src/mwde/data/filters``.

Developer tool, not imported by the package.  Scalar families are transcribed
from the PyWavelets tables (``pip install PyWavelets``); multiwavelet
constants are written out from their closed forms below.  Highpass filters
that have no closed form here are obtained by a numerical paraunitary
completion of the lowpass bank (unique up to an orthogonal 2x2 rotation).

    python tools/make_filter_tables.py
"""
import json
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

OUT = Path(__file__).resolve().parents[1] / "src" / "mwde" / "data" / "filters"

R2, R6, R7, R10, R15 = (np.sqrt(v) for v in (2, 6, 7, 10, 15))
S = np.diag([1.0, -1.0])


def scalar_record(name, h):
    h = np.asarray(h, dtype=float)
    n = len(h)
    g = np.array([(-1) ** k * h[n - 1 - k] for k in range(n)])
    return {
        "name": name,
        "multiplicity": 1,
        "support": [0, n - 1],
        "lowpass": h.reshape(-1, 1, 1).tolist(),
        "highpass": g.reshape(-1, 1, 1).tolist(),
    }


def dghm():
    c = 1 / (20 * R2)
    h = [[[12, 16 * R2], [-R2, -6]], [[12, 0], [9 * R2, 20]], [[0, 0], [9 * R2, -6]], [[0, 0], [-R2, 0]]]
    g = [[[-R2, -6], [2, 6 * R2]], [[9 * R2, -20], [-18, 0]], [[9 * R2, -6], [18, -6 * R2]], [[-R2, 0], [-2, 0]]]
    return c * np.array(h, dtype=float), c * np.array(g, dtype=float), [0, 2]


def cl2():
    c = 1 / (4 * R2)
    h = [[[2, 2], [-R7, -R7]], [[4, 0], [0, 2]], [[2, -2], [R7, -R7]]]
    return c * np.array(h, dtype=float), None, [0, 2]


def cl3():
    c0 = np.array([[10 - 3 * R10, 5 * R6 - 2 * R15], [5 * R6 - 3 * R15, 5 - 3 * R10]]) / 40
    c1 = np.array([[30 + 3 * R10, 5 * R6 - 2 * R15], [-5 * R6 - 7 * R15, 15 - 3 * R10]]) / 40
    h = np.array([c0, c1, S @ c1 @ S, S @ c0 @ S]) / R2
    return h, None, [0, 3]


def stt():
    # symmetric/antisymmetric about 3/2, support [0, 3], approximation order 2;
    # least-rough member of that one-parameter family (values are sqrt(2) H_k)
    c0 = np.array([[0.020506096654409892, -0.1417236630009608], [-0.004280131358763938, -0.14313552015471778]])
    c1 = np.array([[0.9794939033455902, -0.1417236630009608], [0.9892516632370382, 0.029581246227026563]])
    h = np.array([c0, c1, S @ c1 @ S, S @ c0 @ S]) / R2
    return _polish_sa(h), None, [0, 3]


def _polish_sa(h):
    """Newton-polish a symmetric/antisymmetric bank onto exact orthogonality."""

    def build(v):
        a, b = v[:4].reshape(2, 2), v[4:].reshape(2, 2)
        return np.array([a, b, S @ b @ S, S @ a @ S])

    def res(v):
        m = build(v)
        out = [(sum(x @ x.T for x in m) - np.eye(2)).ravel(), (m[0] @ m[2].T + m[1] @ m[3].T).ravel()]
        # keep approximation order 1 with mass vector (1, 0)
        out.append((m[0] + m[2])[0] - [1 / R2, 0])
        out.append((m[1] + m[3])[0] - [1 / R2, 0])
        return np.concatenate(out)

    v = least_squares(res, np.concatenate([h[0].ravel(), h[1].ravel()]), xtol=1e-15, ftol=1e-15, gtol=1e-15).x
    return build(v)


def complete_highpass(h, seed=0, attempts=50):
    """Numerical G_k with sum G G^T(2t) = delta I and sum H G^T(2t) = 0."""
    n, r, _ = h.shape
    rng = np.random.default_rng(seed)

    def shift(a, b, t):
        return sum((a[k] @ b[k + 2 * t].T for k in range(n) if 0 <= k + 2 * t < n), np.zeros((r, r)))

    tmax = (n - 1) // 2 + 1

    def res(v):
        g = v.reshape(n, r, r)
        out = []
        for t in range(-tmax, tmax + 1):
            out.append((shift(g, g, t) - (np.eye(r) if t == 0 else 0)).ravel())
            out.append(shift(h, g, t).ravel())
        return np.concatenate(out)

    for _ in range(attempts):
        sol = least_squares(res, rng.normal(size=n * r * r) * 0.5, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.max(np.abs(sol.fun)) < 1e-13:
            return sol.x.reshape(n, r, r)
    raise RuntimeError("highpass completion failed")


def multi_record(name, h, g, support):
    if g is None:
        g = complete_highpass(h)
    return {
        "name": name,
        "multiplicity": 2,
        "support": support,
        "lowpass": np.asarray(h).tolist(),
        "highpass": np.asarray(g).tolist(),
    }


def main():
    import pywt

    OUT.mkdir(parents=True, exist_ok=True)
    records = [scalar_record("haar", [1 / R2, 1 / R2])]
    records += [scalar_record(f"db{n}", pywt.Wavelet(f"db{n}").rec_lo) for n in range(2, 11)]
    records += [scalar_record(f"sym{n}", pywt.Wavelet(f"sym{n}").rec_lo) for n in range(4, 11)]
    records += [scalar_record(f"coif{n}", pywt.Wavelet(f"coif{n}").rec_lo) for n in range(1, 6)]
    for name, build in (("dghm", dghm), ("cl2", cl2), ("cl3", cl3), ("stt", stt)):
        h, g, support = build()
        records.append(multi_record(name, h, g, support))
    for rec in records:
        (OUT / f"{rec['name']}.json").write_text(json.dumps(rec, indent=1) + "\n")
    print(f"wrote {len(records)} records to {OUT}")


if __name__ == "__main__":
    main()
