"""Writes the weights.bwnn golden files used by test_nn.

Each case is a small network in the exported layout together with an input
curve and the outputs of an independent numpy forward pass (float64).
Regenerate with:  python3 tests/data/make_nn_golden.py
"""
import json
import struct
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent

BOUNDS = {
    "T": (0.05, 5.0), "Fy": (0.05, 1.5), "alpha": (0.0, 0.5), "beta": (0.1, 0.9), "n": (1.0, 5.0),
    "delta_nu": (0.0, 0.36), "delta_eta": (0.0, 0.39),
    "zeta0": (0.0, 1.0), "p": (0.0, 1.38), "q": (0.01, 0.43), "psi": (0.1, 0.85),
    "delta_psi": (0.0, 0.09), "lambda": (0.01, 0.8),
}
OUTPUTS = {
    "BSC": ["T", "Fy", "alpha", "beta", "n"],
    "DGD": ["delta_nu", "delta_eta"],
    "PCH": ["zeta0", "p", "q", "psi", "delta_psi", "lambda"],
}


class Blob:
    def __init__(self):
        self.values = []

    def add(self, arr):
        arr = np.asarray(arr, dtype=np.float32)
        ref = {"offset": len(self.values), "shape": list(arr.shape)}
        self.values.extend(arr.ravel(order="C").tolist())
        return ref


def conv_same(x, w, b):
    """x: (H, W, Cin); w: (kh, kw, Cin, Cout). TF 'same' padding, stride 1."""
    kh, kw = w.shape[:2]
    pt, pl = (kh - 1) // 2, (kw - 1) // 2
    xp = np.pad(x, ((pt, kh - 1 - pt), (pl, kw - 1 - pl), (0, 0)))
    H, W = x.shape[:2]
    y = np.zeros((H, W, w.shape[3]))
    for i in range(H):
        for j in range(W):
            y[i, j] = np.tensordot(xp[i:i + kh, j:j + kw, :], w, axes=([0, 1, 2], [0, 1, 2])) + b
    return y


def maxpool(x, ph, pw):
    H, W = x.shape[0] // ph, x.shape[1] // pw
    return x[:H * ph, :W * pw].reshape(H, ph, W, pw, -1).max(axis=(1, 3))


ACT = {"relu": lambda v: np.maximum(v, 0.0), "sigmoid": lambda v: 1.0 / (1.0 + np.exp(-v)), "linear": lambda v: v}


def build(rng, spec, blob, scale):
    """Random weights for a layer spec list; returns (layers_json, layers_np)."""
    js, nps = [], []
    cin = 1
    for s in spec:
        if s[0] == "conv":
            _, f, kh, kw, act = s
            w = (rng.standard_normal((kh, kw, cin, f)) * scale).astype(np.float32)
            b = (rng.standard_normal(f) * 0.1 * (scale > 0)).astype(np.float32)
            js.append({"type": "conv2d", "filters": f, "kernel": [kh, kw], "padding": "same", "activation": act,
                       "weights": blob.add(w), "bias": blob.add(b)})
            nps.append(("conv", w.astype(np.float64), b.astype(np.float64), act))
            cin = f
        else:
            _, ph, pw = s
            js.append({"type": "maxpool2d", "pool": [ph, pw]})
            nps.append(("pool", ph, pw))
    return js, nps


def dense_layers(rng, widths, acts, width_in, blob, scale):
    js, nps = [], []
    for u, act in zip(widths, acts):
        w = (rng.standard_normal((width_in, u)) * scale / np.sqrt(width_in)).astype(np.float32)
        b = (rng.standard_normal(u) * 0.1 * (scale > 0)).astype(np.float32)
        js.append({"type": "dense", "units": u, "activation": act, "weights": blob.add(w), "bias": blob.add(b)})
        nps.append((w.astype(np.float64), b.astype(np.float64), act))
        width_in = u
    return js, nps


def forward(x, branches, head):
    feats = []
    for br in branches:
        y = x
        for layer in br:
            if layer[0] == "conv":
                y = ACT[layer[3]](conv_same(y, layer[1], layer[2]))
            else:
                y = maxpool(y, layer[1], layer[2])
        feats.append(y.ravel(order="C"))
    v = np.concatenate(feats)
    for w, b, act in head:
        v = ACT[act](v @ w + b)
    return v


def make_case(name, arch, category, d, branch_specs, widths, seed, zero=False):
    rng = np.random.default_rng(seed)
    blob = Blob()
    branches_js, branches_np = [], []
    width = 0
    for spec in branch_specs:
        js, nps = build(rng, spec, blob, 0.0 if zero else 0.5)
        branches_js.append(js)
        branches_np.append(nps)
        h, w, c = d, 2, 1
        for s in spec:
            if s[0] == "conv":
                c = s[1]
            else:
                h, w = h // s[1], w // s[2]
        width += h * w * c
    n_out = len(OUTPUTS[category])
    acts = ["relu"] * len(widths) + ["sigmoid"]
    head_js, head_np = dense_layers(rng, widths + [n_out], acts, width, blob, 0.0 if zero else 1.0)

    # Input: a smooth hysteresis-like loop and its normalization ranges.
    t = np.linspace(0.0, 4.0 * np.pi, d)
    u = 0.02 * np.sin(t) * np.linspace(0.5, 1.0, d)
    f = 3.0 * np.tanh(60.0 * u) + 0.4 * np.cos(t)
    u_lo, u_hi, f_lo, f_hi = -0.025, 0.025, -4.0, 4.0
    x = np.stack([(u - u_lo) / (u_hi - u_lo), (f - f_lo) / (f_hi - f_lo)], axis=1)[:, :, None]
    raw = forward(x, branches_np, head_np)
    names = OUTPUTS[category]
    params = [BOUNDS[n][0] + float(r) * (BOUNDS[n][1] - BOUNDS[n][0]) for n, r in zip(names, raw)]

    header = {
        "format_version": 1, "architecture": arch, "category": category, "input_length": d, "outputs": names,
        "normalization": {"u_m": {"lo": u_lo, "hi": u_hi}, "f_mps2": {"lo": f_lo, "hi": f_hi}},
        "branches": branches_js, "head": head_js,
    }
    hb = json.dumps(header).encode()
    with open(HERE / f"{name}.bwnn", "wb") as fh:
        fh.write(b"BWNN")
        fh.write(struct.pack("<I", len(hb)))
        fh.write(hb)
        fh.write(struct.pack(f"<{len(blob.values)}f", *blob.values))
    expected = {"u_m": u.tolist(), "f_mps2": f.tolist(), "raw": raw.tolist(), "params": dict(zip(names, params))}
    with open(HERE / f"{name}.expected.json", "w") as fh:
        json.dump(expected, fh, indent=1)


def main():
    bsc = [[("conv", 4, 2, 2, "relu"), ("pool", 2, 1), ("conv", 8, 4, 2, "relu"), ("pool", 2, 1)]]
    make_case("golden_bsc", "BSC_DGD", "BSC", 16, bsc, [16, 8], seed=1)
    make_case("golden_dgd_zero", "BSC_DGD", "DGD", 16, bsc, [16, 8], seed=2, zero=True)
    pch = [
        [("conv", 8, 2, 2, "relu"), ("pool", 2, 1), ("conv", 16, 2, 2, "relu"), ("pool", 2, 1),
         ("conv", 32, 2, 2, "relu"), ("pool", 2, 1)],
        [("conv", 8, 16, 2, "relu"), ("pool", 2, 1), ("conv", 16, 16, 2, "relu"), ("pool", 2, 1),
         ("conv", 32, 16, 2, "relu"), ("pool", 2, 1)],
    ]
    make_case("golden_pch", "PCH", "PCH", 32, pch, [32, 16, 8], seed=3)


if __name__ == "__main__":
    main()
