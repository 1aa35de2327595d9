"""NumPy fallback for the dense kernels; same signatures as the compiled module."""

import numpy as np

BACKEND = "numpy"


def table_mul(table, a, b):
    return table[a, b]


def _roll(x, shift):
    if not any(shift):
        return x
    return np.roll(x, tuple(-int(s) for s in shift), axis=(0, 1, 2))


def shifted_product(table, f, fshift, g, gshift):
    """out[p] = table[f[p + fshift], g[p + gshift]] with wraparound."""
    return table[_roll(f, fshift), _roll(g, gshift)]


def scan_axis(table, d, start, axis):
    n = d.shape[2]
    out = np.empty_like(d)
    cur = np.array(start, dtype=np.int32, copy=True)
    for k in range(n):
        out[:, :, k] = cur
        cur = table[cur, d[:, :, k]]
    return out, cur
