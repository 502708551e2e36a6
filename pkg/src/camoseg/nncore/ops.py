"""Structured ops: attention, convolutions, normalization, resizing, losses.

Array layout is channels-last throughout: images are (h, w, c) or (b, h, w, c),
conv kernels are (k, k, c_in, c_out). Every op here is differentiable and
covered by finite-difference checks.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolation
from .tensor import (
    Tensor,
    _as_tensor,
    _make,
    log_softmax,
    matmul,
    mul,
    sigmoid,
    softmax,
    softplus,
    sqrt,
    tmean,
    tsum,
)


def attention(q, k, v):
    """Scaled dot-product attention: softmax(q k^T / sqrt(d_k)) v.

    q: (..., n_q, d_k), k: (..., n_k, d_k), v: (..., n_k, d_v). Rows of the
    softmax weights sum to 1, so each output row is a convex combination of
    the rows of v.
    """
    q, k, v = _as_tensor(q), _as_tensor(k), _as_tensor(v)
    if q.shape[-1] != k.shape[-1]:
        raise ContractViolation(
            f"attention: q/k key dims differ ({q.shape[-1]} vs {k.shape[-1]})"
        )
    if k.shape[-2] != v.shape[-2]:
        raise ContractViolation(
            f"attention: k/v row counts differ ({k.shape[-2]} vs {v.shape[-2]})"
        )
    d_k = q.shape[-1]
    if d_k <= 0:
        raise ContractViolation("attention: d_k must be positive")
    for t in (q, k, v):
        if not np.isfinite(t.data).all():
            raise ContractViolation("attention: non-finite input")
    scores = mul(matmul(q, k.swap_last2()), 1.0 / np.sqrt(d_k))
    return matmul(softmax(scores, axis=-1), v)


def layer_norm(x, gain, bias, eps: float = 1e-5):
    """Normalize the last axis to zero mean / unit variance, then affine."""
    x = _as_tensor(x)
    d = x.shape[-1]
    if d < 2:
        raise ContractViolation("layer_norm: last axis extent must be >= 2")
    mu = tmean(x, axis=-1, keepdims=True)
    xc = x - mu
    var = tmean(xc * xc, axis=-1, keepdims=True)
    y = xc / sqrt(var + eps)
    return y * gain + bias


def _conv_geometry(h, w, k, stride, pad):
    # Even kernels are allowed only when they tile exactly; the stride-2 2x2
    # case is the adjoint partner of tconv2d.
    if k % 2 != 1 and not (k == stride and pad == 0):
        raise ContractViolation(f"conv2d: kernel size must be odd, got {k}")
    for extent, name in ((h, "height"), (w, "width")):
        span = extent + 2 * pad - k
        if span < 0 or span % stride != 0:
            raise ContractViolation(
                f"conv2d: non-integral output {name} for extent={extent}, "
                f"k={k}, stride={stride}, pad={pad}"
            )
    return (h + 2 * pad - k) // stride + 1, (w + 2 * pad - k) // stride + 1


def conv2d(x, kernel, stride: int = 1, pad: int = 0):
    """Cross-correlation. x: (h, w, c_in) or (b, h, w, c_in); kernel
    (k, k, c_in, c_out)."""
    x, kernel = _as_tensor(x), _as_tensor(kernel)
    squeeze = x.ndim == 3
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 4:
        raise ContractViolation(f"conv2d: expected 3D/4D input, got {x.ndim}D")
    k = kernel.shape[0]
    if kernel.ndim != 4 or kernel.shape[1] != k:
        raise ContractViolation(f"conv2d: bad kernel shape {kernel.shape}")
    b, h, w, c_in = xd.shape
    if kernel.shape[2] != c_in:
        raise ContractViolation(
            f"conv2d: input has {c_in} channels, kernel expects {kernel.shape[2]}"
        )
    c_out = kernel.shape[3]
    h_out, w_out = _conv_geometry(h, w, k, stride, pad)

    xp = np.pad(xd, ((0, 0), (pad, pad), (pad, pad), (0, 0))) if pad else xd
    # windows: (b, h_out, w_out, k, k, c_in)
    win = np.lib.stride_tricks.sliding_window_view(xp, (k, k), axis=(1, 2))
    win = win[:, ::stride, ::stride]
    win = win.transpose(0, 1, 2, 4, 5, 3)
    cols = win.reshape(b, h_out * w_out, k * k * c_in)
    kmat = kernel.data.reshape(k * k * c_in, c_out)
    out = (cols @ kmat).reshape(b, h_out, w_out, c_out)

    def grad(g):
        g4 = g[None] if squeeze else g
        gflat = g4.reshape(b, h_out * w_out, c_out)
        gk = np.einsum("bpi,bpo->io", cols, gflat).reshape(kernel.shape)
        gcols = (gflat @ kmat.T).reshape(b, h_out, w_out, k, k, c_in)
        gxp = np.zeros_like(xp)
        for a in range(k):
            for bb in range(k):
                gxp[:, a : a + stride * h_out : stride,
                    bb : bb + stride * w_out : stride] += gcols[:, :, :, a, bb]
        gx = gxp[:, pad : pad + h, pad : pad + w] if pad else gxp
        return (gx[0] if squeeze else gx, gk)

    return _make(out[0] if squeeze else out, (x, kernel), grad)


def tconv2d(x, kernel):
    """Stride-2 transposed convolution with a 2x2 kernel (exact 2x upsample).

    x: (h, w, c_in) or (b, h, w, c_in); kernel (2, 2, c_out, c_in). It is the
    adjoint of the stride-2 ``conv2d`` that shares the kernel:
    <tconv2d(x), y> == <x, conv2d(y)> for all x, y.
    """
    x, kernel = _as_tensor(x), _as_tensor(kernel)
    if kernel.ndim != 4 or kernel.shape[0] != 2 or kernel.shape[1] != 2:
        raise ContractViolation(f"tconv2d: kernel must be 2x2, got {kernel.shape}")
    squeeze = x.ndim == 3
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 4:
        raise ContractViolation(f"tconv2d: expected 3D/4D input, got {x.ndim}D")
    b, h, w, c_in = xd.shape
    if kernel.shape[3] != c_in:
        raise ContractViolation(
            f"tconv2d: input has {c_in} channels, kernel expects {kernel.shape[3]}"
        )
    c_out = kernel.shape[2]
    out6 = np.einsum("bijc,pqkc->bipjqk", xd, kernel.data)
    out = out6.reshape(b, 2 * h, 2 * w, c_out)

    def grad(g):
        g4 = g[None] if squeeze else g
        g6 = g4.reshape(b, h, 2, w, 2, c_out)
        gx = np.einsum("bipjqk,pqkc->bijc", g6, kernel.data)
        gk = np.einsum("bijc,bipjqk->pqkc", xd, g6)
        return (gx[0] if squeeze else gx, gk)

    return _make(out[0] if squeeze else out, (x, kernel), grad)


_RESIZE_CACHE: dict = {}


def _resize_plan(n_in: int, n_out: int):
    key = (n_in, n_out)
    plan = _RESIZE_CACHE.get(key)
    if plan is None:
        src = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
        src = np.clip(src, 0.0, n_in - 1.0)
        i0 = np.floor(src).astype(np.int64)
        frac = src - i0
        i1 = np.minimum(i0 + 1, n_in - 1)
        plan = (i0, i1, frac)
        _RESIZE_CACHE[key] = plan
    return plan


def bilinear_resize(x, out_h: int, out_w: int):
    """Bilinear resize of the last two axes (half-pixel centers, edge clamp)."""
    x = _as_tensor(x)
    if x.ndim < 2:
        raise ContractViolation("bilinear_resize: need at least 2 axes")
    h, w = x.shape[-2], x.shape[-1]
    y0, y1, fy = _resize_plan(h, out_h)
    x0, x1, fx = _resize_plan(w, out_w)
    fy_col = fy[:, None]
    fx_row = fx[None, :]
    w00 = (1 - fy_col) * (1 - fx_row)
    w01 = (1 - fy_col) * fx_row
    w10 = fy_col * (1 - fx_row)
    w11 = fy_col * fx_row
    xd = x.data
    out = (
        xd[..., y0[:, None], x0[None, :]] * w00
        + xd[..., y0[:, None], x1[None, :]] * w01
        + xd[..., y1[:, None], x0[None, :]] * w10
        + xd[..., y1[:, None], x1[None, :]] * w11
    ).astype(xd.dtype)

    def grad(g):
        lead = xd.shape[:-2]
        gx3 = np.zeros((int(np.prod(lead)) if lead else 1, h, w), dtype=xd.dtype)
        g3 = g.reshape(gx3.shape[0], out_h, out_w)
        bidx = np.arange(gx3.shape[0])[:, None, None]
        for yy, xx, ww in (
            (y0, x0, w00),
            (y0, x1, w01),
            (y1, x0, w10),
            (y1, x1, w11),
        ):
            np.add.at(gx3, (bidx, yy[None, :, None], xx[None, None, :]), g3 * ww)
        return (gx3.reshape(xd.shape),)

    return _make(out, (x,), grad)


def patchify(x, patch: int):
    """(b, h, w, c) -> (b, (h/p)*(w/p), p*p*c) non-overlapping patch flatten."""
    x = _as_tensor(x)
    b, h, w, c = x.shape
    if h % patch or w % patch:
        raise ContractViolation(
            f"patchify: spatial size {h}x{w} not divisible by patch {patch}"
        )
    gh, gw = h // patch, w // patch
    t = x.reshape((b, gh, patch, gw, patch, c))
    t = t.transpose((0, 1, 3, 2, 4, 5))
    return t.reshape((b, gh * gw, patch * patch * c))


def space_halve(x):
    """(b, h, w, c) -> (b, 2h, 2w, c/4): move channel groups of 4 into 2x2
    spatial blocks (stride-halving rearrangement)."""
    x = _as_tensor(x)
    b, h, w, c = x.shape
    if c % 4:
        raise ContractViolation("space_halve: channels must be divisible by 4")
    t = x.reshape((b, h, w, c // 4, 2, 2))
    t = t.transpose((0, 1, 4, 2, 5, 3))
    return t.reshape((b, 2 * h, 2 * w, c // 4))


def l2_normalize(x, eps: float = 1e-12):
    """Rows of the last axis scaled to unit L2 norm."""
    x = _as_tensor(x)
    sq = tsum(x * x, axis=-1, keepdims=True)
    return x / sqrt(sq + eps)


# -- losses -----------------------------------------------------------------


def cross_entropy(logits, labels):
    """Mean cross-entropy of (b, n) logits against integer labels (b,)."""
    logits = _as_tensor(logits)
    labels = np.asarray(labels)
    b, n = logits.shape
    onehot = np.zeros((b, n), dtype=logits.dtype)
    onehot[np.arange(b), labels] = 1.0
    ls = log_softmax(logits, axis=-1)
    return mul(tsum(ls * Tensor(onehot)), -1.0 / b)


def bce_with_logits(logits, targets):
    """Mean binary cross-entropy from logits; targets in [0, 1]."""
    logits = _as_tensor(logits)
    t = _as_tensor(targets, logits.dtype)
    return tmean(softplus(logits) - logits * t)


def soft_iou_loss(probs, targets, eps: float = 1e-6):
    """1 - soft intersection over union of probabilities vs a binary mask."""
    probs = _as_tensor(probs)
    t = _as_tensor(targets, probs.dtype)
    inter = tsum(probs * t)
    union = tsum(probs) + tsum(t) - inter
    return 1.0 - (inter + eps) / (union + eps)


__all__ = [
    "attention",
    "layer_norm",
    "conv2d",
    "tconv2d",
    "bilinear_resize",
    "patchify",
    "space_halve",
    "l2_normalize",
    "cross_entropy",
    "bce_with_logits",
    "soft_iou_loss",
    "sigmoid",
]
