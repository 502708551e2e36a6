"""Independent brute-force oracles used by the test suite.

Everything here is written as plain loops over pixels/elements, so it shares
no code path with the package implementations it checks.
"""

import numpy as np


def conv2d_loops(x, kernel, stride=1, pad=0):
    """Direct-summation cross-correlation; x (h,w,ci), kernel (k,k,ci,co)."""
    h, w, ci = x.shape
    k = kernel.shape[0]
    co = kernel.shape[3]
    xp = np.zeros((h + 2 * pad, w + 2 * pad, ci), dtype=x.dtype)
    xp[pad : pad + h, pad : pad + w] = x
    h_out = (h + 2 * pad - k) // stride + 1
    w_out = (w + 2 * pad - k) // stride + 1
    out = np.zeros((h_out, w_out, co), dtype=x.dtype)
    for i in range(h_out):
        for j in range(w_out):
            for o in range(co):
                acc = 0.0
                for a in range(k):
                    for b in range(k):
                        for c in range(ci):
                            acc += xp[i * stride + a, j * stride + b, c] * kernel[a, b, c, o]
                out[i, j, o] = acc
    return out


def layer_norm_loops(x, gain, bias, eps=1e-5):
    """Per-last-axis standardization of a 1D vector."""
    mu = sum(x) / len(x)
    var = sum((v - mu) ** 2 for v in x) / len(x)
    return np.array([(v - mu) / np.sqrt(var + eps) * g + b for v, g, b in zip(x, gain, bias)])


def edge_loops(mask):
    """Morphological gradient via explicit 3x3 neighborhood scan, zero padding."""
    h, w = mask.shape
    out = np.zeros_like(mask)
    for i in range(h):
        for j in range(w):
            dil = 0
            ero = 1
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    ii, jj = i + di, j + dj
                    v = mask[ii, jj] if 0 <= ii < h and 0 <= jj < w else 0
                    dil = max(dil, v)
                    ero = min(ero, v)
            out[i, j] = 1 if (dil == 1 and ero == 0) else 0
    return out


# -- segmentation measure oracles --------------------------------------------


def mae_loops(pred, gt):
    total = 0.0
    h, w = pred.shape
    for i in range(h):
        for j in range(w):
            total += abs(pred[i, j] - gt[i, j])
    return total / (h * w)


def iou_loops(pred, gt, threshold=0.5):
    inter = union = 0
    h, w = pred.shape
    for i in range(h):
        for j in range(w):
            p = pred[i, j] >= threshold
            g = gt[i, j] >= 0.5
            inter += int(p and g)
            union += int(p or g)
    return 1.0 if union == 0 else inter / union


def f_beta_loops(pred, gt, beta_sq=0.3):
    h, w = pred.shape
    t = min(2.0 * pred.mean(), 1.0)
    tp = np.int64(0)
    sel = np.int64(0)
    pos = np.int64(0)
    for i in range(h):
        for j in range(w):
            s = (pred[i, j] >= t) if t > 0 else (pred[i, j] > 0)
            g = gt[i, j] >= 0.5
            sel += int(s)
            pos += int(g)
            tp += int(s and g)
    prec = tp / sel if sel else 0.0
    rec = tp / pos if pos else 0.0
    denom = beta_sq * prec + rec
    return 0.0 if denom == 0 else (1 + beta_sq) * prec * rec / denom


def _gauss_kernel_7x7(sigma=5.0):
    ax = np.arange(7) - 3
    g = np.zeros((7, 7))
    for i in range(7):
        for j in range(7):
            g[i, j] = np.exp(-(ax[i] ** 2 + ax[j] ** 2) / (2 * sigma**2))
    return g / g.sum()


def wf_beta_loops(pred, gt):
    """Boundary-weighted F-measure, beta^2 = 1; symmetric-padded smoothing."""
    gt = gt >= 0.5
    h, w = pred.shape
    if not gt.any():
        return 0.0
    err = np.abs(pred - gt.astype(float))
    # nearest foreground pixel by exhaustive search
    fg = [(i, j) for i in range(h) for j in range(w) if gt[i, j]]
    dist = np.zeros((h, w))
    errt = err.copy()
    for i in range(h):
        for j in range(w):
            if gt[i, j]:
                continue
            best = None
            bi = bj = 0
            for (fi, fj) in fg:
                d = (fi - i) ** 2 + (fj - j) ** 2
                if best is None or d < best:
                    best, bi, bj = d, fi, fj
            dist[i, j] = np.sqrt(best)
            errt[i, j] = err[bi, bj]
    # Gaussian smoothing with symmetric (reflected) borders
    k = _gauss_kernel_7x7()
    pad = 3
    padded = np.pad(errt, pad, mode="symmetric")
    ea = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            ea[i, j] = (padded[i : i + 7, j : j + 7] * k).sum()
    mined = err.copy()
    for i in range(h):
        for j in range(w):
            if gt[i, j] and ea[i, j] < err[i, j]:
                mined[i, j] = ea[i, j]
    b = np.ones((h, w))
    for i in range(h):
        for j in range(w):
            if not gt[i, j]:
                b[i, j] = 2.0 - np.exp(np.log(0.5) / 5.0 * dist[i, j])
    ew = mined * b
    tpw = gt.sum() - ew[gt].sum()
    fpw = ew[~gt].sum()
    eps = np.finfo(np.float64).eps
    recall = 1.0 - ew[gt].mean()
    precision = tpw / (tpw + fpw + eps)
    return 2.0 * precision * recall / (precision + recall + eps)


def _region_ssim_loops(p, g):
    n = p.size
    if n == 0:
        return 0.0
    x = p.mean()
    y = g.mean()
    eps = np.finfo(np.float64).eps
    sx = ((p - x) ** 2).sum() / (n - 1 + eps)
    sy = ((g - y) ** 2).sum() / (n - 1 + eps)
    sxy = ((p - x) * (g - y)).sum() / (n - 1 + eps)
    a = 4 * x * y * sxy
    b = (x * x + y * y) * (sx + sy)
    if a != 0:
        return a / (b + eps)
    return 1.0 if b == 0 else 0.0


def s_measure_loops(pred, gt, alpha=0.5):
    gt = gt >= 0.5
    h, w = pred.shape
    y = gt.mean()
    if y == 0:
        return 1.0 - pred.mean()
    if y == 1:
        return float(pred.mean())
    # object term
    eps = np.finfo(np.float64).eps
    fg = pred[gt]
    bg = (1.0 - pred)[~gt]

    def obj(vals):
        x = vals.mean()
        sd = np.sqrt(((vals - x) ** 2).sum() / (vals.size - 1)) if vals.size > 1 else 0.0
        return 2.0 * x / (x * x + 1.0 + sd + eps)

    s_obj = y * obj(fg) + (1 - y) * obj(bg)
    # region term: split at the foreground centroid
    total = gt.sum()
    rows = sum(i * gt[i, :].sum() for i in range(h)) / total
    cols = sum(j * gt[:, j].sum() for j in range(w)) / total
    cr = int(round(rows)) + 1
    cc = int(round(cols)) + 1
    area = h * w
    blocks = [
        (pred[:cr, :cc], gt[:cr, :cc], cr * cc / area),
        (pred[:cr, cc:], gt[:cr, cc:], cr * (w - cc) / area),
        (pred[cr:, :cc], gt[cr:, :cc], (h - cr) * cc / area),
    ]
    w4 = 1.0 - sum(wt for _, _, wt in blocks)
    blocks.append((pred[cr:, cc:], gt[cr:, cc:], w4))
    s_reg = sum(wt * _region_ssim_loops(p, g.astype(float)) for p, g, wt in blocks)
    return max(alpha * s_obj + (1 - alpha) * s_reg, 0.0)


def e_measure_loops(pred, gt, threshold=0.5):
    gt = gt >= 0.5
    h, w = pred.shape
    binp = pred >= threshold
    if not gt.any():
        return 1.0 - binp.mean()
    if gt.all():
        return float(binp.mean())
    dp = binp.astype(float) - binp.mean()
    dg = gt.astype(float) - gt.mean()
    eps = np.finfo(np.float64).eps
    total = 0.0
    for i in range(h):
        for j in range(w):
            xi = 2.0 * dg[i, j] * dp[i, j] / (dg[i, j] ** 2 + dp[i, j] ** 2 + eps)
            total += (xi + 1.0) ** 2 / 4.0
    return total / (h * w)


def seg_loss_loops(mask_probs, coarse_probs, edge_probs, gt, gt_edge,
                   lam_iou=1.0, lam_edge=1.0, lam_coarse=0.5):
    """Per-pixel recomputation of the composite segmentation loss."""
    eps = 1e-6

    def bce(p, t):
        total = 0.0
        pf, tf = p.reshape(-1), t.reshape(-1)
        for pi, ti in zip(pf, tf):
            pi = min(max(pi, 1e-300), 1 - 1e-16)
            total += -(ti * np.log(pi) + (1 - ti) * np.log(1 - pi))
        return total / pf.size

    inter = float((mask_probs * gt).sum())
    union = float(mask_probs.sum() + gt.sum() - inter)
    iou_term = 1.0 - (inter + eps) / (union + eps)
    return (
        bce(mask_probs, gt)
        + lam_iou * iou_term
        + lam_edge * bce(edge_probs, gt_edge)
        + lam_coarse * bce(coarse_probs, gt)
    )
