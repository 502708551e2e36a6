"""Finite-difference verification of analytic parameter gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Parameter, no_grad


@dataclass
class GradReport:
    """Outcome of one gradient check.

    ``per_param`` maps parameter name to the elementwise maximum of
    |g_analytic - g_numeric| / max(1, |g_analytic|, |g_numeric|).
    """

    eps: float
    per_param: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def max_rel_error(self) -> float:
        if self.error is not None or not self.per_param:
            return float("nan")
        return max(self.per_param.values())

    def ok(self, tol: float) -> bool:
        return self.error is None and all(v < tol for v in self.per_param.values())

    def __str__(self):
        if self.error is not None:
            return f"GradReport(aborted: {self.error})"
        worst = self.max_rel_error
        return f"GradReport(eps={self.eps:g}, params={len(self.per_param)}, max_rel={worst:.3g})"


def grad_check(loss_fn, params, eps: float = 1e-5) -> GradReport:
    """Compare analytic gradients of ``loss_fn()`` against central differences.

    ``loss_fn`` must be a pure closure returning a scalar Tensor; ``params``
    are the trainable leaves to perturb. Frozen parameters should not be
    passed; they receive no gradient and stay absent from the report. Use
    float64 parameters for meaningful tolerances.
    """
    params = [p for p in params]
    names = []
    for i, p in enumerate(params):
        name = p.name if isinstance(p, Parameter) and p.name else f"param{i}"
        names.append(name)

    for p in params:
        p.grad = None
    loss = loss_fn()
    if not np.isfinite(loss.data).all():
        return GradReport(eps=eps, error="non-finite loss")
    loss.backward()
    analytic = {}
    for name, p in zip(names, params):
        analytic[name] = p.grad.copy() if p.grad is not None else np.zeros_like(p.data)
        p.grad = None

    report = GradReport(eps=eps)
    with no_grad():
        for name, p in zip(names, params):
            numeric = np.zeros_like(p.data)
            flat = p.data.reshape(-1)
            num_flat = numeric.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                up = loss_fn().item()
                flat[i] = orig - eps
                down = loss_fn().item()
                flat[i] = orig
                if not (np.isfinite(up) and np.isfinite(down)):
                    return GradReport(eps=eps, error=f"non-finite loss probing {name}")
                num_flat[i] = (up - down) / (2 * eps)
            ga = analytic[name]
            denom = np.maximum(1.0, np.maximum(np.abs(ga), np.abs(numeric)))
            report.per_param[name] = float(np.max(np.abs(ga - numeric) / denom))
    return report
