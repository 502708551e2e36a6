"""Module/parameter registry plus the handful of layers the models share."""

from __future__ import annotations

import hashlib

import numpy as np

from ..errors import ContractViolation
from . import ops
from .tensor import Parameter, Tensor, concat, embedding, relu


def trunc_normal(rng: np.random.Generator, shape, std: float = 0.02, dtype=np.float32):
    """Normal(0, std) resampled until within 2 std (deterministic given rng)."""
    out = rng.standard_normal(shape) * std
    bad = np.abs(out) > 2 * std
    while bad.any():
        out[bad] = rng.standard_normal(bad.sum()) * std
        bad = np.abs(out) > 2 * std
    return out.astype(dtype)


class Module:
    def __init__(self):
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_modules", {})

    def __setattr__(self, key, value):
        if isinstance(value, Parameter):
            self._params[key] = value
        elif isinstance(value, Module):
            self._modules[key] = value
        object.__setattr__(self, key, value)

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def named_parameters(self, prefix: str = ""):
        for key, p in self._params.items():
            yield (f"{prefix}{key}", p)
        for key, mod in self._modules.items():
            yield from mod.named_parameters(prefix=f"{prefix}{key}.")

    def parameters(self):
        for _, p in self.named_parameters():
            yield p

    def bind_names(self, prefix: str = ""):
        """Stamp unique dotted paths onto every parameter."""
        seen = set()
        for name, p in self.named_parameters(prefix):
            if name in seen:
                raise ContractViolation(f"duplicate parameter name {name!r}")
            seen.add(name)
            p.name = name
        return self

    def zero_grad(self):
        for p in self.parameters():
            p.grad = None

    def state_dict(self) -> dict:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict):
        params = dict(self.named_parameters())
        missing = set(params) - set(state)
        extra = set(state) - set(params)
        if missing or extra:
            raise ContractViolation(
                f"state dict mismatch: missing={sorted(missing)} extra={sorted(extra)}"
            )
        for name, arr in state.items():
            p = params[name]
            if tuple(arr.shape) != tuple(p.data.shape):
                raise ContractViolation(
                    f"shape mismatch for {name}: checkpoint {arr.shape} vs model {p.data.shape}"
                )
            p.data = arr.astype(p.data.dtype).copy()

    def set_trainable(self, flag: bool):
        for p in self.parameters():
            p.trainable = flag
        return self

    def param_checksum(self) -> str:
        h = hashlib.sha256()
        for name, p in sorted(self.named_parameters()):
            h.update(name.encode())
            h.update(np.ascontiguousarray(p.data).tobytes())
        return h.hexdigest()


class ModuleList(Module):
    def __init__(self, mods=()):
        super().__init__()
        self._items = []
        for m in mods:
            self.append(m)

    def append(self, mod: Module):
        key = str(len(self._items))
        self._items.append(mod)
        self._modules[key] = mod
        object.__setattr__(self, key, mod)

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, i):
        return self._items[i]


class Linear(Module):
    def __init__(self, in_dim, out_dim, rng, bias=True, dtype=np.float32):
        super().__init__()
        self.weight = Parameter(trunc_normal(rng, (in_dim, out_dim), dtype=dtype))
        self.bias = Parameter(np.zeros(out_dim, dtype=dtype)) if bias else None

    def forward(self, x):
        out = x @ self.weight
        if self.bias is not None:
            out = out + self.bias
        return out


class Mlp(Module):
    """Two-layer perceptron with ReLU in between."""

    def __init__(self, in_dim, hidden_dim, out_dim, rng, dtype=np.float32):
        super().__init__()
        self.fc1 = Linear(in_dim, hidden_dim, rng, dtype=dtype)
        self.fc2 = Linear(hidden_dim, out_dim, rng, dtype=dtype)

    def forward(self, x):
        return self.fc2(relu(self.fc1(x)))


class LayerNorm(Module):
    def __init__(self, dim, dtype=np.float32, eps: float = 1e-5):
        super().__init__()
        self.gain = Parameter(np.ones(dim, dtype=dtype))
        self.bias = Parameter(np.zeros(dim, dtype=dtype))
        self.eps = eps

    def forward(self, x):
        return ops.layer_norm(x, self.gain, self.bias, eps=self.eps)


class Embedding(Module):
    def __init__(self, count, dim, rng, dtype=np.float32):
        super().__init__()
        self.weight = Parameter(trunc_normal(rng, (count, dim), dtype=dtype))

    def forward(self, ids):
        return embedding(self.weight, ids)


class MultiHeadAttention(Module):
    """Projected attention; single-head by default, heads configurable."""

    def __init__(self, dim, rng, heads: int = 1, dtype=np.float32):
        super().__init__()
        if dim % heads:
            raise ContractViolation(f"attention dim {dim} not divisible by {heads} heads")
        self.heads = heads
        self.dim = dim
        self.wq = Linear(dim, dim, rng, dtype=dtype)
        self.wk = Linear(dim, dim, rng, dtype=dtype)
        self.wv = Linear(dim, dim, rng, dtype=dtype)
        self.wo = Linear(dim, dim, rng, dtype=dtype)

    def _split(self, t):
        *lead, n, _ = t.shape
        t = t.reshape(tuple(lead) + (n, self.heads, self.dim // self.heads))
        order = tuple(range(len(lead))) + (len(lead) + 1, len(lead), len(lead) + 2)
        return t.transpose(order)

    def _merge(self, t):
        *lead, _, n, _ = t.shape
        order = tuple(range(len(lead))) + (len(lead) + 1, len(lead), len(lead) + 2)
        t = t.transpose(order)
        return t.reshape(tuple(lead) + (n, self.dim))

    def forward(self, q_in, k_in=None, v_in=None):
        k_in = q_in if k_in is None else k_in
        v_in = k_in if v_in is None else v_in
        q, k, v = self.wq(q_in), self.wk(k_in), self.wv(v_in)
        if self.heads > 1:
            out = self._merge(ops.attention(self._split(q), self._split(k), self._split(v)))
        else:
            out = ops.attention(q, k, v)
        return self.wo(out)


class TransformerBlock(Module):
    """Pre-norm block: x + attn(ln(x)), then x + mlp(ln(x))."""

    def __init__(self, dim, rng, heads=1, mlp_ratio=2, dtype=np.float32):
        super().__init__()
        self.ln1 = LayerNorm(dim, dtype=dtype)
        self.attn = MultiHeadAttention(dim, rng, heads=heads, dtype=dtype)
        self.ln2 = LayerNorm(dim, dtype=dtype)
        self.mlp = Mlp(dim, dim * mlp_ratio, dim, rng, dtype=dtype)

    def forward(self, x):
        h = self.ln1(x)
        x = x + self.attn(h, h, h)
        x = x + self.mlp(self.ln2(x))
        return x


class PatchProj(Module):
    """Non-overlapping patch extraction + linear projection.

    Mathematically a stride-p, kernel-p convolution over (b, h, w, c) input,
    producing (b, (h/p)*(w/p), dim) tokens.
    """

    def __init__(self, in_channels, patch, dim, rng, dtype=np.float32):
        super().__init__()
        self.patch = patch
        self.proj = Linear(in_channels * patch * patch, dim, rng, dtype=dtype)

    def forward(self, x):
        return self.proj(ops.patchify(x, self.patch))


def tile_rows(t: Tensor, batch: int) -> Tensor:
    """Repeat an (n, d) tensor into (batch, n, d) with gradient support."""
    n, d = t.shape
    return concat([t.reshape((1, n, d))] * batch, axis=0)
