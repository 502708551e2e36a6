from .gradcheck import GradReport, grad_check
from .modules import (
    Embedding,
    LayerNorm,
    Linear,
    Mlp,
    Module,
    ModuleList,
    MultiHeadAttention,
    PatchProj,
    TransformerBlock,
    tile_rows,
    trunc_normal,
)
from .ops import (
    attention,
    bce_with_logits,
    bilinear_resize,
    conv2d,
    cross_entropy,
    l2_normalize,
    layer_norm,
    patchify,
    soft_iou_loss,
    space_halve,
    tconv2d,
)
from .optim import Adam, SGD, cosine_lr
from .tensor import (
    Parameter,
    Tensor,
    concat,
    embedding,
    exp,
    is_grad_enabled,
    log,
    log_softmax,
    no_grad,
    relu,
    sigmoid,
    softmax,
    softplus,
    sqrt,
    stack,
)

__all__ = [
    "Adam",
    "Embedding",
    "GradReport",
    "LayerNorm",
    "Linear",
    "Mlp",
    "Module",
    "ModuleList",
    "MultiHeadAttention",
    "Parameter",
    "PatchProj",
    "SGD",
    "Tensor",
    "TransformerBlock",
    "attention",
    "bce_with_logits",
    "bilinear_resize",
    "concat",
    "conv2d",
    "cosine_lr",
    "cross_entropy",
    "embedding",
    "exp",
    "grad_check",
    "is_grad_enabled",
    "l2_normalize",
    "layer_norm",
    "log",
    "log_softmax",
    "no_grad",
    "patchify",
    "relu",
    "sigmoid",
    "softmax",
    "softplus",
    "space_halve",
    "sqrt",
    "stack",
    "tconv2d",
    "tile_rows",
    "trunc_normal",
]
