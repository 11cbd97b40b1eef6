"""
Taped numerical operations over NCHW tensors.

Every function returns a new Tensor; when any input requires a gradient the result
carries a closure mapping the output gradient to the input gradients.
Reductions accumulate in float64 and cast back to the input dtype.
"""
import numpy as np
from typing import Tuple
from numpy.lib.stride_tricks import sliding_window_view
from .Tensor import Tensor
from .LayerParams import LayerParams
from .LayerKindEnum import LayerKindEnum
from .Errors import ShapeError, ContractError

def _require_4d(x: Tensor, op: str) -> Tuple[int, int, int, int]:
    if x.data.ndim != 4:
        raise ShapeError(f"{op} expects a 4-D (n, c, h, w) tensor, got shape {x.shape}")
    n, c, h, w = x.shape
    return n, c, h, w

def _windows(x_padded: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    """
    (n, c, Hp, Wp) -> (n, c, ho, wo, kh, kw) read-only view of every kernel window.
    """
    return sliding_window_view(x_padded, (kh, kw), axis = (2, 3))[:, :, ::stride, ::stride]

def _strided(start: int, count: int, stride: int) -> slice:
    return slice(start, start + stride * (count - 1) + 1, stride)

def _fold_edge_padding(grad_padded: np.ndarray, padding: int) -> np.ndarray:
    """
    Adjoint of np.pad(mode = "edge"): gradient landing on a replicated cell goes to its border source.
    """
    grad: np.ndarray = grad_padded.copy()
    p: int = padding
    grad[:, :, p, :] += grad[:, :, :p, :].sum(axis = 2)
    grad[:, :, -p - 1, :] += grad[:, :, -p:, :].sum(axis = 2)
    grad[:, :, :, p] += grad[:, :, :, :p].sum(axis = 3)
    grad[:, :, :, -p - 1] += grad[:, :, :, -p:].sum(axis = 3)
    return grad

def conv2d_forward(input: Tensor, params: LayerParams, stride: int = 1, padding: int = 0, padding_mode: str = "zeros") -> Tensor:
    """
    Summary:
        Cross-correlation of an (n, c, h, w) batch with (out, c, kh, kw) kernels.
        padding_mode "zeros" pads with 0, "edge" repeats the border pixels.
    """
    if params.kind != LayerKindEnum.CONV2D:
        raise ContractError(f"conv2d_forward expects conv2d params, got {params.kind.name}")
    if stride < 1 or padding < 0:
        raise ContractError(f"invalid stride {stride} or padding {padding}")
    if padding_mode not in ("zeros", "edge"):
        raise ContractError(f"unknown padding mode {padding_mode}")

    n, c, h, w = _require_4d(input, "conv2d")
    weights: np.ndarray = params.weights.data
    out_c, in_c, kh, kw = weights.shape
    if in_c != c:
        raise ShapeError(f"conv2d: input has {c} channels but kernel expects {in_c}")
    if h + 2 * padding < kh or w + 2 * padding < kw:
        raise ShapeError(f"conv2d: kernel {kh}x{kw} larger than padded input {h + 2 * padding}x{w + 2 * padding}")

    pad_width = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    x_padded: np.ndarray = np.pad(input.data, pad_width, mode = "edge" if padding_mode == "edge" else "constant")
    windows: np.ndarray = _windows(x_padded, kh, kw, stride)
    ho, wo = windows.shape[2], windows.shape[3]

    out: np.ndarray = np.tensordot(windows, weights, axes = ([1, 4, 5], [1, 2, 3])).transpose(0, 3, 1, 2)
    if params.bias is not None:
        out = out + params.bias.data.reshape(1, out_c, 1, 1)
    out = np.ascontiguousarray(out, dtype = input.dtype)

    def backward(g: np.ndarray) -> Tuple[np.ndarray | None, ...]:
        grad_w: np.ndarray = np.tensordot(g, windows, axes = ([0, 2, 3], [0, 2, 3])).astype(weights.dtype)
        grad_x_padded: np.ndarray = np.zeros_like(x_padded)
        for i in range(kh):
            for j in range(kw):
                contribution = np.tensordot(g, weights[:, :, i, j], axes = ([1], [0])).transpose(0, 3, 1, 2)
                grad_x_padded[:, :, _strided(i, ho, stride), _strided(j, wo, stride)] += contribution
        if padding_mode == "edge" and padding > 0:
            grad_x_padded = _fold_edge_padding(grad_x_padded, padding)
        grad_x: np.ndarray = grad_x_padded[:, :, padding:padding + h, padding:padding + w]
        grads: list[np.ndarray | None] = [np.ascontiguousarray(grad_x), grad_w]
        if params.bias is not None:
            grads.append(g.sum(axis = (0, 2, 3), dtype = np.float64).astype(params.bias.dtype))
        return grads

    parents: list[Tensor] = [input, params.weights] + ([params.bias] if params.bias is not None else [])
    return Tensor.from_op(out, parents, backward)

def transposed_conv2d(input: Tensor, params: LayerParams, stride: int = 1, padding: int = 0) -> Tensor:
    """
    Summary:
        Gradient-of-convolution ("deconvolution"). Output size is (h - 1) * stride - 2 * padding + kh.
    """
    if params.kind != LayerKindEnum.TRANSPOSED_CONV2D:
        raise ContractError(f"transposed_conv2d expects transposed-conv2d params, got {params.kind.name}")
    if stride < 1 or padding < 0:
        raise ContractError(f"invalid stride {stride} or padding {padding}")

    n, c, h, w = _require_4d(input, "transposed_conv2d")
    weights: np.ndarray = params.weights.data
    in_c, out_c, kh, kw = weights.shape
    if in_c != c:
        raise ShapeError(f"transposed_conv2d: input has {c} channels but kernel expects {in_c}")

    full_h: int = (h - 1) * stride + kh
    full_w: int = (w - 1) * stride + kw
    if full_h - 2 * padding < 1 or full_w - 2 * padding < 1:
        raise ShapeError(f"transposed_conv2d: padding {padding} removes the whole {full_h}x{full_w} output")

    full: np.ndarray = np.zeros((n, out_c, full_h, full_w), dtype = input.dtype)
    for i in range(kh):
        for j in range(kw):
            contribution = np.tensordot(input.data, weights[:, :, i, j], axes = ([1], [0])).transpose(0, 3, 1, 2)
            full[:, :, _strided(i, h, stride), _strided(j, w, stride)] += contribution

    out: np.ndarray = full[:, :, padding:full_h - padding, padding:full_w - padding]
    if params.bias is not None:
        out = out + params.bias.data.reshape(1, out_c, 1, 1)
    out = np.ascontiguousarray(out, dtype = input.dtype)

    def backward(g: np.ndarray) -> Tuple[np.ndarray | None, ...]:
        g_full: np.ndarray = np.zeros((n, out_c, full_h, full_w), dtype = g.dtype)
        g_full[:, :, padding:full_h - padding, padding:full_w - padding] = g
        grad_x: np.ndarray = np.zeros_like(input.data)
        grad_w: np.ndarray = np.zeros_like(weights)
        for i in range(kh):
            for j in range(kw):
                g_slice = g_full[:, :, _strided(i, h, stride), _strided(j, w, stride)]
                grad_x += np.tensordot(g_slice, weights[:, :, i, j], axes = ([1], [1])).transpose(0, 3, 1, 2)
                grad_w[:, :, i, j] = np.tensordot(input.data, g_slice, axes = ([0, 2, 3], [0, 2, 3]))
        grads: list[np.ndarray | None] = [grad_x, grad_w]
        if params.bias is not None:
            grads.append(g.sum(axis = (0, 2, 3), dtype = np.float64).astype(params.bias.dtype))
        return grads

    parents: list[Tensor] = [input, params.weights] + ([params.bias] if params.bias is not None else [])
    return Tensor.from_op(out, parents, backward)

def maxpool2d(input: Tensor, k: int, stride: int | None = None, padding: int = 0) -> Tensor:
    """
    Summary:
        Windowed maximum. Padded cells hold -inf so they never win. The backward pass
        routes each output gradient to the first maximal cell of its window.
    """
    stride = k if stride is None else stride
    if k < 1 or stride < 1:
        raise ContractError(f"maxpool2d: invalid window {k} or stride {stride}")
    if padding < 0 or padding >= k:
        raise ContractError(f"maxpool2d: padding must lie in [0, {k}), got {padding}")

    n, c, h, w = _require_4d(input, "maxpool2d")
    if h + 2 * padding < k or w + 2 * padding < k:
        raise ShapeError(f"maxpool2d: window {k} larger than input {h}x{w}")

    x_padded: np.ndarray = input.data
    if padding > 0:
        x_padded = np.pad(input.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)), constant_values = -np.inf)

    windows: np.ndarray = _windows(x_padded, k, k, stride)
    ho, wo = windows.shape[2], windows.shape[3]
    flat: np.ndarray = windows.reshape(n, c, ho, wo, k * k)
    argmax: np.ndarray = np.argmax(flat, axis = -1)
    out: np.ndarray = np.take_along_axis(flat, argmax[..., None], axis = -1)[..., 0]

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        grad_padded: np.ndarray = np.zeros(x_padded.shape, dtype = g.dtype)
        for a in range(k):
            for b in range(k):
                routed = np.where(argmax == a * k + b, g, 0.0)
                grad_padded[:, :, _strided(a, ho, stride), _strided(b, wo, stride)] += routed
        return (np.ascontiguousarray(grad_padded[:, :, padding:padding + h, padding:padding + w]),)

    return Tensor.from_op(np.ascontiguousarray(out), (input,), backward)

def batchnorm(input: Tensor, params: LayerParams, training: bool) -> Tensor:
    """
    Summary:
        Per-channel normalization. Training mode uses two-pass batch statistics and
        updates the running statistics in place; eval mode uses the running statistics.
    """
    if params.kind != LayerKindEnum.BATCHNORM or params.bn_state is None:
        raise ContractError("batchnorm expects batchnorm params")

    n, c, h, w = _require_4d(input, "batchnorm")
    state = params.bn_state
    if state.running_mean.shape[0] != c:
        raise ShapeError(f"batchnorm: state has {state.running_mean.shape[0]} channels, input has {c}")
    count: int = n * h * w
    if count == 0:
        raise ContractError("batchnorm: zero-size batch")

    x64: np.ndarray = input.data.astype(np.float64)
    if training:
        mean: np.ndarray = x64.mean(axis = (0, 2, 3))
        centered: np.ndarray = x64 - mean.reshape(1, c, 1, 1)
        var: np.ndarray = (centered * centered).mean(axis = (0, 2, 3))
        unbiased: np.ndarray = var * count / (count - 1) if count > 1 else var
        state.running_mean = (1.0 - state.momentum) * state.running_mean + state.momentum * mean
        state.running_var = (1.0 - state.momentum) * state.running_var + state.momentum * unbiased
    else:
        mean = state.running_mean
        var = state.running_var
        centered = x64 - mean.reshape(1, c, 1, 1)

    inv_std: np.ndarray = 1.0 / np.sqrt(var + state.epsilon)
    x_hat: np.ndarray = centered * inv_std.reshape(1, c, 1, 1)
    gamma: np.ndarray = params.weights.data.astype(np.float64)
    beta: np.ndarray = params.bias.data.astype(np.float64) if params.bias is not None else np.zeros(c)
    out: np.ndarray = (x_hat * gamma.reshape(1, c, 1, 1) + beta.reshape(1, c, 1, 1)).astype(input.dtype)

    def backward(g: np.ndarray) -> Tuple[np.ndarray | None, ...]:
        g64: np.ndarray = g.astype(np.float64)
        grad_gamma: np.ndarray = (g64 * x_hat).sum(axis = (0, 2, 3))
        grad_beta: np.ndarray = g64.sum(axis = (0, 2, 3))
        d_x_hat: np.ndarray = g64 * gamma.reshape(1, c, 1, 1)
        if training:
            sum_d: np.ndarray = d_x_hat.sum(axis = (0, 2, 3)).reshape(1, c, 1, 1)
            sum_dx: np.ndarray = (d_x_hat * x_hat).sum(axis = (0, 2, 3)).reshape(1, c, 1, 1)
            grad_x = inv_std.reshape(1, c, 1, 1) / count * (count * d_x_hat - sum_d - x_hat * sum_dx)
        else:
            grad_x = d_x_hat * inv_std.reshape(1, c, 1, 1)
        grads: list[np.ndarray | None] = [grad_x.astype(input.dtype), grad_gamma.astype(params.weights.dtype)]
        if params.bias is not None:
            grads.append(grad_beta.astype(params.bias.dtype))
        return grads

    parents: list[Tensor] = [input, params.weights] + ([params.bias] if params.bias is not None else [])
    return Tensor.from_op(out, parents, backward)

def gap(input: Tensor) -> Tensor:
    """
    Summary:
        Global average pooling, (n, c, h, w) -> (n, c); value = sum over the map / (h * w).
    """
    n, c, h, w = _require_4d(input, "gap")
    if h * w < 1:
        raise ShapeError("gap: empty feature map")
    out: np.ndarray = (input.data.sum(axis = (2, 3), dtype = np.float64) / (h * w)).astype(input.dtype)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        return (np.broadcast_to(g.reshape(n, c, 1, 1) / (h * w), input.shape).astype(input.dtype),)

    return Tensor.from_op(out, (input,), backward)

def linear(input: Tensor, params: LayerParams) -> Tensor:

    if params.kind != LayerKindEnum.LINEAR:
        raise ContractError(f"linear expects linear params, got {params.kind.name}")
    if input.data.ndim != 2:
        raise ShapeError(f"linear expects a 2-D (n, features) tensor, got shape {input.shape}")
    weights: np.ndarray = params.weights.data
    if input.shape[1] != weights.shape[1]:
        raise ShapeError(f"linear: input has {input.shape[1]} features but weights expect {weights.shape[1]}")

    out: np.ndarray = input.data @ weights.T
    if params.bias is not None:
        out = out + params.bias.data
    out = out.astype(input.dtype)

    def backward(g: np.ndarray) -> Tuple[np.ndarray | None, ...]:
        grads: list[np.ndarray | None] = [g @ weights, g.T @ input.data]
        if params.bias is not None:
            grads.append(g.sum(axis = 0, dtype = np.float64).astype(params.bias.dtype))
        return grads

    parents: list[Tensor] = [input, params.weights] + ([params.bias] if params.bias is not None else [])
    return Tensor.from_op(out, parents, backward)

def relu(input: Tensor) -> Tensor:
    positive: np.ndarray = input.data > 0
    return Tensor.from_op(np.where(positive, input.data, 0).astype(input.dtype), (input,), lambda g: (g * positive,))

def softmax_channel(input: Tensor) -> Tensor:
    """
    Summary:
        Softmax over axis 1 (the class axis of an NCHW tensor or of (n, C) logits).
    """
    if input.data.ndim < 2:
        raise ShapeError(f"softmax_channel expects at least 2 dims, got shape {input.shape}")
    shifted: np.ndarray = input.data.astype(np.float64) - input.data.max(axis = 1, keepdims = True)
    exps: np.ndarray = np.exp(shifted)
    probs64: np.ndarray = exps / exps.sum(axis = 1, keepdims = True)
    probs: np.ndarray = probs64.astype(input.dtype)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        inner: np.ndarray = (g * probs64).sum(axis = 1, keepdims = True)
        return ((probs64 * (g - inner)).astype(input.dtype),)

    return Tensor.from_op(probs, (input,), backward)

def softmax_cross_entropy(logits: Tensor, labels: np.ndarray) -> Tensor:
    """
    Summary:
        Mean cross-entropy between softmax(logits) of shape (n, C) and integer labels of shape (n,).
    """
    if logits.data.ndim != 2:
        raise ShapeError(f"softmax_cross_entropy expects (n, C) logits, got shape {logits.shape}")
    n, classes = logits.shape
    labels = np.asarray(labels, dtype = np.int64)
    if labels.shape != (n,):
        raise ShapeError(f"labels shape {labels.shape} does not match batch size {n}")
    if np.any(labels < 0) or np.any(labels >= classes):
        raise ContractError(f"labels must lie in [0, {classes})")

    shifted: np.ndarray = logits.data.astype(np.float64) - logits.data.max(axis = 1, keepdims = True)
    log_probs: np.ndarray = shifted - np.log(np.exp(shifted).sum(axis = 1, keepdims = True))
    loss: float = -float(log_probs[np.arange(n), labels].mean())

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        grad: np.ndarray = np.exp(log_probs)
        grad[np.arange(n), labels] -= 1.0
        return ((grad * (float(g) / n)).astype(logits.dtype),)

    return Tensor.from_op(np.asarray(loss, dtype = logits.dtype), (logits,), backward)

def _bilinear_matrix(in_size: int, out_size: int) -> np.ndarray:
    """
    (out_size, in_size) interpolation matrix, half-pixel centers, edge clamped.
    Rows sum to 1, and in_size == out_size gives the identity.
    """
    matrix: np.ndarray = np.zeros((out_size, in_size), dtype = np.float64)
    source: np.ndarray = (np.arange(out_size) + 0.5) * (in_size / out_size) - 0.5
    source = np.clip(source, 0.0, in_size - 1)
    lower: np.ndarray = np.floor(source).astype(np.int64)
    upper: np.ndarray = np.minimum(lower + 1, in_size - 1)
    frac: np.ndarray = source - lower
    rows: np.ndarray = np.arange(out_size)
    np.add.at(matrix, (rows, lower), 1.0 - frac)
    np.add.at(matrix, (rows, upper), frac)
    return matrix

def upsample_bilinear(input: Tensor, out_h: int, out_w: int) -> Tensor:
    """
    Summary:
        Bilinear resize of every (h, w) map to (out_h, out_w); also used for downscaling.
    """
    n, c, h, w = _require_4d(input, "upsample_bilinear")
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"upsample_bilinear: invalid target size {out_h}x{out_w}")
    rows: np.ndarray = _bilinear_matrix(h, out_h)
    cols: np.ndarray = _bilinear_matrix(w, out_w)

    tmp: np.ndarray = np.tensordot(input.data.astype(np.float64), cols, axes = ([3], [1]))
    out: np.ndarray = np.tensordot(rows, tmp, axes = ([1], [2])).transpose(1, 2, 0, 3)

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        back: np.ndarray = np.tensordot(g.astype(np.float64), cols, axes = ([3], [0]))
        back = np.tensordot(rows, back, axes = ([0], [2])).transpose(1, 2, 0, 3)
        return (back.astype(input.dtype),)

    return Tensor.from_op(np.ascontiguousarray(out, dtype = input.dtype), (input,), backward)

def upsample_nearest2x(input: Tensor) -> Tensor:
    n, c, h, w = _require_4d(input, "upsample_nearest2x")
    out: np.ndarray = input.data.repeat(2, axis = 2).repeat(2, axis = 3)
    return Tensor.from_op(out, (input,), lambda g: (g.reshape(n, c, h, 2, w, 2).sum(axis = (3, 5)),))

def concat_channels(first: Tensor, second: Tensor) -> Tensor:

    n1, c1, h1, w1 = _require_4d(first, "concat_channels")
    n2, c2, h2, w2 = _require_4d(second, "concat_channels")
    if (n1, h1, w1) != (n2, h2, w2):
        raise ShapeError(f"concat_channels: shapes {first.shape} and {second.shape} differ outside the channel axis")
    out: np.ndarray = np.concatenate([first.data, second.data], axis = 1)
    return Tensor.from_op(out, (first, second), lambda g: (g[:, :c1], g[:, c1:]))

def center_crop(input: Tensor, out_h: int, out_w: int) -> Tensor:
    """
    Summary:
        Central (out_h, out_w) window; a no-op when the sizes already match.
    """
    n, c, h, w = _require_4d(input, "center_crop")
    if out_h > h or out_w > w:
        raise ShapeError(f"center_crop: cannot crop {h}x{w} to {out_h}x{out_w}")
    if (out_h, out_w) == (h, w):
        return input
    top: int = (h - out_h) // 2
    left: int = (w - out_w) // 2

    def backward(g: np.ndarray) -> Tuple[np.ndarray]:
        grad: np.ndarray = np.zeros_like(input.data)
        grad[:, :, top:top + out_h, left:left + out_w] = g
        return (grad,)

    return Tensor.from_op(np.ascontiguousarray(input.data[:, :, top:top + out_h, left:left + out_w]), (input,), backward)

def log_clamped(input: Tensor, floor: float = 1e-12) -> Tensor:
    """
    Summary:
        log(max(x, floor)). Clamped entries receive zero gradient.
    """
    clamped: np.ndarray = np.maximum(input.data.astype(np.float64), floor)
    active: np.ndarray = input.data > floor
    out: np.ndarray = np.log(clamped).astype(input.dtype)
    return Tensor.from_op(out, (input,), lambda g: (np.where(active, g / clamped, 0.0).astype(input.dtype),))
