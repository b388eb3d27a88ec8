"""Forward-only, toy-width context fusion decoder network.

The backbone is a stand-in: five stride-2 3x3 ConvBNReLU stages with
weights drawn from a seeded PCG64 generator. The decoder follows the
context module (CM) / feature fusion module (FFM) dataflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import (
    UPSAMPLE_KINDS,
    BatchNormParams,
    ConvParams,
    as_tensor,
    batchnorm_infer,
    concat_channels,
    conv2d,
    elementwise,
    global_avg_pool,
    relu,
    sigmoid,
    upsample2x,
    upsample_to,
)

N_STAGES = 5


@dataclass(frozen=True)
class ConvBN:
    conv: ConvParams
    bn: BatchNormParams

    def __call__(self, x):
        return relu(batchnorm_infer(conv2d(x, self.conv), self.bn))


@dataclass(frozen=True)
class CMParams:
    conv_bn_relu: ConvBN
    attention_conv: ConvParams

    def __post_init__(self):
        c = self.conv_bn_relu.conv.out_channels
        a = self.attention_conv
        if a.in_channels != c or a.out_channels != c or a.kernel != 1:
            raise ValueError("attention_conv must be a 1x1 conv with in = out = CM channels")


@dataclass(frozen=True)
class FFMParams:
    fuse_bn_relu: ConvBN
    context_proj: ConvParams
    merge_conv: ConvParams
    branch_1x1: ConvParams
    branch_d3: ConvParams
    branch_d7: ConvParams
    gap_attention_conv: ConvParams

    def __post_init__(self):
        branches = (self.branch_1x1, self.branch_d3, self.branch_d7)
        if len({b.out_channels for b in branches}) != 1:
            raise ValueError("FFM branches must share the output channel count")
        if (self.branch_d3.kernel, self.branch_d3.dilation) != (3, 3):
            raise ValueError("branch_d3 must be 3x3 with dilation 3")
        if (self.branch_d7.kernel, self.branch_d7.dilation) != (3, 7):
            raise ValueError("branch_d7 must be 3x3 with dilation 7")
        if self.branch_1x1.kernel != 1:
            raise ValueError("branch_1x1 must be 1x1")

    @property
    def out_channels(self) -> int:
        return self.branch_1x1.out_channels


@dataclass(frozen=True)
class ToyNetworkConfig:
    encoder_channels: tuple = (8, 16, 32, 64, 128)
    # FFM width per decoder stage, deepest first
    decoder_channels: tuple = (32, 32, 16, 16, 8)
    context_channels: int = 64
    seed: int = 0
    upsample_kind: str = "bilinear"

    def __post_init__(self):
        if len(self.encoder_channels) != N_STAGES:
            raise ValueError(f"need {N_STAGES} encoder stages, got {len(self.encoder_channels)}")
        if len(self.decoder_channels) != N_STAGES:
            raise ValueError(f"need {N_STAGES} decoder stages, got {len(self.decoder_channels)}")
        if list(self.encoder_channels) != sorted(self.encoder_channels):
            raise ValueError("encoder_channels must be ascending")
        if self.upsample_kind not in UPSAMPLE_KINDS:
            raise ValueError(f"upsample_kind must be one of {UPSAMPLE_KINDS}")


@dataclass(frozen=True)
class SaliencyNetwork:
    config: ToyNetworkConfig
    encoder: tuple
    cm: CMParams
    ffms: tuple
    decoder_blocks: tuple
    head: ConvParams = field(repr=False)


class _Init:
    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def conv(self, c_out, c_in, k=1, dilation=1, gain=2.0):
        std = np.sqrt(gain / (c_in * k * k))
        w = self.rng.normal(0.0, std, size=(c_out, c_in, k, k))
        b = self.rng.normal(0.0, 0.01, size=c_out)
        return ConvParams(w, b, dilation)

    def bn(self, c):
        return BatchNormParams(
            gamma=1.0 + 0.1 * self.rng.standard_normal(c),
            beta=0.05 * self.rng.standard_normal(c),
            running_mean=0.05 * self.rng.standard_normal(c),
            running_var=self.rng.uniform(0.5, 1.5, size=c),
        )

    def conv_bn(self, c_out, c_in, k=1):
        return ConvBN(self.conv(c_out, c_in, k), self.bn(c_out))


def build_network(cfg: ToyNetworkConfig = ToyNetworkConfig()) -> SaliencyNetwork:
    """Deterministically initialise every weight from ``cfg.seed``."""
    init = _Init(cfg.seed)
    enc = []
    c_prev = 3
    for c in cfg.encoder_channels:
        enc.append(init.conv_bn(c, c_prev, 3))
        c_prev = c

    c_top = cfg.encoder_channels[-1]
    c_ctx = cfg.context_channels
    cm = CMParams(init.conv_bn(c_ctx, c_top, 1), init.conv(c_ctx, c_ctx, 1, gain=1.0))

    # decoder stage i consumes encoder stage N-i (1-based), deepest first
    skips = list(reversed(cfg.encoder_channels))
    ffms, blocks = [], []
    for i, d in enumerate(cfg.decoder_channels):
        c_in = skips[i]
        ffms.append(FFMParams(
            fuse_bn_relu=init.conv_bn(d, c_in, 1),
            context_proj=init.conv(d, c_ctx, 1, gain=1.0),
            merge_conv=init.conv(d, 2 * d, 1, gain=1.0),
            branch_1x1=init.conv(d, d, 1, gain=1.0),
            branch_d3=init.conv(d, d, 3, dilation=3, gain=1.0),
            branch_d7=init.conv(d, d, 3, dilation=7, gain=1.0),
            gap_attention_conv=init.conv(d, d, 1, gain=1.0),
        ))
        c_next = skips[i + 1] if i + 1 < N_STAGES else d
        blocks.append(init.conv_bn(c_next, d, 3))
    head = init.conv(1, blocks[-1].conv.out_channels, 1, gain=1.0)
    return SaliencyNetwork(cfg, tuple(enc), cm, tuple(ffms), tuple(blocks), head)


def _gap_gate(x, attention_conv: ConvParams):
    return elementwise(x, sigmoid(conv2d(global_avg_pool(x), attention_conv)), "mul")


def context_module(x, p: CMParams) -> np.ndarray:
    """X_b = ConvBNReLU(x); f_a = sigmoid(conv1x1(GAP(X_b))); return X_b * f_a."""
    x = as_tensor(x)
    if x.shape[0] != p.conv_bn_relu.conv.in_channels:
        raise ValueError(
            f"context_module: input has {x.shape[0]} channels, "
            f"expected {p.conv_bn_relu.conv.in_channels}")
    return _gap_gate(p.conv_bn_relu(x), p.attention_conv)


def ffm_forward(x_enc, x_dec_prev, context, p: FFMParams,
                upsample_kind: str = "bilinear", stage=None) -> np.ndarray:
    """Fuse the skip feature, the previous decoder feature and the global
    context.

    ``x_dec_prev=None`` marks the first FFM (X_m is the encoder feature
    itself). ``context=None`` drops the context path entirely; the merge
    conv then only sees the X_m' half of its input channels.
    """
    tag = "FFM" if stage is None else f"FFM stage {stage}"
    x_enc = as_tensor(x_enc, "x_enc")
    h, w = x_enc.shape[1:]
    try:
        if x_dec_prev is None:
            x_m = x_enc
        else:
            up = upsample2x(x_dec_prev, upsample_kind)
            if up.shape != x_enc.shape:
                raise ValueError(f"upsampled decoder feature {up.shape} != encoder feature {x_enc.shape}")
            x_m = elementwise(x_enc, up, "add")
        x_m1 = p.fuse_bn_relu(x_m)
        if context is None:
            d = x_m1.shape[0]
            merge = ConvParams(p.merge_conv.weights[:, :d], p.merge_conv.bias)
            x_f = conv2d(x_m1, merge)
        else:
            context = as_tensor(context, "context")
            if context.shape[1] > h or context.shape[2] > w:
                raise ValueError(f"context {context.shape[1:]} larger than encoder feature {(h, w)}")
            ctx = conv2d(upsample_to(context, h, w, upsample_kind), p.context_proj)
            x_f = conv2d(concat_channels(x_m1, ctx), p.merge_conv)
        fused = conv2d(x_f, p.branch_1x1)
        fused = elementwise(fused, conv2d(x_f, p.branch_d3), "add")
        fused = elementwise(fused, conv2d(x_f, p.branch_d7), "add")
        return _gap_gate(fused, p.gap_attention_conv)
    except ValueError as exc:
        raise ValueError(f"{tag}: {exc}") from exc


def _check_image(image) -> np.ndarray:
    image = as_tensor(image, "image")
    c, h, w = image.shape
    if c != 3:
        raise ValueError(f"image must have 3 channels, got {c}")
    div = 2 ** N_STAGES
    if h % div or w % div or h == 0 or w == 0:
        raise ValueError(f"image height and width must be positive multiples of {div}, got {h}x{w}")
    return image


def encode(image, net: SaliencyNetwork) -> list:
    x = _check_image(image)
    feats = []
    for block in net.encoder:
        # stride-2 conv = stride-1 'same' conv sampled at even pixels
        x = np.ascontiguousarray(block(x)[:, ::2, ::2])
        feats.append(x)
    return feats


def toy_encoder_forward(image, cfg: ToyNetworkConfig = ToyNetworkConfig()) -> list:
    """Five feature maps at 1/2 ... 1/32 of the input resolution."""
    return encode(image, build_network(cfg))


def network_forward(image, net: SaliencyNetwork) -> np.ndarray:
    """Full forward pass; returns an (H, W) saliency map in (0, 1)."""
    image = _check_image(image)
    kind = net.config.upsample_kind
    feats = encode(image, net)
    context = context_module(feats[-1], net.cm)
    x = None
    for i, (ffm, block) in enumerate(zip(net.ffms, net.decoder_blocks)):
        x_enc = feats[N_STAGES - 1 - i]
        x = ffm_forward(x_enc, x, context, ffm, kind, stage=i + 1)
        try:
            x = block(x)
        except ValueError as exc:
            raise ValueError(f"decoder block {i + 1}: {exc}") from exc
    logits = conv2d(x, net.head)
    sal = sigmoid(logits)
    sal = upsample_to(sal, image.shape[1], image.shape[2], kind)
    return sal[0]
