"""Per-image implicit residual codec: a tiny coordinate MLP as HDR metadata.

Instead of storing a compressed residual raster, this codec overfits a small
network to one image and ships the weights. The network maps a per-pixel
feature vector (x, y, r, g, b), position plus the aligned SDR color, through
a sinusoidal embedding into two ReLU hidden layers and a linear 3-channel
output. At the default width of 16 the whole model is 2259 float32 parameters,
9,074 bytes serialized, under the 10 KB metadata budget.

Output modes:

* ``GAIN_MAP`` / ``GAMMA_MAP``: the network regresses the normalized residual
  in [0, 1]; decoding denormalizes and applies it to the SDR image.
* ``DIRECT_HDR``: the network regresses the PQ-encoded HDR image itself; no
  residual metadata is attached.

Training is plain Adam on MSE over batches of pixels sampled uniformly with
replacement from a counter-based generator, so runs are reproducible bit for
bit. ``meta_initialize`` pre-optimizes a starting point across a corpus of
synthetic noise tasks (first-order Reptile) so per-image training converges
faster than from a random init.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

import numpy as np

from .color import ImageBuffer, Transfer
from .errors import (
    CorruptStreamError,
    MetadataError,
    PreconditionError,
    ShapeError,
)
from .residual import (
    DEFAULT_EPSILON,
    ResidualKind,
    ResidualMap,
    ResidualMetadata,
    compute_gain,
    compute_gamma,
    denormalize_residual,
    normalize_residual,
    reconstruct,
)

__all__ = [
    "OutputMode",
    "EmbeddingConfig",
    "MlpModel",
    "TrainConfig",
    "MetaInit",
    "SUPPORTED_WIDTHS",
    "embed",
    "build_features",
    "init_model",
    "forward",
    "grad",
    "AdamState",
    "init_adam_state",
    "adam_step",
    "train",
    "predict_residual",
    "predict_map",
    "meta_initialize",
    "serialize",
    "deserialize",
    "save_meta_init",
    "load_meta_init",
]

SUPPORTED_WIDTHS = (8, 16, 64, 128)


class OutputMode(enum.Enum):
    GAIN_MAP = "gain-map"
    GAMMA_MAP = "gamma-map"
    DIRECT_HDR = "direct-hdr"


_MODE_KIND = {
    OutputMode.GAIN_MAP: ResidualKind.GAIN,
    OutputMode.GAMMA_MAP: ResidualKind.GAMMA,
}
_KIND_MODE = {v: k for k, v in _MODE_KIND.items()}


@dataclass(frozen=True)
class EmbeddingConfig:
    """Sinusoidal feature embedding: sin/cos at frequencies 2^k * pi.

    Each scalar input expands to ``2 * frequencies_per_input`` values, laid out
    input-major, then frequency, then (sin, cos). The default 5 inputs x 24
    give the 120-wide network input; the position-only ablation uses arity 2.
    """

    frequencies_per_input: int = 12
    input_arity: int = 5

    def __post_init__(self) -> None:
        if self.input_arity not in (2, 5):
            raise PreconditionError(f"input arity must be 2 or 5, got {self.input_arity}")
        if not 1 <= self.frequencies_per_input <= 32:
            raise PreconditionError(
                f"frequencies_per_input must be in [1, 32], got {self.frequencies_per_input}"
            )

    @property
    def width(self) -> int:
        return self.input_arity * 2 * self.frequencies_per_input


def embed(values: np.ndarray, config: EmbeddingConfig = EmbeddingConfig()) -> np.ndarray:
    """Embed (n, arity) feature rows into (n, arity * 2 * frequencies) rows.

    Inputs are clamped to [0, 1] rather than rejected. The output dtype follows
    the input dtype (float32 for training tables, float64 for oracles).
    """
    v = np.asarray(values)
    single = v.ndim == 1
    if single:
        v = v[None, :]
    if v.ndim != 2 or v.shape[1] != config.input_arity:
        raise ShapeError(f"expected (n, {config.input_arity}) features, got shape {v.shape}")
    dtype = v.dtype if v.dtype in (np.float32, np.float64) else np.float64
    v = np.clip(v.astype(dtype), 0.0, 1.0)
    freqs = (np.exp2(np.arange(config.frequencies_per_input)) * np.pi).astype(dtype)
    args = v[:, :, None] * freqs[None, None, :]
    out = np.empty(args.shape + (2,), dtype=dtype)
    np.sin(args, out=out[..., 0])
    np.cos(args, out=out[..., 1])
    out = out.reshape(v.shape[0], config.width)
    return out[0] if single else out


def build_features(sdr: ImageBuffer, input_arity: int = 5) -> np.ndarray:
    """Per-pixel raw features in raster order: (x, y) or (x, y, r, g, b).

    Coordinates are normalized by (dim - 1) so corners land exactly on 0 and 1
    at any resolution; a single-pixel axis uses 0.5.
    """
    w, h = sdr.width, sdr.height
    xs = np.full(w, 0.5) if w == 1 else np.arange(w, dtype=np.float64) / (w - 1)
    ys = np.full(h, 0.5) if h == 1 else np.arange(h, dtype=np.float64) / (h - 1)
    gx, gy = np.meshgrid(xs, ys)
    cols = [gx.ravel(), gy.ravel()]
    if input_arity == 5:
        flat = sdr.data.reshape(3, -1).astype(np.float64)
        cols += [flat[0], flat[1], flat[2]]
    elif input_arity != 2:
        raise PreconditionError(f"input arity must be 2 or 5, got {input_arity}")
    return np.stack(cols, axis=1)


@dataclass
class MlpModel:
    """Two ReLU hidden layers + linear output, all dense, float32 canonical.

    ``layers`` is [(W1, b1), (W2, b2), (W3, b3)] with W1 (embed_width, width),
    W2 (width, width), W3 (width, 3). ``meta`` carries the residual bounds for
    the residual output modes and is None for DIRECT_HDR.
    """

    embedding: EmbeddingConfig
    hidden_width: int
    output_mode: OutputMode
    layers: list[tuple[np.ndarray, np.ndarray]]
    meta: ResidualMetadata | None = None
    loss_history: np.ndarray | None = None

    def __post_init__(self) -> None:
        if len(self.layers) != 3:
            raise ShapeError(f"expected 3 dense layers, got {len(self.layers)}")
        d, w = self.embedding.width, self.hidden_width
        expected = [((d, w), (w,)), ((w, w), (w,)), ((w, 3), (3,))]
        for i, ((ws, bs), (wmat, bvec)) in enumerate(zip(expected, self.layers)):
            if wmat.shape != ws or bvec.shape != bs:
                raise ShapeError(
                    f"layer {i}: shapes {wmat.shape}/{bvec.shape}, expected {ws}/{bs}"
                )
        if self.output_mode == OutputMode.DIRECT_HDR:
            if self.meta is not None:
                raise MetadataError("direct-HDR models carry no residual metadata")
        elif self.meta is not None and self.meta.kind != _MODE_KIND[self.output_mode]:
            raise MetadataError("metadata kind does not match output mode")

    @property
    def parameter_count(self) -> int:
        return sum(w.size + b.size for w, b in self.layers)

    def copy_layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [(w.copy(), b.copy()) for w, b in self.layers]


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 1000
    batch: int = 65536
    lr: float = 1e-2
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.iterations < 0 or self.batch < 1 or self.lr <= 0:
            raise PreconditionError("iterations must be >= 0, batch >= 1, lr > 0")


@dataclass
class MetaInit:
    """Pre-optimized starting weights plus the settings that produced them."""

    embedding: EmbeddingConfig
    hidden_width: int
    kind: ResidualKind | None
    layers: list[tuple[np.ndarray, np.ndarray]]
    provenance: dict

    def copy_layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [(w.copy(), b.copy()) for w, b in self.layers]


def init_model(
    hidden_width: int = 16,
    embedding: EmbeddingConfig = EmbeddingConfig(),
    output_mode: OutputMode = OutputMode.GAIN_MAP,
    seed: int = 0,
    dtype: np.dtype = np.float32,
) -> MlpModel:
    """Random model: Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases."""
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    dims = [(embedding.width, hidden_width), (hidden_width, hidden_width), (hidden_width, 3)]
    layers = []
    for fan_in, fan_out in dims:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_in, fan_out)).astype(dtype)
        layers.append((w, np.zeros(fan_out, dtype=dtype)))
    return MlpModel(embedding, hidden_width, output_mode, layers)


def forward(model: MlpModel, batch: np.ndarray) -> np.ndarray:
    """Evaluate the network on (n, embed_width) rows, returning (n, 3)."""
    x = np.asarray(batch)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.embedding.width:
        raise ShapeError(
            f"batch width {x.shape} does not match embedding width {model.embedding.width}"
        )
    (w1, b1), (w2, b2), (w3, b3) = model.layers
    h1 = np.maximum(x @ w1 + b1, 0.0)
    h2 = np.maximum(h1 @ w2 + b2, 0.0)
    out = h2 @ w3 + b3
    return out[0] if single else out


def grad(
    model: MlpModel, batch: np.ndarray, targets: np.ndarray
) -> tuple[list[tuple[np.ndarray, np.ndarray]], float]:
    """Analytic gradients of batch MSE for every weight and bias, plus the loss.

    The loss is mean((forward(batch) - targets)^2) over all n*3 elements. The
    ReLU subgradient at exactly zero is taken as zero.
    """
    x = np.asarray(batch)
    t = np.asarray(targets)
    if x.ndim != 2 or x.shape[1] != model.embedding.width:
        raise ShapeError(f"bad batch shape {x.shape}")
    if t.shape != (x.shape[0], 3):
        raise ShapeError(f"targets shape {t.shape} does not match ({x.shape[0]}, 3)")
    (w1, b1), (w2, b2), (w3, b3) = model.layers
    z1 = x @ w1 + b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ w2 + b2
    h2 = np.maximum(z2, 0.0)
    out = h2 @ w3 + b3

    diff = out - t
    loss = float(np.mean(diff.astype(np.float64) ** 2))
    dout = diff * (2.0 / diff.size)

    dw3 = h2.T @ dout
    db3 = dout.sum(axis=0)
    dh2 = dout @ w3.T
    dh2[z2 <= 0.0] = 0.0
    dw2 = h1.T @ dh2
    db2 = dh2.sum(axis=0)
    dh1 = dh2 @ w2.T
    dh1[z1 <= 0.0] = 0.0
    dw1 = x.T @ dh1
    db1 = dh1.sum(axis=0)
    return [(dw1, db1), (dw2, db2), (dw3, db3)], loss


@dataclass
class AdamState:
    m: list[tuple[np.ndarray, np.ndarray]]
    v: list[tuple[np.ndarray, np.ndarray]]
    t: int
    beta1: float
    beta2: float
    eps: float


def init_adam_state(model: MlpModel, config: TrainConfig = TrainConfig()) -> AdamState:
    zeros = lambda: [(np.zeros_like(w), np.zeros_like(b)) for w, b in model.layers]
    return AdamState(zeros(), zeros(), 0, config.beta1, config.beta2, config.adam_eps)


def adam_step(
    model: MlpModel,
    state: AdamState,
    grads: list[tuple[np.ndarray, np.ndarray]],
    lr: float,
) -> tuple[MlpModel, AdamState]:
    """One bias-corrected Adam update, in place on the model's tensors."""
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.t
    c2 = 1.0 - b2**state.t
    for (w, b), (mw, mb), (vw, vb), (gw, gb) in zip(model.layers, state.m, state.v, grads):
        for p, m, v, g in ((w, mw, vw, gw), (b, mb, vb, gb)):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * np.square(g)
            p -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)
    return model, state


def _resolve_target(
    sdr: ImageBuffer, target: ResidualMap | ImageBuffer
) -> tuple[OutputMode, np.ndarray, ResidualMetadata | None]:
    if isinstance(target, ResidualMap):
        if not target.normalized:
            raise PreconditionError("residual target must be normalized before training")
        if (target.map.width, target.map.height) != (sdr.width, sdr.height):
            raise ShapeError("target dimensions do not match the SDR image")
        return _KIND_MODE[target.kind], target.map.data, target.meta
    if isinstance(target, ImageBuffer):
        if (target.width, target.height) != (sdr.width, sdr.height):
            raise ShapeError("target dimensions do not match the SDR image")
        if target.space.transfer != Transfer.PQ:
            raise PreconditionError("direct-HDR targets must be PQ-encoded")
        return OutputMode.DIRECT_HDR, target.data, None
    raise PreconditionError(f"unsupported target type {type(target).__name__}")


def train(
    sdr: ImageBuffer,
    target: ResidualMap | ImageBuffer,
    config: TrainConfig = TrainConfig(),
    init: MetaInit | None = None,
    hidden_width: int = 16,
    input_arity: int = 5,
) -> MlpModel:
    """Overfit a model to one image; fully deterministic for a fixed seed.

    ``target`` selects the output mode: a normalized ResidualMap trains a
    gain/gamma regressor, a PQ-encoded ImageBuffer trains direct HDR. When a
    MetaInit is given, its tensors are the starting point and its architecture
    overrides ``hidden_width``/``input_arity``.
    """
    mode, target_planes, meta = _resolve_target(sdr, target)
    if init is not None:
        embedding = init.embedding
        layers = init.copy_layers()
        width = init.hidden_width
    else:
        embedding = EmbeddingConfig(input_arity=input_arity)
        layers = init_model(hidden_width, embedding, mode, seed=config.seed).layers
        width = hidden_width
    model = MlpModel(embedding, width, mode, layers, meta)
    table = embed(
        build_features(sdr, embedding.input_arity).astype(np.float32), embedding
    )
    flat_targets = np.ascontiguousarray(
        target_planes.reshape(3, -1).T, dtype=np.float32
    )
    n = table.shape[0]
    rng = np.random.Generator(np.random.Philox(key=[config.seed, 1]))
    state = init_adam_state(model, config)
    losses = np.empty(config.iterations, dtype=np.float64)
    for i in range(config.iterations):
        idx = rng.integers(0, n, size=config.batch)
        grads, loss = grad(model, table[idx], flat_targets[idx])
        adam_step(model, state, grads, config.lr)
        losses[i] = loss
    model.loss_history = losses
    return model


def _forward_grid(model: MlpModel, sdr: ImageBuffer, chunk: int = 65536) -> np.ndarray:
    features = build_features(sdr, model.embedding.input_arity).astype(np.float32)
    n = features.shape[0]
    out = np.empty((n, 3), dtype=np.float32)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        out[start:stop] = forward(model, embed(features[start:stop], model.embedding))
    return out


def predict_residual(model: MlpModel, sdr: ImageBuffer) -> ResidualMap:
    """Query the model at every pixel and return the denormalized residual map."""
    if model.output_mode == OutputMode.DIRECT_HDR:
        raise PreconditionError("direct-HDR models do not predict a residual map")
    if model.meta is None:
        raise MetadataError("model has no residual metadata attached")
    out = _forward_grid(model, sdr)
    planes = np.clip(out.T.reshape(3, sdr.height, sdr.width), 0.0, 1.0)
    buf = ImageBuffer.from_planar(planes.astype(np.float32), sdr.space)
    kind = _MODE_KIND[model.output_mode]
    normalized = ResidualMap(buf, kind, model.meta, normalized=True)
    return denormalize_residual(normalized)


def predict_map(model: MlpModel, sdr: ImageBuffer) -> ImageBuffer:
    """Full reconstruction: apply the predicted residual to the SDR image.

    Residual modes denormalize and reconstruct; DIRECT_HDR returns the network
    output clamped to [0, 1], interpreted as the PQ-encoded HDR image.
    """
    if model.output_mode == OutputMode.DIRECT_HDR:
        out = _forward_grid(model, sdr)
        planes = np.clip(out.T.reshape(3, sdr.height, sdr.width), 0.0, 1.0)
        return ImageBuffer.from_planar(planes.astype(np.float32), sdr.space)
    return reconstruct(sdr, predict_residual(model, sdr))


def meta_initialize(
    width: int,
    corpus: list[tuple[ImageBuffer, ImageBuffer]],
    kind: ResidualKind = ResidualKind.GAIN,
    iterations: int = 10000,
    seed: int = 0,
    inner_steps: int = 16,
    outer_lr: float = 0.1,
    inner_batch: int = 16384,
    inner_lr: float = 1e-2,
    epsilon: float | None = None,
) -> MetaInit:
    """First-order Reptile over per-image residual tasks.

    Each outer iteration picks one (HDR, SDR) pair, both already in the shared
    working space, clones the current init, runs ``inner_steps`` Adam steps on
    that pair's normalized residual, and moves the init toward the adapted
    weights by ``outer_lr``. One init is produced per (width, kind).
    """
    if width not in SUPPORTED_WIDTHS:
        raise PreconditionError(f"hidden width must be one of {SUPPORTED_WIDTHS}, got {width}")
    if not corpus:
        raise PreconditionError("meta-initialization corpus is empty")
    eps = DEFAULT_EPSILON if epsilon is None else epsilon
    compute = compute_gain if kind == ResidualKind.GAIN else compute_gamma
    embedding = EmbeddingConfig()
    base = init_model(width, embedding, _KIND_MODE[kind], seed=seed)

    tasks = []
    for hdr, s in corpus:
        r = normalize_residual(compute(hdr, s, eps))
        table = embed(build_features(s, 5).astype(np.float32), embedding)
        targets = np.ascontiguousarray(r.map.data.reshape(3, -1).T, dtype=np.float32)
        tasks.append((table, targets))

    inner_cfg = TrainConfig(iterations=inner_steps, batch=inner_batch, lr=inner_lr, seed=seed)
    rng = np.random.Generator(np.random.Philox(key=[seed, 1]))
    for _ in range(iterations):
        table, targets = tasks[int(rng.integers(0, len(tasks)))]
        n = table.shape[0]
        clone = MlpModel(embedding, width, base.output_mode, base.copy_layers())
        state = init_adam_state(clone, inner_cfg)
        for _ in range(inner_steps):
            idx = rng.integers(0, n, size=inner_batch)
            grads, _ = grad(clone, table[idx], targets[idx])
            adam_step(clone, state, grads, inner_lr)
        for (w, b), (cw, cb) in zip(base.layers, clone.layers):
            w += outer_lr * (cw - w)
            b += outer_lr * (cb - b)

    provenance = {
        "seed": seed,
        "iterations": iterations,
        "inner_steps": inner_steps,
        "outer_lr": outer_lr,
        "inner_batch": inner_batch,
        "inner_lr": inner_lr,
        "corpus_size": len(corpus),
        "kind": kind.value,
        "epsilon": eps,
    }
    return MetaInit(embedding, width, kind, base.copy_layers(), provenance)


# --- GMLP container ---------------------------------------------------------

_GMLP_MAGIC = b"GMLP"
_GMLP_VERSION = 1
_GMLP_HEAD = struct.Struct("<4sBBBBH")
_GMLP_META = struct.Struct("<6ff")

_MODE_CODE = {OutputMode.GAIN_MAP: 0, OutputMode.GAMMA_MAP: 1, OutputMode.DIRECT_HDR: 2}
_CODE_MODE = {v: k for k, v in _MODE_CODE.items()}


def serialize(model: MlpModel) -> bytes:
    """Pack a model into the GMLP container (float32 little-endian weights)."""
    head = _GMLP_HEAD.pack(
        _GMLP_MAGIC,
        _GMLP_VERSION,
        _MODE_CODE[model.output_mode],
        model.embedding.input_arity,
        model.embedding.frequencies_per_input,
        model.hidden_width,
    )
    if model.meta is not None:
        bounds = [float(v) for v in model.meta.log2_min] + [float(v) for v in model.meta.log2_max]
        meta = _GMLP_META.pack(*bounds, float(model.meta.epsilon))
    else:
        meta = _GMLP_META.pack(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    chunks = [head, meta]
    for w, b in model.layers:
        chunks.append(np.ascontiguousarray(w, dtype="<f4").tobytes())
        chunks.append(np.ascontiguousarray(b, dtype="<f4").tobytes())
    return b"".join(chunks)


def deserialize(data: bytes) -> MlpModel:
    if len(data) < _GMLP_HEAD.size + _GMLP_META.size:
        raise CorruptStreamError("container shorter than fixed header")
    magic, version, mode_code, arity, freqs, width = _GMLP_HEAD.unpack_from(data, 0)
    if magic != _GMLP_MAGIC:
        raise CorruptStreamError(f"bad magic {magic!r}")
    if version != _GMLP_VERSION:
        raise CorruptStreamError(f"unsupported container version {version}")
    if mode_code not in _CODE_MODE:
        raise CorruptStreamError(f"unknown output mode code {mode_code}")
    mode = _CODE_MODE[mode_code]
    try:
        embedding = EmbeddingConfig(frequencies_per_input=freqs, input_arity=arity)
    except PreconditionError as exc:
        raise CorruptStreamError(str(exc)) from exc
    if width < 1:
        raise CorruptStreamError("hidden width must be positive")
    *bounds, epsilon = _GMLP_META.unpack_from(data, _GMLP_HEAD.size)

    d = embedding.width
    shapes = [(d, width), (width,), (width, width), (width,), (width, 3), (3,)]
    n_params = sum(int(np.prod(s)) for s in shapes)
    offset = _GMLP_HEAD.size + _GMLP_META.size
    if len(data) != offset + 4 * n_params:
        raise CorruptStreamError(
            f"container size {len(data)} does not match architecture ({n_params} parameters)"
        )
    flat = np.frombuffer(data, dtype="<f4", offset=offset).astype(np.float32)
    tensors = []
    pos = 0
    for shape in shapes:
        size = int(np.prod(shape))
        tensors.append(flat[pos : pos + size].reshape(shape).copy())
        pos += size
    layers = [(tensors[0], tensors[1]), (tensors[2], tensors[3]), (tensors[4], tensors[5])]

    if mode == OutputMode.DIRECT_HDR:
        meta = None
    else:
        lo = np.array(bounds[:3], dtype=np.float64)
        hi = np.array(bounds[3:], dtype=np.float64)
        meta = ResidualMetadata(
            kind=_MODE_KIND[mode],
            epsilon=float(epsilon),
            log2_min=lo,
            log2_max=hi,
            degenerate=(hi - lo) < 1e-9,
        )
        meta.validate()
    return MlpModel(embedding, width, mode, layers, meta)


def save_meta_init(init: MetaInit, path: str) -> None:
    """Store a MetaInit as a numpy .npz archive."""
    import json

    arrays = {}
    for i, (w, b) in enumerate(init.layers):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    arrays["provenance"] = np.frombuffer(
        json.dumps(init.provenance, sort_keys=True).encode(), dtype=np.uint8
    )
    arrays["config"] = np.array(
        [
            init.embedding.frequencies_per_input,
            init.embedding.input_arity,
            init.hidden_width,
            -1 if init.kind is None else {"gain": 0, "gamma": 1}[init.kind.value],
        ],
        dtype=np.int64,
    )
    np.savez(path, **arrays)


def load_meta_init(path: str) -> MetaInit:
    import json

    with np.load(path) as archive:
        freqs, arity, width, kind_code = (int(v) for v in archive["config"])
        layers = [
            (archive[f"w{i}"].astype(np.float32), archive[f"b{i}"].astype(np.float32))
            for i in range(3)
        ]
        provenance = json.loads(bytes(archive["provenance"]).decode())
    kind = None if kind_code < 0 else (ResidualKind.GAIN, ResidualKind.GAMMA)[kind_code]
    return MetaInit(
        EmbeddingConfig(frequencies_per_input=freqs, input_arity=arity),
        width,
        kind,
        layers,
        provenance,
    )
