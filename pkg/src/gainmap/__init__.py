"""Embed HDR reconstruction metadata alongside SDR images.

Two codec families share one pipeline. The conventional path downsamples a
per-pixel residual map (multiplicative gain or exponential gamma), transform-
codes it, and ships the bitstream. The network path overfits a small
coordinate-plus-color network to the same residual per image and ships the
weights. Both payloads decode with nothing but the SDR image, and a
rate-distortion harness scores them on equal footing.
"""

from .baseline import (
    CodecConfig,
    CompressedResidual,
    ExternalCodecAdapter,
    decode_conventional,
    dequantize8,
    deserialize_compressed,
    encode_conventional,
    quantize8,
    resize_bicubic,
    resize_bicubic_to,
    serialize_compressed,
)
from .color import (
    ColorSpace,
    ImageBuffer,
    Primaries,
    Transfer,
    apply_transfer,
    convert_gamut,
    gamma24_decode,
    gamma24_encode,
    luma_coefficients,
    pq_decode,
    pq_encode,
    srgb_decode,
    srgb_encode,
)
from .errors import (
    CorruptStreamError,
    DomainError,
    GainmapError,
    MetadataError,
    NotEmbeddedError,
    PreconditionError,
    ShapeError,
    StateError,
    UnsupportedConversionError,
)
from .fileio import embed_payload, extract_payload, load_image, save_image
from .metrics import MetricReport, delta_e00, delta_e_ipt, psnr, report, ssim
from .mlp import (
    EmbeddingConfig,
    MetaInit,
    MlpModel,
    OutputMode,
    TrainConfig,
    build_features,
    embed,
    forward,
    init_model,
    load_meta_init,
    meta_initialize,
    predict_map,
    predict_residual,
    save_meta_init,
    serialize,
    deserialize,
    train,
)
from .pipeline import (
    METHODS,
    EncodeResult,
    EncodeSettings,
    decode_payload,
    encode_pair,
    sdr_to_working,
    snap_to_8bit,
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
from .sweep import RdPoint, RunManifest, SweepBudgets, run_rd_sweep, write_csv, write_svg
from .synth import CorpusSpec, ToneMapper, generate_noise_corpus, noise_field_linear, tone_map

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # color
    "ColorSpace",
    "ImageBuffer",
    "Primaries",
    "Transfer",
    "apply_transfer",
    "convert_gamut",
    "gamma24_decode",
    "gamma24_encode",
    "luma_coefficients",
    "pq_decode",
    "pq_encode",
    "srgb_decode",
    "srgb_encode",
    # residual
    "DEFAULT_EPSILON",
    "ResidualKind",
    "ResidualMap",
    "ResidualMetadata",
    "compute_gain",
    "compute_gamma",
    "denormalize_residual",
    "normalize_residual",
    "reconstruct",
    # baseline codec
    "CodecConfig",
    "CompressedResidual",
    "ExternalCodecAdapter",
    "decode_conventional",
    "dequantize8",
    "deserialize_compressed",
    "encode_conventional",
    "quantize8",
    "resize_bicubic",
    "resize_bicubic_to",
    "serialize_compressed",
    # network codec
    "EmbeddingConfig",
    "MetaInit",
    "MlpModel",
    "OutputMode",
    "TrainConfig",
    "build_features",
    "embed",
    "forward",
    "init_model",
    "load_meta_init",
    "meta_initialize",
    "predict_map",
    "predict_residual",
    "save_meta_init",
    "serialize",
    "deserialize",
    "train",
    # metrics
    "MetricReport",
    "delta_e00",
    "delta_e_ipt",
    "psnr",
    "report",
    "ssim",
    # synthesis
    "CorpusSpec",
    "ToneMapper",
    "generate_noise_corpus",
    "noise_field_linear",
    "tone_map",
    # file I/O
    "embed_payload",
    "extract_payload",
    "load_image",
    "save_image",
    # pipeline
    "METHODS",
    "EncodeResult",
    "EncodeSettings",
    "decode_payload",
    "encode_pair",
    "sdr_to_working",
    "snap_to_8bit",
    # sweep
    "RdPoint",
    "RunManifest",
    "SweepBudgets",
    "run_rd_sweep",
    "write_csv",
    "write_svg",
    # errors
    "GainmapError",
    "ShapeError",
    "DomainError",
    "UnsupportedConversionError",
    "PreconditionError",
    "StateError",
    "MetadataError",
    "CorruptStreamError",
    "NotEmbeddedError",
]
