"""Reversible multi-layer obfuscation of image zones with sharable keys."""

from .engine import deobfuscate, obfuscate
from .faces import (
    EyePairFaceDetector,
    FaceDetector,
    FixtureFaceDetector,
    NullFaceDetector,
    detect_faces,
    iou,
)
from .keys import (
    ALG_CBC,
    ALG_PERMUTE,
    ALG_XOR,
    DEFAULT_PBKDF2_ITERATIONS,
    LayerSpec,
    MasterKey,
    ZoneKeyRecord,
    ZoneSpec,
    decode_record_token,
    derive_root,
    derive_zone_key,
    encode_record_token,
    prune,
)
from .wire import build_response, parse_request

__all__ = [
    "ALG_CBC",
    "ALG_PERMUTE",
    "ALG_XOR",
    "DEFAULT_PBKDF2_ITERATIONS",
    "EyePairFaceDetector",
    "FaceDetector",
    "FixtureFaceDetector",
    "LayerSpec",
    "MasterKey",
    "NullFaceDetector",
    "ZoneKeyRecord",
    "ZoneSpec",
    "build_response",
    "decode_record_token",
    "deobfuscate",
    "derive_root",
    "derive_zone_key",
    "detect_faces",
    "encode_record_token",
    "iou",
    "obfuscate",
    "parse_request",
    "prune",
]
