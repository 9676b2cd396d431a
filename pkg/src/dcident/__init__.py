"""Code-based zero-knowledge identification over double-circulant codes."""

from .errors import (CollisionWitness, DCIdentError, EncodingError, ExtractionError, KeyFormatError,
                     ParameterError, ProtocolError, WireError)
from .keys import PublicKey, SecretKey, keygen
from .params import P81, P100, P128, PRESETS, TOY, ParamSet, get_params
from .protocol import SessionConfig, identify
from .signature import sign, verify_signature

__version__ = "0.1.0"

__all__ = [
    "CollisionWitness", "DCIdentError", "EncodingError", "ExtractionError", "KeyFormatError",
    "ParameterError", "ProtocolError", "WireError", "PublicKey", "SecretKey", "keygen",
    "P81", "P100", "P128", "PRESETS", "TOY", "ParamSet", "get_params", "SessionConfig", "identify",
    "sign", "verify_signature",
]
