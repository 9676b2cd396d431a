"""Exception hierarchy shared by every module of the package."""


class DCIdentError(Exception):
    """Base class for all package errors."""


class ParameterError(DCIdentError, ValueError):
    """An argument is outside its documented range or has the wrong size."""


class EncodingError(DCIdentError, ValueError):
    """A value cannot be encoded or a byte string cannot be decoded."""


class KeyFormatError(EncodingError):
    """A key file is truncated, carries a bad header, or fails validation."""


class WireError(EncodingError):
    """A framed message or pass payload is malformed.

    ``field`` names the part of the message that could not be read.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ProtocolError(DCIdentError):
    """A session was driven out of order or with inconsistent settings."""


class ExtractionError(DCIdentError):
    """Two transcripts do not form a valid extraction pair."""


class CollisionWitness(ExtractionError):
    """Two distinct preimages were found for the same commitment.

    Raised by the extractor when both transcripts verify but the secret they
    yield is inconsistent with the public key.
    """

    def __init__(self, digest, preimage_a, preimage_b):
        super().__init__("hash collision witness for digest %s" % digest.hex())
        self.digest = digest
        self.preimages = (preimage_a, preimage_b)
