"""Exception types raised across the package."""


class GlyphStrokeError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class DecodeError(GlyphStrokeError):
    pass


class EmptyImage(GlyphStrokeError):
    pass


class EmptyForeground(GlyphStrokeError):
    """The glyph has no black pixels, so coverage ratios are undefined."""

    def __init__(self, message="empty foreground", source_id=None):
        if source_id:
            message = f"{message}: {source_id}"
        super().__init__(message)
        self.source_id = source_id


class DegenerateStroke(GlyphStrokeError):
    pass


class TooFewPoints(GlyphStrokeError):
    pass


class OriginNotBlack(GlyphStrokeError):
    pass


class PreconditionViolated(GlyphStrokeError):
    pass


class EmptyCorpus(GlyphStrokeError):
    pass


class EmptyStrokeSet(GlyphStrokeError):
    pass


class LengthMismatch(GlyphStrokeError):
    pass


class EmptyPool(GlyphStrokeError):
    pass


class TransportError(GlyphStrokeError):
    pass


class ProtocolError(GlyphStrokeError):
    pass
