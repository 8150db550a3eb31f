class ImageError(Exception):
    """Base for raster-handling failures."""


class ImageDecodeError(ImageError):
    """File could not be decoded; message carries path and reason."""


class ImageShapeError(ImageError):
    """Dimensions/channels violate an operation's contract."""
