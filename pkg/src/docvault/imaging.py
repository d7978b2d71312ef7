"""8-bit RGB raster images and axis-aligned pixel rectangles.

The whole pipeline works on one pixel format: 3 channels, 8 bits each,
row-major.  Alpha and grayscale inputs are converted on ingest.  PNG is the
only carrier format because round trips must be byte-exact (lossy formats
would silently break zone restoration).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import InvalidInput, InvalidZone

CHANNELS = 3


@dataclass(frozen=True, order=True)
class Rect:
    """Pixel rectangle, inclusive start / exclusive end."""

    start_x: int
    start_y: int
    end_x: int
    end_y: int

    def __post_init__(self):
        if self.start_x >= self.end_x or self.start_y >= self.end_y:
            raise InvalidZone(f"degenerate rectangle {self.as_tuple()}")
        if self.start_x < 0 or self.start_y < 0:
            raise InvalidZone(f"negative coordinates {self.as_tuple()}")

    @property
    def width(self) -> int:
        return self.end_x - self.start_x

    @property
    def height(self) -> int:
        return self.end_y - self.start_y

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.start_x, self.start_y, self.end_x, self.end_y)

    def contains(self, other: "Rect") -> bool:
        return (
            self.start_x <= other.start_x
            and self.start_y <= other.start_y
            and self.end_x >= other.end_x
            and self.end_y >= other.end_y
        )

    def overlaps(self, other: "Rect") -> bool:
        return (
            self.start_x < other.end_x
            and other.start_x < self.end_x
            and self.start_y < other.end_y
            and other.start_y < self.end_y
        )

    def to_dict(self) -> dict:
        return {
            "start_x": self.start_x,
            "start_y": self.start_y,
            "end_x": self.end_x,
            "end_y": self.end_y,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Rect":
        return cls(int(d["start_x"]), int(d["start_y"]), int(d["end_x"]), int(d["end_y"]))


@dataclass(frozen=True)
class RasterImage:
    """Immutable RGB image; ``data`` is width*height*3 bytes, row-major."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidInput(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        expected = self.width * self.height * CHANNELS
        if len(self.data) != expected:
            raise InvalidInput(
                f"data length {len(self.data)} != width*height*3 = {expected}"
            )

    # -- constructors -------------------------------------------------

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        """Build from an HxWx3 uint8 array (or HxW grayscale, broadcast to RGB)."""
        a = np.asarray(arr)
        if a.ndim == 2:
            a = np.repeat(a[:, :, None], CHANNELS, axis=2)
        if a.ndim != 3 or a.shape[2] != CHANNELS:
            raise InvalidInput(f"expected HxWx3 array, got shape {a.shape}")
        a = np.ascontiguousarray(a, dtype=np.uint8)
        return cls(width=a.shape[1], height=a.shape[0], data=a.tobytes())

    @classmethod
    def from_png(cls, png_bytes: bytes) -> "RasterImage":
        try:
            with Image.open(io.BytesIO(png_bytes)) as im:
                rgb = im.convert("RGB")
                return cls.from_array(np.asarray(rgb))
        except InvalidInput:
            raise
        except Exception as exc:
            raise InvalidInput(f"not a decodable image: {exc}") from exc

    @classmethod
    def blank(cls, width: int, height: int, color=(255, 255, 255)) -> "RasterImage":
        arr = np.empty((height, width, CHANNELS), dtype=np.uint8)
        arr[:, :] = color
        return cls.from_array(arr)

    # -- views --------------------------------------------------------

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.data, dtype=np.uint8).reshape(
            self.height, self.width, CHANNELS
        )

    def to_png(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.to_array(), mode="RGB").save(buf, format="PNG")
        return buf.getvalue()

    def to_pil(self) -> Image.Image:
        return Image.fromarray(self.to_array(), mode="RGB")

    @property
    def bounds(self) -> Rect:
        return Rect(0, 0, self.width, self.height)

    def check_rect(self, rect: Rect) -> None:
        if not self.bounds.contains(rect):
            raise InvalidZone(
                f"rectangle {rect.as_tuple()} exceeds image bounds {self.width}x{self.height}"
            )

    # -- zone byte access ----------------------------------------------
    # Zone bytes are the rect's rows concatenated top to bottom, each row
    # being rect.width*3 bytes.  All zone transforms operate on this layout.

    def zone_bytes(self, rect: Rect) -> bytes:
        self.check_rect(rect)
        arr = self.to_array()
        return arr[rect.start_y : rect.end_y, rect.start_x : rect.end_x].tobytes()

    def with_zone(self, rect: Rect, zone: bytes) -> "RasterImage":
        """Return a copy with the rect's bytes replaced (length must match)."""
        self.check_rect(rect)
        if len(zone) != rect.area * CHANNELS:
            raise InvalidInput("zone byte length does not match rectangle area")
        arr = self.to_array().copy()
        block = np.frombuffer(zone, dtype=np.uint8).reshape(
            rect.height, rect.width, CHANNELS
        )
        arr[rect.start_y : rect.end_y, rect.start_x : rect.end_x] = block
        return RasterImage.from_array(arr)

    def with_zones(self, patches: list[tuple[Rect, bytes]]) -> "RasterImage":
        """Replace several disjoint rects in one copy."""
        arr = self.to_array().copy()
        for rect, zone in patches:
            self.check_rect(rect)
            if len(zone) != rect.area * CHANNELS:
                raise InvalidInput("zone byte length does not match rectangle area")
            arr[rect.start_y : rect.end_y, rect.start_x : rect.end_x] = np.frombuffer(
                zone, dtype=np.uint8
            ).reshape(rect.height, rect.width, CHANNELS)
        return RasterImage.from_array(arr)

    def resized(self, width: int, height: int) -> "RasterImage":
        if (width, height) == (self.width, self.height):
            return self
        im = self.to_pil().resize((width, height), Image.LANCZOS)
        return RasterImage.from_array(np.asarray(im))

    def scaled_to_width(self, width: int) -> "RasterImage":
        height = max(1, round(self.height * width / self.width))
        return self.resized(width, height)


def luma(image: RasterImage) -> np.ndarray:
    """ITU-R BT.601 grayscale as float64 (0..255), no rounding."""
    arr = image.to_array().astype(np.float64)
    return 0.299 * arr[:, :, 0] + 0.587 * arr[:, :, 1] + 0.114 * arr[:, :, 2]
