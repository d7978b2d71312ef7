"""Synthetic document corpus: three fixed layouts rendered with the glyph
font, plus seeded instance values and retained ground truth.

Layouts are drawn at native resolutions above 1800 px wide so the standard
degradation widths (1800/800/200) are true downscales.  Instance values are
rendered inside the declared field rectangles; labels and decorations are
part of the static layout and identical between the registered template and
every instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from ..facts.cnp import checksum_digit
from ..imaging import RasterImage, Rect
from .model import FieldSpec
from .ocrfont import stamp_text

FONT_UNIT = 5
TEXT_MARGIN = 10

_SURNAMES = ("POPESCU", "IONESCU", "MARIN", "STANCU", "DUMITRU", "GEORGESCU")
_GIVEN = ("ION", "MARIA", "ANDREI", "ELENA", "VASILE", "IOANA")
_STREETS = ("LUNGA", "MARE", "VERDE", "NORDULUI", "GARII", "PACII")


@dataclass(frozen=True)
class ValueField:
    spec: FieldSpec
    generate: Callable[[np.random.Generator], str]


@dataclass(frozen=True)
class DocumentLayout:
    name: str
    width: int
    height: int
    decorate: Callable[[np.ndarray], None]
    value_fields: tuple[ValueField, ...]

    @property
    def field_specs(self) -> tuple[FieldSpec, ...]:
        return tuple(v.spec for v in self.value_fields)

    def _base(self) -> np.ndarray:
        arr = np.full((self.height, self.width, 3), 255, dtype=np.uint8)
        self.decorate(arr)
        for vf in self.value_fields:
            r = vf.spec.rect
            label = vf.spec.name.upper().replace("_", "-")
            stamp_text(arr, r.start_x, max(0, r.start_y - 40), label, 4, color=(60, 60, 60))
        return arr

    def template_image(self) -> RasterImage:
        return RasterImage.from_array(self._base())

    def render_instance(
        self, rng: np.random.Generator, noise_sigma: float = 3.0
    ) -> tuple[RasterImage, dict[str, str]]:
        arr = self._base()
        values: dict[str, str] = {}
        for vf in self.value_fields:
            value = vf.generate(rng)
            values[vf.spec.name] = value
            r = vf.spec.rect
            stamp_text(arr, r.start_x + TEXT_MARGIN, r.start_y + TEXT_MARGIN, value, FONT_UNIT)
        if noise_sigma > 0:
            noise = rng.normal(0.0, noise_sigma, size=arr.shape)
            arr = np.clip(arr.astype(np.float64) + noise, 0, 255).astype(np.uint8)
        return RasterImage.from_array(arr), values


# -- value generators ---------------------------------------------------------


def make_cnp(rng: np.random.Generator) -> str:
    century = rng.choice(["1", "2", "5", "6"])
    year = rng.integers(0, 100)
    month = rng.integers(1, 13)
    day = rng.integers(1, 29)
    county = rng.integers(1, 47)
    seq = rng.integers(1, 1000)
    first12 = f"{century}{year:02d}{month:02d}{day:02d}{county:02d}{seq:03d}"
    return first12 + str(checksum_digit(first12))


def _series(rng) -> str:
    letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    return "".join(rng.choice(list(letters)) for _ in range(2))


def _number(rng) -> str:
    return f"{rng.integers(0, 1_000_000):06d}"


def _date(rng) -> str:
    return f"{rng.integers(1, 29):02d}.{rng.integers(1, 13):02d}.{rng.integers(1960, 2026)}"


def _date_range(rng) -> str:
    day, month = rng.integers(1, 29), rng.integers(1, 13)
    start_year = rng.integers(2015, 2025)
    return (
        f"{day:02d}.{month:02d}.{start_year}-{day:02d}.{month:02d}.{start_year + 10}"
    )


def _name(rng) -> str:
    return f"{rng.choice(_SURNAMES)}-{rng.choice(_GIVEN)}"


def _address(rng) -> str:
    return f"STR.{rng.choice(_STREETS)}-NR.{rng.integers(1, 200)}"


def _status(rng) -> str:
    return "STUDENT"


# -- decorations --------------------------------------------------------------


def _frame(arr, x0, y0, x1, y1, thickness, color=(0, 0, 0)):
    arr[y0 : y0 + thickness, x0:x1] = color
    arr[y1 - thickness : y1, x0:x1] = color
    arr[y0:y1, x0 : x0 + thickness] = color
    arr[y0:y1, x1 - thickness : x1] = color


def _filled(arr, x0, y0, x1, y1, color):
    arr[y0:y1, x0:x1] = color


def _decorate_id_card(arr: np.ndarray) -> None:
    _frame(arr, 10, 10, 2330, 1390, 8)
    _frame(arr, 30, 30, 2310, 1370, 2)
    _filled(arr, 60, 60, 2280, 150, (40, 70, 140))
    stamp_text(arr, 90, 75, "IDENTITY CARD", 8, color=(255, 255, 255))
    # photo frame
    _frame(arr, 80, 220, 600, 900, 6, (90, 90, 90))
    _filled(arr, 110, 260, 570, 860, (210, 215, 225))
    _filled(arr, 80, 960, 600, 1320, (235, 230, 210))
    _frame(arr, 80, 960, 600, 1320, 4, (120, 100, 60))


def _decorate_driving_license(arr: np.ndarray) -> None:
    _frame(arr, 14, 14, 1986, 1246, 12, (150, 40, 40))
    _filled(arr, 40, 40, 1960, 170, (190, 210, 190))
    stamp_text(arr, 70, 65, "DRIVING LICENSE", 9, color=(30, 60, 30))
    _frame(arr, 60, 220, 520, 800, 6, (90, 90, 90))
    for i in range(6):
        _filled(arr, 60 + i * 320, 1080, 280 + i * 320, 1200, (200, 190, 220))


def _decorate_student_card(arr: np.ndarray) -> None:
    _frame(arr, 12, 12, 2068, 1288, 6)
    _filled(arr, 12, 12, 2068, 200, (240, 200, 80))
    stamp_text(arr, 60, 60, "STUDENT CARD", 10, color=(30, 30, 30))
    _frame(arr, 1560, 260, 2020, 860, 6, (90, 90, 90))
    _filled(arr, 1590, 290, 1990, 830, (215, 225, 215))
    for i in range(4):
        _frame(arr, 100, 980 + i * 70, 1400, 1030 + i * 70, 2, (160, 160, 160))


def _vf(name, rect, sensitive, category, generate):
    return ValueField(FieldSpec(name, Rect(*rect), sensitive, category), generate)


def build_layouts() -> tuple[DocumentLayout, ...]:
    id_card = DocumentLayout(
        name="id_card",
        width=2340,
        height=1400,
        decorate=_decorate_id_card,
        value_fields=(
            _vf("cnp", (1427, 792, 2254, 924), True, "cnp", make_cnp),
            _vf("series", (700, 240, 900, 300), False, "series", _series),
            _vf("number", (980, 240, 1300, 300), False, "number", _number),
            _vf("name", (700, 400, 1500, 460), True, "name", _name),
            _vf("birthdate", (700, 560, 1100, 620), True, "date", _date),
            _vf("address", (700, 960, 1600, 1020), True, "address", _address),
            _vf("valability", (700, 1120, 1480, 1180), False, "date-range", _date_range),
        ),
    )
    driving = DocumentLayout(
        name="driving_license",
        width=2000,
        height=1260,
        decorate=_decorate_driving_license,
        value_fields=(
            _vf("name", (620, 250, 1420, 310), True, "name", _name),
            _vf("number", (620, 400, 940, 460), False, "number", _number),
            _vf("cnp", (620, 550, 1100, 610), True, "cnp", make_cnp),
            _vf("issue_date", (620, 700, 1020, 760), False, "date", _date),
            _vf("valability", (620, 850, 1400, 910), False, "date-range", _date_range),
        ),
    )
    student = DocumentLayout(
        name="student_card",
        width=2080,
        height=1300,
        decorate=_decorate_student_card,
        value_fields=(
            _vf("name", (120, 300, 920, 360), True, "name", _name),
            _vf("number", (120, 460, 440, 520), False, "number", _number),
            _vf("status", (120, 620, 560, 680), False, "name", _status),
            _vf("enrolled", (120, 780, 520, 840), False, "date", _date),
        ),
    )
    return (id_card, driving, student)


def generate_corpus(
    out_dir: str | Path,
    count: int = 20,
    seed: int = 7,
    noise_sigma: float = 3.0,
) -> dict:
    """Write template manifests, document PNGs and ground truth to disk.

    Returns the ground-truth mapping {filename: {template, fields}}.
    """
    out = Path(out_dir)
    (out / "templates").mkdir(parents=True, exist_ok=True)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    layouts = build_layouts()

    for layout in layouts:
        png = out / "templates" / f"{layout.name}.png"
        png.write_bytes(layout.template_image().to_png())
        manifest = {
            "name": layout.name,
            "pages": [
                {
                    "image": png.name,
                    "fields": [
                        {
                            "name": f.name,
                            "rect": f.rect.to_dict(),
                            "sensitive": f.sensitive,
                            "category": f.category,
                        }
                        for f in layout.field_specs
                    ],
                }
            ],
        }
        (out / "templates" / f"{layout.name}.json").write_text(
            json.dumps(manifest, indent=2)
        )

    truth: dict[str, dict] = {}
    for i in range(count):
        layout = layouts[i % len(layouts)]
        image, values = layout.render_instance(rng, noise_sigma=noise_sigma)
        filename = f"doc_{i:03d}.png"
        (out / "docs" / filename).write_bytes(image.to_png())
        truth[filename] = {"template": layout.name, "fields": values}
    (out / "ground_truth.json").write_text(json.dumps(truth, indent=2))
    return truth
