import os
from pathlib import Path

import pytest

import fontsynth

SKIP = ("cmex", "cmsy", "cmmi", "STIXNonUni", "STIXSiz", "Display", "KaTeX_AMS", "KaTeX_Caligraphic",
        "KaTeX_Script", "KaTeX_Size", "KaTeX_Math", "KaTeX_Fraktur")


def _font_dirs():
    raw = os.environ.get("FONTSYNTH_TEST_FONT_DIRS", "/usr/share/fonts/truetype/dejavu")
    return [Path(d) for d in raw.split(":") if d]


@pytest.fixture(scope="session")
def fonts():
    found = {}
    for d in _font_dirs():
        for path in sorted(d.rglob("*.ttf")):
            if path.stem in found or any(s in path.stem for s in SKIP):
                continue
            try:
                font = fontsynth.load_font(str(path))
            except fontsynth.FontsynthError:
                continue
            if font.covers("abcdefghijklmnopqrstuvwxyz"):
                found[path.stem] = font
    if len(found) < 2:
        pytest.skip("needs at least two Latin fonts")
    return [found[k] for k in sorted(found)]


@pytest.fixture(scope="session")
def data_dir():
    return Path(os.environ.get("FONTSYNTH_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))
