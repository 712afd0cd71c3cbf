#!/usr/bin/env python3
"""Render the desk-scale glyph atlas from locally installed open-license fonts.

Output layout: <out>/<style>/<font>/<char>.png, one black-on-white cell per
character. A cell is tight horizontally and spans the font's full
ascent + descent vertically so glyphs keep their baseline when composited.
A manifest.json listing every glyph is written next to the style folders.

The generated atlas is committed under data/atlas; rerun only to rebuild it.
"""

import argparse
import glob
import json
import os
import string
import sys

from fontTools.ttLib import TTFont
from PIL import Image, ImageChops, ImageDraw, ImageFilter, ImageFont

CHARS = string.ascii_uppercase + string.ascii_lowercase + string.digits

# style -> [(font name, font file glob, transform)]
FONTS = {
    "Serif": [
        ("DejaVuSerif", "DejaVuSerif.ttf", None),
        ("ComputerModernRoman", "cmr10.ttf", None),
        ("KaTeXMain", "KaTeX_Main-Regular*.ttf", None),
        ("STIXGeneral", "STIXGeneral.ttf", None),
    ],
    "SansSerif": [
        ("DejaVuSans", "DejaVuSans.ttf", None),
        ("DejaVuSansBold", "DejaVuSans-Bold.ttf", None),
        ("ComputerModernSans", "cmss10.ttf", None),
        ("KaTeXSansSerif", "KaTeX_SansSerif-Regular*.ttf", None),
    ],
    "Hybrid": [
        ("DejaVuSansMono", "DejaVuSansMono.ttf", None),
        ("ComputerModernTypewriter", "cmtt10.ttf", None),
        ("KaTeXTypewriter", "KaTeX_Typewriter-Regular*.ttf", None),
    ],
    "Script": [
        ("KaTeXScript", "KaTeX_Script-Regular*.ttf", None),
        ("STIXGeneralItalic", "STIXGeneralItalic.ttf", None),
        ("DejaVuSerifItalic", "DejaVuSerif-Italic.ttf", None),
        ("KaTeXMainItalic", "KaTeX_Main-Italic*.ttf", None),
    ],
    "HistoricalScript": [
        ("KaTeXFraktur", "KaTeX_Fraktur-Regular*.ttf", None),
        ("KaTeXFrakturBold", "KaTeX_Fraktur-Bold*.ttf", None),
    ],
    "Fancy": [
        ("OutlineSans", "DejaVuSans-Bold.ttf", "outline"),
        ("OutlineSerif", "DejaVuSerif-Bold.ttf", "outline"),
        ("ShadowSans", "DejaVuSans-Bold.ttf", "shadow"),
    ],
}

DEFAULT_DIRS = [
    "/usr/share/fonts",
    "/usr/local/lib/python3.10/dist-packages/matplotlib/mpl-data/fonts/ttf",
    "/usr/local/lib/python3.10/dist-packages/marimo/_static/assets",
]


def find_font(pattern, dirs):
    for d in dirs:
        hits = sorted(glob.glob(os.path.join(d, "**", pattern), recursive=True))
        if hits:
            return hits[0]
    return None


def has_glyph(ttf, ch):
    cmap = ttf.getBestCmap() or {}
    return ord(ch) in cmap


def ink(mask):
    """Binary 'L' image, 255 = ink."""
    return mask.point(lambda v: 255 if v >= 128 else 0)


def outline(mask, width):
    eroded = mask.filter(ImageFilter.MinFilter(2 * width + 1))
    return ImageChops.subtract(mask, eroded)


def shadow(mask, offset, gap):
    shifted = ImageChops.offset(mask, offset, offset)
    halo = mask.filter(ImageFilter.MaxFilter(2 * gap + 1))
    return ImageChops.lighter(mask, ImageChops.subtract(shifted, halo))


def render_cell(font, ch, transform, pad):
    ascent, descent = font.getmetrics()
    height = ascent + descent + 2 * pad
    left, _, right, _ = font.getbbox(ch)
    width = right - left + 2 * pad + 8
    canvas = Image.new("L", (width, height), 0)
    ImageDraw.Draw(canvas).text((pad - left + 4, pad), ch, font=font, fill=255)
    mask = ink(canvas)
    if transform == "outline":
        mask = outline(mask, 3)
    elif transform == "shadow":
        mask = shadow(mask, 4, 1)
    box = mask.getbbox()
    if box is None:
        return None
    # keep full height, crop horizontally to ink
    mask = mask.crop((box[0], 0, box[2], height))
    return ImageChops.invert(mask)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--size", type=int, default=64, help="font size in px")
    ap.add_argument("--font-dir", action="append", default=[])
    args = ap.parse_args()
    dirs = args.font_dir or DEFAULT_DIRS

    manifest = []
    for style, fonts in FONTS.items():
        for name, pattern, transform in fonts:
            path = find_font(pattern, dirs)
            if path is None:
                print(f"missing font {pattern}", file=sys.stderr)
                sys.exit(2)
            ttf = TTFont(path)
            pad = 6 if transform else 0
            font = ImageFont.truetype(path, args.size)
            folder = os.path.join(args.out, style, name)
            os.makedirs(folder, exist_ok=True)
            count = 0
            for ch in CHARS:
                if not has_glyph(ttf, ch):
                    continue
                cell = render_cell(font, ch, transform, pad)
                if cell is None:
                    continue
                rel = os.path.join(style, name, ch + ".png")
                cell.save(os.path.join(args.out, rel), optimize=True)
                manifest.append({"style": style, "font": name, "char": ch, "path": rel})
                count += 1
            print(f"{style:16s} {name:26s} {count:3d} glyphs")

    with open(os.path.join(args.out, "manifest.json"), "w") as fh:
        json.dump({"glyphs": manifest}, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
