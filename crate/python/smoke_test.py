"""Smoke test for the pyhdr2l extension module.

Builds the extension with cargo when it is not importable, then exercises
the codec round trip, stream accounting, TMQI and the helper functions.
"""

import io
import os
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load_module():
    try:
        import pyhdr2l

        return pyhdr2l
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "hdr2l-py"], cwd=ROOT, check=True
    )
    built = os.path.join(ROOT, "target", "release", "libpyhdr2l.so")
    dest = tempfile.mkdtemp(prefix="pyhdr2l-")
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(built, os.path.join(dest, "pyhdr2l" + suffix))
    sys.path.insert(0, dest)
    import pyhdr2l

    return pyhdr2l


def main():
    h = load_module()

    assert h.half_decode(h.half_encode(1.0)) == 1.0
    assert h.half_encode(1e9) == 0x7BFF
    assert h.tone_mappers() == ["default", "reinhard-global", "reinhard-local", "drago"]

    corpus = h.synthetic_corpus(3, size=24, seed=11)
    assert [name for name, _ in corpus][0] == "synth-000-gradient"

    for name, img in corpus:
        for tmo in h.tone_mappers():
            for mode, refine in (("hp", 0), ("xt", 0), ("xt", 4)):
                stream = h.encode(img, mode=mode, tmo=tmo, q=80, refine=refine)
                assert h.decode(stream) == img, (name, tmo, mode, refine)

    img = corpus[0][1]
    stream = h.encode(img, mode="xt", tmo="drago", q=90, refine=4)
    sizes = h.measure(stream)
    parts = ("base", "refinement", "tables", "residual_payload", "overhead")
    assert sum(sizes[k] for k in parts) == sizes["total_bytes"] == len(stream)
    assert sizes["bpp"] > 0

    jpeg = h.extract_ldr(stream)
    assert jpeg[:2] == b"\xff\xd8"
    try:
        from PIL import Image

        with Image.open(io.BytesIO(jpeg)) as pic:
            assert pic.size == (img.width, img.height)
            assert pic.format == "JPEG"
    except ImportError:
        print("Pillow not installed; skipped external JPEG decode")

    score = h.tmqi(img, jpeg)
    assert 0.0 <= score["q"] <= 1.0 and len(score["per_scale_s"]) == 5

    b = h.boxstats([1, 2, 3, 4, 5])
    assert (b["q1"], b["median"], b["q3"]) == (1.5, 3.0, 4.5)

    again = h.HdrImage.from_pfm(img.to_pfm())
    assert again == img

    try:
        h.encode(img, mode="hp", refine=4)
    except h.Hdr2lError:
        pass
    else:
        raise AssertionError("HP with refinement must be rejected")

    try:
        h.decode(stream[:-1] + bytes([stream[-1] ^ 1]))
    except h.Hdr2lError:
        pass
    else:
        raise AssertionError("corrupted stream must be rejected")

    print("pyhdr2l smoke test passed")


if __name__ == "__main__":
    main()
