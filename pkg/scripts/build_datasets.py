"""Regenerate the bundled spectral datasets under src/specbayes/data.

Development-time only: requires ``colour-science`` (0.4.x), which ships the
CIE tables, the BabelColor average checker, and the NPL / rawtoaces camera
measurements. The package itself never imports colour.

    python scripts/build_datasets.py
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

import colour

DATA = Path(__file__).resolve().parents[1] / "src" / "specbayes" / "data"
COLOUR_SOURCE = "colour-science {} (https://www.colour-science.org), BSD-3-Clause".format(
    colour.__version__
)

# Synthetic camera population: warped copies of a real camera response.
SYNTHETIC_SEED = 2013
SYNTHETIC_COUNT = 26
PEAK_SHIFT_STD_NM = 6.0
WIDTH_SCALE_RANGE = (0.88, 1.12)
CROSSTALK_MAX = 0.06


def slug(text: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")


def write_csv(path: Path, wavelengths, values) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["wavelength_nm,value"]
    for w, v in zip(wavelengths, values):
        lines.append(f"{float(w)!r},{float(v)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path.relative_to(DATA).as_posix()


def write_manifest(path: Path, **fields) -> None:
    manifest_dir = path.parent
    fields["files"] = [
        Path(f).relative_to(manifest_dir.relative_to(DATA)).as_posix()
        if manifest_dir != DATA
        else f
        for f in fields["files"]
    ]
    path.write_text(json.dumps(fields, indent=2) + "\n", encoding="utf-8")


def build_d65() -> None:
    sd = colour.SDS_ILLUMINANTS["D65"]
    f = write_csv(DATA / "illuminants" / "cie_d65.csv", sd.wavelengths, sd.values)
    write_manifest(
        DATA / "d65.json",
        name="CIE Standard Illuminant D65",
        role="illumination",
        source=f"CIE 015:2018 tabulation via {COLOUR_SOURCE}",
        license="CIE tables are freely reproducible; packaging BSD-3-Clause",
        files=[f],
        normalization={"wavelength_nm": 560.0, "value": 100.0},
    )


def build_daylight_mean() -> None:
    basis = colour.colorimetry.SDS_BASIS_FUNCTIONS_CIE_ILLUMINANT_D_SERIES
    sd = basis["S0"]
    f = write_csv(DATA / "daylight" / "judd_mean_daylight_s0.csv", sd.wavelengths, sd.values)
    write_manifest(
        DATA / "judd_daylight_mean.json",
        name="Mean daylight (CIE D-series S0, Judd et al. 1964)",
        role="illumination",
        source=f"Judd, MacAdam & Wyszecki (1964) mean component S0 as tabulated by CIE, via {COLOUR_SOURCE}",
        license="CIE tables are freely reproducible; packaging BSD-3-Clause",
        files=[f],
        notes="Signed basis functions S1 and S2 are not bundled: spectra are non-negative by contract.",
    )


def build_babelcolor() -> None:
    checker = colour.SDS_COLOURCHECKERS["BabelColor Average"]
    files, labels = [], []
    for n, (name, sd) in enumerate(checker.items(), start=1):
        files.append(
            write_csv(
                DATA / "reflectance" / "babelcolor_average" / f"{n:02d}_{slug(name)}.csv",
                sd.wavelengths,
                sd.values,
            )
        )
        labels.append(name)
    write_manifest(
        DATA / "babelcolor_average.json",
        name="BabelColor ColorChecker average (24 patches)",
        role="reflectance",
        source=f"BabelColor ColorChecker spectral data, average of 30 charts (Pascale 2006), via {COLOUR_SOURCE}",
        license="BabelColor data redistributed by colour-science under BSD-3-Clause",
        files=files,
        channel_labels=labels,
    )


def _camera_files(camera_slug: str, wavelengths, channels) -> list[str]:
    return [
        write_csv(DATA / "cameras" / camera_slug / f"{label}.csv", wavelengths, values)
        for label, values in zip("rgb", channels)
    ]


def build_cameras() -> None:
    index = []

    nikon = colour.MSDS_CAMERA_SENSITIVITIES["Nikon 5100 (NPL)"]
    files = _camera_files("nikon_5100", nikon.wavelengths, nikon.values.T)
    write_manifest(
        DATA / "cameras" / "nikon_5100.json",
        name="Nikon 5100",
        role="sensitivity",
        source=f"Darrodi et al. (2015), NPL monochromator measurement, via {COLOUR_SOURCE}",
        license="BSD-3-Clause (colour-science distribution)",
        files=files,
        channel_labels=["R", "G", "B"],
    )
    index.append({"name": "Nikon 5100", "manifest": "cameras/nikon_5100.json", "synthetic": False})

    canon_path = (
        Path(colour.__file__).parent
        / "characterisation"
        / "datasets"
        / "rawtoaces"
        / "CANON_EOS_5DMark_II_RGB_Sensitivities.csv"
    )
    table = np.loadtxt(canon_path, delimiter=",", skiprows=1)
    wl = table[:, 0]
    canon = table[:, 1:4].T
    files = _camera_files("canon_eos_5d_mark_ii", wl, canon)
    write_manifest(
        DATA / "cameras" / "canon_eos_5d_mark_ii.json",
        name="Canon EOS 5D Mark II",
        role="sensitivity",
        source=f"AMPAS rawtoaces measurement, via {COLOUR_SOURCE}",
        license="Apache-2.0 (rawtoaces) / BSD-3-Clause (colour-science distribution)",
        files=files,
        channel_labels=["R", "G", "B"],
    )
    index.append(
        {"name": "Canon EOS 5D Mark II", "manifest": "cameras/canon_eos_5d_mark_ii.json", "synthetic": False}
    )

    rng = np.random.default_rng(SYNTHETIC_SEED)
    for m in range(SYNTHETIC_COUNT):
        warped = []
        for k in range(3):
            peak = wl[np.argmax(canon[k])]
            shift = rng.normal(0.0, PEAK_SHIFT_STD_NM)
            scale = rng.uniform(*WIDTH_SCALE_RANGE)
            src = peak + (wl - peak - shift) / scale
            warped.append(np.interp(src, wl, canon[k], left=0.0, right=0.0))
        mix = rng.uniform(0.0, CROSSTALK_MAX, (3, 3))
        np.fill_diagonal(mix, 1.0)
        channels = mix @ np.array(warped)
        channels /= channels.max(axis=1, keepdims=True)
        name = f"Synthetic camera {m + 1:02d}"
        cam_slug = slug(name)
        files = _camera_files(cam_slug, wl, channels)
        write_manifest(
            DATA / "cameras" / f"{cam_slug}.json",
            name=name,
            role="sensitivity",
            source=(
                "Synthetic: Canon EOS 5D Mark II response with per-channel peak shift "
                f"N(0, {PEAK_SHIFT_STD_NM} nm), width scale U{WIDTH_SCALE_RANGE}, crosstalk "
                f"U(0, {CROSSTALK_MAX}); scripts/build_datasets.py seed {SYNTHETIC_SEED}"
            ),
            license="CC0 (generated)",
            files=files,
            channel_labels=["R", "G", "B"],
        )
        index.append({"name": name, "manifest": f"cameras/{cam_slug}.json", "synthetic": True})

    (DATA / "camera_database.json").write_text(
        json.dumps(
            {
                "name": "Camera sensitivity database (28 cameras)",
                "notes": (
                    "Two measured cameras plus 26 synthetic members standing in for a "
                    "28-camera measured database that is not redistributable here."
                ),
                "cameras": index,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    build_d65()
    build_daylight_mean()
    build_babelcolor()
    build_cameras()
