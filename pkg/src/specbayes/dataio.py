"""Reading and writing spectra, dataset manifests and observation files.

File formats
------------
Spectrum CSV
    UTF-8, ``\\n`` line endings, header ``wavelength_nm,value`` then one
    ``wavelength,value`` row per sample. Wavelengths must be strictly
    increasing and uniformly spaced.
Manifest JSON
    ``{"name", "role", "source", "license", "files": [...],
    "channel_labels": [...]}``; ``files`` are relative to the manifest.
Observations
    CSV with header ``i,j,k,value`` plus a JSON sidecar (same stem,
    ``.json``) recording extents, grid and noise settings.

The bundled datasets live in ``specbayes/data``; the ``SPECTRA_DATA_DIR``
environment variable points the loaders at another root.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import Observations, Role, Spectrum, SpectrumSet, WavelengthGrid
from .errors import (
    CSVFormatError,
    DatasetError,
    ExtrapolationRequired,
    NonUniformGrid,
    SpectralError,
)
from .forward import NoiseKind, NoiseModel

SPECTRUM_HEADER = "wavelength_nm,value"
OBSERVATION_HEADER = "i,j,k,value"
SPACING_RTOL = 1e-6
RANGE_ATOL = 1e-9

BUNDLED = {
    "d65": "d65.json",
    "babelcolor": "babelcolor_average.json",
    "nikon5100": "cameras/nikon_5100.json",
    "daylight-mean": "judd_daylight_mean.json",
    "camera-db": "camera_database.json",
}


def data_root() -> Path:
    override = os.environ.get("SPECTRA_DATA_DIR")
    if override:
        return Path(override)
    return Path(str(resources.files("specbayes") / "data"))


def resolve_manifest(name_or_path) -> Path:
    """A manifest path, or one of the short names in ``BUNDLED``."""
    path = Path(name_or_path)
    if path.exists():
        return path
    key = str(name_or_path).lower()
    if key in BUNDLED:
        return data_root() / BUNDLED[key]
    candidate = data_root() / path
    if candidate.exists():
        return candidate
    raise SpectralError(f"no manifest at {name_or_path!s} and no bundled dataset of that name")


def _fmt(value: float) -> str:
    # repr is the shortest string that round-trips exactly
    return repr(float(value))


# -- spectra -----------------------------------------------------------------

def parse_spectrum_csv(path, role: Role | str, label: str | None = None,
                       bounded: bool = True) -> Spectrum:
    """Read one spectrum on its native grid.

    ``bounded=False`` skips the role range checks, for reading back signed
    estimates.
    """
    path = Path(path)
    role = Role.parse(role)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpectralError(f"cannot read {path}: {exc.strerror or exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != SPECTRUM_HEADER:
        raise CSVFormatError(path, 1, f"expected header {SPECTRUM_HEADER!r}")
    wavelengths, values = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.strip().split(",")
        if len(fields) != 2:
            raise CSVFormatError(path, lineno, f"expected 2 fields, got {len(fields)}")
        try:
            w, v = float(fields[0]), float(fields[1])
        except ValueError:
            raise CSVFormatError(path, lineno, f"non-numeric field in {line!r}") from None
        if not (np.isfinite(w) and np.isfinite(v)):
            raise CSVFormatError(path, lineno, "non-finite value")
        if bounded and role is Role.REFLECTANCE and not 0 <= v <= 1:
            raise CSVFormatError(path, lineno, f"reflectance {v} outside [0, 1]")
        if bounded and v < 0:
            raise CSVFormatError(path, lineno, f"negative {role.value} value {v}")
        wavelengths.append(w)
        values.append(v)
    if len(wavelengths) < 2:
        raise CSVFormatError(path, len(lines), "need at least two samples")
    wl = np.array(wavelengths)
    steps = np.diff(wl)
    if np.any(steps <= 0):
        bad = int(np.argmax(steps <= 0)) + 3
        raise NonUniformGrid(f"{path}:{bad}: wavelengths are not strictly increasing")
    step = (wl[-1] - wl[0]) / (wl.size - 1)
    if np.abs(steps - step).max() > SPACING_RTOL * step:
        bad = int(np.argmax(np.abs(steps - step))) + 3
        raise NonUniformGrid(f"{path}:{bad}: wavelengths are not uniformly spaced")
    grid = WavelengthGrid(float(wl[0]), float(step), wl.size)
    return Spectrum(grid, values, role, label=label if label is not None else path.stem,
                    bounded=bounded)


def format_spectrum_csv(spectrum: Spectrum) -> str:
    rows = [SPECTRUM_HEADER]
    rows += [f"{_fmt(w)},{_fmt(v)}" for w, v in zip(spectrum.wavelengths, spectrum.values)]
    return "\n".join(rows) + "\n"


def write_spectrum_csv(spectrum: Spectrum, path) -> Path:
    path = Path(path)
    path.write_text(format_spectrum_csv(spectrum), encoding="utf-8", newline="\n")
    return path


def resample_to_grid(s: Spectrum, grid: WavelengthGrid) -> Spectrum:
    """Linear interpolation onto ``grid``; never extrapolates."""
    if grid == s.grid:
        return s
    lo, hi = s.grid.start_nm, s.grid.stop_nm
    if grid.start_nm < lo - RANGE_ATOL or grid.stop_nm > hi + RANGE_ATOL:
        raise ExtrapolationRequired(
            f"{s.label or 'spectrum'} covers {lo:g}-{hi:g} nm, target grid needs "
            f"{grid.start_nm:g}-{grid.stop_nm:g} nm"
        )
    target = np.clip(grid.wavelengths, lo, hi)
    values = np.interp(target, s.grid.wavelengths, s.values)
    return Spectrum(grid, values, s.role, s.label, s.bounded)


# -- manifests -----------------------------------------------------------------

@dataclass(frozen=True)
class DatasetManifest:
    name: str
    role: Role
    source: str
    license: str
    files: tuple[Path, ...]
    channel_labels: tuple[str, ...] = ()
    path: Path | None = None
    extra: dict = field(default_factory=dict, compare=False)


def load_manifest(manifest_path) -> DatasetManifest:
    path = resolve_manifest(manifest_path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SpectralError(f"cannot read manifest {path}: {exc}") from None
    missing = [k for k in ("name", "role", "source", "license", "files") if k not in raw]
    if missing:
        raise SpectralError(f"manifest {path} lacks field(s) {', '.join(missing)}")
    if not raw["files"]:
        raise SpectralError(f"manifest {path} lists no files")
    labels = tuple(raw.get("channel_labels") or ())
    if labels and len(labels) != len(raw["files"]):
        raise SpectralError(f"manifest {path}: {len(labels)} labels for {len(raw['files'])} files")
    known = {"name", "role", "source", "license", "files", "channel_labels"}
    return DatasetManifest(
        name=raw["name"],
        role=Role.parse(raw["role"]),
        source=raw["source"],
        license=raw["license"],
        files=tuple(path.parent / f for f in raw["files"]),
        channel_labels=labels,
        path=path,
        extra={k: v for k, v in raw.items() if k not in known},
    )


def load_dataset(manifest_path, grid: WavelengthGrid | None = None,
                 normalize: bool = False) -> SpectrumSet:
    """Every member of a manifest, resampled onto ``grid`` in manifest order.

    With ``normalize`` each member is divided by its peak on the working grid.
    All per-file failures are collected and raised together.
    """
    manifest = load_manifest(manifest_path)
    members, failures = [], {}
    for n, f in enumerate(manifest.files):
        label = manifest.channel_labels[n] if manifest.channel_labels else f.stem
        try:
            s = parse_spectrum_csv(f, manifest.role, label=label)
            if grid is not None:
                s = resample_to_grid(s, grid)
            if normalize:
                s = s.max_normalized()
            members.append(s)
        except SpectralError as exc:
            failures[str(f)] = exc
    if failures:
        raise DatasetError(manifest.path, failures)
    if grid is None and len({m.grid for m in members}) > 1:
        raise SpectralError(f"{manifest.path}: members are on different native grids; pass a grid")
    return SpectrumSet(members)


# -- observations --------------------------------------------------------------

def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def format_observations_csv(obs: Observations) -> str:
    rows = [OBSERVATION_HEADER]
    for (i, j, k), v in np.ndenumerate(obs.values):
        rows.append(f"{i},{j},{k},{_fmt(v)}")
    return "\n".join(rows) + "\n"


def observations_sidecar(obs: Observations, grid: WavelengthGrid, noise: NoiseModel | None,
                         **extra) -> dict:
    noise = noise or NoiseModel()
    meta = {
        "extents": list(obs.extents),
        "grid": {"start_nm": grid.start_nm, "step_nm": grid.step_nm, "count": grid.count},
        "noise": {"kind": noise.kind.value, "sigma": noise.sigma, "seed": int(noise.seed)},
    }
    meta.update(extra)
    return meta


def write_observations(path, obs: Observations, grid: WavelengthGrid,
                       noise: NoiseModel | None = None, **extra) -> tuple[Path, Path]:
    path = Path(path)
    side = sidecar_path(path)
    meta = observations_sidecar(obs, grid, noise, **extra)
    path.write_text(format_observations_csv(obs), encoding="utf-8", newline="\n")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path, side


def read_observations(path) -> tuple[Observations, dict]:
    """Observations tensor plus its sidecar metadata (with a parsed ``grid``)."""
    path = Path(path)
    side = sidecar_path(path)
    try:
        meta = json.loads(side.read_text(encoding="utf-8"))
        lines = path.read_text(encoding="utf-8").split("\n")
    except OSError as exc:
        raise SpectralError(f"cannot read observations {exc.filename}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpectralError(f"bad sidecar {side}: {exc}") from None
    extents = tuple(int(n) for n in meta["extents"])
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != OBSERVATION_HEADER:
        raise CSVFormatError(path, 1, f"expected header {OBSERVATION_HEADER!r}")
    values = np.full(extents, np.nan)
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.strip().split(",")
        if len(fields) != 4:
            raise CSVFormatError(path, lineno, f"expected 4 fields, got {len(fields)}")
        try:
            i, j, k = (int(f) for f in fields[:3])
            v = float(fields[3])
        except ValueError:
            raise CSVFormatError(path, lineno, f"malformed row {line!r}") from None
        if not (0 <= i < extents[0] and 0 <= j < extents[1] and 0 <= k < extents[2]):
            raise CSVFormatError(path, lineno, f"index ({i},{j},{k}) outside extents {extents}")
        values[i, j, k] = v
    if np.isnan(values).any():
        raise SpectralError(f"{path}: observation tensor is incomplete")
    g = meta["grid"]
    meta["grid"] = WavelengthGrid(float(g["start_nm"]), float(g["step_nm"]), int(g["count"]))
    n = meta.get("noise", {})
    meta["noise"] = NoiseModel(NoiseKind(n.get("kind", "none")), float(n.get("sigma", 0.0)),
                               int(n.get("seed", 0)))
    return Observations(values), meta


def format_matrix_csv(matrix, wavelengths=None) -> str:
    matrix = np.asarray(matrix, dtype=float)
    rows = []
    if wavelengths is not None:
        rows.append(",".join(["wavelength_nm"] + [_fmt(w) for w in wavelengths]))
    for n, row in enumerate(matrix):
        cells = [_fmt(v) for v in row]
        if wavelengths is not None:
            cells.insert(0, _fmt(wavelengths[n]))
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


# -- bundled datasets ----------------------------------------------------------

@dataclass(frozen=True)
class CameraEntry:
    name: str
    manifest: Path
    synthetic: bool


def camera_database(index_path=None) -> list[CameraEntry]:
    path = resolve_manifest(index_path or "camera-db")
    raw = json.loads(path.read_text(encoding="utf-8"))
    return [CameraEntry(c["name"], path.parent / c["manifest"], bool(c.get("synthetic", False)))
            for c in raw["cameras"]]


def load_camera_database(grid: WavelengthGrid, exclude: Sequence[str] = (),
                         index_path=None) -> tuple[list[str], list[SpectrumSet]]:
    """Camera sensitivity sets on ``grid``, each channel max-normalized."""
    excluded = {e.lower() for e in exclude}
    names, sets = [], []
    for entry in camera_database(index_path):
        if entry.name.lower() in excluded:
            continue
        names.append(entry.name)
        sets.append(load_dataset(entry.manifest, grid, normalize=True))
    if not sets:
        raise SpectralError("camera database is empty after exclusions")
    return names, sets


def load_prior_library(grid: WavelengthGrid, exclude: Sequence[str] = ("Nikon 5100",),
                       num_components: int = 2, normalize: bool = True):
    """Daylight mean and camera statistics from the bundled data.

    By default the Nikon 5100, which the reference simulation uses as ground
    truth, is held out of the camera statistics. ``normalize`` max-normalizes
    the daylight mean on ``grid`` so it shares the scale of normalized
    illuminants.
    """
    from .priors import build_prior_library

    daylight = load_dataset("daylight-mean", grid, normalize=normalize)[0]
    names, cameras = load_camera_database(grid, exclude)
    return build_prior_library(daylight, cameras, num_components, names)
