"""Sources of reference response data: Touchstone playback and synthetic rational systems."""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import TWO_PI, FrequencyGrid, SampleSet

_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
_FORMATS = ("RI", "MA", "DB")


class TouchstoneError(ValueError):
    pass


class OffGridError(KeyError):
    pass


# --------------------------------------------------------------------------- Touchstone


def _parse_option_line(line: str) -> tuple[float, str, float]:
    unit, fmt, ref = 1e9, "MA", 50.0
    tokens = line[1:].split()
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in _UNITS:
            unit = _UNITS[tok]
        elif tok in _FORMATS:
            fmt = tok
        elif tok == "S":
            pass
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise TouchstoneError("option line: 'R' without reference impedance")
            try:
                ref = float(tokens[i + 1])
            except ValueError as exc:
                raise TouchstoneError(f"option line: bad reference impedance {tokens[i + 1]!r}") from exc
            i += 1
        else:
            raise TouchstoneError(f"option line: unsupported token {tokens[i]!r}")
        i += 1
    return unit, fmt, ref


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    return mag * np.exp(1j * np.deg2rad(b))


def _port_count(path: Path) -> int:
    m = re.fullmatch(r"\.s(\d+)p", path.suffix.lower())
    if not m:
        raise TouchstoneError(f"cannot infer port count from extension {path.suffix!r}")
    return int(m.group(1))


def load_touchstone(path, n_ports: int | None = None) -> tuple[np.ndarray, SampleSet]:
    """Read a Touchstone 1.x ``.sNp`` file.

    Returns the frequencies in Hz and a ``SampleSet`` of ``n x n`` complex
    S-matrices at ``s = j*2*pi*f``. Two-port files use the S11 S21 S12 S22
    column order; all other port counts are row-major.
    """
    path = Path(path)
    n = n_ports or _port_count(path)
    option = None
    numbers: list[float] = []
    for raw in path.read_text().splitlines():
        line = raw.split("!", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            if option is None:
                option = _parse_option_line(line)
            continue
        try:
            numbers.extend(float(tok) for tok in line.split())
        except ValueError as exc:
            raise TouchstoneError(f"non-numeric data in line {raw!r}") from exc
    unit, fmt, _ = option or (1e9, "MA", 50.0)
    block = 1 + 2 * n * n
    if len(numbers) % block:
        raise TouchstoneError(
            f"truncated data: {len(numbers)} values is not a multiple of the {block}-value block"
        )
    data = np.asarray(numbers, dtype=float).reshape(-1, block)
    if data.shape[0] == 0:
        raise TouchstoneError("no data rows")
    freqs = data[:, 0] * unit
    if np.any(np.diff(freqs) <= 0):
        raise TouchstoneError("frequencies must be strictly ascending")
    vals = _to_complex(data[:, 1::2], data[:, 2::2], fmt).reshape(-1, n, n)
    if n == 2:
        vals = vals.transpose(0, 2, 1)
    return freqs, SampleSet(1j * TWO_PI * freqs, vals)


def write_touchstone(path, freqs_hz, values, fmt: str = "RI", ref: float = 50.0) -> None:
    """Write square responses in the same Touchstone subset ``load_touchstone`` reads."""
    path = Path(path)
    values = np.asarray(values, dtype=complex)
    n = values.shape[1]
    if fmt not in _FORMATS:
        raise TouchstoneError(f"unknown format {fmt!r}")
    lines = [f"# Hz S {fmt} R {ref:g}"]
    for f, mat in zip(freqs_hz, values):
        flat = (mat.T if n == 2 else mat).reshape(-1)
        if fmt == "RI":
            pairs = zip(flat.real, flat.imag)
        elif fmt == "MA":
            pairs = zip(np.abs(flat), np.rad2deg(np.angle(flat)))
        else:
            pairs = zip(20 * np.log10(np.abs(flat)), np.rad2deg(np.angle(flat)))
        nums = [f"{float(a)!r} {float(b)!r}" for a, b in pairs]
        lines.append(f"{float(f)!r} " + " ".join(nums))
    path.write_text("\n".join(lines) + "\n")


# --------------------------------------------------------------------------- synthetic systems


@dataclass(frozen=True)
class SyntheticRationalSystem:
    """Stable pole-residue system whose poles and residues are closed under conjugation."""

    poles: np.ndarray
    residues: np.ndarray  # (N, p, m)
    const: np.ndarray  # (p, m), zero when no constant term
    seed: int | None = None

    @property
    def order(self) -> int:
        return self.poles.size

    @property
    def shape(self) -> tuple[int, int]:
        return self.const.shape

    def evaluate(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        return np.einsum("ln,nij->lij", 1.0 / (s[:, None] - self.poles), self.residues) + self.const

    def to_manifest(self) -> dict:
        return {
            "kind": "synthetic-rational",
            "seed": self.seed,
            "poles": _pack(self.poles),
            "residues": _pack(self.residues),
            "const": _pack(self.const),
        }

    @classmethod
    def from_manifest(cls, data: dict) -> SyntheticRationalSystem:
        return cls(
            poles=_unpack(data["poles"]),
            residues=_unpack(data["residues"]),
            const=_unpack(data["const"]),
            seed=data.get("seed"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_manifest(), indent=1))

    @classmethod
    def load(cls, path) -> SyntheticRationalSystem:
        return cls.from_manifest(json.loads(Path(path).read_text()))


def _pack(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"shape": list(a.shape), "re": a.real.ravel().tolist(), "im": a.imag.ravel().tolist()}


def _unpack(d: dict) -> np.ndarray:
    re_ = np.asarray(d["re"], dtype=float)
    im_ = np.asarray(d["im"], dtype=float)
    return (re_ + 1j * im_).reshape(d["shape"])


def make_synthetic(
    seed: int,
    order: int,
    p: int = 1,
    m: int = 1,
    band: tuple[float, float] = (1e9, 10e9),
    *,
    damping: float = 0.01,
    jitter: float = 0.0,
    const: bool = False,
    peak_gain: float | None = 0.95,
) -> SyntheticRationalSystem:
    """Seeded stable rational system with resonances spread over ``band`` (Hz).

    Conjugate pole pairs sit at the centres of ``order // 2`` equal sub-bands
    (``jitter`` shifts them by up to that fraction of the sub-band width), all
    with real part ``-damping * (w_max - w_min)``. An odd order adds one real
    pole at ``-(band centre)/100``. Residue entries are uniform on [-1, 1] in
    real and imaginary part. With ``peak_gain`` set, the response is scaled so
    that the largest spectral norm over a dense sweep of ``[0, 2 f_max]``
    equals ``peak_gain``.
    """
    if order < 1 or p < 1 or m < 1:
        raise ValueError("order, p and m must be positive")
    f_lo, f_hi = band
    if not 0 <= f_lo < f_hi:
        raise ValueError(f"bad band {band}")
    rng = np.random.default_rng(seed)
    w_lo, w_hi = TWO_PI * f_lo, TWO_PI * f_hi
    n_pairs = order // 2
    width = (w_hi - w_lo) / max(n_pairs, 1)
    imag = w_lo + (np.arange(n_pairs) + 0.5) * width
    if jitter:
        imag = imag + rng.uniform(-jitter, jitter, n_pairs) * width
    upper = -damping * (w_hi - w_lo) + 1j * imag
    res_upper = rng.uniform(-1, 1, (n_pairs, p, m)) + 1j * rng.uniform(-1, 1, (n_pairs, p, m))
    poles = [upper, upper.conj()]
    residues = [res_upper, res_upper.conj()]
    if order % 2:
        poles.append(np.array([-(w_lo + w_hi) / 200.0 + 0j]))
        residues.append(rng.uniform(-1, 1, (1, p, m)).astype(complex))
    poles = np.concatenate(poles)
    # residues scale with the pole damping so peaks are O(1) irrespective of band
    residues = np.concatenate(residues) * (damping * (w_hi - w_lo))
    d = rng.uniform(-1, 1, (p, m)).astype(complex) if const else np.zeros((p, m), complex)
    system = SyntheticRationalSystem(poles, residues, d, seed)
    if peak_gain is not None:
        probe = 1j * TWO_PI * np.linspace(0.0, 2.0 * f_hi, 4001)
        peak = np.max(np.linalg.norm(system.evaluate(probe), ord=2, axis=(1, 2)))
        if peak > 0:
            g = peak_gain / peak
            system = SyntheticRationalSystem(poles, residues * g, d * g, seed)
    return system


@dataclass(frozen=True)
class DelayedCouplingSystem:
    """Rational system whose off-diagonal entries carry a transport delay ``exp(-s tau)``.

    Mimics the mutual coupling of physically separated antennas; the response
    is not rational, so Loewner matrices built from it stay full rank.
    """

    base: SyntheticRationalSystem
    delay: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.base.shape

    def evaluate(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=complex))
        vals = self.base.evaluate(s)
        p, m = vals.shape[1:]
        off = ~np.eye(p, m, dtype=bool)
        vals[:, off] *= np.exp(-s * self.delay)[:, None]
        return vals


# --------------------------------------------------------------------------- playback


class PlaybackOracle:
    """Answers response queries by exact lookup on a fine frequency grid.

    ``queries`` counts distinct grid points requested; repeat queries are free.
    """

    def __init__(self, grid: FrequencyGrid, values):
        values = np.asarray(values, dtype=complex)
        if values.ndim != 3 or values.shape[0] != len(grid):
            raise ValueError(f"values must have shape ({len(grid)}, p, m), got {values.shape}")
        values = values.copy()
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self._seen: set[int] = set()
        self._lock = threading.Lock()

    @classmethod
    def from_samples(cls, samples: SampleSet) -> PlaybackOracle:
        ordered = samples.sorted()
        return cls(FrequencyGrid(ordered.s), ordered.values)

    @classmethod
    def from_touchstone(cls, path) -> PlaybackOracle:
        freqs, samples = load_touchstone(path)
        return cls(FrequencyGrid.from_hz(freqs), samples.values)

    @classmethod
    def from_system(cls, system, grid: FrequencyGrid) -> PlaybackOracle:
        return cls(grid, system.evaluate(grid.points))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[1:]

    @property
    def queries(self) -> int:
        return len(self._seen)

    def reset(self) -> None:
        with self._lock:
            self._seen.clear()

    def query_index(self, index: int) -> np.ndarray:
        index = int(index)
        if not 0 <= index < len(self.grid):
            raise OffGridError(f"grid index {index} out of range")
        with self._lock:
            self._seen.add(index)
        return self.values[index]

    def query(self, s: complex) -> np.ndarray:
        try:
            index = self.grid.index_of(s)
        except KeyError as exc:
            raise OffGridError(f"{s!r} is not on the oracle grid") from exc
        return self.query_index(index)
