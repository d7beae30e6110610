"""Data ingestion, synthetic datasets and on-disk formats.

Matrix files are UTF-8 text: a header line ``rows cols`` followed by one line
per row of space-separated floats printed with 17 significant digits.
Manifests list one entry per line as ``path<TAB>id[<TAB>label]``; blank
lines and lines starting with ``#`` are ignored.
"""

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import InvalidInput, ParseError, ValidationError
from .grassmann import exp_map, from_basis, random_point, random_tangent


@dataclass
class ImageSet:
    frames: list
    id: str = ""
    label: Optional[int] = None

    def __post_init__(self):
        if len(self.frames) < 1:
            raise InvalidInput("an image set needs at least one frame")
        self.frames = [np.asarray(f, dtype=np.float64) for f in self.frames]
        shapes = {f.shape for f in self.frames}
        if len(shapes) != 1:
            raise InvalidInput(f"frames differ in shape: {sorted(shapes)}")


@dataclass
class ManifestEntry:
    path: str
    id: str
    label: Optional[int] = None


@dataclass
class DatasetManifest:
    entries: list
    root: str = "."

    def __post_init__(self):
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            dup = next(p for p in paths if paths.count(p) > 1)
            raise ValidationError(f"duplicate path in manifest: {dup}")
        labels = [e.label for e in self.entries if e.label is not None]
        if labels and set(labels) != set(range(max(labels) + 1)):
            raise ValidationError("labels must form a contiguous range starting at 0")

    @property
    def ids(self):
        return [e.id for e in self.entries]

    @property
    def labels(self):
        if any(e.label is None for e in self.entries):
            return None
        return np.array([e.label for e in self.entries], dtype=np.int64)

    def resolve(self, entry):
        return entry.path if os.path.isabs(entry.path) else os.path.join(self.root, entry.path)


@dataclass
class SynthSpec:
    R: int
    per_cluster: int
    d: int
    p: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.R < 1 or self.per_cluster < 1:
            raise InvalidInput("R and per_cluster must be at least 1")
        if not 1 <= self.p <= self.d:
            raise InvalidInput("need 1 <= p <= d")
        if self.noise_sigma < 0:
            raise InvalidInput("noise_sigma must be nonnegative")


def standardize(frame):
    frame = np.asarray(frame, dtype=np.float64)
    std = frame.std()
    centred = frame - frame.mean()
    return centred / std if std > 0 else centred


def image_set_to_point(s, p, normalize=False):
    """Grassmann point spanned by the top-`p` left singular vectors of the
    matrix whose columns are the vectorized frames."""
    frames = [standardize(f) if normalize else f for f in s.frames]
    G = np.column_stack([f.ravel() for f in frames])
    return from_basis(G, p)


def generate_synthetic(spec):
    """Clustered Grassmann points with ground-truth labels.

    Centres are random points; each member is the Exp map at its centre of a
    random unit horizontal direction scaled by ``|N(0, noise_sigma)|``.
    """
    rng = np.random.default_rng(spec.seed)
    points, labels = [], []
    for r in range(spec.R):
        centre = random_point(spec.d, spec.p, rng)
        for _ in range(spec.per_cluster):
            H = random_tangent(centre, rng)
            t = abs(rng.normal(0.0, spec.noise_sigma)) if spec.noise_sigma > 0 else 0.0
            points.append(exp_map(centre, t * H))
            labels.append(r)
    return points, np.array(labels, dtype=np.int64)


def write_matrix(path, A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidInput("only 2-D matrices can be written")
    lines = [f"{A.shape[0]} {A.shape[1]}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in A]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", line=1, path=path)
    head = lines[0].split()
    try:
        rows, cols = (int(v) for v in head)
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}, expected 'rows cols'", line=1, path=path) from None
    if rows < 1 or cols < 1:
        raise ParseError("dimensions must be positive", line=1, path=path)
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    out = np.empty((rows, cols))
    for r in range(rows):
        lineno = r + 2
        if r >= len(body):
            raise ParseError(f"expected {rows} rows, found {len(body)}", line=lineno, path=path)
        fields = body[r].split()
        if len(fields) != cols:
            raise ParseError(f"expected {cols} values, found {len(fields)}", line=lineno, path=path)
        try:
            out[r] = [float(v) for v in fields]
        except ValueError:
            raise ParseError("non-numeric value", line=lineno, path=path) from None
    if len(body) > rows:
        raise ParseError(f"expected {rows} rows, found {len(body)}", line=rows + 2, path=path)
    return out


def load_manifest(path):
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 3) or not fields[0] or not fields[1]:
                raise ParseError("expected 'path<TAB>id[<TAB>label]'", line=lineno, path=path)
            label = None
            if len(fields) == 3 and fields[2].strip():
                try:
                    label = int(fields[2])
                except ValueError:
                    raise ParseError(f"label {fields[2]!r} is not an integer", line=lineno, path=path) from None
            entries.append(ManifestEntry(fields[0], fields[1], label))
    return DatasetManifest(entries, root=os.path.dirname(os.path.abspath(path)))


def write_manifest(path, entries):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# path\tid\tlabel\n")
        for e in entries:
            tail = "" if e.label is None else f"\t{e.label}"
            fh.write(f"{e.path}\t{e.id}{tail}\n")


def load_points(manifest, p=None):
    """Read every manifest entry as a Grassmann point.

    A file holding a d x n matrix is turned into a point with `from_basis`;
    `p` defaults to the column count, i.e. the file already stores a basis.
    """
    points = []
    for e in manifest.entries:
        A = read_matrix(manifest.resolve(e))
        points.append(from_basis(A, p if p is not None else A.shape[1]))
    return points
