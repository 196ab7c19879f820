"""Text formats: ``.hr`` structure documents and ``.geom`` geometries.

A ``.hr`` document is JSON laid out one table row per line::

    {
      "version": "hr/1",
      "size": 2,
      "zero": 0,
      "one": 1,
      "mul": [
        [0, 0],
        [0, 1]
      ],
      "add": [
        [[0], [1]],
        [[1], [0, 1]]
      ]
    }

``emit_structure`` always produces this layout, so parse followed by emit is
byte-identical on emitted files.  ``mul`` and ``one`` may be ``null`` for a
bare K-vector space.
"""

import json

from .bits import mask_of, members
from .core import HyperStructure
from .errors import HyperforgeError, StructureError
from .geometry import IncidenceGeometry

VERSION = "hr/1"


class StructureParseError(HyperforgeError, ValueError):
    def __init__(self, message, line=None, col=None):
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.col = col


def _row(values):
    return "[" + ", ".join(str(v) for v in values) + "]"


def emit_structure(R):
    lines = [
        "{",
        f'  "version": "{VERSION}",',
        f'  "size": {R.n},',
        f'  "zero": {R.zero},',
        f'  "one": {"null" if R.one is None else R.one},',
    ]
    if R.mul is None:
        lines.append('  "mul": null,')
    else:
        lines.append('  "mul": [')
        for i, row in enumerate(R.mul):
            lines.append("    " + _row(row) + ("," if i < R.n - 1 else ""))
        lines.append("  ],")
    lines.append('  "add": [')
    for i, row in enumerate(R.add):
        cells = ", ".join(_row(members(m)) for m in row)
        lines.append("    [" + cells + "]" + ("," if i < R.n - 1 else ""))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _key_line(text, key):
    for i, line in enumerate(text.splitlines(), start=1):
        if f'"{key}"' in line:
            return i
    return None


def _fail(text, message, key=None, row=None):
    line = _key_line(text, key) if key else None
    if line is not None and row is not None:
        line += 1 + row
    raise StructureParseError(message, line, 1 if line else None)


def parse_structure(data):
    """Parse a ``.hr`` document (str or bytes) into a raw HyperStructure."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureParseError(f"malformed document: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise StructureParseError("document must be a JSON object", 1, 1)
    for key in ("version", "size", "zero", "one", "mul", "add"):
        if key not in doc:
            _fail(text, f"missing field {key!r}")
    if doc["version"] != VERSION:
        _fail(text, f"unsupported version {doc['version']!r}", "version")
    n = doc["size"]
    if not isinstance(n, int) or n < 1:
        _fail(text, "size must be a positive integer", "size")
    for key in ("zero", "one"):
        v = doc[key]
        if v is None and key == "one":
            continue
        if not isinstance(v, int) or not 0 <= v < n:
            _fail(text, f"{key} must be an index below size", key)
    mul = doc["mul"]
    if mul is not None:
        if not isinstance(mul, list) or len(mul) != n:
            _fail(text, f"mul must have {n} rows", "mul")
        for i, row in enumerate(mul):
            if not isinstance(row, list) or len(row) != n:
                _fail(text, f"mul row {i} must have {n} entries", "mul", i)
            if any(not isinstance(v, int) or not 0 <= v < n for v in row):
                _fail(text, f"mul row {i} has an entry outside the carrier", "mul", i)
    add = doc["add"]
    if not isinstance(add, list) or len(add) != n:
        _fail(text, f"add must have {n} rows", "add")
    masks = []
    for i, row in enumerate(add):
        if not isinstance(row, list) or len(row) != n:
            _fail(text, f"add row {i} must have {n} entries", "add", i)
        out = []
        for cell in row:
            if not isinstance(cell, list) or not cell:
                _fail(text, f"add row {i} has an empty or non-list entry", "add", i)
            if any(not isinstance(v, int) or not 0 <= v < n for v in cell):
                _fail(text, f"add row {i} has an element outside the carrier", "add", i)
            if sorted(set(cell)) != cell:
                _fail(text, f"add row {i} has an unsorted or repeated entry", "add", i)
            out.append(mask_of(cell))
        masks.append(out)
    try:
        return HyperStructure(n, masks, mul, doc["zero"], doc["one"])
    except StructureError as exc:
        raise StructureParseError(str(exc)) from None


def read_structure(path):
    with open(path, "rb") as fh:
        return parse_structure(fh.read())


def write_structure(R, path):
    with open(path, "w") as fh:
        fh.write(emit_structure(R))


# -- geometries ----------------------------------------------------------------------


def emit_geometry(G):
    lines = ["points " + " ".join(str(p) for p in G.points)]
    lines.extend(" ".join(str(p) for p in L) for L in G.lines)
    return "\n".join(lines) + "\n"


def parse_geometry(data):
    """One line per row of integers; an optional ``points ...`` row first;
    ``#`` starts a comment."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    points = None
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        words = content.split()
        if words[0] == "points":
            if points is not None or lines:
                raise StructureParseError("the points row must come first", lineno, 1)
            words = words[1:]
            target = "points"
        else:
            target = "line"
        try:
            values = [int(w) for w in words]
        except ValueError:
            col = raw.find(next(w for w in words if not w.lstrip("-").isdigit())) + 1
            raise StructureParseError("expected integers", lineno, col) from None
        if target == "points":
            points = values
        else:
            lines.append(values)
    if points is None:
        points = sorted({p for L in lines for p in L})
    try:
        return IncidenceGeometry(points, lines)
    except ValueError as exc:
        raise StructureParseError(str(exc)) from None


def read_geometry(path):
    with open(path, "rb") as fh:
        return parse_geometry(fh.read())
